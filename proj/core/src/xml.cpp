#include "traceview/xml.hpp"

#include <expat.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "traceview/error.hpp"

namespace traceview::xml {

const std::string* Element::find_attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return &v;
  }
  return nullptr;
}

const std::string& Element::attribute(std::string_view key) const {
  if (const auto* v = find_attribute(key)) return *v;
  throw ValidationError("<" + name + ">: missing attribute '" + std::string(key) + "'");
}

std::optional<std::string> Element::optional_attribute(std::string_view key) const {
  if (const auto* v = find_attribute(key)) return *v;
  return std::nullopt;
}

void Element::expect_only(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [k, v] : attributes) {
    bool known = false;
    for (auto a : allowed) known = known || a == k;
    if (!known) throw ValidationError("<" + name + ">: unexpected attribute '" + k + "'");
  }
}

const Element* Element::child(std::string_view child_name) const {
  for (const auto& c : children) {
    if (c.name == child_name) return &c;
  }
  return nullptr;
}

const Element& Element::required_child(std::string_view child_name) const {
  if (const auto* c = child(child_name)) return *c;
  throw ValidationError("<" + name + ">: missing child <" + std::string(child_name) + ">");
}

namespace {

struct BuildContext {
  std::vector<Element> stack;
  std::optional<Element> root;
  XML_Parser parser = nullptr;
  bool doctype = false;
};

void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto* ctx = static_cast<BuildContext*>(user);
  Element e;
  e.name = name;
  for (int i = 0; attrs[i] != nullptr; i += 2) {
    e.attributes.emplace_back(attrs[i], attrs[i + 1]);
  }
  ctx->stack.push_back(std::move(e));
}

void on_end(void* user, const XML_Char*) {
  auto* ctx = static_cast<BuildContext*>(user);
  Element e = std::move(ctx->stack.back());
  ctx->stack.pop_back();
  if (!e.children.empty()) e.text.clear();  // indentation between children
  if (ctx->stack.empty()) {
    ctx->root = std::move(e);
  } else {
    ctx->stack.back().children.push_back(std::move(e));
  }
}

// None of the formats use a DTD; refusing it rules out entity expansion.
void on_doctype(void* user, const XML_Char*, const XML_Char*, const XML_Char*, int) {
  auto* ctx = static_cast<BuildContext*>(user);
  ctx->doctype = true;
  XML_StopParser(ctx->parser, XML_FALSE);
}

void on_text(void* user, const XML_Char* s, int len) {
  auto* ctx = static_cast<BuildContext*>(user);
  if (!ctx->stack.empty()) ctx->stack.back().text.append(s, static_cast<std::size_t>(len));
}

}  // namespace

Element parse(std::string_view document) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser) throw ParseError("cannot allocate XML parser");
  BuildContext ctx;
  XML_SetUserData(parser.get(), &ctx);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  XML_SetStartDoctypeDeclHandler(parser.get(), on_doctype);
  ctx.parser = parser.get();
  if (XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE) ==
      XML_STATUS_ERROR) {
    if (ctx.doctype) throw ParseError("XML document type declarations are not accepted");
    std::ostringstream msg;
    msg << "XML parse error at line " << XML_GetCurrentLineNumber(parser.get()) << ": "
        << XML_ErrorString(XML_GetErrorCode(parser.get()));
    throw ParseError(msg.str());
  }
  if (!ctx.root) throw ParseError("XML document has no root element");
  return std::move(*ctx.root);
}

Element parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string(), path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

std::string escape_attribute(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      // Attribute-value normalisation would turn these into spaces.
      case '\n': out += "&#10;"; break;
      case '\r': out += "&#13;"; break;
      case '\t': out += "&#9;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string escape_text(std::string_view value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

Writer::Writer() { out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"; }

void Writer::finish_start_tag(bool has_children) {
  if (stack_.empty()) return;
  auto& top = stack_.back();
  if (top.start_open) {
    out_ += has_children ? ">\n" : ">";
    top.start_open = false;
  }
  top.has_children = top.has_children || has_children;
}

Writer& Writer::open(std::string_view name) {
  finish_start_tag(true);
  out_.append(stack_.size() * 2, ' ');
  out_ += '<';
  out_ += name;
  stack_.push_back({std::string(name), true, false});
  return *this;
}

Writer& Writer::attr(std::string_view key, std::string_view value) {
  out_ += ' ';
  out_ += key;
  out_ += "=\"";
  out_ += escape_attribute(value);
  out_ += '"';
  return *this;
}

Writer& Writer::attr_if(bool present, std::string_view key, std::string_view value) {
  if (present) attr(key, value);
  return *this;
}

Writer& Writer::text_element(std::string_view text) {
  auto frame = stack_.back();
  stack_.pop_back();
  if (text.empty()) {
    out_ += "/>\n";
  } else {
    out_ += '>';
    out_ += escape_text(text);
    out_ += "</" + frame.name + ">\n";
  }
  return *this;
}

Writer& Writer::close() {
  auto frame = stack_.back();
  stack_.pop_back();
  if (frame.start_open) {
    out_ += "/>\n";
  } else {
    out_.append(stack_.size() * 2, ' ');
    out_ += "</" + frame.name + ">\n";
  }
  return *this;
}

std::string Writer::str() const { return out_; }

}  // namespace traceview::xml
