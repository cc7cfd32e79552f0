#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace traceview::xml {

// Minimal element tree. Comments and processing instructions are dropped;
// text is kept verbatim only for elements without child elements.
struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;

  const std::string* find_attribute(std::string_view key) const;
  /// Throws ValidationError naming this element when the attribute is absent.
  const std::string& attribute(std::string_view key) const;
  std::optional<std::string> optional_attribute(std::string_view key) const;
  /// Throws ValidationError when any attribute is not in `allowed`.
  void expect_only(std::initializer_list<std::string_view> allowed) const;
  const Element* child(std::string_view child_name) const;
  const Element& required_child(std::string_view child_name) const;
};

Element parse(std::string_view document);
Element parse_file(const std::filesystem::path& path);

/// Canonical writer: 2-space indentation, attributes in insertion order,
/// one element per line, text-bearing elements written inline.
class Writer {
 public:
  Writer();

  Writer& open(std::string_view name);
  Writer& attr(std::string_view key, std::string_view value);
  Writer& attr_if(bool present, std::string_view key, std::string_view value);
  /// Closes the start tag and writes `text` inline, then the end tag.
  Writer& text_element(std::string_view text);
  /// Closes an element opened with open(): self-closing when it has no body.
  Writer& close();

  std::string str() const;

 private:
  void finish_start_tag(bool has_children);

  std::string out_;
  struct Frame {
    std::string name;
    bool start_open;
    bool has_children;
  };
  std::vector<Frame> stack_;
};

std::string escape_attribute(std::string_view value);
std::string escape_text(std::string_view value);

}  // namespace traceview::xml
