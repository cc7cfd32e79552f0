#include "traceview/schema.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "traceview/error.hpp"
#include "traceview/io.hpp"
#include "traceview/text.hpp"
#include "traceview/xml.hpp"

namespace traceview {

std::string_view to_string(ScopeLevel level) {
  switch (level) {
    case ScopeLevel::application: return "application";
    case ScopeLevel::relation: return "relation";
    case ScopeLevel::view: return "view";
  }
  return "?";
}

std::optional<ScopeLevel> parse_scope_level(std::string_view text) {
  if (text == "application") return ScopeLevel::application;
  if (text == "relation") return ScopeLevel::relation;
  if (text == "view") return ScopeLevel::view;
  return std::nullopt;
}

std::string_view to_string(Origin origin) {
  return origin == Origin::implicit ? "implicit" : "explicit";
}

// ---------------------------------------------------------------------------
// Weight

std::optional<Weight> Weight::parse(std::string_view text) {
  auto dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() || whole.size() > 12 || frac.size() > 6) return std::nullopt;
  if (dot != std::string_view::npos && frac.empty()) return std::nullopt;
  auto all_digits = [](std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (!all_digits(whole) || !all_digits(frac)) return std::nullopt;
  std::int64_t micros = 0;
  for (char c : whole) micros = micros * 10 + (c - '0');
  micros *= kScale;
  std::int64_t unit = kScale / 10;
  for (char c : frac) {
    micros += (c - '0') * unit;
    unit /= 10;
  }
  return Weight(micros);
}

std::string Weight::to_string() const {
  std::string out = std::to_string(micros_ / kScale);
  auto frac = micros_ % kScale;
  if (frac != 0) {
    std::string digits = std::to_string(frac);
    digits.insert(0, 6 - digits.size(), '0');
    while (digits.back() == '0') digits.pop_back();
    out += '.';
    out += digits;
  }
  return out;
}

// ---------------------------------------------------------------------------
// ValueType

std::string ValueType::to_string() const {
  switch (kind) {
    case ValueKind::boolean: return "boolean";
    case ValueKind::integer: return "integer";
    case ValueKind::decimal: return "decimal";
    case ValueKind::string: return "string";
    case ValueKind::color: return "color";
    case ValueKind::attribute_list: return "attribute-list";
    case ValueKind::enumeration: {
      std::string out = "enum(";
      for (std::size_t i = 0; i < enum_values.size(); ++i) {
        if (i) out += '|';
        out += enum_values[i];
      }
      return out + ")";
    }
  }
  return "?";
}

std::optional<ValueType> ValueType::parse(std::string_view text) {
  if (text == "boolean") return ValueType{ValueKind::boolean, {}};
  if (text == "integer") return ValueType{ValueKind::integer, {}};
  if (text == "decimal") return ValueType{ValueKind::decimal, {}};
  if (text == "string") return ValueType{ValueKind::string, {}};
  if (text == "color") return ValueType{ValueKind::color, {}};
  if (text == "attribute-list") return ValueType{ValueKind::attribute_list, {}};
  if (text.starts_with("enum(") && text.ends_with(")")) {
    ValueType t{ValueKind::enumeration, {}};
    auto body = text.substr(5, text.size() - 6);
    if (body.empty()) return t;  // rejected by schema validation
    for (auto& v : split(body, '|')) {
      if (v.empty()) return std::nullopt;
      t.enum_values.push_back(std::move(v));
    }
    return t;
  }
  return std::nullopt;
}

namespace {

bool is_hex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

char lower(char c) { return (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c; }

}  // namespace

std::optional<std::string> ValueType::canonicalize(std::string_view raw) const {
  switch (kind) {
    case ValueKind::boolean:
      if (raw == "true" || raw == "false") return std::string(raw);
      return std::nullopt;
    case ValueKind::integer: {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
      if (raw.empty() || ec != std::errc{} || p != raw.data() + raw.size()) return std::nullopt;
      return std::to_string(v);
    }
    case ValueKind::decimal: {
      auto v = parse_decimal(raw);
      if (!v) return std::nullopt;
      return format_decimal(*v);
    }
    case ValueKind::string:
      if (!is_storable_text(raw)) return std::nullopt;
      return std::string(raw);
    case ValueKind::enumeration:
      if (std::find(enum_values.begin(), enum_values.end(), raw) == enum_values.end()) {
        return std::nullopt;
      }
      return std::string(raw);
    case ValueKind::color: {
      if (raw.empty() || raw[0] != '#') return std::nullopt;
      auto hex = raw.substr(1);
      if ((hex.size() != 3 && hex.size() != 6) || !std::all_of(hex.begin(), hex.end(), is_hex)) {
        return std::nullopt;
      }
      std::string out = "#";
      for (char c : hex) {
        out += lower(c);
        if (hex.size() == 3) out += lower(c);
      }
      return out;
    }
    case ValueKind::attribute_list: {
      if (raw.empty()) return std::string();
      if (!is_storable_text(raw)) return std::nullopt;
      auto items = split(raw, ',');
      std::set<std::string> seen;
      for (const auto& item : items) {
        if (item.empty() || !seen.insert(item).second) return std::nullopt;
        if (item.find_first_of("\t\r\n") != std::string::npos) return std::nullopt;
      }
      return std::string(raw);
    }
  }
  return std::nullopt;
}

bool PreferenceDefinition::applies_to(ScopeLevel level) const {
  return std::find(scopes.begin(), scopes.end(), level) != scopes.end();
}

// ---------------------------------------------------------------------------
// PreferenceSchema

namespace {

bool is_category_name(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
  });
}

bool is_preference_id(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' || c == '_';
  });
}

}  // namespace

PreferenceSchema::PreferenceSchema(std::vector<PreferenceCategory> categories,
                                   std::vector<PreferenceDefinition> preferences)
    : categories_(std::move(categories)), preferences_(std::move(preferences)) {
  std::sort(categories_.begin(), categories_.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  std::sort(preferences_.begin(), preferences_.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  std::set<std::string, std::less<>> names;
  for (const auto& c : categories_) {
    if (!is_category_name(c.name)) {
      throw ValidationError("category '" + c.name + "': name must match [a-z0-9-]+");
    }
    if (!names.insert(c.name).second) {
      throw ValidationError("category '" + c.name + "': duplicate name");
    }
  }
  std::set<std::string, std::less<>> used;
  for (std::size_t i = 0; i < preferences_.size(); ++i) {
    auto& p = preferences_[i];
    const std::string where = "preference '" + p.id + "': ";
    if (!is_preference_id(p.id)) throw ValidationError(where + "invalid id");
    if (!index_.emplace(p.id, i).second) throw ValidationError(where + "duplicate id");
    if (!names.contains(p.category)) {
      throw ValidationError(where + "unknown category '" + p.category + "'");
    }
    std::sort(p.scopes.begin(), p.scopes.end());
    p.scopes.erase(std::unique(p.scopes.begin(), p.scopes.end()), p.scopes.end());
    if (p.scopes.empty()) throw ValidationError(where + "empty scopes");
    if (p.type.kind == ValueKind::enumeration && p.type.enum_values.empty()) {
      throw ValidationError(where + "enum kind without values");
    }
    auto canonical = p.type.canonicalize(p.default_value);
    if (!canonical) {
      throw ValidationError(where + "default '" + p.default_value + "' is not a valid " +
                            p.type.to_string());
    }
    p.default_value = *canonical;
    used.insert(p.category);
  }
  for (const auto& c : categories_) {
    if (!used.contains(c.name)) {
      throw ValidationError("category '" + c.name + "': declares no preferences");
    }
  }
}

const PreferenceDefinition* PreferenceSchema::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &preferences_[it->second];
}

const PreferenceDefinition& PreferenceSchema::lookup(std::string_view id) const {
  if (const auto* d = find(id)) return *d;
  throw NotFoundError("unknown preference '" + std::string(id) + "'");
}

bool PreferenceSchema::applicable_at(std::string_view id, ScopeLevel level) const {
  return lookup(id).applies_to(level);
}

Weight PreferenceSchema::total_weight() const {
  Weight sum;
  for (const auto& p : preferences_) sum += p.weight;
  return sum;
}

// ---------------------------------------------------------------------------
// XML

PreferenceSchema load_schema(std::string_view document) {
  auto root = xml::parse(document);
  if (root.name != "preference-schema") {
    throw ValidationError("expected <preference-schema>, found <" + root.name + ">");
  }
  const auto& version = root.attribute("format-version");
  if (version != std::to_string(PreferenceSchema::kFormatVersion)) {
    throw ValidationError("<preference-schema>: unsupported format-version '" + version + "'");
  }

  std::vector<PreferenceCategory> categories;
  std::vector<PreferenceDefinition> preferences;
  for (const auto& e : root.children) {
    if (e.name == "category") {
      e.expect_only({"name", "display-name"});
      categories.push_back({e.attribute("name"), e.optional_attribute("display-name").value_or("")});
    } else if (e.name == "preference") {
      e.expect_only({"id", "category", "scopes", "kind", "weight", "default", "origin"});
      PreferenceDefinition d;
      d.id = e.attribute("id");
      const std::string where = "preference '" + d.id + "': ";
      d.category = e.attribute("category");
      for (const auto& s : split(e.attribute("scopes"), ',')) {
        auto level = parse_scope_level(s);
        if (!level) throw ValidationError(where + "unknown scope '" + s + "'");
        d.scopes.push_back(*level);
      }
      auto type = ValueType::parse(e.attribute("kind"));
      if (!type) throw ValidationError(where + "unknown kind '" + e.attribute("kind") + "'");
      d.type = std::move(*type);
      const auto& weight = e.attribute("weight");
      if (weight.starts_with('-')) throw ValidationError(where + "negative weight");
      auto w = Weight::parse(weight);
      if (!w) throw ValidationError(where + "weight '" + weight + "' is not a decimal with at most 6 fractional digits");
      d.weight = *w;
      d.default_value = e.attribute("default");
      const auto& origin = e.attribute("origin");
      if (origin == "explicit") {
        d.origin = Origin::explicit_;
      } else if (origin == "implicit") {
        d.origin = Origin::implicit;
      } else {
        throw ValidationError(where + "unknown origin '" + origin + "'");
      }
      preferences.push_back(std::move(d));
    } else {
      throw ValidationError("<preference-schema>: unexpected element <" + e.name + ">");
    }
  }
  return PreferenceSchema(std::move(categories), std::move(preferences));
}

PreferenceSchema load_schema_file(const std::filesystem::path& path) {
  try {
    return load_schema(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string schema_to_xml(const PreferenceSchema& schema) {
  xml::Writer w;
  w.open("preference-schema").attr("format-version", std::to_string(PreferenceSchema::kFormatVersion));
  for (const auto& c : schema.categories()) {
    w.open("category").attr("name", c.name).attr("display-name", c.display_name).close();
  }
  for (const auto& p : schema.preferences()) {
    std::string scopes;
    for (auto s : p.scopes) {
      if (!scopes.empty()) scopes += ',';
      scopes += to_string(s);
    }
    w.open("preference")
        .attr("id", p.id)
        .attr("category", p.category)
        .attr("scopes", scopes)
        .attr("kind", p.type.to_string())
        .attr("weight", p.weight.to_string())
        .attr("default", p.default_value)
        .attr("origin", to_string(p.origin))
        .close();
  }
  w.close();
  return w.str();
}

const PreferenceSchema& default_schema() {
  static const PreferenceSchema schema = load_schema(default_schema_document());
  return schema;
}

}  // namespace traceview
