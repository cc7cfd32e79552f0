#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace traceview {

enum class ScopeLevel { application, relation, view };

std::string_view to_string(ScopeLevel level);
std::optional<ScopeLevel> parse_scope_level(std::string_view text);

/// Non-negative fixed-point quantity with 1e-6 resolution. Weights and
/// distances use it so that sums are exact.
class Weight {
 public:
  static constexpr std::int64_t kScale = 1'000'000;

  constexpr Weight() = default;
  static constexpr Weight from_micros(std::int64_t micros) { return Weight(micros); }
  /// Parses a plain decimal with at most six fractional digits.
  static std::optional<Weight> parse(std::string_view text);

  constexpr std::int64_t micros() const { return micros_; }
  double to_double() const { return static_cast<double>(micros_) / kScale; }
  /// Up to six fractional digits, trailing zeros trimmed.
  std::string to_string() const;

  constexpr Weight& operator+=(Weight other) {
    micros_ += other.micros_;
    return *this;
  }
  friend constexpr Weight operator+(Weight a, Weight b) { return a += b; }
  friend constexpr auto operator<=>(Weight, Weight) = default;

 private:
  constexpr explicit Weight(std::int64_t micros) : micros_(micros) {}
  std::int64_t micros_ = 0;
};

struct PreferenceCategory {
  std::string name;
  std::string display_name;

  friend bool operator==(const PreferenceCategory&, const PreferenceCategory&) = default;
};

enum class ValueKind { boolean, integer, decimal, string, enumeration, color, attribute_list };

/// Kind plus the allowed values of an enumeration.
struct ValueType {
  ValueKind kind = ValueKind::string;
  std::vector<std::string> enum_values;

  /// Spelling used in files: "boolean", "enum(a|b)", "attribute-list", ...
  std::string to_string() const;
  static std::optional<ValueType> parse(std::string_view text);

  /// Canonical spelling of `raw` for this type, or nullopt when ill-typed.
  std::optional<std::string> canonicalize(std::string_view raw) const;

  friend bool operator==(const ValueType&, const ValueType&) = default;
};

enum class Origin { explicit_, implicit };

std::string_view to_string(Origin origin);

struct PreferenceDefinition {
  std::string id;
  std::string category;
  std::vector<ScopeLevel> scopes;  // sorted, unique, non-empty
  ValueType type;
  Weight weight;
  std::string default_value;  // canonical
  Origin origin = Origin::explicit_;

  bool applies_to(ScopeLevel level) const;

  friend bool operator==(const PreferenceDefinition&, const PreferenceDefinition&) = default;
};

/// Immutable after load. Categories and preferences are kept sorted by
/// name/id.
class PreferenceSchema {
 public:
  static constexpr int kFormatVersion = 1;

  PreferenceSchema() = default;
  /// Validates and sorts; throws ValidationError on the first offending item.
  PreferenceSchema(std::vector<PreferenceCategory> categories,
                   std::vector<PreferenceDefinition> preferences);

  const std::vector<PreferenceCategory>& categories() const { return categories_; }
  const std::vector<PreferenceDefinition>& preferences() const { return preferences_; }

  const PreferenceDefinition* find(std::string_view id) const;
  /// Throws NotFoundError.
  const PreferenceDefinition& lookup(std::string_view id) const;
  /// Throws NotFoundError for an unknown id.
  bool applicable_at(std::string_view id, ScopeLevel level) const;
  Weight total_weight() const;

  friend bool operator==(const PreferenceSchema& a, const PreferenceSchema& b) {
    return a.categories_ == b.categories_ && a.preferences_ == b.preferences_;
  }

 private:
  std::vector<PreferenceCategory> categories_;
  std::vector<PreferenceDefinition> preferences_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

PreferenceSchema load_schema(std::string_view document);
PreferenceSchema load_schema_file(const std::filesystem::path& path);
/// Canonical XML form of a schema.
std::string schema_to_xml(const PreferenceSchema& schema);

/// Text of the schema shipped with the library.
std::string_view default_schema_document();
const PreferenceSchema& default_schema();

}  // namespace traceview
