#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "traceview/assignment.hpp"
#include "traceview/schema.hpp"
#include "traceview/time.hpp"

namespace traceview {

enum class ColumnKind { numeric, text, temporal };

std::string_view to_string(ColumnKind kind);

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::text;

  friend bool operator==(const Column&, const Column&) = default;
};

/// A loaded dataset. Rows hold the raw cell text.
struct Relation {
  std::string name;
  std::string source;
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;
  std::optional<std::string> time_column;

  const Column* find_column(std::string_view column) const;
  std::optional<std::size_t> column_index(std::string_view column) const;

  friend bool operator==(const Relation&, const Relation&) = default;
};

/// Reads a CSV file into a relation and infers column kinds: a column is
/// numeric when every cell parses as a decimal, temporal when every cell is
/// an ISO date, text otherwise. The time column, when named, must hold ISO
/// dates and is typed temporal even if its cells also read as numbers.
Relation read_relation(const std::filesystem::path& csv_path, std::string name,
                       std::optional<std::string> time_column);

enum class ViewKind { table, pie, treemap, temporal };
enum class ViewRole { master, detail };

std::string_view to_string(ViewKind kind);
std::string_view to_string(ViewRole role);
std::optional<ViewKind> parse_view_kind(std::string_view text);
std::optional<ViewRole> parse_view_role(std::string_view text);

struct WindowGeometry {
  int x = 0;
  int y = 0;
  int width = 800;
  int height = 600;

  std::string to_string() const;
  static std::optional<WindowGeometry> parse(std::string_view text);

  friend bool operator==(const WindowGeometry&, const WindowGeometry&) = default;
};

struct View {
  std::string id;
  std::string relation;
  ViewKind kind = ViewKind::table;
  ViewRole role = ViewRole::master;
  std::vector<std::string> attributes;
  std::string current_node = "root";  // "root" or a 0-based row index
  WindowGeometry geometry;
  std::string period_start;  // ISO date or empty
  std::string period_end;

  friend bool operator==(const View&, const View&) = default;
};

struct NumericRange {
  double lo = 0;
  double hi = 0;

  friend bool operator==(const NumericRange&, const NumericRange&) = default;
};

using FilterCriterion = std::variant<NumericRange, std::vector<std::string>>;

struct Filter {
  std::string id;
  std::string view;
  std::string attribute;
  FilterCriterion criterion;

  friend bool operator==(const Filter&, const Filter&) = default;
};

/// Canonical text of the filters attached to one view (sorted by id), as
/// stored in the view's filter.criteria preference.
std::string encode_filters(const std::vector<Filter>& filters);
std::vector<Filter> decode_filters(std::string_view view_id, std::string_view text);

struct RelationSource {
  std::string name;
  std::string source;
  std::optional<std::string> time_column;

  friend bool operator==(const RelationSource&, const RelationSource&) = default;
};

struct ViewSpec {
  std::string id;
  std::string relation;
  ViewKind kind = ViewKind::table;
  ViewRole role = ViewRole::master;

  friend bool operator==(const ViewSpec&, const ViewSpec&) = default;
};

/// Everything needed to rebuild a state: dataset sources, view roster and
/// the complete preference assignment set. Datasets are referenced, not
/// embedded.
struct Snapshot {
  std::vector<RelationSource> relations;  // sorted by name
  std::vector<ViewSpec> views;            // sorted by id
  AssignmentMap assignments;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

namespace action {

struct SetCurrentNode {
  std::string view;
  std::string node;
};

struct SetAttributes {
  std::string view;
  std::vector<std::string> attributes;
};

struct SetFilterRange {
  std::string view;
  std::string filter_id;
  std::string attribute;
  double lo = 0;
  double hi = 0;
};

struct MoveWindow {
  std::string view;
  WindowGeometry geometry;
};

}  // namespace action

using ExplorationAction = std::variant<action::SetCurrentNode, action::SetAttributes,
                                       action::SetFilterRange, action::MoveWindow>;

/// Headless stand-in for the visualization host. Structure (relations,
/// views, filters) and implicit preference assignments are kept in sync:
/// every implicit view preference mirrors a field of its View.
class ApplicationState {
 public:
  explicit ApplicationState(std::shared_ptr<const PreferenceSchema> schema);

  const PreferenceSchema& schema() const { return *schema_; }
  std::shared_ptr<const PreferenceSchema> schema_ptr() const { return schema_; }

  const std::map<std::string, Relation>& relations() const { return relations_; }
  const std::map<std::string, View>& views() const { return views_; }
  const std::map<std::string, Filter>& filters() const { return filters_; }
  const AssignmentMap& assignments() const { return assignments_; }

  std::optional<std::string> value(const AssignmentKey& key) const;

  /// Loads a CSV dataset under `name` (file stem when empty) and assigns
  /// relation-scope defaults. Throws IoError, ParseError, ValidationError.
  const Relation& load_dataset(const std::filesystem::path& csv_path, std::string name = {},
                               std::optional<std::string> time_column = std::nullopt);

  /// Opens a view over a loaded relation with view-scope defaults.
  const View& add_view(const ViewSpec& spec);

  /// Explicit assignment. Implicit view preferences go through the same
  /// path as exploration so the structure follows the value.
  void set_preference(const AssignmentKey& key, std::string_view value);

  /// Applies one exploration step. Either both the structure and the
  /// implicit assignment change, or neither does.
  void mutate(const ExplorationAction& action);

  Snapshot snapshot() const;

  /// Rebuilds this state from `snapshot`: datasets are re-read from their
  /// sources, schema defaults are laid down, then every assignment is
  /// applied. On failure this state is left untouched.
  void restore(const Snapshot& snapshot);

  /// Union of the periods shown by views over relations with a time column.
  std::optional<DateSpan> displayed_period() const;

  friend bool operator==(const ApplicationState& a, const ApplicationState& b) {
    return a.relations_ == b.relations_ && a.views_ == b.views_ && a.filters_ == b.filters_ &&
           a.assignments_ == b.assignments_;
  }

 private:
  void assign_defaults(ScopeLevel level, const std::string& instance);
  void apply_assignment(const AssignmentKey& key, std::string_view value, bool propagate);
  std::string checked_value(const AssignmentKey& key, std::string_view raw) const;
  View& view_for(const std::string& id);
  void put_filter(const Filter& filter);

  std::shared_ptr<const PreferenceSchema> schema_;
  std::map<std::string, Relation> relations_;
  std::map<std::string, View> views_;
  std::map<std::string, Filter> filters_;
  AssignmentMap assignments_;
};

namespace pref_ids {
inline constexpr std::string_view kCurrentNode = "view.current-node";
inline constexpr std::string_view kAttributes = "view.attributes";
inline constexpr std::string_view kWindowGeometry = "view.window-geometry";
inline constexpr std::string_view kPeriodStart = "timeline.period-start";
inline constexpr std::string_view kPeriodEnd = "timeline.period-end";
inline constexpr std::string_view kFilterCriteria = "filter.criteria";
}  // namespace pref_ids

}  // namespace traceview
