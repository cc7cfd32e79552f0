#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "traceview/areas.hpp"
#include "traceview/host_state.hpp"
#include "traceview/schema.hpp"
#include "traceview/viewpoint.hpp"

namespace traceview {

struct ScenarioStep {
  std::size_t order = 0;  // 1-based, contiguous
  std::string ref;        // viewpoint file, relative to the scenario directory or absolute

  friend bool operator==(const ScenarioStep&, const ScenarioStep&) = default;
};

/// An ordered, linear suggestion of viewpoints to visit. Steps may repeat.
struct Scenario {
  static constexpr int kFormatVersion = 1;

  std::string name;
  std::string path;
  std::vector<ScenarioStep> steps;

  std::size_t size() const { return steps.size(); }
  /// Absolute location of step `order`'s viewpoint.
  std::filesystem::path resolve(std::size_t order) const;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

Scenario create_scenario(std::string name);
/// Scenario from refs in the given order.
Scenario make_scenario(std::string name, const std::vector<std::string>& refs);

Scenario insert_step(Scenario sc, std::size_t position, std::string ref);
Scenario move_step(Scenario sc, std::size_t from, std::size_t to);
Scenario remove_step(Scenario sc, std::size_t position);

std::string scenario_to_xml(const Scenario& sc);
Scenario scenario_from_xml(std::string_view document);
/// Refs under the target directory or one of its siblings are rewritten
/// relative to it. Returns
/// the scenario as persisted.
Scenario save_scenario(Scenario sc, const std::filesystem::path& path);
/// Refs are not resolved.
Scenario load_scenario(const std::filesystem::path& path);

/// Cursor over a scenario bound to one application state. Each positioning
/// loads the step's viewpoint and applies it; on failure the cursor and the
/// state stay where they were.
class Playback {
 public:
  /// Viewpoints are validated against the state's schema.
  Playback(Scenario scenario, ApplicationState& state, const AreaList& areas);

  const Scenario& scenario() const { return scenario_; }
  /// 1-based position, nullopt before the first move.
  std::optional<std::size_t> position() const { return position_; }

  /// Throws StepError or ValidationError when `order` is out of range.
  const Viewpoint& go_to(std::size_t order);
  /// False at the end of the scenario; position unchanged.
  bool next();
  /// False at the start; position unchanged.
  bool prev();

 private:
  Scenario scenario_;
  ApplicationState& state_;
  const AreaList& areas_;
  std::optional<std::size_t> position_;
  Viewpoint current_;
};

struct PreviewEntry {
  std::size_t step = 0;
  std::string ref;
  bool broken = false;
  std::string problem;
  // Filled when not broken.
  std::string name;
  std::optional<std::string> image;
  std::optional<std::string> area_id;
  std::optional<std::string> area_icon;
  Attitude attitude = Attitude::neutral;
  Priority priority = Priority::interesting;
  std::string owner;
  std::string saved_at;
  std::string description;
};

/// Icon shown for an owner's attitude.
std::string_view attitude_icon(Attitude a);

/// Reads each step's metadata; unreadable refs are flagged, not fatal.
std::vector<PreviewEntry> preview(const Scenario& sc, const PreferenceSchema& schema,
                                  const AreaList& areas);

}  // namespace traceview
