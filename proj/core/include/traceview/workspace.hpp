#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "traceview/areas.hpp"
#include "traceview/host_state.hpp"
#include "traceview/schema.hpp"

namespace traceview {

/// A directory holding one active schema, an area list, viewpoints,
/// scenarios and the persisted CLI session.
class Workspace {
 public:
  static constexpr std::string_view kConfigFile = "traceview.json";
  static constexpr std::string_view kSessionFile = "session.xml";

  /// Creates the directories and writes the shipped schema and area list
  /// unless files are already there. Idempotent.
  static Workspace init(const std::filesystem::path& root);
  /// Reads the workspace configuration. Throws IoError when `root` is not
  /// a workspace.
  static Workspace open(const std::filesystem::path& root);

  /// --workspace value, else TRACEVIEW_WORKSPACE, else the current directory.
  static std::filesystem::path default_root();

  const std::filesystem::path& root() const { return root_; }
  const std::filesystem::path& schema_path() const { return schema_path_; }
  const std::filesystem::path& area_list_path() const { return area_list_path_; }
  const std::filesystem::path& viewpoint_dir() const { return viewpoint_dir_; }
  const std::filesystem::path& scenario_dir() const { return scenario_dir_; }
  std::filesystem::path session_path() const { return root_ / kSessionFile; }

  std::shared_ptr<const PreferenceSchema> load_schema() const;
  AreaList load_areas() const;

  /// The saved CLI session, or an empty state when none was saved.
  ApplicationState load_session(std::shared_ptr<const PreferenceSchema> schema) const;
  void save_session(const ApplicationState& state) const;

  /// Maps a workspace-relative id to an absolute path. Rejects absolute
  /// ids and ids that climb out of the workspace.
  std::filesystem::path resolve_id(std::string_view id) const;
  /// Workspace-relative id of `path`; the absolute path when it lies
  /// outside the workspace.
  std::string id_for(const std::filesystem::path& path) const;

  /// Workspace ids of every *.xml under `dir`, sorted.
  std::vector<std::string> list_ids(const std::filesystem::path& dir) const;

 private:
  std::filesystem::path root_;
  std::filesystem::path schema_path_;
  std::filesystem::path area_list_path_;
  std::filesystem::path viewpoint_dir_;
  std::filesystem::path scenario_dir_;
};

}  // namespace traceview
