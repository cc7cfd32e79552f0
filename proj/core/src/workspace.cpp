#include "traceview/workspace.hpp"

#include <algorithm>
#include <cstdlib>

#include <json.hpp>

#include "traceview/error.hpp"
#include "traceview/io.hpp"
#include "traceview/viewpoint.hpp"

namespace traceview {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json default_config() {
  return json{{"formatVersion", 1},
              {"schema", "schema.xml"},
              {"areas", "areas.csv"},
              {"viewpoints", "viewpoints"},
              {"scenarios", "scenarios"}};
}

fs::path config_entry(const json& config, const char* key, const fs::path& root, const fs::path& file) {
  auto it = config.find(key);
  if (it == config.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw IoError(std::string("workspace configuration lacks \"") + key + "\"", file.string());
  }
  fs::path p(it->get<std::string>());
  return (p.is_absolute() ? p : root / p).lexically_normal();
}

void make_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message(), dir.string());
}

}  // namespace

fs::path Workspace::default_root() {
  if (const char* env = std::getenv("TRACEVIEW_WORKSPACE"); env && *env) return fs::path(env);
  return fs::current_path();
}

Workspace Workspace::init(const fs::path& root) {
  const fs::path abs = fs::absolute(root).lexically_normal();
  make_directory(abs);
  const fs::path config_path = abs / kConfigFile;
  if (!fs::exists(config_path)) write_file_atomic(config_path, default_config().dump(2) + "\n");
  Workspace ws = open(abs);
  make_directory(ws.viewpoint_dir_);
  make_directory(ws.scenario_dir_);
  if (!fs::exists(ws.schema_path_)) write_file_atomic(ws.schema_path_, default_schema_document());
  if (!fs::exists(ws.area_list_path_)) write_file_atomic(ws.area_list_path_, default_area_document());
  return ws;
}

Workspace Workspace::open(const fs::path& root) {
  const fs::path abs = fs::absolute(root).lexically_normal();
  const fs::path config_path = abs / kConfigFile;
  if (!fs::exists(config_path)) {
    throw IoError(abs.string() + " is not a traceview workspace (run `traceview init`)", config_path.string());
  }
  json config;
  try {
    config = json::parse(read_file(config_path));
  } catch (const json::exception& e) {
    throw IoError("unreadable workspace configuration " + config_path.string() + ": " + e.what(),
                  config_path.string());
  }
  if (!config.is_object() || config.value("formatVersion", 0) != 1) {
    throw IoError("unsupported workspace configuration " + config_path.string(), config_path.string());
  }
  Workspace ws;
  ws.root_ = abs;
  ws.schema_path_ = config_entry(config, "schema", abs, config_path);
  ws.area_list_path_ = config_entry(config, "areas", abs, config_path);
  ws.viewpoint_dir_ = config_entry(config, "viewpoints", abs, config_path);
  ws.scenario_dir_ = config_entry(config, "scenarios", abs, config_path);
  return ws;
}

std::shared_ptr<const PreferenceSchema> Workspace::load_schema() const {
  return std::make_shared<const PreferenceSchema>(load_schema_file(schema_path_));
}

AreaList Workspace::load_areas() const { return load_area_list(area_list_path_); }

ApplicationState Workspace::load_session(std::shared_ptr<const PreferenceSchema> schema) const {
  ApplicationState state(schema);
  const fs::path path = session_path();
  if (!fs::exists(path)) return state;
  Viewpoint vp = load_viewpoint(path, *schema, AreaList{});
  apply(vp, state);
  return state;
}

void Workspace::save_session(const ApplicationState& state) const {
  MetaDraft draft;
  draft.name = "session";
  Viewpoint vp = capture(state, draft);
  vp.file.path = session_path().generic_string();
  write_file_atomic(session_path(), viewpoint_to_xml(vp, state.schema()));
}

fs::path Workspace::resolve_id(std::string_view id) const {
  if (id.empty()) throw ValidationError("empty identifier");
  fs::path rel(std::string{id});
  if (rel.is_absolute() || rel.has_root_name()) {
    throw ValidationError("identifier '" + std::string(id) + "' must be workspace-relative");
  }
  for (const auto& part : rel) {
    if (part == "..") throw ValidationError("identifier '" + std::string(id) + "' leaves the workspace");
  }
  return (root_ / rel).lexically_normal();
}

std::string Workspace::id_for(const fs::path& path) const {
  const fs::path abs = fs::absolute(path).lexically_normal();
  const fs::path rel = abs.lexically_relative(root_);
  if (rel.empty() || *rel.begin() == "..") return abs.generic_string();
  return rel.generic_string();
}

std::vector<std::string> Workspace::list_ids(const fs::path& dir) const {
  std::vector<std::string> ids;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return ids;
  for (auto it = fs::recursive_directory_iterator(dir, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".xml") ids.push_back(id_for(it->path()));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace traceview
