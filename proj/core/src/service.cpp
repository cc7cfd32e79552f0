#include "traceview/service.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "traceview/diff.hpp"
#include "traceview/error.hpp"
#include "traceview/io.hpp"
#include "traceview/projection.hpp"
#include "traceview/scenario.hpp"
#include "traceview/text.hpp"
#include "traceview/viewpoint.hpp"

namespace traceview {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Raised by handlers for conditions that are not engine errors.
struct HttpError {
  int status;
  std::string reason;
  std::string message;
};

json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string etag(std::string_view tag) { return "\"" + std::string(tag) + "\""; }

// If-Match absent or "*" always passes.
void check_precondition(const httplib::Request& req, const std::string& current) {
  if (!req.has_header("If-Match")) return;
  std::string expected = req.get_header_value("If-Match");
  if (expected == "*") return;
  if (expected.size() >= 2 && expected.front() == '"' && expected.back() == '"') {
    expected = expected.substr(1, expected.size() - 2);
  }
  if (expected != current) {
    throw HttpError{409, "stale-write",
                    "precondition failed: resource is at '" + current + "', request expected '" + expected + "'"};
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    throw HttpError{400, "bad-request", "request body must be a JSON object"};
  }
  return body;
}

std::string required_string(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_string()) {
    throw HttpError{400, "bad-request", std::string("field \"") + key + "\" must be a string"};
  }
  return it->get<std::string>();
}

std::size_t required_index(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_number_integer() || it->get<std::int64_t>() < 1) {
    throw HttpError{400, "bad-request", std::string("field \"") + key + "\" must be a positive integer"};
  }
  return it->get<std::size_t>();
}

std::vector<std::string> string_array(const json& body, const char* key) {
  auto it = body.find(key);
  if (it == body.end() || !it->is_array()) {
    throw HttpError{400, "bad-request", std::string("field \"") + key + "\" must be an array of strings"};
  }
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string()) {
      throw HttpError{400, "bad-request", std::string("field \"") + key + "\" must be an array of strings"};
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

json assignment_json(const AssignmentKey& key, const std::string& value, const PreferenceSchema& schema) {
  const auto* def = schema.find(key.pref_id);
  return json{{"id", key.pref_id},
              {"scope", to_string(key.scope)},
              {"instance", key.instance},
              {"category", def ? json(def->category) : json(nullptr)},
              {"value", value}};
}

json state_json(const ApplicationState& state) {
  json relations = json::array();
  for (const auto& [name, rel] : state.relations()) {
    json columns = json::array();
    for (const auto& c : rel.columns) columns.push_back({{"name", c.name}, {"kind", to_string(c.kind)}});
    relations.push_back({{"name", name},
                         {"source", rel.source},
                         {"timeColumn", opt(rel.time_column)},
                         {"rows", rel.rows.size()},
                         {"columns", columns}});
  }
  json views = json::array();
  for (const auto& [id, v] : state.views()) {
    views.push_back({{"id", id},
                     {"relation", v.relation},
                     {"kind", to_string(v.kind)},
                     {"role", to_string(v.role)},
                     {"attributes", v.attributes},
                     {"currentNode", v.current_node},
                     {"geometry",
                      {{"x", v.geometry.x}, {"y", v.geometry.y}, {"width", v.geometry.width},
                       {"height", v.geometry.height}}},
                     {"periodStart", v.period_start},
                     {"periodEnd", v.period_end}});
  }
  json filters = json::array();
  for (const auto& [id, f] : state.filters()) {
    json entry{{"id", id}, {"view", f.view}, {"attribute", f.attribute}};
    if (const auto* range = std::get_if<NumericRange>(&f.criterion)) {
      entry["range"] = {{"lo", range->lo}, {"hi", range->hi}};
    } else {
      entry["values"] = std::get<std::vector<std::string>>(f.criterion);
    }
    filters.push_back(entry);
  }
  json assignments = json::array();
  for (const auto& [key, value] : state.assignments()) {
    assignments.push_back(assignment_json(key, value, state.schema()));
  }
  json period = nullptr;
  if (auto span = state.displayed_period()) {
    period = {{"start", format_date(span->first)}, {"end", format_date(span->last)}};
  }
  return json{{"relations", relations},
              {"views", views},
              {"filters", filters},
              {"assignments", assignments},
              {"displayedPeriod", period}};
}

json viewpoint_summary(const std::string& id, const Viewpoint& vp, const AreaList& areas) {
  json area_icon = nullptr;
  json area_name = nullptr;
  if (vp.content.area_id) {
    if (const auto* area = areas.find(*vp.content.area_id)) {
      area_icon = area->icon;
      area_name = area->name;
    }
  }
  json period = nullptr;
  if (vp.content.period) period = {{"start", vp.content.period->start}, {"end", vp.content.period->end}};
  return json{{"id", id},
              {"name", vp.file.name},
              {"image", opt(vp.file.image)},
              {"areaId", opt(vp.content.area_id)},
              {"areaName", area_name},
              {"areaIcon", area_icon},
              {"priority", to_string(vp.owner.priority)},
              {"attitude", to_string(vp.owner.attitude)},
              {"attitudeIcon", attitude_icon(vp.owner.attitude)},
              {"owner", vp.owner.name},
              {"savedAt", vp.file.saved_at},
              {"description", vp.content.description},
              {"period", period}};
}

json viewpoint_full(const std::string& id, const Viewpoint& vp, const PreferenceSchema& schema,
                    const AreaList& areas) {
  json out = viewpoint_summary(id, vp, areas);
  out["path"] = vp.file.path;
  json relations = json::array();
  for (const auto& r : vp.snapshot.relations) {
    relations.push_back({{"name", r.name}, {"source", r.source}, {"timeColumn", opt(r.time_column)}});
  }
  json views = json::array();
  for (const auto& v : vp.snapshot.views) {
    views.push_back({{"id", v.id}, {"relation", v.relation}, {"kind", to_string(v.kind)}, {"role", to_string(v.role)}});
  }
  json assignments = json::array();
  for (const auto& [key, value] : vp.snapshot.assignments) assignments.push_back(assignment_json(key, value, schema));
  out["relations"] = relations;
  out["views"] = views;
  out["assignments"] = assignments;
  return out;
}

json side_json(const std::optional<DeltaSide>& side) {
  if (!side) return nullptr;
  return json{{"kind", side->kind}, {"value", side->value}};
}

json diff_json(const DiffReport& report, const std::string& left_id, const std::string& right_id, std::size_t top) {
  json categories = json::array();
  for (const auto& cat : report.categories) {
    json deltas = json::array();
    for (const auto& d : cat.deltas) {
      deltas.push_back({{"id", d.key.pref_id},
                        {"scope", to_string(d.key.scope)},
                        {"instance", d.key.instance},
                        {"weight", d.weight.to_double()},
                        {"left", side_json(d.left)},
                        {"right", side_json(d.right)}});
    }
    categories.push_back({{"name", cat.category}, {"distance", cat.distance.to_double()}, {"deltas", deltas}});
  }
  json top_json = json::array();
  for (const auto& c : top_categories(report, top)) {
    top_json.push_back({{"name", c.category}, {"distance", c.distance.to_double()}});
  }
  return json{{"left", left_id},
              {"right", right_id},
              {"leftName", report.left_id},
              {"rightName", report.right_id},
              {"rawDistance", report.raw_distance.to_double()},
              {"maxDistance", report.max_distance.to_double()},
              {"normalizedPercent", report.normalized_percent},
              {"categories", categories},
              {"topCategories", top_json}};
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& reason, const std::string& message) {
  send_json(res, json{{"error", {{"status", status}, {"reason", reason}, {"message", message}}}}, status);
}

std::string slug(std::string_view name) {
  std::string out;
  for (unsigned char c : name) {
    if (std::isalnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (!out.empty() && out.back() != '-') {
      out.push_back('-');
    }
  }
  while (!out.empty() && out.back() == '-') out.pop_back();
  return out.empty() ? "scenario" : out;
}

}  // namespace

struct Service::Impl {
  Impl(Workspace ws, Clock c)
      : workspace(std::move(ws)),
        schema(workspace.load_schema()),
        areas(workspace.load_areas()),
        clock(std::move(c)),
        session(schema) {
    routes();
  }

  Workspace workspace;
  std::shared_ptr<const PreferenceSchema> schema;
  AreaList areas;
  Clock clock;
  httplib::Server server;

  std::mutex guard;  // session and every file write
  ApplicationState session;
  std::optional<std::string> session_scenario;
  std::optional<std::size_t> session_step;

  // Path of an existing file named by `id`, or 404.
  fs::path existing(const std::string& id, const char* what) const {
    fs::path path = workspace.resolve_id(id);
    if (!fs::is_regular_file(path)) throw HttpError{404, "not-found", std::string("unknown ") + what + " '" + id + "'"};
    return path;
  }

  Viewpoint viewpoint(const std::string& id) const { return load_viewpoint(existing(id, "viewpoint"), *schema, areas); }

  json scenario_json(const std::string& id, const Scenario& sc) const {
    json steps = json::array();
    auto entries = preview(sc, *schema, areas);
    for (std::size_t i = 0; i < sc.size(); ++i) {
      const auto& e = entries[i];
      json step{{"order", sc.steps[i].order},
                {"ref", sc.steps[i].ref},
                {"viewpointId", workspace.id_for(sc.resolve(i + 1))},
                {"broken", e.broken}};
      if (e.broken) {
        step["problem"] = e.problem;
      } else {
        step["name"] = e.name;
        step["image"] = opt(e.image);
        step["areaId"] = opt(e.area_id);
        step["areaIcon"] = opt(e.area_icon);
        step["priority"] = to_string(e.priority);
        step["attitude"] = to_string(e.attitude);
        step["attitudeIcon"] = attitude_icon(e.attitude);
        step["owner"] = e.owner;
        step["savedAt"] = e.saved_at;
        step["description"] = e.description;
      }
      steps.push_back(step);
    }
    return json{{"id", id}, {"name", sc.name}, {"steps", steps}};
  }

  std::string absolute_ref(const std::string& viewpoint_id) const {
    return existing(viewpoint_id, "viewpoint").generic_string();
  }

  json session_json() const {
    json out{{"scenario", opt(session_scenario)},
             {"step", session_step ? json(*session_step) : json(nullptr)},
             {"state", state_json(session)}};
    return out;
  }

  template <typename Handler>
  httplib::Server::Handler guarded(Handler handler) {
    return [this, handler](const httplib::Request& req, httplib::Response& res) {
      try {
        (this->*handler)(req, res);
      } catch (const HttpError& e) {
        send_error(res, e.status, e.reason, e.message);
      } catch (const StepError& e) {
        bool missing = !fs::exists(e.path());
        send_error(res, missing ? 404 : 400, missing ? "missing-viewpoint" : "broken-step", e.what());
      } catch (const NotFoundError& e) {
        send_error(res, 404, "not-found", e.what());
      } catch (const ValidationError& e) {
        send_error(res, 400, "validation", e.what());
      } catch (const ParseError& e) {
        send_error(res, 400, "parse", e.what());
      } catch (const IoError& e) {
        send_error(res, 500, "io", e.what());
      } catch (const json::exception& e) {
        send_error(res, 400, "bad-request", e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "internal", e.what());
      }
    };
  }

  void routes() {
    server.Get("/viewpoints", guarded(&Impl::list_viewpoints));
    server.Get(R"(/viewpoints/(.+))", guarded(&Impl::get_viewpoint));
    server.Put(R"(/viewpoints/(.+))", guarded(&Impl::put_viewpoint));
    server.Post("/diff", guarded(&Impl::post_diff));
    server.Post("/layout", guarded(&Impl::post_layout));
    server.Get("/scenarios", guarded(&Impl::list_scenarios));
    server.Post(R"(/scenarios/(.+)/goto)", guarded(&Impl::post_goto));
    server.Get(R"(/scenarios/(.+))", guarded(&Impl::get_scenario));
    server.Post("/scenarios", guarded(&Impl::post_scenario));
    server.Put(R"(/scenarios/(.+))", guarded(&Impl::put_scenario));
    server.Get("/session", guarded(&Impl::get_session));
  }

  void list_viewpoints(const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& id : workspace.list_ids(workspace.viewpoint_dir())) {
      try {
        out.push_back(viewpoint_summary(id, viewpoint(id), areas));
      } catch (const Error& e) {
        out.push_back({{"id", id}, {"broken", true}, {"problem", e.what()}});
      }
    }
    send_json(res, out);
  }

  void get_viewpoint(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    Viewpoint vp = viewpoint(id);
    res.set_header("ETag", etag(vp.file.saved_at));
    send_json(res, viewpoint_full(id, vp, *schema, areas));
  }

  void put_viewpoint(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    json body = parse_body(req);
    std::lock_guard lock(guard);
    const fs::path path = existing(id, "viewpoint");
    Viewpoint vp = load_viewpoint(path, *schema, areas);
    check_precondition(req, vp.file.saved_at);

    MetaChanges changes;
    auto text = [&](const char* key) -> std::optional<std::string> {
      if (!body.contains(key)) return std::nullopt;
      return body.at(key).get<std::string>();
    };
    auto nullable = [&](const char* key) -> std::optional<std::optional<std::string>> {
      if (!body.contains(key)) return std::nullopt;
      if (body.at(key).is_null()) return std::optional<std::string>{};
      return std::optional<std::string>{body.at(key).get<std::string>()};
    };
    changes.name = text("name");
    changes.description = text("description");
    changes.owner = text("owner");
    if (auto p = text("priority")) {
      changes.priority = parse_priority(*p);
      if (!changes.priority) throw ValidationError("unknown priority '" + *p + "'");
    }
    if (auto a = text("attitude")) {
      changes.attitude = parse_attitude(*a);
      if (!changes.attitude) throw ValidationError("unknown attitude '" + *a + "'");
    }
    changes.area_id = nullable("areaId");
    changes.image = nullable("image");

    Viewpoint saved = save_viewpoint(edit_metadata(vp, changes, areas), path, *schema, clock);
    res.set_header("ETag", etag(saved.file.saved_at));
    send_json(res, viewpoint_full(id, saved, *schema, areas));
  }

  void post_diff(const httplib::Request& req, httplib::Response& res) {
    json body = parse_body(req);
    const std::string left = required_string(body, "left");
    const std::string right = required_string(body, "right");
    std::size_t top = body.contains("top") ? required_index(body, "top") : 3;
    DiffReport report = diff(viewpoint(left), viewpoint(right), *schema);
    send_json(res, diff_json(report, left, right, top));
  }

  void post_layout(const httplib::Request& req, httplib::Response& res) {
    json body = parse_body(req);
    auto ids = string_array(body, "ids");
    if (ids.empty()) throw HttpError{400, "bad-request", "at least one viewpoint id is required"};
    EdgeLabel label = EdgeLabel::computed;
    if (body.contains("label")) {
      auto parsed = parse_edge_label(required_string(body, "label"));
      if (!parsed) throw HttpError{400, "bad-request", "label must be computed, layout or ratio"};
      label = *parsed;
    }
    std::vector<Viewpoint> vps;
    for (const auto& id : ids) vps.push_back(viewpoint(id));
    DistanceMatrix matrix = distance_matrix(vps, ids, *schema);
    Layout2D layout = mds_project(matrix);
    QualityMetrics metrics = quality(matrix, layout);
    send_json(res, json::parse(export_layout(layout, metrics, label)));
  }

  void list_scenarios(const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& id : workspace.list_ids(workspace.scenario_dir())) {
      try {
        Scenario sc = load_scenario(workspace.resolve_id(id));
        out.push_back({{"id", id}, {"name", sc.name}, {"steps", sc.size()}});
      } catch (const Error& e) {
        out.push_back({{"id", id}, {"broken", true}, {"problem", e.what()}});
      }
    }
    send_json(res, out);
  }

  void get_scenario(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    const fs::path path = existing(id, "scenario");
    std::string bytes = read_file(path);
    Scenario sc = scenario_from_xml(bytes);
    sc.path = path.generic_string();
    res.set_header("ETag", etag(fnv1a_hex(bytes)));
    send_json(res, scenario_json(id, sc));
  }

  void post_scenario(const httplib::Request& req, httplib::Response& res) {
    json body = parse_body(req);
    const std::string name = required_string(body, "name");
    std::vector<std::string> refs;
    for (const auto& id : string_array(body, "refs")) refs.push_back(absolute_ref(id));
    std::lock_guard lock(guard);
    std::string id = body.contains("id") ? required_string(body, "id")
                                         : workspace.id_for(workspace.scenario_dir() / (slug(name) + ".xml"));
    const fs::path path = workspace.resolve_id(id);
    if (fs::exists(path)) throw HttpError{409, "exists", "scenario '" + id + "' already exists"};
    Scenario saved = save_scenario(make_scenario(name, refs), path);
    res.set_header("ETag", etag(fnv1a_hex(read_file(path))));
    send_json(res, scenario_json(id, saved), 201);
  }

  void put_scenario(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    json body = parse_body(req);
    std::lock_guard lock(guard);
    const fs::path path = existing(id, "scenario");
    std::string bytes = read_file(path);
    check_precondition(req, fnv1a_hex(bytes));
    Scenario sc = scenario_from_xml(bytes);
    sc.path = path.generic_string();

    if (body.contains("steps")) {
      std::vector<std::string> refs;
      for (const auto& vid : string_array(body, "steps")) refs.push_back(absolute_ref(vid));
      Scenario replaced = make_scenario(sc.name, refs);
      replaced.path = sc.path;
      sc = std::move(replaced);
    } else if (body.contains("op")) {
      const std::string op = required_string(body, "op");
      if (op == "insert") {
        sc = insert_step(std::move(sc), required_index(body, "position"),
                         absolute_ref(required_string(body, "viewpoint")));
      } else if (op == "move") {
        sc = move_step(std::move(sc), required_index(body, "from"), required_index(body, "to"));
      } else if (op == "remove") {
        sc = remove_step(std::move(sc), required_index(body, "position"));
      } else {
        throw HttpError{400, "bad-request", "op must be insert, move or remove"};
      }
    } else if (!body.contains("name")) {
      throw HttpError{400, "bad-request", "expected \"steps\", \"op\" or \"name\""};
    }
    if (body.contains("name")) sc.name = required_string(body, "name");
    if (sc.name.empty()) throw ValidationError("a scenario needs a name");

    Scenario saved = save_scenario(std::move(sc), path);
    res.set_header("ETag", etag(fnv1a_hex(read_file(path))));
    send_json(res, scenario_json(id, saved));
  }

  void post_goto(const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    json body = parse_body(req);
    const std::size_t step = required_index(body, "step");
    Scenario sc = load_scenario(existing(id, "scenario"));
    std::lock_guard lock(guard);
    Playback playback(sc, session, areas);
    const Viewpoint& vp = playback.go_to(step);
    session_scenario = id;
    session_step = step;
    json out = session_json();
    out["viewpoint"] = {{"id", workspace.id_for(sc.resolve(step))}, {"name", vp.file.name}};
    send_json(res, out);
  }

  void get_session(const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(guard);
    send_json(res, session_json());
  }
};

Service::Service(Workspace workspace, Clock clock)
    : impl_(std::make_unique<Impl>(std::move(workspace), std::move(clock))) {}

Service::~Service() = default;

void Service::mount_static(const fs::path& dir) {
  if (!impl_->server.set_mount_point("/", dir.string())) {
    throw IoError("cannot serve static files from " + dir.string(), dir.string());
  }
}

int Service::bind(const std::string& host, int port) {
  if (port == 0) {
    int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind to " + host, host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw IoError("cannot bind to " + host + ":" + std::to_string(port), host);
  }
  return port;
}

void Service::run() { impl_->server.listen_after_bind(); }

void Service::stop() { impl_->server.stop(); }

}  // namespace traceview
