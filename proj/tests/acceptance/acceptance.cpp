// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "generators.hpp"
#include "oracles.hpp"
#include "server.hpp"
#include "tour.hpp"
#include "traceview/cli.hpp"
#include "traceview/diff.hpp"
#include "traceview/error.hpp"
#include "traceview/io.hpp"
#include "traceview/projection.hpp"
#include "traceview/scenario.hpp"
#include "traceview/workspace.hpp"

using namespace traceview;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kSaved = "2012-05-01T10:00:00Z";
const Clock kPinned = fixed_clock(*parse_timestamp(kSaved));

struct Failure {
  std::string what;
};

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::shared_ptr<const PreferenceSchema> schema() {
  static auto s = std::make_shared<const PreferenceSchema>(default_schema());
  return s;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() / ("traceview-accept-" + tag + "-" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int failures = 0;

void criterion(const std::string& name, double limit_seconds, const std::function<std::string()>& body) {
  auto start = std::chrono::steady_clock::now();
  std::string detail;
  std::string problem;
  try {
    detail = body();
  } catch (const Failure& f) {
    problem = f.what;
  } catch (const std::exception& e) {
    problem = std::string("unexpected error: ") + e.what();
  }
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (problem.empty() && limit_seconds > 0 && seconds >= limit_seconds) {
    problem = "took " + std::to_string(seconds) + " s, limit " + std::to_string(limit_seconds) + " s";
  }
  char timing[32];
  std::snprintf(timing, sizeof timing, "%.2f s", seconds);
  if (problem.empty()) {
    std::cout << "PASS " << name << " (" << timing << (detail.empty() ? "" : "; " + detail) << ")\n";
  } else {
    ++failures;
    std::cout << "FAIL " << name << " (" << timing << "): " << problem << "\n";
  }
  std::cout.flush();
}

// ---------------------------------------------------------------------------

std::string xml_round_trip() {
  TempDir dir("xml");
  tvtest::Rng rng(1001);
  const auto& areas = default_area_list();
  for (int i = 0; i < 1000; ++i) {
    auto vp = tvtest::random_viewpoint(rng, *schema(), areas, "", tvtest::chance(rng, 0.5) ? 0.2 : 0.8);
    const fs::path path = dir.path / ("vp" + std::to_string(i) + ".xml");
    Viewpoint saved = save_viewpoint(vp, path, *schema(), kPinned);
    vp.file.path = path.generic_string();
    vp.file.saved_at = kSaved;
    require(saved == vp, "save changed more than path and saved-at for viewpoint " + std::to_string(i));
    Viewpoint loaded = load_viewpoint(path, *schema(), areas);
    require(loaded == vp, "load(save(vp)) differs for viewpoint " + std::to_string(i));
    const std::string first = read_file(path);
    save_viewpoint(loaded, path, *schema(), kPinned);
    require(read_file(path) == first, "re-serialization is not byte-identical for viewpoint " + std::to_string(i));
  }
  return "1000 viewpoints";
}

std::string state_restore() {
  tvtest::Rng rng(2002);
  std::size_t accepted = 0;
  for (int i = 0; i < 500; ++i) {
    ApplicationState s(schema());
    accepted += tvtest::explore_randomly(rng, s, 1 + tvtest::pick(rng, 50));
    MetaDraft draft;
    draft.name = "s" + std::to_string(i);
    draft.owner = "tester";
    Viewpoint vp = capture(s, draft);
    ApplicationState fresh(schema());
    apply(vp, fresh);
    require(fresh == s, "apply(capture(S)) differs from S in sequence " + std::to_string(i));
    require(fresh.snapshot() == s.snapshot(), "snapshot differs in sequence " + std::to_string(i));
  }
  return "500 sequences, " + std::to_string(accepted) + " accepted steps";
}

std::string metric_axioms() {
  tvtest::Rng rng(3003);
  const auto& s = *schema();
  const auto& areas = default_area_list();
  auto related = [&](const Viewpoint& base) {
    return tvtest::chance(rng, 0.7) ? tvtest::perturbed(rng, base, s, tvtest::pick(rng, 20))
                                    : tvtest::random_viewpoint(rng, s, areas, kSaved);
  };
  for (int i = 0; i < 10000; ++i) {
    auto a = tvtest::random_viewpoint(rng, s, areas, kSaved, 0.3);
    auto b = related(a);
    auto c = tvtest::chance(rng, 0.5) ? related(a) : related(b);
    const std::string at = " (triple " + std::to_string(i) + ")";
    auto aa = diff(a, a, s);
    require(aa.raw_distance.micros() == 0 && aa.normalized_percent == 0.0, "d(v,v) != 0" + at);
    auto ab = diff(a, b, s);
    auto ba = diff(b, a, s);
    auto bc = diff(b, c, s);
    auto ac = diff(a, c, s);
    require(ab.raw_distance == ba.raw_distance && ab.max_distance == ba.max_distance &&
                ab.normalized_percent == ba.normalized_percent,
            "asymmetric" + at);
    require(ac.raw_distance.micros() <= ab.raw_distance.micros() + bc.raw_distance.micros(),
            "triangle inequality violated" + at);
    for (const auto* r : {&ab, &bc, &ac}) {
      require(r->normalized_percent >= 0.0 && r->normalized_percent <= 100.0, "normalized out of range" + at);
    }

    // Fully disjoint pair over the same context: split a's keys in two.
    Viewpoint left = a;
    Viewpoint right = a;
    left.snapshot.assignments.clear();
    right.snapshot.assignments.clear();
    for (const auto& [key, value] : a.snapshot.assignments) {
      (tvtest::chance(rng, 0.5) ? left : right).snapshot.assignments[key] = value;
    }
    if (!left.snapshot.assignments.empty() || !right.snapshot.assignments.empty()) {
      require(diff(left, right, s).normalized_percent == 100.0, "disjoint pair not at 100" + at);
    }
  }
  return "10000 triples";
}

std::string top_categories_example() {
  // One relation with a time column, a pie and a temporal view, both masters.
  const auto csv = tvtest::fixture("ministries_budget.csv");
  auto base = [&] {
    ApplicationState s(schema());
    s.load_dataset(csv, "budget", "year");
    s.add_view({"pie", "budget", ViewKind::pie, ViewRole::master});
    s.add_view({"time", "budget", ViewKind::temporal, ViewRole::master});
    return s;
  };
  ApplicationState before = base();
  ApplicationState after = base();
  // data-displayed: current node 3 + attributes 4
  after.mutate(action::SetCurrentNode{"pie", "3"});
  after.mutate(action::SetAttributes{"pie", {"ministry", "budget"}});
  // ui-global-layout: panel arrangement 1.5 + window geometry 0.25
  after.set_preference(AssignmentKey::application("layout.panel-arrangement"), "grid");
  after.mutate(action::MoveWindow{"time", {40, 40, 1024, 300}});
  // timeline: period start 2 + period end 2
  after.set_preference(AssignmentKey::view(std::string(pref_ids::kPeriodStart), "time"), "2011-01-01");
  after.set_preference(AssignmentKey::view(std::string(pref_ids::kPeriodEnd), "time"), "2011-12-31");

  MetaDraft d;
  d.owner = "tester";
  d.name = "before";
  Viewpoint v1 = capture(before, d);
  d.name = "after";
  Viewpoint v2 = capture(after, d);
  DiffReport report = diff(v1, v2, *schema());

  // Golden order under the shipped weights.
  const std::vector<std::string> golden{"data-displayed", "timeline", "ui-global-layout"};
  auto top = top_categories(report, 3);
  std::vector<std::string> names;
  for (const auto& c : top) names.push_back(c.category);
  require(names == golden, "top categories are " + join(names, ", "));
  require(report.categories.size() == 3, "more than three categories differ");

  // Hand-summed: 3 + 4 + 1.5 + 0.25 + 2 + 2.
  const std::int64_t hand = 12'750'000;
  require(report.raw_distance.micros() == hand, "raw distance " + report.raw_distance.to_string() + ", expected 12.75");
  auto weights = tvtest::oracle::schema_weights(std::string(default_schema_document()));
  auto o = tvtest::oracle::distance(viewpoint_to_xml(v1, *schema()), viewpoint_to_xml(v2, *schema()), weights);
  require(o.raw == hand, "oracle raw distance disagrees");
  require(o.max == report.max_distance.micros(), "oracle max distance disagrees");
  return "top: " + join(names, ", ") + "; raw " + report.raw_distance.to_string();
}

DistanceMatrix planar_matrix(const std::vector<std::array<double, 2>>& pts) {
  const std::size_t n = pts.size();
  std::vector<std::string> labels;
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    labels.push_back("p" + std::to_string(i));
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
      v[i * n + j] = v[j * n + i] = d;
    }
  }
  return DistanceMatrix(labels, v);
}

std::string mds_exactness() {
  tvtest::Rng rng(5005);
  std::uniform_real_distribution<double> u(-100, 100);
  double worst_error = 0;
  double worst_mean = 0;
  double worst_variance = 0;
  for (int round = 0; round < 200; ++round) {
    std::size_t n = 3 + tvtest::pick(rng, 10);
    std::vector<std::array<double, 2>> pts(n);
    for (auto& p : pts) p = {u(rng), u(rng)};
    auto m = planar_matrix(pts);
    auto layout = mds_project(m);
    auto q = quality(m, layout);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) worst_error = std::max(worst_error, std::abs(layout.distance(i, j) - m(i, j)));
    }
    worst_mean = std::max(worst_mean, std::abs(q.mean_ratio - 1.0));
    worst_variance = std::max(worst_variance, q.variance_ratio);
  }
  require(worst_error <= 1e-6, "max layout error " + std::to_string(worst_error));
  require(worst_mean <= 1e-9, "mean ratio off by " + std::to_string(worst_mean));
  require(worst_variance <= 1e-12, "variance " + std::to_string(worst_variance));

  // Equilateral triangle of side s: eigenvalues s^2/2, s^2/2, 0; every pair at s.
  const double s = 3.0;
  DistanceMatrix tri({"a", "b", "c"}, {0, s, s, s, 0, s, s, s, 0});
  auto t = mds_project(tri);
  require(std::abs(t.eigenvalues[0] - s * s / 2) <= 1e-9 && std::abs(t.eigenvalues[1] - s * s / 2) <= 1e-9 &&
              std::abs(t.eigenvalues[2]) <= 1e-9,
          "equilateral eigenvalues");
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) require(std::abs(t.distance(i, j) - s) <= 1e-9, "equilateral distance");
  }
  // Collinear 0, 1, 3: centred coordinates -4/3, -1/3, 5/3 on one axis, second eigenvalue 0.
  auto col = planar_matrix({{{0, 0}}, {{1, 0}}, {{3, 0}}});
  auto c = mds_project(col);
  const double expected[] = {-4.0 / 3, -1.0 / 3, 5.0 / 3};
  const double sign = c.points[0].x < 0 ? 1.0 : -1.0;
  for (std::size_t i = 0; i < 3; ++i) {
    require(std::abs(c.points[i].x - sign * expected[i]) <= 1e-9, "collinear x coordinate");
    require(std::abs(c.points[i].y) <= 1e-9, "collinear y coordinate");
  }
  require(std::abs(c.eigenvalues[0] - 42.0 / 9) <= 1e-9 && std::abs(c.eigenvalues[1]) <= 1e-9,
          "collinear eigenvalues");
  char buf[96];
  std::snprintf(buf, sizeof buf, "max error %.2e, mean off %.2e, variance %.2e", worst_error, worst_mean,
                worst_variance);
  return buf;
}

std::string scenario_playback() {
  TempDir dir("scenario");
  auto tour = tvtest::make_tour(schema(), tvtest::fixture("ministries_budget.csv"), dir.path, 6, kPinned);
  std::vector<std::string> refs;
  for (const auto& f : tour.files) refs.push_back(f.string());
  Scenario sc = save_scenario(make_scenario("ministries", refs), dir.path / "demo.xml");
  sc = load_scenario(dir.path / "demo.xml");

  ApplicationState state(schema());
  Playback playback(sc, state, default_area_list());
  for (std::size_t i = 1; i <= 6; ++i) {
    const Viewpoint& vp = playback.go_to(i);
    require(state == tour.states[i - 1], "state after goto(" + std::to_string(i) + ") differs");
    require(state.snapshot() == vp.snapshot, "snapshot after goto(" + std::to_string(i) + ") differs");
  }
  fs::remove(tour.files[3]);
  try {
    playback.go_to(4);
    throw Failure{"goto(4) succeeded after its file was deleted"};
  } catch (const StepError& e) {
    require(e.step() == 4, "error names step " + std::to_string(e.step()));
    require(std::string(e.what()).find("step 4") != std::string::npos, "message does not name step 4");
  }
  require(state == tour.states[5], "failed goto changed the state");
  playback.go_to(3);
  require(state == tour.states[2], "goto(3) after the failure differs");
  return "6 steps";
}

std::string cli_service_parity() {
  TempDir dir("parity");
  Workspace ws = Workspace::init(dir.path);
  tvtest::Rng rng(7007);
  std::vector<std::string> ids;
  std::vector<Viewpoint> bases;
  for (int i = 0; i < 40; ++i) {
    Viewpoint vp = i % 4 == 0 || bases.empty()
                       ? tvtest::random_viewpoint(rng, *schema(), default_area_list(), kSaved, 0.4)
                       : tvtest::perturbed(rng, tvtest::pick_from(rng, bases), *schema(), tvtest::pick(rng, 15));
    bases.push_back(vp);
    std::string id = "viewpoints/p" + std::to_string(i) + ".xml";
    save_viewpoint(vp, ws.resolve_id(id), *schema(), kPinned);
    ids.push_back(id);
  }
  tvtest::RunningService svc(ws, kPinned);
  for (int k = 0; k < 100; ++k) {
    const std::string& l = tvtest::pick_from(rng, ids);
    const std::string& r = tvtest::pick_from(rng, ids);
    const fs::path xml = dir.path / "diff.xml";
    std::ostringstream out, err;
    int code = run_cli({"-w", dir.path.string(), "diff", ws.resolve_id(l).string(), ws.resolve_id(r).string(), "--xml",
                        xml.string()},
                       out, err);
    require(code == kExitOk, "cli diff failed: " + err.str());
    DiffReport cli = read_diff(xml);

    auto res = svc.post("/diff", {{"left", l}, {"right", r}, {"top", 7}});
    require(res && res->status == 200, "POST /diff failed");
    json j = json::parse(res->body);
    const std::string at = " for " + l + " vs " + r;
    require(j["rawDistance"].get<double>() == cli.raw_distance.to_double(), "raw distance differs" + at);
    require(j["maxDistance"].get<double>() == cli.max_distance.to_double(), "max distance differs" + at);
    require(std::abs(j["normalizedPercent"].get<double>() - cli.normalized_percent) <= 5e-7,
            "normalized percent differs" + at);
    std::vector<std::string> cli_order;
    for (const auto& c : cli.categories) cli_order.push_back(c.category);
    std::vector<std::string> service_order;
    for (const auto& c : j["categories"]) service_order.push_back(c["name"]);
    require(cli_order == service_order, "category order differs" + at);
  }
  return "100 pairs";
}

}  // namespace

int main() {
  ::setenv("TRACEVIEW_CLOCK", kSaved.c_str(), 1);
  ::setenv("TRACEVIEW_USER", "tester", 1);
  criterion("viewpoint-xml-round-trip", 10, xml_round_trip);
  criterion("state-restore", 10, state_restore);
  criterion("distance-metric-axioms", 20, metric_axioms);
  criterion("top-categories-example", 0, top_categories_example);
  criterion("mds-exactness", 10, mds_exactness);
  criterion("scenario-playback", 5, scenario_playback);
  criterion("cli-service-parity", 0, cli_service_parity);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << "\n";
  return failures == 0 ? 0 : 1;
}
