#include "traceview/scenario.hpp"

#include <algorithm>

#include "traceview/error.hpp"
#include "traceview/io.hpp"
#include "traceview/xml.hpp"

namespace traceview {

namespace fs = std::filesystem;

namespace {

void renumber(Scenario& sc) {
  for (std::size_t i = 0; i < sc.steps.size(); ++i) sc.steps[i].order = i + 1;
}

void check_position(std::size_t position, std::size_t lo, std::size_t hi, std::string_view what) {
  if (position < lo || position > hi) {
    throw ValidationError(std::string(what) + " " + std::to_string(position) + " is out of range " +
                          std::to_string(lo) + ".." + std::to_string(hi));
  }
}

fs::path scenario_dir(const std::string& scenario_path) {
  if (scenario_path.empty()) return fs::current_path();
  return fs::absolute(fs::path(scenario_path)).parent_path();
}

}  // namespace

fs::path Scenario::resolve(std::size_t order) const {
  check_position(order, 1, steps.size(), "step");
  fs::path ref(steps[order - 1].ref);
  if (ref.is_absolute()) return ref.lexically_normal();
  return (scenario_dir(path) / ref).lexically_normal();
}

Scenario create_scenario(std::string name) {
  if (name.empty()) throw ValidationError("a scenario needs a name");
  Scenario sc;
  sc.name = std::move(name);
  return sc;
}

Scenario make_scenario(std::string name, const std::vector<std::string>& refs) {
  Scenario sc = create_scenario(std::move(name));
  for (const auto& r : refs) sc = insert_step(std::move(sc), sc.size() + 1, r);
  return sc;
}

Scenario insert_step(Scenario sc, std::size_t position, std::string ref) {
  check_position(position, 1, sc.steps.size() + 1, "insert position");
  if (ref.empty()) throw ValidationError("a step needs a viewpoint reference");
  sc.steps.insert(sc.steps.begin() + static_cast<std::ptrdiff_t>(position - 1), {0, std::move(ref)});
  renumber(sc);
  return sc;
}

Scenario move_step(Scenario sc, std::size_t from, std::size_t to) {
  check_position(from, 1, sc.steps.size(), "move source");
  check_position(to, 1, sc.steps.size(), "move target");
  auto step = std::move(sc.steps[from - 1]);
  sc.steps.erase(sc.steps.begin() + static_cast<std::ptrdiff_t>(from - 1));
  sc.steps.insert(sc.steps.begin() + static_cast<std::ptrdiff_t>(to - 1), std::move(step));
  renumber(sc);
  return sc;
}

Scenario remove_step(Scenario sc, std::size_t position) {
  check_position(position, 1, sc.steps.size(), "remove position");
  sc.steps.erase(sc.steps.begin() + static_cast<std::ptrdiff_t>(position - 1));
  renumber(sc);
  return sc;
}

std::string scenario_to_xml(const Scenario& sc) {
  xml::Writer w;
  w.open("scenario").attr("format-version", std::to_string(Scenario::kFormatVersion)).attr("name", sc.name);
  for (const auto& s : sc.steps) {
    w.open("step").attr("order", std::to_string(s.order)).attr("ref", s.ref).close();
  }
  w.close();
  return w.str();
}

Scenario scenario_from_xml(std::string_view document) {
  auto root = xml::parse(document);
  if (root.name != "scenario") throw ValidationError("expected <scenario>, found <" + root.name + ">");
  root.expect_only({"format-version", "name"});
  const auto& version = root.attribute("format-version");
  if (version != std::to_string(Scenario::kFormatVersion)) {
    throw ValidationError("<scenario>: unsupported format-version '" + version + "'");
  }
  Scenario sc = create_scenario(root.attribute("name"));
  for (const auto& e : root.children) {
    if (e.name != "step") throw ValidationError("<scenario>: unexpected element <" + e.name + ">");
    e.expect_only({"order", "ref"});
    const auto& order_text = e.attribute("order");
    std::size_t order = 0;
    bool digits = !order_text.empty() && order_text.size() < 10 &&
                  std::all_of(order_text.begin(), order_text.end(), [](char c) { return c >= '0' && c <= '9'; });
    if (digits) order = std::stoul(order_text);
    if (!digits || order == 0) throw ValidationError("<step>: order '" + order_text + "' is not a positive integer");
    if (e.attribute("ref").empty()) throw ValidationError("<step order=\"" + order_text + "\">: empty ref");
    sc.steps.push_back({order, e.attribute("ref")});
  }
  std::stable_sort(sc.steps.begin(), sc.steps.end(), [](auto& a, auto& b) { return a.order < b.order; });
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    if (sc.steps[i].order != i + 1) {
      throw ValidationError("<scenario>: step order values must run 1.." + std::to_string(sc.steps.size()) +
                            " without gaps or repeats");
    }
  }
  return sc;
}

Scenario save_scenario(Scenario sc, const fs::path& path) {
  const fs::path target_dir = fs::absolute(path).parent_path();
  for (std::size_t i = 0; i < sc.steps.size(); ++i) {
    fs::path absolute = sc.resolve(i + 1);
    fs::path relative = absolute.lexically_relative(target_dir);
    // Siblings of the scenario directory stay relative, so a workspace can move.
    std::size_t climbs = 0;
    for (const auto& part : relative) climbs += part == "..";
    bool near = !relative.empty() && climbs <= 1 && (climbs == 0 || *relative.begin() == "..");
    sc.steps[i].ref = near ? relative.generic_string() : absolute.generic_string();
  }
  renumber(sc);
  sc.path = path.generic_string();
  write_file_atomic(path, scenario_to_xml(sc));
  return sc;
}

Scenario load_scenario(const fs::path& path) {
  std::string bytes = read_file(path);
  try {
    Scenario sc = scenario_from_xml(bytes);
    sc.path = path.generic_string();
    return sc;
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Playback

Playback::Playback(Scenario scenario, ApplicationState& state, const AreaList& areas)
    : scenario_(std::move(scenario)), state_(state), areas_(areas) {}

const Viewpoint& Playback::go_to(std::size_t order) {
  check_position(order, 1, scenario_.size(), "step");
  fs::path path = scenario_.resolve(order);
  try {
    Viewpoint vp = load_viewpoint(path, state_.schema(), areas_);
    apply(vp, state_);
    current_ = std::move(vp);
  } catch (const Error& e) {
    throw StepError(order, path.string(), e.what());
  }
  position_ = order;
  return current_;
}

bool Playback::next() {
  std::size_t target = position_ ? *position_ + 1 : 1;
  if (target > scenario_.size()) return false;
  go_to(target);
  return true;
}

bool Playback::prev() {
  if (!position_ || *position_ <= 1) return false;
  go_to(*position_ - 1);
  return true;
}

// ---------------------------------------------------------------------------
// Preview

std::string_view attitude_icon(Attitude a) {
  switch (a) {
    case Attitude::good_news: return "smiley-happy";
    case Attitude::neutral: return "smiley-neutral";
    case Attitude::bad_news: return "smiley-sad";
  }
  return "smiley-neutral";
}

std::vector<PreviewEntry> preview(const Scenario& sc, const PreferenceSchema& schema, const AreaList& areas) {
  std::vector<PreviewEntry> out;
  for (std::size_t i = 1; i <= sc.size(); ++i) {
    PreviewEntry entry;
    entry.step = i;
    entry.ref = sc.steps[i - 1].ref;
    try {
      Viewpoint vp = load_viewpoint(sc.resolve(i), schema, areas);
      entry.name = vp.file.name;
      entry.image = vp.file.image;
      entry.area_id = vp.content.area_id;
      if (vp.content.area_id) {
        if (const auto* area = areas.find(*vp.content.area_id)) entry.area_icon = area->icon;
      }
      entry.attitude = vp.owner.attitude;
      entry.priority = vp.owner.priority;
      entry.owner = vp.owner.name;
      entry.saved_at = vp.file.saved_at;
      entry.description = vp.content.description;
    } catch (const Error& e) {
      entry.broken = true;
      entry.problem = e.what();
    }
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace traceview
