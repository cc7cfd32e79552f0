#include "traceview/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "traceview/diff.hpp"
#include "traceview/error.hpp"
#include "traceview/io.hpp"
#include "traceview/projection.hpp"
#include "traceview/scenario.hpp"
#include "traceview/service.hpp"
#include "traceview/text.hpp"
#include "traceview/viewpoint.hpp"
#include "traceview/workspace.hpp"

namespace traceview {

namespace fs = std::filesystem;

namespace {

std::string percent_label(double p) {
  if (p > 0 && p < 0.05) return "<0.1%";
  if (p < 100 && p >= 99.95) return ">99.9%";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", p);
  return buf;
}

std::string fixed(double v, int digits) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

template <typename T>
T parse_or_throw(std::optional<T> parsed, std::string_view what, std::string_view text) {
  if (!parsed) throw ValidationError("unknown " + std::string(what) + " '" + std::string(text) + "'");
  return *parsed;
}

int to_int(const std::string& text, std::string_view what) {
  auto v = parse_decimal(text);
  if (!v || *v != static_cast<double>(static_cast<long long>(*v)) || *v < -1e9 || *v > 1e9) {
    throw ValidationError(std::string(what) + " must be an integer, got '" + text + "'");
  }
  return static_cast<int>(*v);
}

double to_double(const std::string& text, std::string_view what) {
  auto v = parse_decimal(text);
  if (!v) throw ValidationError(std::string(what) + " must be a number, got '" + text + "'");
  return *v;
}

// Everything a command may need, loaded on first use.
class Context {
 public:
  Context(fs::path root, std::ostream& out) : root_(std::move(root)), out_(out) {}

  std::ostream& out() { return out_; }
  const fs::path& root() const { return root_; }

  const Workspace& workspace() {
    if (!workspace_) workspace_ = Workspace::open(root_);
    return *workspace_;
  }

  // Outside a workspace the shipped schema and area list apply.
  std::shared_ptr<const PreferenceSchema> schema() {
    if (!schema_) {
      if (fs::exists(root_ / Workspace::kConfigFile)) {
        schema_ = workspace().load_schema();
      } else {
        schema_ = std::shared_ptr<const PreferenceSchema>(&default_schema(), [](const PreferenceSchema*) {});
      }
    }
    return schema_;
  }

  const AreaList& areas() {
    if (!areas_) {
      areas_ = fs::exists(root_ / Workspace::kConfigFile) ? workspace().load_areas() : default_area_list();
    }
    return *areas_;
  }

  ApplicationState& session() {
    if (!session_) session_ = std::make_unique<ApplicationState>(workspace().load_session(schema()));
    return *session_;
  }

  void save_session() { workspace().save_session(session()); }

  Viewpoint viewpoint(const std::string& file) { return load_viewpoint(file, *schema(), areas()); }

 private:
  fs::path root_;
  std::ostream& out_;
  std::optional<Workspace> workspace_;
  std::shared_ptr<const PreferenceSchema> schema_;
  std::optional<AreaList> areas_;
  std::unique_ptr<ApplicationState> session_;
};

void print_viewpoint(std::ostream& out, const Viewpoint& vp, const AreaList& areas) {
  out << "name:        " << vp.file.name << "\n";
  out << "saved-at:    " << (vp.file.saved_at.empty() ? "-" : vp.file.saved_at) << "\n";
  out << "owner:       " << vp.owner.name << "\n";
  out << "priority:    " << to_string(vp.owner.priority) << "\n";
  out << "attitude:    " << to_string(vp.owner.attitude) << "\n";
  if (vp.content.area_id) {
    const auto* area = areas.find(*vp.content.area_id);
    out << "area:        " << *vp.content.area_id << (area ? " (" + area->name + ")" : std::string()) << "\n";
  }
  if (vp.content.period) out << "period:      " << vp.content.period->start << " .. " << vp.content.period->end << "\n";
  if (vp.file.image) out << "image:       " << *vp.file.image << "\n";
  if (!vp.content.description.empty()) out << "description: " << vp.content.description << "\n";
  out << "relations:\n";
  for (const auto& r : vp.snapshot.relations) {
    out << "  " << r.name << " <- " << r.source;
    if (r.time_column) out << " (time column " << *r.time_column << ")";
    out << "\n";
  }
  out << "views:\n";
  for (const auto& v : vp.snapshot.views) {
    out << "  " << v.id << ": " << to_string(v.kind) << " " << to_string(v.role) << " over " << v.relation << "\n";
  }
  out << "preferences (" << vp.snapshot.assignments.size() << "):\n";
  for (const auto& [key, value] : vp.snapshot.assignments) {
    out << "  " << key.pref_id << " @ " << describe_scope(key) << " = " << value << "\n";
  }
}

void print_state(std::ostream& out, const ApplicationState& state) {
  out << "relations:\n";
  for (const auto& [name, rel] : state.relations()) {
    out << "  " << name << " (" << rel.rows.size() << " rows):";
    for (const auto& c : rel.columns) out << " " << c.name << ":" << to_string(c.kind);
    out << "\n";
  }
  out << "views:\n";
  for (const auto& [id, v] : state.views()) {
    out << "  " << id << ": " << to_string(v.kind) << " " << to_string(v.role) << " over " << v.relation
        << ", node " << v.current_node << ", attributes [" << join(v.attributes, ",") << "], window "
        << v.geometry.to_string();
    if (!v.period_start.empty() || !v.period_end.empty()) out << ", period " << v.period_start << ".." << v.period_end;
    out << "\n";
  }
  if (!state.filters().empty()) {
    out << "filters:\n";
    for (const auto& [id, f] : state.filters()) {
      out << "  " << id << " on " << f.view << "." << f.attribute << ": ";
      if (const auto* r = std::get_if<NumericRange>(&f.criterion)) {
        out << "[" << format_decimal(r->lo) << ", " << format_decimal(r->hi) << "]";
      } else {
        out << "in {" << join(std::get<std::vector<std::string>>(f.criterion), ",") << "}";
      }
      out << "\n";
    }
  }
  out << "preferences: " << state.assignments().size() << " assigned\n";
}

void print_diff(std::ostream& out, const DiffReport& report, std::size_t top) {
  out << "distance: " << percent_label(report.normalized_percent) << " (raw " << report.raw_distance.to_string()
      << " of " << report.max_distance.to_string() << ")\n";
  auto cats = top_categories(report, top);
  if (cats.empty()) {
    out << "no differences\n";
    return;
  }
  out << "top categories:\n";
  std::size_t rank = 1;
  for (const auto& c : cats) {
    out << "  " << rank++ << ". " << c.category << " " << c.distance.to_string() << "\n";
  }
}

// Runs an explore action given as words.
void explore(Context& ctx, const std::vector<std::string>& words) {
  if (words.empty()) throw ValidationError("explore needs an action");
  const std::string& verb = words[0];
  auto expect = [&](std::size_t lo, std::size_t hi, std::string_view usage) {
    if (words.size() < lo || words.size() > hi) throw ValidationError("usage: explore " + std::string(usage));
  };
  ApplicationState& state = ctx.session();
  if (verb == "add-view") {
    expect(3, 5, "add-view <view> <relation> [table|pie|treemap|temporal] [master|detail]");
    ViewSpec spec{words[1], words[2], ViewKind::table, ViewRole::master};
    if (words.size() > 3) spec.kind = parse_or_throw(parse_view_kind(words[3]), "view kind", words[3]);
    if (words.size() > 4) spec.role = parse_or_throw(parse_view_role(words[4]), "view role", words[4]);
    state.add_view(spec);
  } else if (verb == "node") {
    expect(3, 3, "node <view> <row|root>");
    state.mutate(action::SetCurrentNode{words[1], words[2]});
  } else if (verb == "attributes") {
    expect(3, 3, "attributes <view> <a,b,...>");
    state.mutate(action::SetAttributes{words[1], split(words[2], ',')});
  } else if (verb == "filter") {
    expect(6, 6, "filter <view> <filter-id> <attribute> <lo> <hi>");
    state.mutate(action::SetFilterRange{words[1], words[2], words[3], to_double(words[4], "lo"),
                                        to_double(words[5], "hi")});
  } else if (verb == "move") {
    expect(6, 6, "move <view> <x> <y> <width> <height>");
    WindowGeometry g{to_int(words[2], "x"), to_int(words[3], "y"), to_int(words[4], "width"),
                     to_int(words[5], "height")};
    state.mutate(action::MoveWindow{words[1], g});
  } else {
    throw ValidationError("unknown explore action '" + verb + "' (add-view, node, attributes, filter, move)");
  }
  ctx.save_session();
}

struct Options {
  std::string workspace;
  // init
  std::string init_dir;
  // schema validate
  std::string schema_file;
  // load
  std::string csv;
  std::string relation_name;
  std::string time_column;
  // set
  std::string pref;
  std::string scope;
  std::string value;
  // explore
  std::vector<std::string> words;
  // vp
  std::string file;
  std::string name;
  std::string description;
  std::string priority;
  std::string attitude;
  std::string area;
  std::string image;
  std::string owner;
  std::string out_file;
  bool clear_area = false;
  bool clear_image = false;
  // scn
  std::string viewpoint;
  std::size_t at = 0;
  std::size_t from = 0;
  std::size_t to = 0;
  std::size_t step = 0;
  // diff / compare
  std::vector<std::string> files;
  std::string xml_out;
  std::size_t top = 3;
  std::string layout_out;
  std::string label = "computed";
  std::vector<std::string> path;
  std::string scenario_out;
  // serve
  int port = kDefaultPort;
  std::string host = "127.0.0.1";
  std::string static_dir;
};

int run(Options& o, const std::function<void(Context&)>& command, std::ostream& out) {
  fs::path root = o.workspace.empty() ? Workspace::default_root() : fs::path(o.workspace);
  Context ctx(root, out);
  command(ctx);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Save, compare and replay exploration viewpoints", "traceview"};
  app.require_subcommand(1);
  Options o;
  std::function<void(Context&)> command;
  app.add_option("-w,--workspace", o.workspace, "Workspace root (default: $TRACEVIEW_WORKSPACE or .)");

  // init
  auto* init = app.add_subcommand("init", "Create a workspace");
  init->add_option("dir", o.init_dir, "Directory (default: the workspace root)");
  init->callback([&] {
    command = [&](Context& ctx) {
      Workspace ws = Workspace::init(o.init_dir.empty() ? ctx.root() : fs::path(o.init_dir));
      ctx.out() << "initialized workspace " << ws.root().string() << "\n";
    };
  });

  // schema validate
  auto* schema = app.add_subcommand("schema", "Preference schema");
  schema->require_subcommand(1);
  auto* schema_validate = schema->add_subcommand("validate", "Check a schema file");
  schema_validate->add_option("file", o.schema_file, "Schema XML (default: the workspace schema)");
  schema_validate->callback([&] {
    command = [&](Context& ctx) {
      PreferenceSchema s = o.schema_file.empty() ? *ctx.schema() : load_schema_file(o.schema_file);
      std::size_t implicit = std::count_if(s.preferences().begin(), s.preferences().end(),
                                           [](const auto& p) { return p.origin == Origin::implicit; });
      ctx.out() << "schema ok: " << s.categories().size() << " categories, " << s.preferences().size()
                << " preferences (" << implicit << " implicit), total weight " << s.total_weight().to_string()
                << "\n";
    };
  });

  // load
  auto* load = app.add_subcommand("load", "Load a CSV dataset into the session");
  load->add_option("csv", o.csv, "CSV file")->required();
  load->add_option("--name", o.relation_name, "Relation name (default: file stem)");
  load->add_option("--time-column", o.time_column, "Column holding ISO dates");
  load->callback([&] {
    command = [&](Context& ctx) {
      std::optional<std::string> tc;
      if (!o.time_column.empty()) tc = o.time_column;
      const Relation& rel =
          ctx.session().load_dataset(fs::absolute(o.csv).lexically_normal(), o.relation_name, tc);
      ctx.save_session();
      ctx.out() << "loaded relation " << rel.name << " (" << rel.rows.size() << " rows):";
      for (const auto& c : rel.columns) ctx.out() << " " << c.name << ":" << to_string(c.kind);
      ctx.out() << "\n";
    };
  });

  // set
  auto* set = app.add_subcommand("set", "Assign a preference in the session");
  set->add_option("pref", o.pref, "Preference id")->required();
  set->add_option("scope", o.scope, "application | relation:<name> | view:<id>")->required();
  set->add_option("value", o.value, "Value")->required();
  set->callback([&] {
    command = [&](Context& ctx) {
      auto [level, instance] = parse_scope_spec(o.scope);
      AssignmentKey key{o.pref, level, instance};
      ctx.session().set_preference(key, o.value);
      ctx.save_session();
      ctx.out() << o.pref << " @ " << describe_scope(key) << " = " << *ctx.session().value(key) << "\n";
    };
  });

  // explore
  auto* expl = app.add_subcommand("explore", "Apply an exploration action to the session");
  expl->add_option("action", o.words, "add-view | node | attributes | filter | move, then arguments")
      ->required()
      ->allow_extra_args();
  expl->callback([&] {
    command = [&](Context& ctx) {
      explore(ctx, o.words);
      print_state(ctx.out(), ctx.session());
    };
  });

  // state
  auto* state = app.add_subcommand("state", "Show the session state");
  state->callback([&] { command = [&](Context& ctx) { print_state(ctx.out(), ctx.session()); }; });

  // vp
  auto* vp = app.add_subcommand("vp", "Viewpoints");
  vp->require_subcommand(1);
  auto meta_options = [&](CLI::App* sub) {
    sub->add_option("--name", o.name, "Viewpoint name");
    sub->add_option("--description", o.description, "Free text");
    sub->add_option("--priority", o.priority, "must-see | interesting | facultative");
    sub->add_option("--attitude", o.attitude, "good-news | neutral | bad-news");
    sub->add_option("--area", o.area, "Area id");
    sub->add_option("--image", o.image, "Image path");
    sub->add_option("--owner", o.owner, "Owner (default: $TRACEVIEW_USER or the login)");
  };
  auto* vp_save = vp->add_subcommand("save", "Capture the session into a viewpoint file");
  vp_save->add_option("file", o.file, "Viewpoint file")->required();
  meta_options(vp_save);
  vp_save->callback([&] {
    command = [&](Context& ctx) {
      MetaDraft draft;
      draft.name = o.name.empty() ? fs::path(o.file).stem().string() : o.name;
      draft.description = o.description;
      if (!o.priority.empty()) draft.priority = parse_or_throw(parse_priority(o.priority), "priority", o.priority);
      if (!o.attitude.empty()) draft.attitude = parse_or_throw(parse_attitude(o.attitude), "attitude", o.attitude);
      if (!o.area.empty()) draft.area_id = o.area;
      if (!o.image.empty()) draft.image = o.image;
      if (!o.owner.empty()) draft.owner = o.owner;
      Viewpoint v = capture(ctx.session(), draft);
      validate_viewpoint(v, *ctx.schema(), ctx.areas());
      v = save_viewpoint(std::move(v), o.file, *ctx.schema(), clock_from_environment());
      ctx.out() << "saved viewpoint " << v.file.name << " to " << o.file << " ("
                << v.snapshot.assignments.size() << " preferences, " << v.file.saved_at << ")\n";
    };
  });
  auto* vp_show = vp->add_subcommand("show", "Print a viewpoint");
  vp_show->add_option("file", o.file, "Viewpoint file")->required();
  vp_show->callback([&] {
    command = [&](Context& ctx) { print_viewpoint(ctx.out(), ctx.viewpoint(o.file), ctx.areas()); };
  });
  auto* vp_edit = vp->add_subcommand("edit", "Change viewpoint metadata");
  vp_edit->add_option("file", o.file, "Viewpoint file")->required();
  meta_options(vp_edit);
  vp_edit->add_flag("--clear-area", o.clear_area, "Remove the area");
  vp_edit->add_flag("--clear-image", o.clear_image, "Remove the image");
  vp_edit->add_option("--out", o.out_file, "Write to this file instead");
  vp_edit->callback([&] {
    command = [&](Context& ctx) {
      Viewpoint v = ctx.viewpoint(o.file);
      MetaChanges c;
      if (!o.name.empty()) c.name = o.name;
      if (!o.description.empty()) c.description = o.description;
      if (!o.priority.empty()) c.priority = parse_or_throw(parse_priority(o.priority), "priority", o.priority);
      if (!o.attitude.empty()) c.attitude = parse_or_throw(parse_attitude(o.attitude), "attitude", o.attitude);
      if (o.clear_area) c.area_id = std::optional<std::string>{};
      if (!o.area.empty()) c.area_id = std::optional<std::string>{o.area};
      if (o.clear_image) c.image = std::optional<std::string>{};
      if (!o.image.empty()) c.image = std::optional<std::string>{o.image};
      if (!o.owner.empty()) c.owner = o.owner;
      const std::string target = o.out_file.empty() ? o.file : o.out_file;
      Viewpoint saved = save_viewpoint(edit_metadata(v, c, ctx.areas()), target, *ctx.schema(),
                                       clock_from_environment());
      ctx.out() << "saved viewpoint " << saved.file.name << " to " << target << " (" << saved.file.saved_at << ")\n";
    };
  });
  auto* vp_apply = vp->add_subcommand("apply", "Restore the session from a viewpoint");
  vp_apply->add_option("file", o.file, "Viewpoint file")->required();
  vp_apply->callback([&] {
    command = [&](Context& ctx) {
      Viewpoint v = ctx.viewpoint(o.file);
      apply(v, ctx.session());
      ctx.save_session();
      ctx.out() << "applied viewpoint " << v.file.name << "\n";
      print_state(ctx.out(), ctx.session());
    };
  });

  // scn
  auto* scn = app.add_subcommand("scn", "Scenarios");
  scn->require_subcommand(1);
  auto* scn_new = scn->add_subcommand("new", "Create an empty scenario");
  scn_new->add_option("file", o.file, "Scenario file")->required();
  scn_new->add_option("--name", o.name, "Scenario name (default: file stem)");
  scn_new->callback([&] {
    command = [&](Context& ctx) {
      if (fs::exists(o.file)) throw ValidationError(o.file + " already exists");
      Scenario sc = save_scenario(create_scenario(o.name.empty() ? fs::path(o.file).stem().string() : o.name), o.file);
      ctx.out() << "created scenario " << sc.name << " at " << o.file << "\n";
    };
  });
  auto* scn_add = scn->add_subcommand("add", "Insert a viewpoint step");
  scn_add->add_option("file", o.file, "Scenario file")->required();
  scn_add->add_option("viewpoint", o.viewpoint, "Viewpoint file")->required();
  scn_add->add_option("--at", o.at, "1-based position (default: append)");
  scn_add->callback([&] {
    command = [&](Context& ctx) {
      Scenario sc = load_scenario(o.file);
      std::size_t pos = o.at == 0 ? sc.size() + 1 : o.at;
      sc = save_scenario(insert_step(std::move(sc), pos, fs::absolute(o.viewpoint).lexically_normal().string()),
                         o.file);
      ctx.out() << "inserted " << o.viewpoint << " as step " << pos << " of " << sc.size() << "\n";
    };
  });
  auto* scn_move = scn->add_subcommand("move", "Move a step");
  scn_move->add_option("file", o.file, "Scenario file")->required();
  scn_move->add_option("from", o.from, "Current position")->required();
  scn_move->add_option("to", o.to, "New position")->required();
  scn_move->callback([&] {
    command = [&](Context& ctx) {
      Scenario sc = save_scenario(move_step(load_scenario(o.file), o.from, o.to), o.file);
      ctx.out() << "moved step " << o.from << " to " << o.to << "\n";
      for (const auto& s : sc.steps) ctx.out() << "  " << s.order << ". " << s.ref << "\n";
    };
  });
  auto* scn_rm = scn->add_subcommand("rm", "Remove a step");
  scn_rm->add_option("file", o.file, "Scenario file")->required();
  scn_rm->add_option("position", o.at, "1-based position")->required();
  scn_rm->callback([&] {
    command = [&](Context& ctx) {
      Scenario sc = save_scenario(remove_step(load_scenario(o.file), o.at), o.file);
      ctx.out() << "removed step " << o.at << ", " << sc.size() << " left\n";
    };
  });
  auto* scn_play = scn->add_subcommand("play", "Apply scenario steps to the session");
  scn_play->add_option("file", o.file, "Scenario file")->required();
  scn_play->add_option("--step", o.step, "Go to this step only (default: play every step in order)");
  scn_play->callback([&] {
    command = [&](Context& ctx) {
      Scenario sc = load_scenario(o.file);
      Playback playback(sc, ctx.session(), ctx.areas());
      auto report = [&](std::size_t i, const Viewpoint& v) {
        ctx.out() << "step " << i << "/" << sc.size() << ": " << v.file.name << "\n";
      };
      try {
        if (o.step != 0) {
          report(o.step, playback.go_to(o.step));
        } else {
          for (std::size_t i = 1; i <= sc.size(); ++i) report(i, playback.go_to(i));
        }
      } catch (...) {
        ctx.save_session();
        throw;
      }
      ctx.save_session();
    };
  });
  auto* scn_preview = scn->add_subcommand("preview", "List the viewpoints of a scenario");
  scn_preview->add_option("file", o.file, "Scenario file")->required();
  scn_preview->callback([&] {
    command = [&](Context& ctx) {
      Scenario sc = load_scenario(o.file);
      ctx.out() << "scenario " << sc.name << " (" << sc.size() << " steps)\n";
      for (const auto& e : preview(sc, *ctx.schema(), ctx.areas())) {
        ctx.out() << "  " << e.step << ". ";
        if (e.broken) {
          ctx.out() << "[broken] " << e.ref << ": " << e.problem << "\n";
          continue;
        }
        ctx.out() << e.name << " [" << to_string(e.priority) << ", " << attitude_icon(e.attitude);
        if (e.area_id) ctx.out() << ", " << *e.area_id;
        ctx.out() << "] by " << e.owner << " at " << e.saved_at;
        if (!e.description.empty()) ctx.out() << ": " << e.description;
        ctx.out() << "\n";
      }
    };
  });

  // diff
  auto* dif = app.add_subcommand("diff", "Distance between two viewpoints");
  dif->add_option("files", o.files, "Two viewpoint files")->required()->expected(2);
  dif->add_option("--xml", o.xml_out, "Write the full report as XML");
  dif->add_option("--top", o.top, "Categories to list")->check(CLI::PositiveNumber);
  dif->callback([&] {
    command = [&](Context& ctx) {
      DiffReport report = diff(ctx.viewpoint(o.files[0]), ctx.viewpoint(o.files[1]), *ctx.schema());
      print_diff(ctx.out(), report, o.top);
      if (!o.xml_out.empty()) write_diff(report, o.xml_out);
    };
  });

  // compare
  auto* cmp = app.add_subcommand("compare", "Project n viewpoints onto a plane");
  cmp->add_option("files", o.files, "Viewpoint files")->required();
  cmp->add_option("--layout", o.layout_out, "Write the layout document as JSON");
  cmp->add_option("--label", o.label, "Default edge label: computed | layout | ratio");
  cmp->add_option("--path", o.path, "Files in the order of a drawn path");
  cmp->add_option("--scenario", o.scenario_out, "Save the drawn path as a scenario");
  cmp->add_option("--scenario-name", o.name, "Name of that scenario");
  cmp->callback([&] {
    command = [&](Context& ctx) {
      EdgeLabel label = parse_or_throw(parse_edge_label(o.label), "edge label", o.label);
      std::vector<Viewpoint> vps;
      for (const auto& f : o.files) vps.push_back(ctx.viewpoint(f));
      DistanceMatrix matrix = distance_matrix(vps, o.files, *ctx.schema());
      Layout2D layout = mds_project(matrix);
      QualityMetrics metrics = quality(matrix, layout);
      auto& out = ctx.out();
      out << "points:\n";
      for (std::size_t i = 0; i < layout.points.size(); ++i) {
        out << "  " << layout.labels[i] << " (" << fixed(layout.points[i].x, 4) << ", "
            << fixed(layout.points[i].y, 4) << ")\n";
      }
      out << "pairs (computed / layout / ratio):\n";
      for (const auto& p : metrics.pairs) {
        out << "  " << layout.labels[p.i] << " - " << layout.labels[p.j] << ": " << fixed(p.computed, 4) << " / "
            << fixed(p.layout, 4) << " / " << (p.ratio ? fixed(*p.ratio, 4) : std::string("undefined")) << "\n";
      }
      out << "ratio mean " << fixed(metrics.mean_ratio, 6) << ", variance " << fixed(metrics.variance_ratio, 6);
      if (metrics.excluded_pairs) out << ", " << metrics.excluded_pairs << " pairs at distance 0 excluded";
      out << "\n";
      if (layout.non_euclidean) out << "note: distances are not Euclidean; the plane is an approximation\n";
      if (!o.layout_out.empty()) write_file_atomic(o.layout_out, export_layout(layout, metrics, label));
      if (!o.path.empty() || !o.scenario_out.empty()) {
        if (o.path.empty() || o.scenario_out.empty()) throw ValidationError("--path and --scenario go together");
        Scenario sc = scenario_from_path(layout, o.path, o.name.empty() ? "drawn path" : o.name);
        for (auto& s : sc.steps) s.ref = fs::absolute(s.ref).lexically_normal().string();
        sc = save_scenario(std::move(sc), o.scenario_out);
        out << "saved scenario " << sc.name << " (" << sc.size() << " steps) to " << o.scenario_out << "\n";
      }
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP JSON service");
  serve->add_option("--port", o.port, "TCP port")->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host, "Listen address");
  serve->add_option("--static", o.static_dir, "UI bundle directory");
  serve->callback([&] {
    command = [&](Context& ctx) {
      Service service(ctx.workspace());
      fs::path ui = o.static_dir.empty() ? ctx.workspace().root() / "ui" : fs::path(o.static_dir);
      if (!o.static_dir.empty() || fs::is_directory(ui)) service.mount_static(ui);
      int port = service.bind(o.host, o.port);
      ctx.out() << "serving " << ctx.workspace().root().string() << " on http://" << o.host << ":" << port << "\n"
                << std::flush;
      service.run();
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    return run(o, command, out);
  } catch (const StepError& e) {
    err << "error: " << e.what() << "\n";
    return fs::exists(e.path()) ? kExitValidation : kExitIo;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace traceview
