#include "traceview/viewpoint.hpp"

#include <cstdlib>
#include <set>

#include <pwd.h>
#include <unistd.h>

#include "traceview/error.hpp"
#include "traceview/io.hpp"
#include "traceview/xml.hpp"

namespace traceview {

namespace fs = std::filesystem;

std::string_view to_string(Priority p) {
  switch (p) {
    case Priority::must_see: return "must-see";
    case Priority::interesting: return "interesting";
    case Priority::facultative: return "facultative";
  }
  return "?";
}

std::string_view to_string(Attitude a) {
  switch (a) {
    case Attitude::good_news: return "good-news";
    case Attitude::neutral: return "neutral";
    case Attitude::bad_news: return "bad-news";
  }
  return "?";
}

std::optional<Priority> parse_priority(std::string_view text) {
  for (auto p : {Priority::must_see, Priority::interesting, Priority::facultative}) {
    if (to_string(p) == text) return p;
  }
  return std::nullopt;
}

std::optional<Attitude> parse_attitude(std::string_view text) {
  for (auto a : {Attitude::good_news, Attitude::neutral, Attitude::bad_news}) {
    if (to_string(a) == text) return a;
  }
  return std::nullopt;
}

std::string session_identity() {
  if (const char* user = std::getenv("TRACEVIEW_USER"); user && *user) return user;
  if (const passwd* pw = ::getpwuid(::geteuid()); pw && pw->pw_name && *pw->pw_name) {
    return pw->pw_name;
  }
  if (const char* user = std::getenv("USER"); user && *user) return user;
  return "unknown";
}

Viewpoint capture(const ApplicationState& state, const MetaDraft& draft) {
  if (draft.name.empty()) throw ValidationError("a viewpoint needs a name");
  Viewpoint vp;
  vp.file.name = draft.name;
  vp.file.image = draft.image;
  vp.content.area_id = draft.area_id;
  vp.content.description = draft.description;
  if (auto period = state.displayed_period()) {
    vp.content.period = Period{format_date(period->first), format_date(period->last)};
  }
  vp.owner.name = draft.owner.value_or(session_identity());
  vp.owner.priority = draft.priority;
  vp.owner.attitude = draft.attitude;
  vp.snapshot = state.snapshot();
  return vp;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

void validate_meta(const Viewpoint& vp, const AreaList& areas) {
  if (vp.file.name.empty()) throw ValidationError("<file>: name must not be empty");
  if (!vp.file.saved_at.empty() && !parse_timestamp(vp.file.saved_at)) {
    throw ValidationError("<file>: saved-at '" + vp.file.saved_at + "' is not an ISO 8601 UTC timestamp");
  }
  if (vp.content.area_id && !areas.contains(*vp.content.area_id)) {
    throw ValidationError("<content>: unknown area-id '" + *vp.content.area_id + "'");
  }
  if (const auto& p = vp.content.period) {
    auto s = parse_iso_date(p->start);
    auto e = parse_iso_date(p->end);
    if (!s || !e || p->start.size() != 10 || p->end.size() != 10) {
      throw ValidationError("<content>: period bounds must be YYYY-MM-DD dates");
    }
    if (e->first < s->first) throw ValidationError("<content>: period-start is after period-end");
  }
  if (vp.owner.name.empty()) throw ValidationError("<owner>: name must not be empty");
}

}  // namespace

void validate_viewpoint(const Viewpoint& vp, const PreferenceSchema& schema, const AreaList& areas) {
  validate_meta(vp, areas);

  std::set<std::string> relations;
  for (const auto& r : vp.snapshot.relations) {
    if (r.name.empty()) throw ValidationError("<relation>: empty name");
    if (!relations.insert(r.name).second) throw ValidationError("<relation>: duplicate name '" + r.name + "'");
  }
  std::set<std::string> views;
  for (const auto& v : vp.snapshot.views) {
    if (v.id.empty()) throw ValidationError("<view>: empty id");
    if (!views.insert(v.id).second) throw ValidationError("<view>: duplicate id '" + v.id + "'");
    if (!relations.contains(v.relation)) {
      throw ValidationError("<view id=\"" + v.id + "\">: unknown relation '" + v.relation + "'");
    }
  }

  for (const auto& [key, value] : vp.snapshot.assignments) {
    const std::string where = "preference '" + key.pref_id + "' at " + describe_scope(key) + ": ";
    const auto* def = schema.find(key.pref_id);
    if (!def) throw NotFoundError(where + "unknown to the active schema");
    if (!def->applies_to(key.scope)) {
      throw ValidationError(where + "not applicable at " + std::string(to_string(key.scope)) + " scope");
    }
    switch (key.scope) {
      case ScopeLevel::application:
        if (!key.instance.empty()) throw ValidationError(where + "application scope takes no instance");
        break;
      case ScopeLevel::relation:
        if (!relations.contains(key.instance)) throw ValidationError(where + "unknown relation");
        break;
      case ScopeLevel::view:
        if (!views.contains(key.instance)) throw ValidationError(where + "unknown view");
        break;
    }
    auto canonical = def->type.canonicalize(value);
    if (!canonical || *canonical != value) {
      throw ValidationError(where + "value '" + value + "' is not a canonical " + def->type.to_string());
    }
  }
}

// ---------------------------------------------------------------------------
// XML

std::string viewpoint_to_xml(const Viewpoint& vp, const PreferenceSchema& schema) {
  xml::Writer w;
  w.open("viewpoint").attr("format-version", std::to_string(Viewpoint::kFormatVersion));

  w.open("meta");
  w.open("file")
      .attr("name", vp.file.name)
      .attr("path", vp.file.path)
      .attr("saved-at", vp.file.saved_at)
      .attr_if(vp.file.image.has_value(), "image", vp.file.image.value_or(""))
      .close();
  const auto& period = vp.content.period;
  w.open("content")
      .attr_if(vp.content.area_id.has_value(), "area-id", vp.content.area_id.value_or(""))
      .attr_if(period.has_value(), "period-start", period ? period->start : "")
      .attr_if(period.has_value(), "period-end", period ? period->end : "")
      .text_element(vp.content.description);
  w.open("owner")
      .attr("name", vp.owner.name)
      .attr("priority", to_string(vp.owner.priority))
      .attr("attitude", to_string(vp.owner.attitude))
      .close();
  w.close();

  w.open("context");
  auto relations = vp.snapshot.relations;
  std::sort(relations.begin(), relations.end(), [](auto& a, auto& b) { return a.name < b.name; });
  for (const auto& r : relations) {
    w.open("relation")
        .attr("name", r.name)
        .attr("source", r.source)
        .attr_if(r.time_column.has_value(), "time-column", r.time_column.value_or(""))
        .close();
  }
  auto views = vp.snapshot.views;
  std::sort(views.begin(), views.end(), [](auto& a, auto& b) { return a.id < b.id; });
  for (const auto& v : views) {
    w.open("view")
        .attr("id", v.id)
        .attr("relation", v.relation)
        .attr("kind", to_string(v.kind))
        .attr("role", to_string(v.role))
        .close();
  }
  w.close();

  w.open("preferences");
  for (const auto& [key, value] : vp.snapshot.assignments) {
    const auto& def = schema.lookup(key.pref_id);
    w.open("preference")
        .attr("id", key.pref_id)
        .attr("scope", to_string(key.scope))
        .attr("instance", key.instance)
        .attr("category", def.category)
        .attr("kind", def.type.to_string())
        .text_element(value);
  }
  w.close();

  w.close();
  return w.str();
}

Viewpoint viewpoint_from_xml(std::string_view document, const PreferenceSchema& schema,
                             const AreaList& areas) {
  auto root = xml::parse(document);
  if (root.name != "viewpoint") throw ValidationError("expected <viewpoint>, found <" + root.name + ">");
  const auto& version = root.attribute("format-version");
  if (version != std::to_string(Viewpoint::kFormatVersion)) {
    throw ValidationError("<viewpoint>: unsupported format-version '" + version + "'");
  }

  Viewpoint vp;
  const auto& meta = root.required_child("meta");
  const auto& file = meta.required_child("file");
  file.expect_only({"name", "path", "saved-at", "image"});
  vp.file.name = file.attribute("name");
  vp.file.path = file.attribute("path");
  vp.file.saved_at = file.attribute("saved-at");
  vp.file.image = file.optional_attribute("image");

  const auto& content = meta.required_child("content");
  content.expect_only({"area-id", "period-start", "period-end"});
  vp.content.area_id = content.optional_attribute("area-id");
  auto start = content.optional_attribute("period-start");
  auto end = content.optional_attribute("period-end");
  if (start.has_value() != end.has_value()) {
    throw ValidationError("<content>: period-start and period-end go together");
  }
  if (start) vp.content.period = Period{*start, *end};
  vp.content.description = content.text;

  const auto& owner = meta.required_child("owner");
  owner.expect_only({"name", "priority", "attitude"});
  vp.owner.name = owner.attribute("name");
  auto priority = parse_priority(owner.attribute("priority"));
  if (!priority) {
    throw ValidationError("<owner>: priority '" + owner.attribute("priority") +
                          "' is not one of must-see|interesting|facultative");
  }
  vp.owner.priority = *priority;
  auto attitude = parse_attitude(owner.attribute("attitude"));
  if (!attitude) {
    throw ValidationError("<owner>: attitude '" + owner.attribute("attitude") +
                          "' is not one of good-news|neutral|bad-news");
  }
  vp.owner.attitude = *attitude;

  for (const auto& e : root.required_child("context").children) {
    if (e.name == "relation") {
      e.expect_only({"name", "source", "time-column"});
      vp.snapshot.relations.push_back({e.attribute("name"), e.attribute("source"), e.optional_attribute("time-column")});
    } else if (e.name == "view") {
      e.expect_only({"id", "relation", "kind", "role"});
      auto kind = parse_view_kind(e.attribute("kind"));
      auto role = parse_view_role(e.attribute("role"));
      if (!kind) throw ValidationError("<view>: unknown kind '" + e.attribute("kind") + "'");
      if (!role) throw ValidationError("<view>: unknown role '" + e.attribute("role") + "'");
      vp.snapshot.views.push_back({e.attribute("id"), e.attribute("relation"), *kind, *role});
    } else {
      throw ValidationError("<context>: unexpected element <" + e.name + ">");
    }
  }
  std::sort(vp.snapshot.relations.begin(), vp.snapshot.relations.end(),
            [](auto& a, auto& b) { return a.name < b.name; });
  std::sort(vp.snapshot.views.begin(), vp.snapshot.views.end(),
            [](auto& a, auto& b) { return a.id < b.id; });

  for (const auto& e : root.required_child("preferences").children) {
    if (e.name != "preference") throw ValidationError("<preferences>: unexpected element <" + e.name + ">");
    e.expect_only({"id", "scope", "instance", "category", "kind"});
    AssignmentKey key;
    key.pref_id = e.attribute("id");
    auto scope = parse_scope_level(e.attribute("scope"));
    if (!scope) throw ValidationError("preference '" + key.pref_id + "': unknown scope '" + e.attribute("scope") + "'");
    key.scope = *scope;
    key.instance = e.attribute("instance");
    const std::string where = "preference '" + key.pref_id + "' at " + describe_scope(key) + ": ";
    const auto* def = schema.find(key.pref_id);
    if (!def) throw NotFoundError(where + "unknown to the active schema");
    if (e.attribute("category") != def->category || e.attribute("kind") != def->type.to_string()) {
      throw ValidationError(where + "category/kind disagree with the active schema");
    }
    auto canonical = def->type.canonicalize(e.text);
    if (!canonical) {
      throw ValidationError(where + "value '" + e.text + "' is not a valid " + def->type.to_string());
    }
    if (!vp.snapshot.assignments.emplace(std::move(key), std::move(*canonical)).second) {
      throw ValidationError(where + "assigned twice");
    }
  }

  validate_viewpoint(vp, schema, areas);
  return vp;
}

Viewpoint load_viewpoint(const fs::path& path, const PreferenceSchema& schema, const AreaList& areas) {
  std::string bytes = read_file(path);
  try {
    return viewpoint_from_xml(bytes, schema, areas);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const NotFoundError& e) {
    throw NotFoundError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

Viewpoint save_viewpoint(Viewpoint vp, const fs::path& path, const PreferenceSchema& schema,
                         const Clock& clock) {
  vp.file.path = path.generic_string();
  vp.file.saved_at = format_timestamp(clock());
  write_file_atomic(path, viewpoint_to_xml(vp, schema));
  return vp;
}

Viewpoint edit_metadata(const Viewpoint& vp, const MetaChanges& changes, const AreaList& areas) {
  Viewpoint out = vp;
  if (changes.name) out.file.name = *changes.name;
  if (changes.description) out.content.description = *changes.description;
  if (changes.priority) out.owner.priority = *changes.priority;
  if (changes.attitude) out.owner.attitude = *changes.attitude;
  if (changes.area_id) out.content.area_id = *changes.area_id;
  if (changes.image) out.file.image = *changes.image;
  if (changes.owner) out.owner.name = *changes.owner;
  validate_meta(out, areas);
  return out;
}

void apply(const Viewpoint& vp, ApplicationState& state) { state.restore(vp.snapshot); }

}  // namespace traceview
