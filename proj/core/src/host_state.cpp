#include "traceview/host_state.hpp"

#include <algorithm>
#include <charconv>

#include "traceview/error.hpp"
#include "traceview/text.hpp"

namespace traceview {

namespace fs = std::filesystem;

std::string_view to_string(ViewKind kind) {
  switch (kind) {
    case ViewKind::table: return "table";
    case ViewKind::pie: return "pie";
    case ViewKind::treemap: return "treemap";
    case ViewKind::temporal: return "temporal";
  }
  return "?";
}

std::string_view to_string(ViewRole role) { return role == ViewRole::master ? "master" : "detail"; }

std::optional<ViewKind> parse_view_kind(std::string_view text) {
  for (auto k : {ViewKind::table, ViewKind::pie, ViewKind::treemap, ViewKind::temporal}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::optional<ViewRole> parse_view_role(std::string_view text) {
  if (text == "master") return ViewRole::master;
  if (text == "detail") return ViewRole::detail;
  return std::nullopt;
}

std::string WindowGeometry::to_string() const {
  return std::to_string(x) + "," + std::to_string(y) + "," + std::to_string(width) + "," +
         std::to_string(height);
}

std::optional<WindowGeometry> WindowGeometry::parse(std::string_view text) {
  auto parts = split(text, ',');
  if (parts.size() != 4) return std::nullopt;
  int v[4];
  for (int i = 0; i < 4; ++i) {
    const auto& p = parts[i];
    auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v[i]);
    if (p.empty() || ec != std::errc{} || ptr != p.data() + p.size()) return std::nullopt;
  }
  if (v[2] <= 0 || v[3] <= 0) return std::nullopt;
  return WindowGeometry{v[0], v[1], v[2], v[3]};
}

// ---------------------------------------------------------------------------
// Filter codec: "id|attribute|range|lo|hi" or "id|attribute|in|v1,v2",
// entries joined by ';', components percent-escaped.

namespace {

constexpr std::string_view kReserved = "|;,";

std::string esc(std::string_view s) { return percent_escape(s, kReserved); }

std::string unesc(std::string_view s, std::string_view view_id) {
  auto out = percent_unescape(s);
  if (!out) throw ValidationError("view '" + std::string(view_id) + "': bad escape in filter criteria");
  return *out;
}

}  // namespace

std::string encode_filters(const std::vector<Filter>& filters) {
  std::vector<const Filter*> sorted;
  for (const auto& f : filters) sorted.push_back(&f);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->id < b->id; });
  std::vector<std::string> entries;
  for (const auto* f : sorted) {
    std::string e = esc(f->id) + "|" + esc(f->attribute) + "|";
    if (const auto* range = std::get_if<NumericRange>(&f->criterion)) {
      e += "range|" + format_decimal(range->lo) + "|" + format_decimal(range->hi);
    } else {
      std::vector<std::string> values;
      for (const auto& v : std::get<std::vector<std::string>>(f->criterion)) values.push_back(esc(v));
      e += "in|" + join(values, ",");
    }
    entries.push_back(std::move(e));
  }
  return join(entries, ";");
}

std::vector<Filter> decode_filters(std::string_view view_id, std::string_view text) {
  std::vector<Filter> out;
  if (text.empty()) return out;
  const std::string where = "view '" + std::string(view_id) + "': filter criteria ";
  for (const auto& entry : split(text, ';')) {
    auto fields = split(entry, '|');
    if (fields.size() < 4) throw ValidationError(where + "entry '" + entry + "' is malformed");
    Filter f;
    f.id = unesc(fields[0], view_id);
    f.view = std::string(view_id);
    f.attribute = unesc(fields[1], view_id);
    if (f.id.empty() || f.attribute.empty()) {
      throw ValidationError(where + "entry '" + entry + "' lacks an id or attribute");
    }
    if (fields[2] == "range" && fields.size() == 5) {
      auto lo = parse_decimal(fields[3]);
      auto hi = parse_decimal(fields[4]);
      if (!lo || !hi) throw ValidationError(where + "entry '" + entry + "' has a non-numeric bound");
      f.criterion = NumericRange{*lo, *hi};
    } else if (fields[2] == "in" && fields.size() == 4 && !fields[3].empty()) {
      std::vector<std::string> values;
      for (const auto& v : split(fields[3], ',')) values.push_back(unesc(v, view_id));
      f.criterion = std::move(values);
    } else {
      throw ValidationError(where + "entry '" + entry + "' is malformed");
    }
    out.push_back(std::move(f));
  }
  return out;
}

// ---------------------------------------------------------------------------
// ApplicationState

ApplicationState::ApplicationState(std::shared_ptr<const PreferenceSchema> schema)
    : schema_(std::move(schema)) {
  if (!schema_) throw ValidationError("application state requires a schema");
  assign_defaults(ScopeLevel::application, {});
}

std::optional<std::string> ApplicationState::value(const AssignmentKey& key) const {
  auto it = assignments_.find(key);
  if (it == assignments_.end()) return std::nullopt;
  return it->second;
}

void ApplicationState::assign_defaults(ScopeLevel level, const std::string& instance) {
  for (const auto& p : schema_->preferences()) {
    if (p.applies_to(level)) apply_assignment({p.id, level, instance}, p.default_value, false);
  }
}

const Relation& ApplicationState::load_dataset(const fs::path& csv_path, std::string name,
                                               std::optional<std::string> time_column) {
  if (name.empty()) name = csv_path.stem().string();
  if (relations_.contains(name)) {
    throw ValidationError("relation '" + name + "' is already loaded");
  }
  Relation r = read_relation(csv_path, name, std::move(time_column));
  auto saved = *this;
  try {
    relations_.emplace(name, std::move(r));
    assign_defaults(ScopeLevel::relation, name);
  } catch (...) {
    *this = std::move(saved);
    throw;
  }
  return relations_.at(name);
}

const View& ApplicationState::add_view(const ViewSpec& spec) {
  if (spec.id.empty()) throw ValidationError("view id must not be empty");
  if (views_.contains(spec.id)) throw ValidationError("view '" + spec.id + "' already exists");
  if (!relations_.contains(spec.relation)) {
    throw NotFoundError("view '" + spec.id + "': unknown relation '" + spec.relation + "'");
  }
  auto saved = *this;
  try {
    View v;
    v.id = spec.id;
    v.relation = spec.relation;
    v.kind = spec.kind;
    v.role = spec.role;
    views_.emplace(spec.id, std::move(v));
    assign_defaults(ScopeLevel::view, spec.id);
  } catch (...) {
    *this = std::move(saved);
    throw;
  }
  return views_.at(spec.id);
}

View& ApplicationState::view_for(const std::string& id) {
  auto it = views_.find(id);
  if (it == views_.end()) throw NotFoundError("unknown view '" + id + "'");
  return it->second;
}

std::string ApplicationState::checked_value(const AssignmentKey& key, std::string_view raw) const {
  const auto* def = schema_->find(key.pref_id);
  if (!def) throw NotFoundError("unknown preference '" + key.pref_id + "'");
  if (!def->applies_to(key.scope)) {
    throw ValidationError("preference '" + key.pref_id + "' is not applicable at " +
                          std::string(to_string(key.scope)) + " scope");
  }
  const Relation* relation = nullptr;
  switch (key.scope) {
    case ScopeLevel::application:
      if (!key.instance.empty()) {
        throw ValidationError("application-scope assignment must not name an instance");
      }
      break;
    case ScopeLevel::relation: {
      auto it = relations_.find(key.instance);
      if (it == relations_.end()) throw NotFoundError("unknown relation '" + key.instance + "'");
      relation = &it->second;
      break;
    }
    case ScopeLevel::view: {
      auto it = views_.find(key.instance);
      if (it == views_.end()) throw NotFoundError("unknown view '" + key.instance + "'");
      relation = &relations_.at(it->second.relation);
      break;
    }
  }
  auto canonical = def->type.canonicalize(raw);
  if (!canonical) {
    throw ValidationError("type mismatch: '" + key.pref_id + "' expects " + def->type.to_string() +
                          ", got '" + std::string(raw) + "'");
  }
  if (def->type.kind == ValueKind::attribute_list && relation && !canonical->empty()) {
    for (const auto& a : split(*canonical, ',')) {
      if (!relation->find_column(a)) {
        throw ValidationError("'" + key.pref_id + "': relation '" + relation->name +
                              "' has no column '" + a + "'");
      }
    }
  }
  return *canonical;
}

void ApplicationState::apply_assignment(const AssignmentKey& key, std::string_view raw,
                                        bool propagate) {
  std::string value = checked_value(key, raw);
  if (key.scope != ScopeLevel::view) {
    assignments_[key] = std::move(value);
    return;
  }

  View& view = view_for(key.instance);
  const Relation& relation = relations_.at(view.relation);
  const std::string where = "view '" + view.id + "': ";
  const std::string_view id = key.pref_id;

  if (id == pref_ids::kCurrentNode) {
    if (value != "root") {
      std::size_t row = 0;
      auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), row);
      bool canonical_index = ec == std::errc{} && p == value.data() + value.size() &&
                             (value == "0" || value[0] != '0');
      if (!canonical_index || row >= relation.rows.size()) {
        throw ValidationError(where + "current node '" + value + "' is neither 'root' nor a row of '" +
                              relation.name + "'");
      }
    }
    view.current_node = value;
    assignments_[key] = value;
    if (propagate && view.role == ViewRole::master) {
      for (auto& [other_id, other] : views_) {
        if (other.role == ViewRole::detail && other.relation == view.relation) {
          other.current_node = value;
          assignments_[AssignmentKey::view(key.pref_id, other_id)] = value;
        }
      }
    }
    return;
  }
  if (id == pref_ids::kAttributes) {
    view.attributes = value.empty() ? std::vector<std::string>{} : split(value, ',');
  } else if (id == pref_ids::kWindowGeometry) {
    auto g = WindowGeometry::parse(value);
    if (!g) throw ValidationError(where + "window geometry '" + value + "' is not x,y,width,height");
    view.geometry = *g;
    value = g->to_string();
  } else if (id == pref_ids::kPeriodStart || id == pref_ids::kPeriodEnd) {
    if (!value.empty() && !parse_iso_date(value)) {
      throw ValidationError(where + "period bound '" + value + "' is not an ISO date");
    }
    (id == pref_ids::kPeriodStart ? view.period_start : view.period_end) = value;
  } else if (id == pref_ids::kFilterCriteria) {
    auto filters = decode_filters(view.id, value);
    for (const auto& f : filters) {
      const auto* col = relation.find_column(f.attribute);
      if (!col) {
        throw ValidationError(where + "filter '" + f.id + "' names unknown column '" + f.attribute + "'");
      }
      if (const auto* range = std::get_if<NumericRange>(&f.criterion)) {
        if (col->kind != ColumnKind::numeric) {
          throw ValidationError(where + "filter '" + f.id + "' ranges over non-numeric column '" +
                                f.attribute + "'");
        }
        if (range->lo > range->hi) {
          throw ValidationError(where + "filter '" + f.id + "' requires lo <= hi");
        }
      }
      auto other = filters_.find(f.id);
      if (other != filters_.end() && other->second.view != view.id) {
        throw ValidationError(where + "filter id '" + f.id + "' already belongs to view '" +
                              other->second.view + "'");
      }
    }
    for (auto it = filters_.begin(); it != filters_.end();) {
      it = it->second.view == view.id ? filters_.erase(it) : std::next(it);
    }
    for (auto& f : filters) filters_.emplace(f.id, f);
    value = encode_filters(filters);
  }
  assignments_[key] = std::move(value);
}

void ApplicationState::set_preference(const AssignmentKey& key, std::string_view value) {
  apply_assignment(key, value, true);
}

namespace {

void require_pref(const PreferenceSchema& schema, std::string_view id) {
  if (!schema.find(id)) {
    throw ValidationError("the active schema does not define '" + std::string(id) + "'");
  }
}

}  // namespace

void ApplicationState::mutate(const ExplorationAction& action) {
  std::visit(
      [this](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, action::SetCurrentNode>) {
          require_pref(*schema_, pref_ids::kCurrentNode);
          apply_assignment(AssignmentKey::view(std::string(pref_ids::kCurrentNode), a.view), a.node, true);
        } else if constexpr (std::is_same_v<T, action::SetAttributes>) {
          require_pref(*schema_, pref_ids::kAttributes);
          apply_assignment(AssignmentKey::view(std::string(pref_ids::kAttributes), a.view),
                           join(a.attributes, ","), true);
        } else if constexpr (std::is_same_v<T, action::SetFilterRange>) {
          require_pref(*schema_, pref_ids::kFilterCriteria);
          if (!(a.lo <= a.hi)) throw ValidationError("filter '" + a.filter_id + "' requires lo <= hi");
          view_for(a.view);
          std::vector<Filter> filters;
          for (const auto& [id, f] : filters_) {
            if (f.view == a.view && id != a.filter_id) filters.push_back(f);
          }
          filters.push_back({a.filter_id, a.view, a.attribute, NumericRange{a.lo, a.hi}});
          apply_assignment(AssignmentKey::view(std::string(pref_ids::kFilterCriteria), a.view),
                           encode_filters(filters), true);
        } else if constexpr (std::is_same_v<T, action::MoveWindow>) {
          require_pref(*schema_, pref_ids::kWindowGeometry);
          apply_assignment(AssignmentKey::view(std::string(pref_ids::kWindowGeometry), a.view),
                           a.geometry.to_string(), true);
        }
      },
      action);
}

Snapshot ApplicationState::snapshot() const {
  Snapshot s;
  for (const auto& [name, r] : relations_) s.relations.push_back({name, r.source, r.time_column});
  for (const auto& [id, v] : views_) s.views.push_back({id, v.relation, v.kind, v.role});
  s.assignments = assignments_;
  return s;
}

void ApplicationState::restore(const Snapshot& snapshot) {
  ApplicationState fresh(schema_);
  for (const auto& rs : snapshot.relations) {
    if (!fs::exists(rs.source)) {
      throw MissingDatasetError("relation '" + rs.name + "': missing dataset " + rs.source, rs.source);
    }
    try {
      fresh.load_dataset(rs.source, rs.name, rs.time_column);
    } catch (const IoError& e) {
      throw MissingDatasetError("relation '" + rs.name + "': cannot read dataset " + rs.source,
                                rs.source);
    }
  }
  for (const auto& vs : snapshot.views) fresh.add_view(vs);
  for (const auto& [key, value] : snapshot.assignments) fresh.apply_assignment(key, value, false);
  *this = std::move(fresh);
}

std::optional<DateSpan> ApplicationState::displayed_period() const {
  using std::chrono::year_month_day;
  std::optional<DateSpan> out;
  for (const auto& [id, view] : views_) {
    const auto& relation = relations_.at(view.relation);
    if (!relation.time_column || relation.rows.empty()) continue;
    auto c = *relation.column_index(*relation.time_column);
    DateSpan span{};
    bool first = true;
    for (const auto& row : relation.rows) {
      auto d = *parse_iso_date(row[c]);
      if (first || d.first < span.first) span.first = d.first;
      if (first || span.last < d.last) span.last = d.last;
      first = false;
    }
    if (auto s = parse_iso_date(view.period_start)) span.first = s->first;
    if (auto e = parse_iso_date(view.period_end)) span.last = e->last;
    if (span.last < span.first) std::swap(span.first, span.last);
    if (!out) {
      out = span;
    } else {
      out->first = std::min(out->first, span.first);
      out->last = std::max(out->last, span.last);
    }
  }
  return out;
}

}  // namespace traceview
