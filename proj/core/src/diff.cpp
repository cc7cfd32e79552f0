#include "traceview/diff.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "traceview/error.hpp"
#include "traceview/io.hpp"
#include "traceview/text.hpp"
#include "traceview/xml.hpp"

namespace traceview {

namespace {

void check_assignments(const Viewpoint& vp, const PreferenceSchema& schema) {
  for (const auto& [key, value] : vp.snapshot.assignments) {
    const auto* def = schema.find(key.pref_id);
    const std::string where = "viewpoint '" + vp.file.name + "': preference '" + key.pref_id + "' ";
    if (!def) throw ValidationError(where + "is unknown to the active schema");
    if (!def->applies_to(key.scope)) {
      throw ValidationError(where + "is not applicable at " + std::string(to_string(key.scope)) + " scope");
    }
    auto canonical = def->type.canonicalize(value);
    if (!canonical || *canonical != value) {
      throw ValidationError(where + "holds a non-canonical value '" + value + "'");
    }
  }
}

// Walks the union of both key sets in canonical order.
template <typename Visit>
void for_each_union_key(const AssignmentMap& a, const AssignmentMap& b, Visit&& visit) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      visit(ia->first, &ia->second, nullptr);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      visit(ib->first, nullptr, &ib->second);
      ++ib;
    } else {
      visit(ia->first, &ia->second, &ib->second);
      ++ia;
      ++ib;
    }
  }
}

bool by_distance_then_name(const CategoryDiff& a, const CategoryDiff& b) {
  if (a.distance != b.distance) return a.distance > b.distance;
  return a.category < b.category;
}

}  // namespace

double normalized_percent(Weight raw, Weight max) {
  if (max.micros() <= 0 || raw.micros() <= 0) return 0.0;
  if (raw >= max) return 100.0;
  // Six fractional digits, keeping 0 and 100 for "identical" and "completely
  // different" only.
  double percent = 100.0 * static_cast<double>(raw.micros()) / static_cast<double>(max.micros());
  double micros = std::round(percent * 1e6);
  micros = std::clamp(micros, 1.0, 1e8 - 1.0);
  return micros / 1e6;
}

Weight calibrate_scale(const Viewpoint& v1, const Viewpoint& v2, const PreferenceSchema& schema) {
  Weight max;
  for_each_union_key(v1.snapshot.assignments, v2.snapshot.assignments,
                     [&](const AssignmentKey& key, const std::string*, const std::string*) {
                       max += schema.lookup(key.pref_id).weight;
                     });
  return max;
}

DiffReport diff(const Viewpoint& v1, const Viewpoint& v2, const PreferenceSchema& schema) {
  check_assignments(v1, schema);
  check_assignments(v2, schema);

  DiffReport report;
  report.left_id = v1.file.name;
  report.right_id = v2.file.name;

  std::map<std::string, CategoryDiff> grouped;
  for_each_union_key(v1.snapshot.assignments, v2.snapshot.assignments,
                     [&](const AssignmentKey& key, const std::string* left, const std::string* right) {
                       const auto& def = schema.lookup(key.pref_id);
                       report.max_distance += def.weight;
                       if (left && right && *left == *right) return;
                       PreferenceDelta delta{key, def.weight, std::nullopt, std::nullopt};
                       const std::string kind = def.type.to_string();
                       if (left) delta.left = DeltaSide{kind, *left};
                       if (right) delta.right = DeltaSide{kind, *right};
                       auto& cat = grouped[def.category];
                       cat.category = def.category;
                       cat.distance += def.weight;
                       cat.deltas.push_back(std::move(delta));
                     });

  for (auto& [name, cat] : grouped) {
    report.raw_distance += cat.distance;
    report.categories.push_back(std::move(cat));
  }
  std::sort(report.categories.begin(), report.categories.end(), by_distance_then_name);
  report.normalized_percent = normalized_percent(report.raw_distance, report.max_distance);
  return report;
}

std::vector<CategoryDistance> top_categories(const DiffReport& report, std::size_t k) {
  std::vector<CategoryDiff> sorted = report.categories;
  std::sort(sorted.begin(), sorted.end(), by_distance_then_name);
  std::vector<CategoryDistance> out;
  for (std::size_t i = 0; i < sorted.size() && i < k; ++i) {
    out.push_back({sorted[i].category, sorted[i].distance});
  }
  return out;
}

// ---------------------------------------------------------------------------
// XML

std::string diff_to_xml(const DiffReport& report) {
  xml::Writer w;
  w.open("viewpoint-diff")
      .attr("format-version", "1")
      .attr("left", report.left_id)
      .attr("right", report.right_id)
      .attr("raw-distance", report.raw_distance.to_string())
      .attr("max-distance", report.max_distance.to_string())
      .attr("normalized-percent", format_fixed_trimmed(report.normalized_percent, 6));
  auto categories = report.categories;
  std::stable_sort(categories.begin(), categories.end(), by_distance_then_name);
  for (const auto& cat : categories) {
    w.open("category").attr("name", cat.category).attr("distance", cat.distance.to_string());
    for (const auto& d : cat.deltas) {
      w.open("preference")
          .attr("id", d.key.pref_id)
          .attr("scope", to_string(d.key.scope))
          .attr("instance", d.key.instance)
          .attr("weight", d.weight.to_string());
      auto side = [&](std::string_view tag, const std::optional<DeltaSide>& s) {
        w.open(tag);
        if (s) {
          w.attr("kind", s->kind).text_element(s->value);
        } else {
          w.attr("missing", "true").close();
        }
      };
      side("left", d.left);
      side("right", d.right);
      w.close();
    }
    w.close();
  }
  w.close();
  return w.str();
}

namespace {

Weight parse_weight_attr(const xml::Element& e, std::string_view key) {
  const auto& text = e.attribute(key);
  auto w = Weight::parse(text);
  if (!w) throw ValidationError("<" + e.name + ">: " + std::string(key) + " '" + text + "' is not a weight");
  return *w;
}

std::optional<DeltaSide> parse_side(const xml::Element& pref, std::string_view tag) {
  const auto& e = pref.required_child(tag);
  e.expect_only({"kind", "missing"});
  if (auto missing = e.optional_attribute("missing")) {
    if (*missing != "true") throw ValidationError("<" + e.name + ">: missing must be \"true\"");
    return std::nullopt;
  }
  return DeltaSide{e.attribute("kind"), e.text};
}

}  // namespace

DiffReport diff_from_xml(std::string_view document) {
  auto root = xml::parse(document);
  if (root.name != "viewpoint-diff") throw ValidationError("expected <viewpoint-diff>, found <" + root.name + ">");
  if (root.attribute("format-version") != "1") {
    throw ValidationError("<viewpoint-diff>: unsupported format-version '" + root.attribute("format-version") + "'");
  }
  DiffReport report;
  report.left_id = root.attribute("left");
  report.right_id = root.attribute("right");
  report.raw_distance = parse_weight_attr(root, "raw-distance");
  report.max_distance = parse_weight_attr(root, "max-distance");
  auto percent = parse_decimal(root.attribute("normalized-percent"));
  if (!percent || *percent < 0 || *percent > 100) {
    throw ValidationError("<viewpoint-diff>: normalized-percent must lie in [0, 100]");
  }
  report.normalized_percent = *percent;
  for (const auto& c : root.children) {
    if (c.name != "category") throw ValidationError("<viewpoint-diff>: unexpected element <" + c.name + ">");
    CategoryDiff cat;
    cat.category = c.attribute("name");
    cat.distance = parse_weight_attr(c, "distance");
    for (const auto& p : c.children) {
      if (p.name != "preference") throw ValidationError("<category>: unexpected element <" + p.name + ">");
      PreferenceDelta d;
      d.key.pref_id = p.attribute("id");
      auto scope = parse_scope_level(p.attribute("scope"));
      if (!scope) throw ValidationError("<preference>: unknown scope '" + p.attribute("scope") + "'");
      d.key.scope = *scope;
      d.key.instance = p.attribute("instance");
      d.weight = parse_weight_attr(p, "weight");
      d.left = parse_side(p, "left");
      d.right = parse_side(p, "right");
      cat.deltas.push_back(std::move(d));
    }
    report.categories.push_back(std::move(cat));
  }
  return report;
}

void write_diff(const DiffReport& report, const std::filesystem::path& path) {
  write_file_atomic(path, diff_to_xml(report));
}

DiffReport read_diff(const std::filesystem::path& path) { return diff_from_xml(read_file(path)); }

// ---------------------------------------------------------------------------
// Distance matrix

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, std::vector<double> row_major)
    : labels_(std::move(labels)), values_(std::move(row_major)) {
  const std::size_t n = labels_.size();
  if (n == 0) throw ValidationError("distance matrix needs at least one item");
  if (values_.size() != n * n) throw ValidationError("distance matrix is not square");
  for (std::size_t i = 0; i < n; ++i) {
    if (values_[i * n + i] != 0.0) throw ValidationError("distance matrix has a non-zero diagonal");
    for (std::size_t j = 0; j < n; ++j) {
      double v = values_[i * n + j];
      if (!std::isfinite(v) || v < 0) throw ValidationError("distance matrix has a negative or non-finite entry");
      if (v != values_[j * n + i]) throw ValidationError("distance matrix is not symmetric");
    }
  }
}

DistanceMatrix distance_matrix(const std::vector<Viewpoint>& viewpoints,
                               const std::vector<std::string>& labels,
                               const PreferenceSchema& schema) {
  const std::size_t n = viewpoints.size();
  if (labels.size() != n) throw ValidationError("one label per viewpoint is required");
  for (std::size_t i = 0; i < n; ++i) {
    try {
      check_assignments(viewpoints[i], schema);
    } catch (const ValidationError& e) {
      throw ValidationError("viewpoint '" + labels[i] + "' fails validation: " + e.what());
    }
  }
  std::vector<double> values(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = diff(viewpoints[i], viewpoints[j], schema).raw_distance.to_double();
      values[i * n + j] = d;
      values[j * n + i] = d;
    }
  }
  return DistanceMatrix(labels, std::move(values));
}

DistanceMatrix distance_matrix(const std::vector<Viewpoint>& viewpoints, const PreferenceSchema& schema) {
  std::vector<std::string> labels;
  for (const auto& vp : viewpoints) labels.push_back(vp.file.name);
  return distance_matrix(viewpoints, labels, schema);
}

}  // namespace traceview
