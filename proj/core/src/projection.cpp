#include "traceview/projection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "traceview/error.hpp"
#include "traceview/jacobi.hpp"

namespace traceview {

double Layout2D::distance(std::size_t i, std::size_t j) const {
  return std::hypot(points[i].x - points[j].x, points[i].y - points[j].y);
}

std::optional<std::size_t> Layout2D::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == label) return i;
  }
  return std::nullopt;
}

Layout2D mds_project(const DistanceMatrix& matrix) {
  const std::size_t n = matrix.size();
  Layout2D layout;
  layout.labels = matrix.labels();
  layout.points.assign(n, Point2D{});

  if (n == 1) {
    layout.eigenvalues = {0.0};
    return layout;
  }
  if (n == 2) {
    const double d = matrix(0, 1);
    layout.points[0] = {d / 2, 0};
    layout.points[1] = {-d / 2, 0};
    layout.eigenvalues = {d * d / 2, 0.0};
    return layout;
  }

  // B = -1/2 J D^2 J with J the centring matrix.
  std::vector<double> row_mean(n, 0.0);
  double grand_mean = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += matrix(i, j) * matrix(i, j);
    grand_mean += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand_mean /= static_cast<double>(n * n);
  SymmetricMatrix b(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d2 = matrix(i, j) * matrix(i, j);
      b(i, j) = -0.5 * (d2 - row_mean[i] - row_mean[j] + grand_mean);
    }
  }

  auto eig = jacobi_eigen(b);
  layout.eigenvalues = eig.values;
  const double largest = std::max(std::abs(eig.values.front()), std::numeric_limits<double>::min());
  layout.non_euclidean = std::any_of(eig.values.begin(), eig.values.end(),
                                     [&](double lambda) { return lambda < -1e-9 * largest; });

  for (std::size_t axis = 0; axis < 2; ++axis) {
    // Round-off spectrum (e.g. the second axis of collinear input) counts as zero.
    const double lambda = eig.values[axis] <= 1e-10 * largest ? 0.0 : eig.values[axis];
    const double scale = std::sqrt(lambda);
    std::vector<double> coord(n);
    double mean = 0;
    for (std::size_t i = 0; i < n; ++i) {
      coord[i] = eig.vectors[axis][i] * scale;
      mean += coord[i];
    }
    mean /= static_cast<double>(n);
    double extent = 0;
    for (auto& c : coord) {
      c -= mean;
      extent = std::max(extent, std::abs(c));
    }
    for (double c : coord) {
      if (std::abs(c) <= 1e-9 * extent) continue;
      if (c < 0) {
        for (auto& x : coord) x = -x;
      }
      break;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double value = coord[i] == 0.0 ? 0.0 : coord[i];  // no -0 in output
      (axis == 0 ? layout.points[i].x : layout.points[i].y) = value;
    }
  }
  return layout;
}

QualityMetrics quality(const DistanceMatrix& matrix, const Layout2D& layout) {
  const std::size_t n = matrix.size();
  if (layout.points.size() != n) {
    throw ValidationError("layout has " + std::to_string(layout.points.size()) + " points, matrix has " +
                          std::to_string(n) + " items");
  }
  QualityMetrics q;
  std::vector<double> ratios;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      PairQuality pair{i, j, matrix(i, j), layout.distance(i, j), std::nullopt};
      if (pair.computed > 0) {
        pair.ratio = pair.layout / pair.computed;
        ratios.push_back(*pair.ratio);
      } else {
        ++q.excluded_pairs;
      }
      q.pairs.push_back(pair);
    }
  }
  if (ratios.empty()) return q;

  double sum = 0;
  for (double r : ratios) sum += r;
  q.mean_ratio = sum / static_cast<double>(ratios.size());
  double squares = 0;
  for (double r : ratios) squares += (r - q.mean_ratio) * (r - q.mean_ratio);
  q.variance_ratio = squares / static_cast<double>(ratios.size());

  auto [lo_it, hi_it] = std::minmax_element(ratios.begin(), ratios.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (lo == hi) {
    q.histogram.push_back({lo, hi, ratios.size()});
    return q;
  }
  const double width = (hi - lo) / static_cast<double>(kHistogramBins);
  for (std::size_t k = 0; k < kHistogramBins; ++k) {
    q.histogram.push_back({lo + width * static_cast<double>(k),
                           k + 1 == kHistogramBins ? hi : lo + width * static_cast<double>(k + 1), 0});
  }
  for (double r : ratios) {
    auto bin = static_cast<std::size_t>(std::floor((r - lo) / width));
    ++q.histogram[std::min(bin, kHistogramBins - 1)].count;
  }
  return q;
}

Scenario scenario_from_path(const Layout2D& layout, const std::vector<std::string>& ids, std::string name) {
  if (ids.empty()) throw ValidationError("a drawn path needs at least one point");
  for (const auto& id : ids) {
    if (!layout.index_of(id)) throw NotFoundError("path point '" + id + "' is not in the layout");
  }
  return make_scenario(std::move(name), ids);
}

std::string_view to_string(EdgeLabel mode) {
  switch (mode) {
    case EdgeLabel::computed: return "computed";
    case EdgeLabel::layout: return "layout";
    case EdgeLabel::ratio: return "ratio";
  }
  return "computed";
}

std::optional<EdgeLabel> parse_edge_label(std::string_view text) {
  for (auto m : {EdgeLabel::computed, EdgeLabel::layout, EdgeLabel::ratio}) {
    if (to_string(m) == text) return m;
  }
  return std::nullopt;
}

namespace {

double round9(double x) {
  double r = std::round(x * 1e9) / 1e9;
  return r == 0.0 ? 0.0 : r;
}

}  // namespace

std::string export_layout(const Layout2D& layout, const QualityMetrics& metrics, EdgeLabel default_label) {
  using nlohmann::json;
  json points = json::array();
  for (std::size_t i = 0; i < layout.points.size(); ++i) {
    points.push_back({{"id", layout.labels[i]}, {"x", round9(layout.points[i].x)}, {"y", round9(layout.points[i].y)}});
  }
  json edges = json::array();
  for (const auto& p : metrics.pairs) {
    edges.push_back({{"a", layout.labels[p.i]},
                     {"b", layout.labels[p.j]},
                     {"computed", round9(p.computed)},
                     {"layout", round9(p.layout)},
                     {"ratio", p.ratio ? json(round9(*p.ratio)) : json(nullptr)}});
  }
  json histogram = json::array();
  for (const auto& b : metrics.histogram) {
    histogram.push_back({{"lo", round9(b.lo)}, {"hi", round9(b.hi)}, {"count", b.count}});
  }
  json doc = {{"points", std::move(points)},
              {"edges", std::move(edges)},
              {"metrics",
               {{"meanRatio", round9(metrics.mean_ratio)},
                {"varianceRatio", round9(metrics.variance_ratio)},
                {"histogram", std::move(histogram)},
                {"excludedPairs", metrics.excluded_pairs}}},
              {"defaultLabel", std::string(to_string(default_label))},
              {"nonEuclidean", layout.non_euclidean}};
  return doc.dump(2);
}

}  // namespace traceview
