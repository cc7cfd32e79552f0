#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "traceview/diff.hpp"
#include "traceview/scenario.hpp"

namespace traceview {

struct Point2D {
  double x = 0;
  double y = 0;

  friend bool operator==(const Point2D&, const Point2D&) = default;
};

/// Classical MDS embedding. `eigenvalues` keeps the whole spectrum of the
/// double-centred matrix, descending.
struct Layout2D {
  std::vector<std::string> labels;
  std::vector<Point2D> points;
  std::vector<double> eigenvalues;
  /// Set when a negative eigenvalue exceeds 1e-9 of the largest in
  /// magnitude: the input distances are not Euclidean.
  bool non_euclidean = false;

  double distance(std::size_t i, std::size_t j) const;
  std::optional<std::size_t> index_of(std::string_view label) const;
};

/// Torgerson scaling: B = -1/2 J D^2 J, two leading eigenpairs, negative
/// eigenvalues (and those below 1e-10 of the largest) clamped to zero. Axes
/// are oriented so that the first point with a non-zero coordinate on that
/// axis is positive.
Layout2D mds_project(const DistanceMatrix& matrix);

struct PairQuality {
  std::size_t i = 0;
  std::size_t j = 0;
  double computed = 0;
  double layout = 0;
  std::optional<double> ratio;  // layout / computed; undefined when computed == 0

  friend bool operator==(const PairQuality&, const PairQuality&) = default;
};

struct HistogramBin {
  double lo = 0;
  double hi = 0;
  std::size_t count = 0;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

struct QualityMetrics {
  std::vector<PairQuality> pairs;  // all i < j, row-major
  double mean_ratio = 0;
  double variance_ratio = 0;  // population variance
  std::vector<HistogramBin> histogram;
  std::size_t excluded_pairs = 0;

  friend bool operator==(const QualityMetrics&, const QualityMetrics&) = default;
};

inline constexpr std::size_t kHistogramBins = 10;

QualityMetrics quality(const DistanceMatrix& matrix, const Layout2D& layout);

/// Steps follow the drawn order; revisits are kept.
Scenario scenario_from_path(const Layout2D& layout, const std::vector<std::string>& ids,
                            std::string name);

enum class EdgeLabel { computed, layout, ratio };

std::string_view to_string(EdgeLabel mode);
std::optional<EdgeLabel> parse_edge_label(std::string_view text);

/// JSON document consumed by the projection view: points, every pairwise
/// edge with its three label values, and the quality metrics. Numbers are
/// rounded to nine fractional digits.
std::string export_layout(const Layout2D& layout, const QualityMetrics& metrics,
                          EdgeLabel default_label);

}  // namespace traceview
