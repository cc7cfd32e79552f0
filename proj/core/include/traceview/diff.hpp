#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "traceview/assignment.hpp"
#include "traceview/schema.hpp"
#include "traceview/viewpoint.hpp"

namespace traceview {

struct DeltaSide {
  std::string kind;
  std::string value;

  friend bool operator==(const DeltaSide&, const DeltaSide&) = default;
};

/// One preference whose value differs, or which exists on one side only
/// (the missing side is nullopt).
struct PreferenceDelta {
  AssignmentKey key;
  Weight weight;
  std::optional<DeltaSide> left;
  std::optional<DeltaSide> right;

  friend bool operator==(const PreferenceDelta&, const PreferenceDelta&) = default;
};

struct CategoryDiff {
  std::string category;
  std::vector<PreferenceDelta> deltas;  // assignment-key order
  Weight distance;

  friend bool operator==(const CategoryDiff&, const CategoryDiff&) = default;
};

struct DiffReport {
  std::string left_id;
  std::string right_id;
  std::vector<CategoryDiff> categories;  // distance descending, then name
  Weight raw_distance;
  Weight max_distance;
  double normalized_percent = 0;

  friend bool operator==(const DiffReport&, const DiffReport&) = default;
};

/// 100 * raw / max, exactly 100 when raw == max and 0 when max == 0.
double normalized_percent(Weight raw, Weight max);

/// Sum of weights over the union of assignment keys of both viewpoints.
Weight calibrate_scale(const Viewpoint& v1, const Viewpoint& v2, const PreferenceSchema& schema);

/// Weighted diff of the assignment sets. Metadata is ignored. Values are
/// compared on their canonical text; a key present on one side only counts
/// with its full weight.
DiffReport diff(const Viewpoint& v1, const Viewpoint& v2, const PreferenceSchema& schema);

struct CategoryDistance {
  std::string category;
  Weight distance;

  friend bool operator==(const CategoryDistance&, const CategoryDistance&) = default;
};

/// The k categories that differ most, distance descending, ties by name.
std::vector<CategoryDistance> top_categories(const DiffReport& report, std::size_t k = 3);

std::string diff_to_xml(const DiffReport& report);
DiffReport diff_from_xml(std::string_view document);
void write_diff(const DiffReport& report, const std::filesystem::path& path);
DiffReport read_diff(const std::filesystem::path& path);

/// Labelled, symmetric, zero-diagonal matrix of non-negative distances.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  /// Throws ValidationError unless the matrix is square, symmetric,
  /// non-negative with a zero diagonal, and n >= 1.
  DistanceMatrix(std::vector<std::string> labels, std::vector<double> row_major);

  std::size_t size() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<std::string> labels_;
  std::vector<double> values_;
};

/// Pairwise raw distances, labelled with each viewpoint's file name.
DistanceMatrix distance_matrix(const std::vector<Viewpoint>& viewpoints,
                               const PreferenceSchema& schema);
DistanceMatrix distance_matrix(const std::vector<Viewpoint>& viewpoints,
                               const std::vector<std::string>& labels,
                               const PreferenceSchema& schema);

}  // namespace traceview
