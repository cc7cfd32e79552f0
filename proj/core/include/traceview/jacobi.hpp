#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace traceview {

/// Dense symmetric n x n matrix, row-major.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

  std::size_t size() const { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  std::span<const double> data() const { return a_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

struct EigenDecomposition {
  std::vector<double> values;                // descending; ties keep index order
  std::vector<std::vector<double>> vectors;  // vectors[k] pairs with values[k], unit length
  std::size_t sweeps = 0;
  bool converged = false;
};

struct JacobiOptions {
  /// Stop once the off-diagonal Frobenius norm falls below
  /// tolerance * max(1, Frobenius norm of the input).
  double tolerance = 1e-12;
  std::size_t max_sweeps = 100;
};

/// Cyclic Jacobi rotations.
EigenDecomposition jacobi_eigen(const SymmetricMatrix& m, const JacobiOptions& options = {});

}  // namespace traceview
