#include "traceview/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace traceview {

namespace {

double off_diagonal_norm(const SymmetricMatrix& a) {
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

EigenDecomposition jacobi_eigen(const SymmetricMatrix& m, const JacobiOptions& options) {
  const std::size_t n = m.size();
  SymmetricMatrix a = m;
  SymmetricMatrix v(n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  double frobenius = 0;
  for (double x : m.data()) frobenius += x * x;
  const double threshold = options.tolerance * std::max(1.0, std::sqrt(frobenius));

  EigenDecomposition out;
  for (out.sweeps = 0; out.sweeps <= options.max_sweeps; ++out.sweeps) {
    if (off_diagonal_norm(a) <= threshold) {
      out.converged = true;
      break;
    }
    if (out.sweeps == options.max_sweeps) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p,q); the smaller root keeps |t| <= 1.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  for (std::size_t k : order) {
    out.values.push_back(a(k, k));
    std::vector<double> vec(n);
    for (std::size_t i = 0; i < n; ++i) vec[i] = v(i, k);
    out.vectors.push_back(std::move(vec));
  }
  return out;
}

}  // namespace traceview
