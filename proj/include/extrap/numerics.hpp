// Copyright 2026 The Extrap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EXTRAP_NUMERICS_HPP
#define EXTRAP_NUMERICS_HPP

// Small dense linear algebra, activations, a portable seeded generator and a
// finite-difference gradient checker. Everything is double precision.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace extrap {

using Vector = std::vector<double>;

/// Row-major dense matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
      if (row.size() != cols_) {
        throw std::invalid_argument("Matrix: ragged initializer");
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vector add(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("add: length mismatch");
  Vector r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vector concat(std::span<const double> a, std::span<const double> b) {
  Vector r(a.begin(), a.end());
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

inline Vector matvec(const Matrix& m, std::span<const double> v) {
  if (m.cols() != v.size()) {
    throw std::invalid_argument("matvec: matrix has " + std::to_string(m.cols()) +
                                " columns but vector has length " +
                                std::to_string(v.size()));
  }
  Vector r(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) r[i] = dot(m.row(i), v);
  return r;
}

/// mᵀ·v without forming the transpose.
inline Vector matvec_transposed(const Matrix& m, std::span<const double> v) {
  if (m.rows() != v.size()) {
    throw std::invalid_argument("matvec_transposed: dimension mismatch");
  }
  Vector r(m.cols(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto row = m.row(i);
    for (std::size_t j = 0; j < m.cols(); ++j) r[j] += row[j] * v[i];
  }
  return r;
}

/// m += scale · a ⊗ b
inline void add_outer(Matrix& m, std::span<const double> a, std::span<const double> b,
                      double scale = 1.0) {
  if (m.rows() != a.size() || m.cols() != b.size()) {
    throw std::invalid_argument("add_outer: dimension mismatch");
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto row = m.row(i);
    const double ai = scale * a[i];
    for (std::size_t j = 0; j < b.size(); ++j) row[j] += ai * b[j];
  }
}

inline Vector softmax(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("softmax: empty input");
  const double peak = *std::max_element(v.begin(), v.end());
  Vector r(v.size());
  double total = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    r[i] = std::exp(v[i] - peak);
    total += r[i];
  }
  for (double& x : r) x /= total;
  return r;
}

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// ‖mᵀm − I‖_∞ (largest absolute entry).
inline double orthogonality_error(const Matrix& m) {
  double worst = 0.0;
  for (std::size_t i = 0; i < m.cols(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m.rows(); ++k) s += m(k, i) * m(k, j);
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

/// Modified Gram–Schmidt on the rows of a square matrix, top to bottom.
/// Throws if a row is numerically dependent on the previous ones.
///
/// Row order matters for the ortho model: a column that never receives
/// gradient (the least significant bit on even inputs) is still re-derived
/// from the other rows, whereas column-order Gram–Schmidt would pin it at its
/// initial value.
inline Matrix orthonormal_retraction(const Matrix& m, double rank_tol = 1e-12) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("orthonormal_retraction: matrix must be square");
  }
  Matrix r = m;
  const std::size_t n = r.rows();
  double scale = 0.0;
  for (double x : m.data()) scale = std::max(scale, std::abs(x));
  for (std::size_t i = 0; i < n; ++i) {
    auto ri = r.row(i);
    // second pass restores orthogonality lost to cancellation
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t k = 0; k < i; ++k) {
        const auto rk = r.row(k);
        const double proj = dot(ri, rk);
        for (std::size_t j = 0; j < n; ++j) ri[j] -= proj * rk[j];
      }
    }
    const double len = norm(ri);
    if (!(len > rank_tol * std::max(scale, 1.0))) {
      throw std::domain_error("orthonormal_retraction: rank-deficient input (row " +
                              std::to_string(i) + ")");
    }
    for (double& x : ri) x /= len;
  }
  return r;
}

/// SplitMix64 (Steele, Lea & Flood, 2014). The full update rule is
/// state += 0x9e3779b97f4a7c15, followed by the xor-shift-multiply finalizer
/// below. Integer-only, so sequences are identical on every platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n), unbiased by rejection.
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("SeededRng::below: n must be positive");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Fisher–Yates with this generator (std::shuffle is not portable).
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::swap(items[i - 1], items[below(i)]);
    }
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

inline void fill_uniform(std::span<double> out, SeededRng& rng, double lo, double hi) {
  for (double& x : out) x = rng.uniform(lo, hi);
}

struct GradCheckReport {
  double max_abs_diff = 0.0;
  double max_rel_diff = 0.0;
  std::size_t n_params = 0;
};

/// Signature of a differentiable objective: returns the loss at `params` and,
/// when `grad` is non-null, writes the analytic gradient into it.
using LossWithGrad = std::function<double(std::span<const double> params, Vector* grad)>;

/// Compares the analytic gradient of `loss` at `params` with central
/// differences. The relative difference is |analytic − numeric| divided by
/// max(|numeric|, rel_floor), so an analytic gradient off by 2× reports 1.0.
inline GradCheckReport finite_diff_gradcheck(const LossWithGrad& loss,
                                             std::span<const double> params,
                                             double epsilon, double rel_floor = 1e-4) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("gradcheck: epsilon must be positive");
  Vector analytic;
  const double base = loss(params, &analytic);
  if (!std::isfinite(base)) throw std::domain_error("gradcheck: non-finite loss");
  if (analytic.size() != params.size()) {
    throw std::invalid_argument("gradcheck: gradient has wrong length");
  }
  Vector probe(params.begin(), params.end());
  GradCheckReport report;
  report.n_params = params.size();
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + epsilon;
    const double up = loss(probe, nullptr);
    probe[i] = saved - epsilon;
    const double down = loss(probe, nullptr);
    probe[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw std::domain_error("gradcheck: non-finite loss at parameter " +
                              std::to_string(i));
    }
    const double numeric = (up - down) / (2.0 * epsilon);
    const double abs_diff = std::abs(analytic[i] - numeric);
    report.max_abs_diff = std::max(report.max_abs_diff, abs_diff);
    report.max_rel_diff =
        std::max(report.max_rel_diff, abs_diff / std::max(std::abs(numeric), rel_floor));
  }
  return report;
}

inline bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace extrap

#endif  // EXTRAP_NUMERICS_HPP
