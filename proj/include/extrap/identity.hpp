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

#ifndef EXTRAP_IDENTITY_HPP
#define EXTRAP_IDENTITY_HPP

// Identity-function learning on binary codes: train on even integers, test on
// odd ones. Five parameterizations are provided:
//
//   slp    y = W·x
//   flip   y = 1 − W·(1 − x)       (digits re-encoded 1→0, 0→1)
//   ortho  y = |W·x|, W orthonormal (Gram–Schmidt after every step)
//   conv   y = f ⋆ x, one width-5 filter, zero padding of 2 per side
//   proj   r = A·x with A_ij = exp(β(j − i)); learn r ↦ W·r in n dimensions
//
// None of the models has a bias. Squared error is summed over output units
// and averaged over examples.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "extrap/numerics.hpp"

namespace extrap::identity {

inline constexpr std::size_t kDefaultWidth = 5;

/// Binary code, least significant bit at index 0.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    if (bits_.empty() || bits_.size() > 63) {
      throw std::invalid_argument("BitVector: width must be in [1, 63]");
    }
    for (auto b : bits_) {
      if (b > 1) throw std::invalid_argument("BitVector: digits must be 0 or 1");
    }
  }

  static BitVector from_value(std::uint64_t value, std::size_t width = kDefaultWidth) {
    if (width == 0 || width > 63 || value >> width != 0) {
      throw std::invalid_argument("BitVector: value " + std::to_string(value) +
                                  " does not fit in " + std::to_string(width) + " bits");
    }
    std::vector<std::uint8_t> bits(width);
    for (std::size_t j = 0; j < width; ++j) bits[j] = (value >> j) & 1U;
    return BitVector(std::move(bits));
  }

  std::uint64_t value() const {
    std::uint64_t v = 0;
    for (std::size_t j = 0; j < bits_.size(); ++j) v |= std::uint64_t{bits_[j]} << j;
    return v;
  }

  std::size_t width() const { return bits_.size(); }
  std::uint8_t operator[](std::size_t j) const { return bits_[j]; }

  Vector to_vector() const { return Vector(bits_.begin(), bits_.end()); }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

struct Example {
  BitVector input;
  BitVector target;
};

struct IdentityDataset {
  std::vector<Example> train;
  std::vector<Example> test;
};

/// Evens → train, odds → test, each mapped through `target_of`.
template <typename TargetFn>
IdentityDataset make_parity_split(std::size_t width, TargetFn&& target_of) {
  IdentityDataset ds;
  const std::uint64_t count = std::uint64_t{1} << width;
  for (std::uint64_t v = 0; v < count; ++v) {
    Example ex{BitVector::from_value(v, width), target_of(v)};
    (v % 2 == 0 ? ds.train : ds.test).push_back(std::move(ex));
  }
  return ds;
}

inline IdentityDataset make_dataset(std::size_t width = kDefaultWidth) {
  return make_parity_split(width, [width](std::uint64_t v) {
    return BitVector::from_value(v, width);
  });
}

/// Inputs 0..2^(width−1)−1 zero-extended to `width` bits, targets 2·x.
/// Training still sees only even inputs.
inline IdentityDataset make_doubling_dataset(std::size_t width = kDefaultWidth + 1) {
  IdentityDataset ds;
  const std::uint64_t count = std::uint64_t{1} << (width - 1);
  for (std::uint64_t v = 0; v < count; ++v) {
    Example ex{BitVector::from_value(v, width), BitVector::from_value(2 * v, width)};
    (v % 2 == 0 ? ds.train : ds.test).push_back(std::move(ex));
  }
  return ds;
}

inline Vector flip_encode(const BitVector& b) {
  Vector r(b.width());
  for (std::size_t j = 0; j < b.width(); ++j) r[j] = 1.0 - b[j];
  return r;
}

/// A_ij = exp(β·(j − i)), n × width.
inline Matrix proj_matrix(double beta, std::size_t n, std::size_t width = kDefaultWidth) {
  if (n == 0) throw std::invalid_argument("proj_matrix: n must be at least 1");
  if (!std::isfinite(beta)) throw std::invalid_argument("proj_matrix: beta must be finite");
  Matrix a(n, width);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < width; ++j)
      a(i, j) = std::exp(beta * (static_cast<double>(j) - static_cast<double>(i)));
  return a;
}

enum class ModelKind { slp, flip, ortho, conv, proj };

inline constexpr std::array<ModelKind, 5> kAllModels = {
    ModelKind::slp, ModelKind::flip, ModelKind::ortho, ModelKind::conv, ModelKind::proj};

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::slp: return "slp";
    case ModelKind::flip: return "flip";
    case ModelKind::ortho: return "ortho";
    case ModelKind::conv: return "conv";
    case ModelKind::proj: return "proj";
  }
  return "?";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (auto k : kAllModels) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

/// Parameters of one of the five models. Only the members relevant to `kind`
/// are populated: `weights` for slp/flip/ortho (width × width) and proj
/// (n × n); `filter` for conv; `projection` (fixed, never trained) for proj.
struct IdentityModel {
  ModelKind kind = ModelKind::slp;
  std::size_t width = kDefaultWidth;
  Matrix weights;
  Vector filter;
  Matrix projection;

  std::vector<double> parameters() const {
    return kind == ModelKind::conv ? filter : weights.data();
  }

  void set_parameters(std::span<const double> p) {
    auto& dst = kind == ModelKind::conv ? filter : weights.data();
    if (p.size() != dst.size()) throw std::invalid_argument("set_parameters: wrong size");
    std::copy(p.begin(), p.end(), dst.begin());
  }
};

inline IdentityModel make_slp(Matrix w) {
  IdentityModel m{ModelKind::slp, w.cols(), std::move(w), {}, {}};
  return m;
}
inline IdentityModel make_flip(Matrix w) {
  IdentityModel m{ModelKind::flip, w.cols(), std::move(w), {}, {}};
  return m;
}
inline IdentityModel make_ortho(Matrix w) {
  IdentityModel m{ModelKind::ortho, w.cols(), std::move(w), {}, {}};
  return m;
}
inline IdentityModel make_conv(Vector filter, std::size_t width = kDefaultWidth) {
  if (filter.size() % 2 == 0) throw std::invalid_argument("conv filter width must be odd");
  IdentityModel m{ModelKind::conv, width, {}, std::move(filter), {}};
  return m;
}
inline IdentityModel make_proj(Matrix w, Matrix a) {
  if (w.rows() != a.rows() || w.cols() != a.rows()) {
    throw std::invalid_argument("proj: layer must be n × n for an n × width projection");
  }
  IdentityModel m{ModelKind::proj, a.cols(), std::move(w), {}, std::move(a)};
  return m;
}

/// y[i] = Σ_k f[k]·x[i + k − half], zero outside the input.
inline Vector convolve_same(std::span<const double> filter, std::span<const double> x) {
  const auto half = static_cast<std::ptrdiff_t>(filter.size() / 2);
  const auto n = static_cast<std::ptrdiff_t>(x.size());
  Vector y(x.size(), 0.0);
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(filter.size()); ++k) {
      const std::ptrdiff_t src = i + k - half;
      if (src >= 0 && src < n) s += filter[k] * x[src];
    }
    y[i] = s;
  }
  return y;
}

/// Moore–Penrose pseudo-inverse of a full-row-rank n × w matrix: Aᵀ(AAᵀ)⁻¹.
inline Matrix row_pseudo_inverse(const Matrix& a) {
  const std::size_t n = a.rows();
  Matrix gram(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) gram(i, j) = dot(a.row(i), a.row(j));
  // Gauss–Jordan with partial pivoting; n is tiny.
  Matrix inv = Matrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(gram(r, c)) > std::abs(gram(piv, c))) piv = r;
    if (std::abs(gram(piv, c)) < 1e-300) {
      throw std::domain_error("row_pseudo_inverse: projection is rank deficient");
    }
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(gram(c, j), gram(piv, j));
      std::swap(inv(c, j), inv(piv, j));
    }
    const double d = gram(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      gram(c, j) /= d;
      inv(c, j) /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = gram(r, c);
      for (std::size_t j = 0; j < n; ++j) {
        gram(r, j) -= f * gram(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  Matrix pinv(a.cols(), n);
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += a(k, j) * inv(k, i);
      pinv(j, i) = s;
    }
  return pinv;
}

/// Output of proj in its own n-dimensional space: W·(A·x).
inline Vector proj_latent(const IdentityModel& model, const BitVector& input) {
  return matvec(model.weights, matvec(model.projection, input.to_vector()));
}

/// Prediction in the original digit representation (before any rounding).
/// proj returns the minimum-norm least-squares preimage A⁺·W·A·x.
inline Vector forward(const IdentityModel& model, const BitVector& input) {
  if (input.width() != model.width) {
    throw std::invalid_argument("forward: input width does not match model");
  }
  const Vector x = input.to_vector();
  switch (model.kind) {
    case ModelKind::slp:
      return matvec(model.weights, x);
    case ModelKind::flip: {
      Vector y = matvec(model.weights, flip_encode(input));
      for (double& v : y) v = 1.0 - v;
      return y;
    }
    case ModelKind::ortho: {
      Vector y = matvec(model.weights, x);
      for (double& v : y) v = std::abs(v);
      return y;
    }
    case ModelKind::conv:
      return convolve_same(model.filter, x);
    case ModelKind::proj:
      return matvec(row_pseudo_inverse(model.projection), proj_latent(model, input));
  }
  throw std::logic_error("forward: unknown model kind");
}

/// Nearest code (over all 2^width codes) to the proj output in projected
/// space. With β = ln 2 and n = 1 this is the binary expansion of the
/// rounded scalar output.
inline BitVector proj_decode_bits(const IdentityModel& model, const BitVector& input) {
  if (model.kind != ModelKind::proj) throw std::invalid_argument("proj_decode_bits: not proj");
  const Vector latent = proj_latent(model, input);
  const std::uint64_t count = std::uint64_t{1} << model.width;
  std::uint64_t best = 0;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::uint64_t v = 0; v < count; ++v) {
    const Vector r = matvec(model.projection, BitVector::from_value(v, model.width).to_vector());
    double err = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) err += (r[i] - latent[i]) * (r[i] - latent[i]);
    if (err < best_err) {
      best_err = err;
      best = v;
    }
  }
  return BitVector::from_value(best, model.width);
}

/// Mean over examples of the squared error summed over output units, in the
/// space each model is trained in (flipped digits for flip, projected space
/// for proj). Writes the gradient with respect to `model.parameters()` when
/// `grad` is non-null. ortho is differentiated as |W·x| with W unconstrained.
inline double loss_and_grad(const IdentityModel& model, std::span<const Example> data,
                            Vector* grad) {
  if (data.empty()) throw std::invalid_argument("loss: empty data");
  const std::size_t np = model.parameters().size();
  if (grad) grad->assign(np, 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.size());
  double total = 0.0;
  for (const auto& ex : data) {
    Vector x;
    Vector target;
    Vector pred;
    Vector dpred;  // ∂(squared error)/∂(pre-activation output)
    switch (model.kind) {
      case ModelKind::slp:
      case ModelKind::ortho:
        x = ex.input.to_vector();
        target = ex.target.to_vector();
        pred = matvec(model.weights, x);
        break;
      case ModelKind::flip:
        x = flip_encode(ex.input);
        target = flip_encode(ex.target);
        pred = matvec(model.weights, x);
        break;
      case ModelKind::conv:
        x = ex.input.to_vector();
        target = ex.target.to_vector();
        pred = convolve_same(model.filter, x);
        break;
      case ModelKind::proj:
        x = matvec(model.projection, ex.input.to_vector());
        target = matvec(model.projection, ex.target.to_vector());
        pred = matvec(model.weights, x);
        break;
    }
    dpred.resize(pred.size());
    for (std::size_t i = 0; i < pred.size(); ++i) {
      double out = pred[i];
      double sign = 1.0;
      if (model.kind == ModelKind::ortho) {
        sign = out < 0.0 ? -1.0 : 1.0;
        out = std::abs(out);
      }
      const double err = out - target[i];
      total += err * err * inv_n;
      dpred[i] = 2.0 * err * sign * inv_n;
    }
    if (!grad) continue;
    auto& g = *grad;
    if (model.kind == ModelKind::conv) {
      const auto half = static_cast<std::ptrdiff_t>(model.filter.size() / 2);
      const auto n = static_cast<std::ptrdiff_t>(x.size());
      for (std::ptrdiff_t i = 0; i < n; ++i)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(np); ++k) {
          const std::ptrdiff_t src = i + k - half;
          if (src >= 0 && src < n) g[k] += dpred[i] * x[src];
        }
    } else {
      const std::size_t cols = model.weights.cols();
      for (std::size_t i = 0; i < dpred.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) g[i * cols + j] += dpred[i] * x[j];
    }
  }
  return total;
}

/// Squared error summed over digits, averaged over examples, in the original
/// digit representation.
inline double digit_mse(std::span<const Example> data,
                        const std::function<Vector(const BitVector&)>& predict) {
  double total = 0.0;
  for (const auto& ex : data) {
    const Vector y = predict(ex.input);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const double e = y[i] - ex.target[i];
      total += e * e;
    }
  }
  return total / static_cast<double>(data.size());
}

struct EvalReport {
  double train_mse = 0.0;
  double test_mse = 0.0;
  // proj only: error of the nearest-code decoding in digit space.
  std::optional<double> decoded_train_mse;
  std::optional<double> decoded_test_mse;
};

inline EvalReport evaluate(const IdentityModel& model, const IdentityDataset& ds) {
  EvalReport r;
  r.train_mse = loss_and_grad(model, ds.train, nullptr);
  r.test_mse = loss_and_grad(model, ds.test, nullptr);
  if (model.kind == ModelKind::proj) {
    auto decode = [&](const BitVector& x) { return proj_decode_bits(model, x).to_vector(); };
    r.decoded_train_mse = digit_mse(ds.train, decode);
    r.decoded_test_mse = digit_mse(ds.test, decode);
  }
  return r;
}

/// Learning rates used when TrainConfig leaves it unset. Each is below the
/// gradient-descent stability bound 1/λ_max(Gram) of its training inputs.
inline double default_learning_rate(ModelKind k) {
  switch (k) {
    case ModelKind::slp: return 0.3;
    case ModelKind::flip: return 0.2;
    case ModelKind::ortho: return 0.1;
    case ModelKind::conv: return 0.05;
    case ModelKind::proj: return 1e-3;
  }
  return 0.1;
}

struct TrainConfig {
  int epochs = 1000;
  std::optional<double> learning_rate;  // per-model default when unset
  std::uint64_t seed = 0;
  double init_scale = 0.1;
  double beta = std::numbers::ln2;  // proj
  std::size_t proj_dim = 1;         // proj
  std::size_t filter_width = 5;     // conv
  // Independent initializations; the one with the lowest final training loss
  // is kept. Unset means 12 for ortho (whose |W·x| landscape has spurious
  // optima) and 1 for everything else.
  std::optional<int> restarts;

  double lr_for(ModelKind k) const { return learning_rate.value_or(default_learning_rate(k)); }
  int restarts_for(ModelKind k) const {
    return restarts.value_or(k == ModelKind::ortho ? 12 : 1);
  }
};

/// Random model with weights uniform in [−init_scale, init_scale]; ortho starts
/// from the retraction of such a draw.
inline IdentityModel init_model(ModelKind kind, const TrainConfig& cfg, std::size_t width) {
  SeededRng rng(cfg.seed);
  const double s = cfg.init_scale;
  switch (kind) {
    case ModelKind::slp:
    case ModelKind::flip:
    case ModelKind::ortho: {
      Matrix w(width, width);
      fill_uniform(w.data(), rng, -s, s);
      if (kind == ModelKind::slp) return make_slp(std::move(w));
      if (kind == ModelKind::flip) return make_flip(std::move(w));
      return make_ortho(orthonormal_retraction(w));
    }
    case ModelKind::conv: {
      Vector f(cfg.filter_width);
      fill_uniform(f, rng, -s, s);
      return make_conv(std::move(f), width);
    }
    case ModelKind::proj: {
      Matrix w(cfg.proj_dim, cfg.proj_dim);
      fill_uniform(w.data(), rng, -s, s);
      return make_proj(std::move(w), proj_matrix(cfg.beta, cfg.proj_dim, width));
    }
  }
  throw std::logic_error("init_model: unknown kind");
}

class TrainingDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainResult {
  IdentityModel model;
  EvalReport report;
};

/// Seed of restart `r`; restart 0 uses the configured seed unchanged.
inline std::uint64_t restart_seed(std::uint64_t seed, int r) {
  return seed + static_cast<std::uint64_t>(r) * 0x9e3779b97f4a7c15ULL;
}

/// Called after every gradient step with the epoch index and the model.
using StepObserver = std::function<void(int, const IdentityModel&)>;

/// Full-batch gradient descent on the training-set loss from one
/// initialization.
inline IdentityModel train_once(ModelKind kind, const TrainConfig& cfg,
                                const IdentityDataset& ds, const StepObserver& observe = {}) {
  if (cfg.epochs <= 0) throw std::invalid_argument("train: epochs must be positive");
  const double lr = cfg.lr_for(kind);
  if (!(lr > 0.0)) throw std::invalid_argument("train: learning rate must be positive");
  if (ds.train.empty()) throw std::invalid_argument("train: empty training set");
  const std::size_t width = ds.train.front().input.width();
  IdentityModel model = init_model(kind, cfg, width);
  Vector grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double loss = loss_and_grad(model, ds.train, &grad);
    if (!std::isfinite(loss)) {
      throw TrainingDiverged("training diverged for model " + std::string(to_string(kind)) +
                             " at learning rate " + std::to_string(lr) + " (epoch " +
                             std::to_string(epoch) + ")");
    }
    auto p = model.parameters();
    for (std::size_t i = 0; i < p.size(); ++i) p[i] -= lr * grad[i];
    model.set_parameters(p);
    if (kind == ModelKind::ortho) model.weights = orthonormal_retraction(model.weights);
    if (observe) observe(epoch, model);
  }
  return model;
}

inline TrainResult train(ModelKind kind, const TrainConfig& cfg, const IdentityDataset& ds,
                         const StepObserver& observe = {}) {
  const int restarts = cfg.restarts_for(kind);
  if (restarts < 1) throw std::invalid_argument("train: restarts must be at least 1");
  const double lr = cfg.lr_for(kind);
  std::optional<IdentityModel> best;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    TrainConfig run = cfg;
    run.seed = restart_seed(cfg.seed, r);
    IdentityModel model = train_once(kind, run, ds, observe);
    const double loss = loss_and_grad(model, ds.train, nullptr);
    if (!best || loss < best_loss) {
      best_loss = loss;
      best = std::move(model);
    }
  }
  IdentityModel model = std::move(*best);
  EvalReport report = evaluate(model, ds);
  if (!std::isfinite(report.train_mse) || !std::isfinite(report.test_mse)) {
    throw TrainingDiverged("training diverged for model " + std::string(to_string(kind)) +
                           " at learning rate " + std::to_string(lr));
  }
  return {std::move(model), report};
}

inline TrainResult train(ModelKind kind, const TrainConfig& cfg) {
  return train(kind, cfg, make_dataset());
}

struct TableRow {
  ModelKind kind;
  EvalReport report;
};

/// One row per requested model, in the canonical order slp, flip, ortho,
/// conv, proj regardless of the order of `kinds`.
inline std::vector<TableRow> run_suite(const TrainConfig& cfg,
                                        std::span<const ModelKind> kinds = kAllModels) {
  const IdentityDataset ds = make_dataset();
  std::vector<TableRow> rows;
  for (auto k : kAllModels) {
    if (std::find(kinds.begin(), kinds.end(), k) == kinds.end()) continue;
    rows.push_back({k, train(k, cfg, ds).report});
  }
  return rows;
}

}  // namespace extrap::identity

#endif  // EXTRAP_IDENTITY_HPP
