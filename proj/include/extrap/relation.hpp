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

#ifndef EXTRAP_RELATION_HPP
#define EXTRAP_RELATION_HPP

// Sentence-pair classification (contradiction / entailment / neutral) with a
// shared attend-compare encoder and two interchangeable heads:
//
//   baseline   p = softmax(W · t(v_p ; v_h))
//   symmetric  p(c)      = softmax(W̃ · [t(v_p ; v_h) + t(v_h ; v_p)])_c
//              p(k | ¬c) = softmax(W̄ · t(v_p ; v_h))_k,  k ∈ {e, n}
//              p = (p(c), p(¬c)·p(e|¬c), p(¬c)·p(n|¬c))
//
// t(x) = relu(T·x) is the same transform in every position it appears.
// All gradients are written by hand.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "extrap/numerics.hpp"

namespace extrap::relation {

enum class Label : std::uint8_t { contradiction = 0, entailment = 1, neutral = 2 };

inline constexpr std::size_t kNumLabels = 3;

inline char label_code(Label l) {
  switch (l) {
    case Label::contradiction: return 'c';
    case Label::entailment: return 'e';
    case Label::neutral: return 'n';
  }
  return '?';
}

inline Label parse_label(std::string_view s) {
  if (s == "c") return Label::contradiction;
  if (s == "e") return Label::entailment;
  if (s == "n") return Label::neutral;
  throw std::invalid_argument("unknown label '" + std::string(s) + "'");
}

using TokenSeq = std::vector<std::size_t>;

struct PairExample {
  TokenSeq premise;
  TokenSeq hypothesis;
  Label label = Label::neutral;

  friend bool operator==(const PairExample&, const PairExample&) = default;
};

/// Embedding table (vocab × d), attend projection M (d × d) giving alignment
/// scores (M·a)·(M·b), and compare map G (d × 2d) applied as relu(G·[x; aligned]).
struct EncoderParams {
  Matrix embedding;
  Matrix attend;
  Matrix compare;

  std::size_t vocab_size() const { return embedding.rows(); }
  std::size_t dim() const { return embedding.cols(); }
};

enum class HeadVariant { baseline, symmetric };

inline std::string_view to_string(HeadVariant v) {
  return v == HeadVariant::baseline ? "baseline" : "symmetric";
}

/// transform T (h × 2d). Baseline uses `classes` (3 × h, rows c, e, n).
/// Symmetric uses `contradiction` (2 × h, rows c, ¬c) and `conditional`
/// (2 × h, rows e, n).
struct HeadParams {
  HeadVariant variant = HeadVariant::baseline;
  Matrix transform;
  Matrix classes;
  Matrix contradiction;
  Matrix conditional;

  std::size_t hidden() const { return transform.rows(); }
};

struct RelationModel {
  EncoderParams encoder;
  HeadParams head;
};

// ---------------------------------------------------------------------------
// Parameter flattening. The order is fixed: embedding, attend, compare,
// transform, then the head's class matrices.

namespace detail {

template <typename Model, typename Fn>
void for_each_matrix(Model& m, Fn&& fn) {
  fn(m.encoder.embedding);
  fn(m.encoder.attend);
  fn(m.encoder.compare);
  fn(m.head.transform);
  if (m.head.variant == HeadVariant::baseline) {
    fn(m.head.classes);
  } else {
    fn(m.head.contradiction);
    fn(m.head.conditional);
  }
}

}  // namespace detail

inline Vector flatten(const RelationModel& m) {
  Vector out;
  detail::for_each_matrix(m, [&](const Matrix& x) {
    out.insert(out.end(), x.data().begin(), x.data().end());
  });
  return out;
}

inline void unflatten(RelationModel& m, std::span<const double> p) {
  std::size_t off = 0;
  detail::for_each_matrix(m, [&](Matrix& x) {
    if (off + x.data().size() > p.size()) throw std::invalid_argument("unflatten: too short");
    std::copy(p.begin() + off, p.begin() + off + x.data().size(), x.data().begin());
    off += x.data().size();
  });
  if (off != p.size()) throw std::invalid_argument("unflatten: too long");
}

/// A model of the same shape with every entry zero.
inline RelationModel zeros_like(const RelationModel& m) {
  RelationModel z = m;
  detail::for_each_matrix(z, [](Matrix& x) { std::fill(x.data().begin(), x.data().end(), 0.0); });
  return z;
}

// ---------------------------------------------------------------------------
// Encoder

namespace detail {

inline void check_tokens(const TokenSeq& s, std::size_t vocab) {
  if (s.empty()) throw std::invalid_argument("encode: empty sentence");
  for (auto t : s) {
    if (t >= vocab) {
      throw std::invalid_argument("encode: token " + std::to_string(t) +
                                  " outside vocabulary of size " + std::to_string(vocab));
    }
  }
}

/// Forward state of one side: tokens of `own` attend over `other`.
struct SideCache {
  std::vector<Vector> weights;   // softmax over `other`, one row per own token
  std::vector<Vector> inputs;    // [own_i ; aligned_i]
  std::vector<Vector> preact;    // G · inputs[i]
};

/// scores(i, j) between own token i and other token j.
inline Vector encode_side(const EncoderParams& p, const std::vector<Vector>& own,
                          const std::vector<Vector>& other, const Matrix& scores,
                          SideCache* cache) {
  const std::size_t d = p.dim();
  Vector pooled(d, 0.0);
  if (cache) *cache = {};
  for (std::size_t i = 0; i < own.size(); ++i) {
    const Vector w = softmax(scores.row(i));
    Vector aligned(d, 0.0);
    for (std::size_t j = 0; j < other.size(); ++j)
      for (std::size_t k = 0; k < d; ++k) aligned[k] += w[j] * other[j][k];
    Vector in = concat(own[i], aligned);
    Vector pre = matvec(p.compare, in);
    for (std::size_t k = 0; k < d; ++k) pooled[k] += pre[k] > 0.0 ? pre[k] : 0.0;
    if (cache) {
      cache->weights.push_back(w);
      cache->inputs.push_back(std::move(in));
      cache->preact.push_back(std::move(pre));
    }
  }
  return pooled;
}

/// Accumulates gradients of one side given ∂/∂pooled.
inline void backprop_side(const EncoderParams& p, const std::vector<Vector>& other,
                          const SideCache& cache, std::span<const double> dpooled,
                          EncoderParams& grad, std::vector<Vector>& d_own,
                          std::vector<Vector>& d_other, Matrix& d_scores) {
  const std::size_t d = p.dim();
  for (std::size_t i = 0; i < cache.inputs.size(); ++i) {
    Vector dpre(d);
    for (std::size_t k = 0; k < d; ++k) dpre[k] = cache.preact[i][k] > 0.0 ? dpooled[k] : 0.0;
    add_outer(grad.compare, dpre, cache.inputs[i]);
    const Vector din = matvec_transposed(p.compare, dpre);
    for (std::size_t k = 0; k < d; ++k) d_own[i][k] += din[k];
    const std::span<const double> daligned(din.data() + d, d);
    const Vector& w = cache.weights[i];
    Vector dw(other.size());
    for (std::size_t j = 0; j < other.size(); ++j) {
      for (std::size_t k = 0; k < d; ++k) d_other[j][k] += w[j] * daligned[k];
      dw[j] = dot(daligned, other[j]);
    }
    const double mean = dot(w, dw);
    for (std::size_t j = 0; j < other.size(); ++j) d_scores(i, j) += w[j] * (dw[j] - mean);
  }
}

struct EncodeCache {
  std::vector<Vector> a, b;    // embeddings
  std::vector<Vector> fa, fb;  // projected by attend
  Matrix scores;               // |premise| × |hypothesis|
  SideCache premise_side, hypothesis_side;
};

}  // namespace detail

struct Encoded {
  Vector premise;
  Vector hypothesis;
};

namespace detail {

inline Encoded encode_impl(const EncoderParams& p, const TokenSeq& premise,
                           const TokenSeq& hypothesis, EncodeCache* cache) {
  check_tokens(premise, p.vocab_size());
  check_tokens(hypothesis, p.vocab_size());
  EncodeCache local;
  EncodeCache& c = cache ? *cache : local;
  c = {};
  for (auto t : premise) c.a.emplace_back(p.embedding.row(t).begin(), p.embedding.row(t).end());
  for (auto t : hypothesis) c.b.emplace_back(p.embedding.row(t).begin(), p.embedding.row(t).end());
  for (const auto& x : c.a) c.fa.push_back(matvec(p.attend, x));
  for (const auto& x : c.b) c.fb.push_back(matvec(p.attend, x));
  c.scores = Matrix(c.a.size(), c.b.size());
  for (std::size_t i = 0; i < c.a.size(); ++i)
    for (std::size_t j = 0; j < c.b.size(); ++j) c.scores(i, j) = dot(c.fa[i], c.fb[j]);
  Encoded out;
  out.premise = encode_side(p, c.a, c.b, c.scores, &c.premise_side);
  out.hypothesis = encode_side(p, c.b, c.a, c.scores.transposed(), &c.hypothesis_side);
  return out;
}

inline void encode_backprop(const EncoderParams& p, const TokenSeq& premise,
                            const TokenSeq& hypothesis, const EncodeCache& c,
                            std::span<const double> dv_p, std::span<const double> dv_h,
                            EncoderParams& grad) {
  const std::size_t d = p.dim();
  std::vector<Vector> da(c.a.size(), Vector(d, 0.0));
  std::vector<Vector> db(c.b.size(), Vector(d, 0.0));
  Matrix dscores(c.a.size(), c.b.size());
  Matrix dscores_t(c.b.size(), c.a.size());
  backprop_side(p, c.b, c.premise_side, dv_p, grad, da, db, dscores);
  backprop_side(p, c.a, c.hypothesis_side, dv_h, grad, db, da, dscores_t);
  std::vector<Vector> dfa(c.a.size(), Vector(d, 0.0));
  std::vector<Vector> dfb(c.b.size(), Vector(d, 0.0));
  for (std::size_t i = 0; i < c.a.size(); ++i)
    for (std::size_t j = 0; j < c.b.size(); ++j) {
      const double g = dscores(i, j) + dscores_t(j, i);
      for (std::size_t k = 0; k < d; ++k) {
        dfa[i][k] += g * c.fb[j][k];
        dfb[j][k] += g * c.fa[i][k];
      }
    }
  auto finish = [&](const std::vector<Vector>& x, const std::vector<Vector>& dfx,
                    std::vector<Vector>& dx, const TokenSeq& tokens) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      add_outer(grad.attend, dfx[i], x[i]);
      const Vector back = matvec_transposed(p.attend, dfx[i]);
      auto row = grad.embedding.row(tokens[i]);
      for (std::size_t k = 0; k < d; ++k) row[k] += dx[i][k] + back[k];
    }
  };
  finish(c.a, dfa, da, premise);
  finish(c.b, dfb, db, hypothesis);
}

}  // namespace detail

/// Representations of premise and hypothesis. Each token attends over the
/// other sentence; [token ; aligned] goes through the compare map and the
/// results are summed per side. encode(h, p) returns encode(p, h) swapped.
inline Encoded encode(const EncoderParams& p, const TokenSeq& premise,
                      const TokenSeq& hypothesis) {
  return detail::encode_impl(p, premise, hypothesis, nullptr);
}

// ---------------------------------------------------------------------------
// Heads

/// relu(T · [x ; y])
inline Vector transform(const HeadParams& h, std::span<const double> x,
                        std::span<const double> y) {
  Vector u = matvec(h.transform, concat(x, y));
  for (double& v : u) v = v > 0.0 ? v : 0.0;
  return u;
}

inline Vector head_baseline(const HeadParams& h, std::span<const double> v_p,
                            std::span<const double> v_h) {
  if (h.variant != HeadVariant::baseline) {
    throw std::invalid_argument("head_baseline: head is not a baseline head");
  }
  return softmax(matvec(h.classes, transform(h, v_p, v_h)));
}

/// Swap-invariant stage 1: (p(c), p(¬c)).
inline Vector symmetric_stage1(const HeadParams& h, std::span<const double> v_p,
                               std::span<const double> v_h) {
  return softmax(matvec(h.contradiction, add(transform(h, v_p, v_h), transform(h, v_h, v_p))));
}

inline Vector head_symmetric(const HeadParams& h, std::span<const double> v_p,
                             std::span<const double> v_h) {
  if (h.variant != HeadVariant::symmetric) {
    throw std::invalid_argument("head_symmetric: head is not a symmetric head");
  }
  const Vector stage1 = symmetric_stage1(h, v_p, v_h);
  const Vector stage2 = softmax(matvec(h.conditional, transform(h, v_p, v_h)));
  return {stage1[0], stage1[1] * stage2[0], stage1[1] * stage2[1]};
}

inline Vector head_probs(const HeadParams& h, std::span<const double> v_p,
                         std::span<const double> v_h) {
  return h.variant == HeadVariant::baseline ? head_baseline(h, v_p, v_h)
                                            : head_symmetric(h, v_p, v_h);
}

inline Vector predict_probs(const RelationModel& m, const TokenSeq& premise,
                            const TokenSeq& hypothesis) {
  const Encoded e = encode(m.encoder, premise, hypothesis);
  return head_probs(m.head, e.premise, e.hypothesis);
}

inline Label predict(const RelationModel& m, const PairExample& ex) {
  const Vector p = predict_probs(m, ex.premise, ex.hypothesis);
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (p[i] > p[best]) best = i;
  return static_cast<Label>(best);
}

// ---------------------------------------------------------------------------
// Loss

namespace detail {

/// Cross-entropy of one example; accumulates gradients into `grad` when set.
inline double example_loss(const RelationModel& m, const PairExample& ex, double weight,
                           RelationModel* grad) {
  EncodeCache cache;
  const Encoded enc = encode_impl(m.encoder, ex.premise, ex.hypothesis, grad ? &cache : nullptr);
  const HeadParams& h = m.head;
  const std::size_t d = m.encoder.dim();
  const Vector x_ph = concat(enc.premise, enc.hypothesis);
  const Vector pre1 = matvec(h.transform, x_ph);
  Vector u1(pre1.size());
  for (std::size_t i = 0; i < u1.size(); ++i) u1[i] = pre1[i] > 0.0 ? pre1[i] : 0.0;
  const std::size_t y = static_cast<std::size_t>(ex.label);

  Vector du1(u1.size(), 0.0);
  Vector du2;
  Vector x_hp;
  Vector pre2;
  double loss = 0.0;
  if (h.variant == HeadVariant::baseline) {
    const Vector p = softmax(matvec(h.classes, u1));
    loss = -std::log(p[y]);
    if (grad) {
      Vector dlogits = p;
      dlogits[y] -= 1.0;
      for (double& v : dlogits) v *= weight;
      add_outer(grad->head.classes, dlogits, u1);
      du1 = matvec_transposed(h.classes, dlogits);
    }
  } else {
    x_hp = concat(enc.hypothesis, enc.premise);
    pre2 = matvec(h.transform, x_hp);
    Vector u_sym(u1.size());
    for (std::size_t i = 0; i < u1.size(); ++i) u_sym[i] = u1[i] + (pre2[i] > 0.0 ? pre2[i] : 0.0);
    const Vector q = softmax(matvec(h.contradiction, u_sym));
    const std::size_t stage1_target = y == 0 ? 0 : 1;
    loss = -std::log(q[stage1_target]);
    Vector dlog2;
    Vector r;
    if (y != 0) {
      r = softmax(matvec(h.conditional, u1));
      loss -= std::log(r[y - 1]);
    }
    if (grad) {
      Vector dlog1 = q;
      dlog1[stage1_target] -= 1.0;
      for (double& v : dlog1) v *= weight;
      add_outer(grad->head.contradiction, dlog1, u_sym);
      const Vector du_sym = matvec_transposed(h.contradiction, dlog1);
      du1 = du_sym;
      du2 = du_sym;
      if (y != 0) {
        dlog2 = r;
        dlog2[y - 1] -= 1.0;
        for (double& v : dlog2) v *= weight;
        add_outer(grad->head.conditional, dlog2, u1);
        const Vector du_bar = matvec_transposed(h.conditional, dlog2);
        for (std::size_t i = 0; i < du1.size(); ++i) du1[i] += du_bar[i];
      }
    }
  }
  if (!grad) return loss;

  Vector dv_p(d, 0.0), dv_h(d, 0.0);
  auto through_transform = [&](const Vector& pre, const Vector& du, const Vector& x,
                               Vector& dfirst, Vector& dsecond) {
    Vector dpre(pre.size());
    for (std::size_t i = 0; i < pre.size(); ++i) dpre[i] = pre[i] > 0.0 ? du[i] : 0.0;
    add_outer(grad->head.transform, dpre, x);
    const Vector dx = matvec_transposed(h.transform, dpre);
    for (std::size_t k = 0; k < d; ++k) {
      dfirst[k] += dx[k];
      dsecond[k] += dx[d + k];
    }
  };
  through_transform(pre1, du1, x_ph, dv_p, dv_h);
  if (h.variant == HeadVariant::symmetric) through_transform(pre2, du2, x_hp, dv_h, dv_p);
  encode_backprop(m.encoder, ex.premise, ex.hypothesis, cache, dv_p, dv_h, grad->encoder);
  return loss;
}

}  // namespace detail

/// Mean cross-entropy over `data`. When `grad` is non-null it receives the
/// gradient in flatten() order.
inline double loss_and_grad(const RelationModel& m, std::span<const PairExample> data,
                            Vector* grad) {
  if (data.empty()) throw std::invalid_argument("relation loss: empty data");
  const double w = 1.0 / static_cast<double>(data.size());
  std::optional<RelationModel> g;
  if (grad) g = zeros_like(m);
  double total = 0.0;
  for (const auto& ex : data) total += w * detail::example_loss(m, ex, w, g ? &*g : nullptr);
  if (grad) *grad = flatten(*g);
  return total;
}

// ---------------------------------------------------------------------------
// Synthetic data

/// Token layout: 0 is NOT; the remaining ids are split into subjects, verbs
/// and attributes (in that order, roughly a third each).
struct SynthConfig {
  std::size_t vocab_size = 40;
  std::size_t n_train = 300;
  std::size_t n_test = 300;
  double directional_bias = 1.0;
  std::uint64_t seed = 0;
};

struct SynthLayout {
  std::size_t not_token = 0;
  std::size_t subject_begin, subject_end;
  std::size_t verb_begin, verb_end;
  std::size_t attribute_begin, attribute_end;

  explicit SynthLayout(std::size_t vocab) {
    if (vocab < 8) throw std::invalid_argument("SynthConfig: vocab_size must be at least 8");
    const std::size_t rest = vocab - 1;
    const std::size_t third = rest / 3;
    subject_begin = 1;
    subject_end = verb_begin = 1 + third;
    verb_end = attribute_begin = 1 + 2 * third;
    attribute_end = vocab;
  }
};

struct SynthData {
  std::vector<PairExample> train;
  std::vector<PairExample> test;
};

namespace detail {

inline std::size_t pick(SeededRng& rng, std::size_t begin, std::size_t end) {
  return begin + rng.below(end - begin);
}

/// Two distinct attributes.
inline std::pair<std::size_t, std::size_t> pick_two(SeededRng& rng, const SynthLayout& L) {
  const std::size_t a = pick(rng, L.attribute_begin, L.attribute_end);
  std::size_t b = pick(rng, L.attribute_begin, L.attribute_end - 1);
  if (b >= a) ++b;
  return {a, b};
}

/// `canonical_fraction` of contradictions carry NOT in the hypothesis.
inline std::vector<PairExample> gen_split(SeededRng& rng, const SynthLayout& L, std::size_t n,
                                          double canonical_fraction) {
  std::vector<Label> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<Label>(i % 3);
  rng.shuffle(labels);
  std::vector<PairExample> out;
  out.reserve(n);
  for (Label label : labels) {
    const std::size_t s = pick(rng, L.subject_begin, L.subject_end);
    const std::size_t v = pick(rng, L.verb_begin, L.verb_end);
    const auto [a1, a2] = pick_two(rng, L);
    PairExample ex;
    ex.label = label;
    switch (label) {
      case Label::entailment:
        // hypothesis keeps one of the premise's two attributes
        ex.premise = {s, v, a1, a2};
        ex.hypothesis = {s, v, rng.below(2) == 0 ? a1 : a2};
        break;
      case Label::neutral:
        ex.premise = {s, v, a1};
        ex.hypothesis = {s, v, a2};
        break;
      case Label::contradiction: {
        TokenSeq plain = {s, v, a1};
        TokenSeq negated = {s, L.not_token, v, a1};
        if (rng.uniform01() < canonical_fraction) {
          ex.premise = std::move(plain);
          ex.hypothesis = std::move(negated);
        } else {
          ex.premise = std::move(negated);
          ex.hypothesis = std::move(plain);
        }
        break;
      }
    }
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace detail

/// Training contradictions follow `directional_bias`; test contradictions are
/// all in the canonical direction (NOT in the hypothesis).
inline SynthData gen_synthetic(const SynthConfig& cfg) {
  if (cfg.directional_bias < 0.0 || cfg.directional_bias > 1.0) {
    throw std::invalid_argument("SynthConfig: directional_bias must be in [0, 1]");
  }
  const SynthLayout layout(cfg.vocab_size);
  SeededRng rng(cfg.seed);
  SynthData d;
  d.train = detail::gen_split(rng, layout, cfg.n_train, cfg.directional_bias);
  d.test = detail::gen_split(rng, layout, cfg.n_test, 1.0);
  return d;
}

inline std::vector<PairExample> reverse_contradictions(std::span<const PairExample> ds) {
  std::vector<PairExample> out;
  for (const auto& ex : ds) {
    if (ex.label != Label::contradiction) continue;
    out.push_back({ex.hypothesis, ex.premise, ex.label});
  }
  return out;
}

inline std::vector<PairExample> filter_label(std::span<const PairExample> ds, Label label) {
  std::vector<PairExample> out;
  for (const auto& ex : ds)
    if (ex.label == label) out.push_back(ex);
  return out;
}

// ---------------------------------------------------------------------------
// Dataset text format: "premise TAB hypothesis TAB label", tokens as
// space-separated integers, label one of c/e/n.

inline void write_dataset(std::ostream& os, std::span<const PairExample> ds) {
  auto put = [&](const TokenSeq& s) {
    for (std::size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << s[i];
  };
  for (const auto& ex : ds) {
    put(ex.premise);
    os << '\t';
    put(ex.hypothesis);
    os << '\t' << label_code(ex.label) << '\n';
  }
}

inline std::vector<PairExample> read_dataset(std::istream& is) {
  std::vector<PairExample> out;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& why) {
    throw std::runtime_error("dataset line " + std::to_string(lineno) + ": " + why);
  };
  auto parse_seq = [&](const std::string& field) {
    TokenSeq s;
    std::istringstream in(field);
    std::string tok;
    while (in >> tok) {
      std::size_t used = 0;
      unsigned long long v = 0;
      try {
        v = std::stoull(tok, &used);
      } catch (const std::exception&) {
        fail("bad token '" + tok + "'");
      }
      if (used != tok.size() || tok[0] == '-') fail("bad token '" + tok + "'");
      s.push_back(static_cast<std::size_t>(v));
    }
    if (s.empty()) fail("empty sentence");
    return s;
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
      fail("expected 3 tab-separated fields");
    }
    PairExample ex;
    ex.premise = parse_seq(line.substr(0, t1));
    ex.hypothesis = parse_seq(line.substr(t1 + 1, t2 - t1 - 1));
    try {
      ex.label = parse_label(line.substr(t2 + 1));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
    out.push_back(std::move(ex));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training and evaluation

struct RelationTrainConfig {
  std::size_t dim = 16;
  std::size_t hidden = 16;
  int epochs = 500;
  double learning_rate = 0.5;
  std::uint64_t seed = 0;
};

/// Uniform init in ±1/sqrt(fan_in); embeddings in ±1.
inline RelationModel init_relation_model(HeadVariant variant, std::size_t vocab,
                                         const RelationTrainConfig& cfg) {
  if (cfg.dim < 2) throw std::invalid_argument("relation: dim must be at least 2");
  if (cfg.hidden < 1) throw std::invalid_argument("relation: hidden must be positive");
  SeededRng rng(cfg.seed);
  const std::size_t d = cfg.dim;
  const std::size_t h = cfg.hidden;
  auto draw = [&](std::size_t rows, std::size_t cols, double scale) {
    Matrix m(rows, cols);
    fill_uniform(m.data(), rng, -scale, scale);
    return m;
  };
  const double s_d = 1.0 / std::sqrt(static_cast<double>(d));
  const double s_2d = 1.0 / std::sqrt(static_cast<double>(2 * d));
  const double s_h = 1.0 / std::sqrt(static_cast<double>(h));
  RelationModel m;
  m.encoder.embedding = draw(vocab, d, 1.0);
  m.encoder.attend = draw(d, d, s_d);
  m.encoder.compare = draw(d, 2 * d, s_2d);
  m.head.variant = variant;
  m.head.transform = draw(h, 2 * d, s_2d);
  if (variant == HeadVariant::baseline) {
    m.head.classes = draw(kNumLabels, h, s_h);
  } else {
    m.head.contradiction = draw(2, h, s_h);
    m.head.conditional = draw(2, h, s_h);
  }
  return m;
}

class RelationDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Full-batch gradient descent on mean cross-entropy. `loss_history`, when
/// given, receives the loss before each step.
inline RelationModel train_relation(HeadVariant variant, const RelationTrainConfig& cfg,
                                    std::span<const PairExample> train, std::size_t vocab,
                                    std::vector<double>* loss_history = nullptr) {
  if (train.empty()) throw std::invalid_argument("train_relation: empty training data");
  if (cfg.epochs <= 0) throw std::invalid_argument("train_relation: epochs must be positive");
  RelationModel m = init_relation_model(variant, vocab, cfg);
  Vector params = flatten(m);
  Vector grad;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    const double loss = loss_and_grad(m, train, &grad);
    if (!std::isfinite(loss)) {
      throw RelationDiverged("relation training diverged (" + std::string(to_string(variant)) +
                             " head, learning rate " + std::to_string(cfg.learning_rate) +
                             ", epoch " + std::to_string(epoch) + ")");
    }
    if (loss_history) loss_history->push_back(loss);
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= cfg.learning_rate * grad[i];
    unflatten(m, params);
  }
  return m;
}

/// Fraction of examples whose argmax prediction matches the gold label.
template <typename Predictor>
  requires std::is_invocable_r_v<Label, Predictor, const PairExample&>
double eval_accuracy(Predictor&& predict_label, std::span<const PairExample> data) {
  if (data.empty()) throw std::invalid_argument("eval_accuracy: empty data");
  std::size_t correct = 0;
  for (const auto& ex : data)
    if (predict_label(ex) == ex.label) ++correct;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

inline double eval_accuracy(const RelationModel& m, std::span<const PairExample> data) {
  return eval_accuracy([&](const PairExample& ex) { return predict(m, ex); }, data);
}

/// Accuracy on the whole test set, on its contradictions, and on those
/// contradictions with premise and hypothesis exchanged.
struct ReversalReport {
  double whole = 0.0;
  double contradictions = 0.0;
  double reversed = 0.0;
};

inline ReversalReport reversal_report(const RelationModel& m, std::span<const PairExample> test) {
  const auto contra = filter_label(test, Label::contradiction);
  const auto reversed = reverse_contradictions(test);
  return {eval_accuracy(m, test), eval_accuracy(m, contra), eval_accuracy(m, reversed)};
}

}  // namespace extrap::relation

#endif  // EXTRAP_RELATION_HPP
