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

#ifndef EXTRAP_EMBEDDINGS_HPP
#define EXTRAP_EMBEDDINGS_HPP

// CBOW with negative sampling under two score functions.
//
//   linear        logit = Σ_i m_i·x_i
//   broken stick  logit = Σ_i g_i(x_i),  g(x) = m·x            if n·x + c < 0
//                                              (m + n)·x + c   otherwise
//
// x is the mean of the context input vectors, m the target word's output
// vector, n the target word's stick vector and c a bias per dimension shared
// by all words. Scores are σ(logit).

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "extrap/numerics.hpp"

namespace extrap::embeddings {

inline double broken_stick(double x, double m, double n, double c) {
  return n * x + c < 0.0 ? m * x : (m + n) * x + c;
}

/// ∂g/∂x
inline double broken_stick_slope(double x, double m, double n, double c) {
  return n * x + c < 0.0 ? m : m + n;
}

enum class ScoreMode { linear, broken_stick };

inline std::string_view to_string(ScoreMode m) {
  return m == ScoreMode::linear ? "linear" : "stick";
}

inline std::optional<ScoreMode> parse_score_mode(std::string_view s) {
  if (s == "linear") return ScoreMode::linear;
  if (s == "stick") return ScoreMode::broken_stick;
  return std::nullopt;
}

/// Words sorted by descending frequency, ties broken lexicographically.
class Vocab {
 public:
  Vocab() = default;

  static Vocab build(const std::map<std::string, std::uint64_t>& counts,
                     std::uint64_t min_count) {
    std::vector<std::pair<std::string, std::uint64_t>> kept;
    for (const auto& [w, c] : counts)
      if (c >= min_count) kept.emplace_back(w, c);
    std::stable_sort(kept.begin(), kept.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    Vocab v;
    for (auto& [w, c] : kept) v.add(std::move(w), c);
    return v;
  }

  std::size_t add(std::string word, std::uint64_t count) {
    if (index_.count(word)) throw std::invalid_argument("Vocab: duplicate word '" + word + "'");
    const std::size_t id = words_.size();
    index_.emplace(word, id);
    words_.push_back(std::move(word));
    counts_.push_back(count);
    return id;
  }

  std::optional<std::size_t> find(std::string_view word) const {
    auto it = index_.find(std::string(word));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::string& word(std::size_t i) const { return words_[i]; }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }

 private:
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
};

struct CbowModel {
  Vocab vocab;
  std::size_t dim = 0;
  ScoreMode mode = ScoreMode::linear;
  Matrix input;   // context vectors, vocab × dim
  Matrix output;  // target vectors (slopes m), vocab × dim
  Matrix stick;   // n per target word, vocab × dim; empty in linear mode
  Vector stick_bias;  // c per dimension; empty in linear mode
};

/// Logit of the score for `target` given the mean context vector.
inline double score_logit(const CbowModel& model, std::size_t target,
                          std::span<const double> context) {
  if (context.size() != model.dim) throw std::invalid_argument("score: context length != dim");
  const auto m = model.output.row(target);
  double s = 0.0;
  if (model.mode == ScoreMode::linear) {
    for (std::size_t i = 0; i < model.dim; ++i) s += m[i] * context[i];
  } else {
    const auto n = model.stick.row(target);
    for (std::size_t i = 0; i < model.dim; ++i)
      s += broken_stick(context[i], m[i], n[i], model.stick_bias[i]);
  }
  return s;
}

inline double score(const CbowModel& model, std::size_t target, std::span<const double> context) {
  return sigmoid(score_logit(model, target, context));
}

struct TrainTarget {
  std::size_t word;
  bool positive;
};

/// Gradient of one training position, laid out like the model.
struct CbowGrad {
  std::vector<Vector> input;   // one per context slot
  std::vector<Vector> output;  // one per target slot
  std::vector<Vector> stick;   // one per target slot (stick mode)
  Vector stick_bias;
};

/// Logistic loss Σ_t softplus(∓logit_t) of one CBOW position: context words
/// (averaged) against positive and negative targets. Writes the gradient of
/// every touched row when `grad` is non-null.
inline double cbow_loss(const CbowModel& model, std::span<const std::size_t> context,
                        std::span<const TrainTarget> targets, CbowGrad* grad) {
  if (context.empty()) throw std::invalid_argument("cbow_loss: empty context");
  const std::size_t D = model.dim;
  const bool stick = model.mode == ScoreMode::broken_stick;
  Vector h(D, 0.0);
  const double inv = 1.0 / static_cast<double>(context.size());
  for (auto w : context) {
    const auto row = model.input.row(w);
    for (std::size_t i = 0; i < D; ++i) h[i] += row[i];
  }
  for (double& x : h) x *= inv;
  Vector dh(D, 0.0);
  if (grad) {
    grad->output.assign(targets.size(), Vector(D, 0.0));
    grad->stick.assign(stick ? targets.size() : 0, Vector(D, 0.0));
    grad->stick_bias.assign(stick ? D : 0, 0.0);
  }
  double loss = 0.0;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const double z = score_logit(model, targets[t].word, h);
    const double label = targets[t].positive ? 1.0 : 0.0;
    loss += targets[t].positive ? softplus(-z) : softplus(z);
    if (!grad) continue;
    const double dz = sigmoid(z) - label;
    const auto m = model.output.row(targets[t].word);
    for (std::size_t i = 0; i < D; ++i) {
      if (!stick) {
        dh[i] += dz * m[i];
        grad->output[t][i] = dz * h[i];
      } else {
        const double n = model.stick(targets[t].word, i);
        const double c = model.stick_bias[i];
        const bool upper = !(n * h[i] + c < 0.0);
        dh[i] += dz * (upper ? m[i] + n : m[i]);
        grad->output[t][i] = dz * h[i];
        grad->stick[t][i] = upper ? dz * h[i] : 0.0;
        grad->stick_bias[i] += upper ? dz : 0.0;
      }
    }
  }
  if (grad) {
    grad->input.assign(context.size(), Vector(D, 0.0));
    for (auto& g : grad->input)
      for (std::size_t i = 0; i < D; ++i) g[i] = dh[i] * inv;
  }
  return loss;
}

/// One SGD step on a CBOW position in word2vec order: output (and stick)
/// rows are updated target by target, input rows once at the end. Stick
/// parameters use `lr * stick_lr_scale`. Returns the loss before the step.
inline double cbow_sgd_step(CbowModel& model, std::span<const std::size_t> context,
                            std::span<const TrainTarget> targets, double lr,
                            double stick_lr_scale, Vector& h, Vector& dh) {
  const std::size_t D = model.dim;
  const bool stick = model.mode == ScoreMode::broken_stick;
  const double inv = 1.0 / static_cast<double>(context.size());
  h.assign(D, 0.0);
  dh.assign(D, 0.0);
  for (auto w : context) {
    const auto row = model.input.row(w);
    for (std::size_t i = 0; i < D; ++i) h[i] += row[i];
  }
  for (double& x : h) x *= inv;
  const double slr = lr * stick_lr_scale;
  double loss = 0.0;
  for (const auto& t : targets) {
    const double z = score_logit(model, t.word, h);
    loss += t.positive ? softplus(-z) : softplus(z);
    const double dz = sigmoid(z) - (t.positive ? 1.0 : 0.0);
    auto m = model.output.row(t.word);
    if (!stick) {
      for (std::size_t i = 0; i < D; ++i) {
        dh[i] += dz * m[i];
        m[i] -= lr * dz * h[i];
      }
    } else {
      auto n = model.stick.row(t.word);
      for (std::size_t i = 0; i < D; ++i) {
        const bool upper = !(n[i] * h[i] + model.stick_bias[i] < 0.0);
        dh[i] += dz * (upper ? m[i] + n[i] : m[i]);
        m[i] -= lr * dz * h[i];
        if (upper) {
          n[i] -= slr * dz * h[i];
          model.stick_bias[i] -= slr * dz;
        }
      }
    }
  }
  for (auto w : context) {
    auto row = model.input.row(w);
    for (std::size_t i = 0; i < D; ++i) row[i] -= lr * dh[i] * inv;
  }
  return loss;
}

// ---------------------------------------------------------------------------
// Corpus

/// Token ids per line; lines are sentence boundaries that windows never cross.
struct Corpus {
  Vocab vocab;
  std::vector<std::vector<std::size_t>> sentences;
  std::uint64_t n_tokens() const {
    std::uint64_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }
};

inline std::string lowercase(std::string s) {
  for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

/// Whitespace tokenization; words below `min_count` are dropped.
inline Corpus read_corpus(std::istream& is, std::uint64_t min_count, bool to_lower = false) {
  std::vector<std::vector<std::string>> raw;
  std::map<std::string, std::uint64_t> counts;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream in(line);
    std::vector<std::string> words;
    std::string w;
    while (in >> w) {
      if (to_lower) w = lowercase(std::move(w));
      ++counts[w];
      words.push_back(std::move(w));
    }
    if (!words.empty()) raw.push_back(std::move(words));
  }
  Corpus c;
  c.vocab = Vocab::build(counts, min_count);
  for (const auto& words : raw) {
    std::vector<std::size_t> ids;
    for (const auto& w : words)
      if (auto id = c.vocab.find(w)) ids.push_back(*id);
    if (!ids.empty()) c.sentences.push_back(std::move(ids));
  }
  return c;
}

inline Corpus read_corpus_file(const std::string& path, std::uint64_t min_count,
                               bool to_lower = false) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus '" + path + "'");
  return read_corpus(in, min_count, to_lower);
}

// ---------------------------------------------------------------------------
// Training

struct TrainCfg {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  int epochs = 5;
  double learning_rate = 0.05;
  std::uint64_t min_count = 5;
  std::uint64_t seed = 1;
  // Frequent-word subsampling threshold (word2vec's -sample); 0 disables.
  double sample = 0.0;
  // Multiplier on the learning rate of stick vectors and biases.
  double stick_lr_scale = 1.0;
  // Initial stick vectors and biases are uniform in ±stick_init_scale; 0
  // starts the broken-stick model exactly linear.
  double stick_init_scale = 0.5;
};

/// Draws negatives from unigram^0.75 by inverse CDF.
class NoiseSampler {
 public:
  explicit NoiseSampler(const Vocab& vocab, double power = 0.75) {
    cdf_.reserve(vocab.size());
    double total = 0.0;
    for (std::size_t i = 0; i < vocab.size(); ++i) {
      total += std::pow(static_cast<double>(vocab.count(i)), power);
      cdf_.push_back(total);
    }
    for (double& x : cdf_) x /= total;
  }

  std::size_t draw(SeededRng& rng) const {
    const double u = rng.uniform01();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  }

 private:
  std::vector<double> cdf_;
};

/// Input vectors uniform in ±0.5/dim (word2vec); output vectors zero.
inline CbowModel init_cbow(Vocab vocab, std::size_t dim, ScoreMode mode, SeededRng& rng,
                           double stick_init_scale = 0.0) {
  if (vocab.empty()) throw std::invalid_argument("init_cbow: empty vocabulary");
  if (dim == 0) throw std::invalid_argument("init_cbow: dim must be positive");
  CbowModel m;
  m.dim = dim;
  m.mode = mode;
  m.input = Matrix(vocab.size(), dim);
  fill_uniform(m.input.data(), rng, -0.5 / dim, 0.5 / dim);
  m.output = Matrix(vocab.size(), dim);
  if (mode == ScoreMode::broken_stick) {
    m.stick = Matrix(vocab.size(), dim);
    m.stick_bias.assign(dim, 0.0);
    if (stick_init_scale > 0.0) {
      fill_uniform(m.stick.data(), rng, -stick_init_scale, stick_init_scale);
      fill_uniform(m.stick_bias, rng, -stick_init_scale, stick_init_scale);
    }
  }
  m.vocab = std::move(vocab);
  return m;
}

struct TrainStats {
  std::vector<double> epoch_mean_loss;  // mean loss per training position
};

class CbowDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Single-threaded CBOW training, deterministic per seed. The learning rate
/// decays linearly to 1e-4 of its start over all epochs.
inline CbowModel train_cbow(const Corpus& corpus, const TrainCfg& cfg, ScoreMode mode,
                            TrainStats* stats = nullptr) {
  if (cfg.window < 1) throw std::invalid_argument("train_cbow: window must be at least 1");
  if (cfg.negatives < 1) throw std::invalid_argument("train_cbow: negatives must be at least 1");
  if (cfg.epochs < 1) throw std::invalid_argument("train_cbow: epochs must be positive");
  if (corpus.vocab.empty()) throw std::invalid_argument("train_cbow: empty vocabulary");
  SeededRng rng(cfg.seed);
  CbowModel model = init_cbow(corpus.vocab, cfg.dim, mode, rng, cfg.stick_init_scale);
  const NoiseSampler noise(model.vocab);
  const double total_words = static_cast<double>(corpus.n_tokens()) * cfg.epochs + 1.0;
  double processed = 0.0;
  std::uint64_t total_count = 0;
  for (std::size_t i = 0; i < model.vocab.size(); ++i) total_count += model.vocab.count(i);

  std::vector<std::size_t> kept;
  std::vector<std::size_t> context;
  std::vector<TrainTarget> targets;
  Vector h, dh;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    double loss_sum = 0.0;
    std::uint64_t positions = 0;
    for (const auto& sentence : corpus.sentences) {
      kept.clear();
      for (auto w : sentence) {
        if (cfg.sample > 0.0) {
          const double f = static_cast<double>(model.vocab.count(w)) / total_count;
          const double keep = (std::sqrt(f / cfg.sample) + 1.0) * cfg.sample / f;
          if (keep < rng.uniform01()) continue;
        }
        kept.push_back(w);
      }
      for (std::size_t pos = 0; pos < kept.size(); ++pos) {
        const double lr =
            cfg.learning_rate * std::max(1.0 - processed / total_words, 1e-4);
        processed += 1.0;
        context.clear();
        const std::size_t lo = pos >= cfg.window ? pos - cfg.window : 0;
        const std::size_t hi = std::min(kept.size(), pos + cfg.window + 1);
        for (std::size_t j = lo; j < hi; ++j)
          if (j != pos) context.push_back(kept[j]);
        if (context.empty()) continue;
        targets.clear();
        targets.push_back({kept[pos], true});
        for (std::size_t k = 0; k < cfg.negatives; ++k) {
          const std::size_t neg = noise.draw(rng);
          if (neg != kept[pos]) targets.push_back({neg, false});
        }
        const double loss =
            cbow_sgd_step(model, context, targets, lr, cfg.stick_lr_scale, h, dh);
        if (!std::isfinite(loss)) {
          throw CbowDiverged("CBOW training diverged (" + std::string(to_string(mode)) +
                             " mode, epoch " + std::to_string(epoch) + ")");
        }
        loss_sum += loss;
        ++positions;
      }
    }
    if (stats) stats->epoch_mean_loss.push_back(positions ? loss_sum / positions : 0.0);
  }
  return model;
}

// ---------------------------------------------------------------------------
// Persistence: "V D" header, then "word x_1 ... x_D" per line.

inline void save_embeddings(const CbowModel& model, std::ostream& os) {
  os << model.vocab.size() << ' ' << model.dim << '\n';
  char buf[64];
  for (std::size_t w = 0; w < model.vocab.size(); ++w) {
    os << model.vocab.word(w);
    for (double x : model.input.row(w)) {
      std::snprintf(buf, sizeof buf, " %.6f", x);
      os << buf;
    }
    os << '\n';
  }
}

inline void save_embeddings(const CbowModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write embeddings to '" + path + "'");
  save_embeddings(model, out);
  if (!out) throw std::runtime_error("error writing embeddings to '" + path + "'");
}

class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads input vectors only; output and stick parameters are left empty.
inline CbowModel load_embeddings(std::istream& is) {
  auto parse_double = [](std::string_view tok, double& out) {
    const char* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
  };
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(is, line)) throw FormatError(1, "missing header");
  std::size_t V = 0, D = 0;
  {
    std::istringstream in(line);
    std::string extra;
    if (!(in >> V >> D) || (in >> extra) || D == 0) throw FormatError(1, "header must be 'V D'");
  }
  CbowModel m;
  m.dim = D;
  m.input = Matrix(V, D);
  for (std::size_t w = 0; w < V; ++w) {
    ++lineno;
    if (!std::getline(is, line)) throw FormatError(lineno, "unexpected end of file");
    std::istringstream in(line);
    std::string word;
    std::vector<std::string> fields;
    in >> word;
    std::string tok;
    while (in >> tok) fields.push_back(tok);
    if (word.empty() || fields.size() != D) {
      throw FormatError(lineno, "expected a word and " + std::to_string(D) + " values, got " +
                                    std::to_string(fields.size()) + " values");
    }
    for (std::size_t i = 0; i < D; ++i) {
      if (!parse_double(fields[i], m.input(w, i))) {
        throw FormatError(lineno, "bad number '" + fields[i] + "'");
      }
    }
    try {
      m.vocab.add(word, 0);
    } catch (const std::invalid_argument& e) {
      throw FormatError(lineno, e.what());
    }
  }
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw FormatError(lineno, "more rows than the header declares");
    }
  }
  return m;
}

inline CbowModel load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings '" + path + "'");
  return load_embeddings(in);
}

// ---------------------------------------------------------------------------
// Analogies

/// b − a + c ≈ expected
struct AnalogyQuery {
  std::string a, b, c, expected;
};

/// word2vec questions format: 4 words per line, ":" lines are section headers.
inline std::vector<AnalogyQuery> read_questions(std::istream& is, bool to_lower = false) {
  std::vector<AnalogyQuery> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == ':') continue;
    std::istringstream in(line);
    std::vector<std::string> w;
    std::string tok;
    while (in >> tok) w.push_back(to_lower ? lowercase(tok) : tok);
    if (w.size() != 4) throw FormatError(lineno, "analogy line must have 4 words");
    out.push_back({w[0], w[1], w[2], w[3]});
  }
  return out;
}

inline std::vector<AnalogyQuery> read_questions_file(const std::string& path,
                                                     bool to_lower = false) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open questions '" + path + "'");
  return read_questions(in, to_lower);
}

struct AnalogyResult {
  double accuracy = 0.0;
  std::size_t scored = 0;
  std::size_t skipped = 0;
  std::size_t correct = 0;
};

class NoScoreableQueries : public std::runtime_error {
 public:
  explicit NoScoreableQueries(std::size_t skipped)
      : std::runtime_error("no scoreable analogy queries (" + std::to_string(skipped) +
                           " skipped as out of vocabulary)"),
        skipped_(skipped) {}
  std::size_t skipped() const { return skipped_; }

 private:
  std::size_t skipped_;
};

/// Unit-normalized input vectors (zero rows stay zero).
inline Matrix normalized_inputs(const CbowModel& model) {
  Matrix n = model.input;
  for (std::size_t w = 0; w < n.rows(); ++w) {
    auto row = n.row(w);
    const double len = norm(row);
    if (len > 0.0)
      for (double& x : row) x /= len;
  }
  return n;
}

/// 3CosAdd: answer = argmax over words other than a, b, c of
/// cos(v, v_b − v_a + v_c) on unit-normalized vectors. Lowest index wins ties.
inline std::size_t answer_analogy(const Matrix& unit, std::size_t a, std::size_t b,
                                  std::size_t c) {
  const std::size_t D = unit.cols();
  Vector q(D);
  for (std::size_t i = 0; i < D; ++i) q[i] = unit(b, i) - unit(a, i) + unit(c, i);
  const double qn = norm(q);
  std::size_t best = unit.rows();
  double best_cos = -std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < unit.rows(); ++w) {
    if (w == a || w == b || w == c) continue;
    const double cs = qn > 0.0 ? dot(unit.row(w), q) / qn : 0.0;
    if (cs > best_cos) {
      best_cos = cs;
      best = w;
    }
  }
  return best;
}

inline AnalogyResult analogy_eval(const CbowModel& model, std::span<const AnalogyQuery> queries) {
  const Matrix unit = normalized_inputs(model);
  AnalogyResult r;
  for (const auto& q : queries) {
    const auto a = model.vocab.find(q.a), b = model.vocab.find(q.b), c = model.vocab.find(q.c),
               e = model.vocab.find(q.expected);
    if (!a || !b || !c || !e) {
      ++r.skipped;
      continue;
    }
    ++r.scored;
    if (answer_analogy(unit, *a, *b, *c) == *e) ++r.correct;
  }
  if (r.scored == 0) throw NoScoreableQueries(r.skipped);
  r.accuracy = static_cast<double>(r.correct) / static_cast<double>(r.scored);
  return r;
}

// ---------------------------------------------------------------------------
// Synthetic grid corpus. Words are "r<i>s<j>" on a rows × cols grid. Each
// sentence draws `sentence_length` words from a single row or a single
// column, so column (row) offsets are shared across rows (columns).

struct GridConfig {
  std::size_t rows = 8;
  std::size_t cols = 8;
  std::uint64_t n_tokens = 1'000'000;
  std::size_t sentence_length = 10;
  // Probability that a token is replaced by a uniformly random grid word.
  double noise = 0.0;
  std::uint64_t seed = 0;
};

inline std::string grid_word(std::size_t r, std::size_t s) {
  return "r" + std::to_string(r) + "s" + std::to_string(s);
}

inline void write_grid_corpus(const GridConfig& cfg, std::ostream& os) {
  if (cfg.rows < 2 || cfg.cols < 2 || cfg.sentence_length < 2) {
    throw std::invalid_argument("grid corpus needs at least 2 rows, 2 columns, 2 words/sentence");
  }
  SeededRng rng(cfg.seed);
  std::uint64_t written = 0;
  while (written < cfg.n_tokens) {
    const bool by_row = rng.below(2) == 0;
    const std::size_t line = by_row ? rng.below(cfg.rows) : rng.below(cfg.cols);
    const std::uint64_t len = std::min<std::uint64_t>(cfg.sentence_length, cfg.n_tokens - written);
    for (std::uint64_t k = 0; k < len; ++k) {
      const std::size_t other = by_row ? rng.below(cfg.cols) : rng.below(cfg.rows);
      std::string word = by_row ? grid_word(line, other) : grid_word(other, line);
      if (cfg.noise > 0.0 && rng.uniform01() < cfg.noise) {
        const std::size_t r = rng.below(cfg.rows);
        word = grid_word(r, rng.below(cfg.cols));
      }
      os << (k ? " " : "") << word;
    }
    os << '\n';
    written += len;
  }
}

/// ((r_i,s_j), (r_i,s_k), (r_l,s_j)) → (r_l,s_k) for all i ≠ l, j ≠ k.
inline std::vector<AnalogyQuery> grid_questions(const GridConfig& cfg) {
  std::vector<AnalogyQuery> q;
  for (std::size_t i = 0; i < cfg.rows; ++i)
    for (std::size_t l = 0; l < cfg.rows; ++l)
      for (std::size_t j = 0; j < cfg.cols; ++j)
        for (std::size_t k = 0; k < cfg.cols; ++k) {
          if (i == l || j == k) continue;
          q.push_back({grid_word(i, j), grid_word(i, k), grid_word(l, j), grid_word(l, k)});
        }
  return q;
}

inline void write_questions(std::span<const AnalogyQuery> qs, std::ostream& os,
                            std::string_view section = "grid") {
  os << ": " << section << '\n';
  for (const auto& q : qs) os << q.a << ' ' << q.b << ' ' << q.c << ' ' << q.expected << '\n';
}

}  // namespace extrap::embeddings

#endif  // EXTRAP_EMBEDDINGS_HPP
