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

#include "extrap/embeddings.hpp"

#include "cbow_slots.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace extrap::embeddings {
namespace {

using testing_support::cbow_gradcheck_worst;
using testing_support::flatten_grad;
using testing_support::gather;
using testing_support::random_model;
using testing_support::scatter;

TEST(BrokenStick, DegenerateIsLinear) {
  for (double x : {-3.0, -0.5, 0.0, 2.0, 7.25}) EXPECT_EQ(broken_stick(x, 1, 0, 0), x);
}

TEST(BrokenStick, BothBranches) {
  EXPECT_EQ(broken_stick(-2, 1, 1, 0), -2.0);
  EXPECT_EQ(broken_stick(3, 1, 1, 0), 6.0);
}

TEST(BrokenStick, BreakpointAgreement) {
  // (m+n)x* + c = m·x* + (n·x* + c) = m·x*
  const double m = 0.7, n = -1.5, c = 0.6;
  const double x = -c / n;
  EXPECT_NEAR((m + n) * x + c, m * x, 1e-15);
  EXPECT_NEAR(broken_stick(x, m, n, c), m * x, 1e-15);
}

TEST(BrokenStick, ContinuousAtBreakpoint) {
  SeededRng rng(31);
  const double eps = 1e-10;
  int checked = 0;
  while (checked < 100000) {
    const double m = rng.uniform(-1, 1), n = rng.uniform(-1, 1), c = rng.uniform(-1, 1);
    if (std::abs(n) < 1e-3) continue;
    const double x = -c / n;
    const double jump = std::abs(broken_stick(x - eps, m, n, c) - broken_stick(x + eps, m, n, c));
    ASSERT_LE(jump, std::abs(m) * 2 * eps + 1e-9) << m << ' ' << n << ' ' << c;
    ++checked;
  }
}

TEST(Score, ZeroContextIsHalf) {
  for (auto mode : {ScoreMode::linear, ScoreMode::broken_stick}) {
    CbowModel m = random_model(mode, 3, 4, 1);
    if (mode == ScoreMode::broken_stick) m.stick_bias.assign(4, 0.0);
    EXPECT_EQ(score(m, 1, Vector(4, 0.0)), 0.5);
  }
}

TEST(Score, StickWithZeroParametersMatchesLinear) {
  SeededRng rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    CbowModel stick = random_model(ScoreMode::broken_stick, 5, 6, rng.next_u64());
    std::fill(stick.stick.data().begin(), stick.stick.data().end(), 0.0);
    stick.stick_bias.assign(6, 0.0);
    CbowModel linear = stick;
    linear.mode = ScoreMode::linear;
    Vector ctx(6);
    fill_uniform(ctx, rng, -3, 3);
    const std::size_t t = rng.below(5);
    ASSERT_NEAR(score(stick, t, ctx), score(linear, t, ctx), 1e-12);
    ASSERT_NEAR(score_logit(stick, t, ctx), score_logit(linear, t, ctx), 1e-12);
  }
}

TEST(Score, LinearLogitIsAdditive) {
  SeededRng rng(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const CbowModel m = random_model(ScoreMode::linear, 4, 5, rng.next_u64());
    Vector a(5), b(5);
    fill_uniform(a, rng, -2, 2);
    fill_uniform(b, rng, -2, 2);
    ASSERT_NEAR(score_logit(m, 2, add(a, b)), score_logit(m, 2, a) + score_logit(m, 2, b),
                1e-9);
  }
}

TEST(Score, StickLogitViolatesAdditivity) {
  // D = 1, m = n = 1, c = 0: logit(−1) = −1, logit(2) = 4, logit(1) = 2 ≠ 3
  Vocab v;
  v.add("w", 1);
  CbowModel m;
  m.vocab = v;
  m.dim = 1;
  m.mode = ScoreMode::broken_stick;
  m.input = Matrix(1, 1);
  m.output = Matrix{{1.0}};
  m.stick = Matrix{{1.0}};
  m.stick_bias = {0.0};
  EXPECT_EQ(score_logit(m, 0, Vector{-1}), -1.0);
  EXPECT_EQ(score_logit(m, 0, Vector{2}), 4.0);
  EXPECT_EQ(score_logit(m, 0, Vector{1}), 2.0);
}

class CbowGradCheck : public ::testing::TestWithParam<ScoreMode> {};

TEST_P(CbowGradCheck, MatchesFiniteDifferences) {
  EXPECT_LT(cbow_gradcheck_worst(GetParam(), 20, 55), 1e-5) << to_string(GetParam());
}

INSTANTIATE_TEST_SUITE_P(BothModes, CbowGradCheck,
                         ::testing::Values(ScoreMode::linear, ScoreMode::broken_stick));

TEST(CbowSgdStep, EqualsGradientStep) {
  const double lr = 0.05;
  const std::vector<testing_support::Slots> cases = {
      {{0, 2, 3}, {{1, true}, {4, false}, {5, false}}},
      {{1, 3}, {{2, true}}},
  };
  for (auto mode : {ScoreMode::linear, ScoreMode::broken_stick}) {
    for (const auto& slots : cases) {
      // stick biases are shared across targets and move between targets,
      // so the sequential step is a plain gradient step only for one target
      if (mode == ScoreMode::broken_stick && slots.targets.size() > 1) continue;
      SeededRng rng(7);
      CbowModel m = random_model(mode, 6, 4, rng.next_u64());
      CbowGrad g;
      const double before = cbow_loss(m, slots.context, slots.targets, &g);
      Vector expected = gather(m, slots);
      const Vector grad = flatten_grad(g);
      for (std::size_t i = 0; i < expected.size(); ++i) expected[i] -= lr * grad[i];
      Vector h, dh;
      EXPECT_NEAR(cbow_sgd_step(m, slots.context, slots.targets, lr, 1.0, h, dh), before,
                  1e-15);
      const Vector after = gather(m, slots);
      for (std::size_t i = 0; i < after.size(); ++i) EXPECT_NEAR(after[i], expected[i], 1e-15);
    }
  }
}

Corpus alternating_corpus(std::size_t tokens) {
  std::string text;
  for (std::size_t i = 0; i < tokens; ++i) {
    text += i % 2 ? "b" : "a";
    text += (i + 1) % 100 == 0 ? '\n' : ' ';
  }
  std::istringstream in(text);
  return read_corpus(in, 1);
}

TrainCfg tiny_cfg() {
  TrainCfg cfg;
  cfg.dim = 8;
  cfg.window = 1;
  cfg.negatives = 2;
  cfg.epochs = 3;
  cfg.learning_rate = 0.05;
  cfg.min_count = 1;
  return cfg;
}

TEST(TrainCbow, LearnsAlternation) {
  const Corpus corpus = alternating_corpus(10000);
  ASSERT_EQ(corpus.vocab.size(), 2u);
  for (auto mode : {ScoreMode::linear, ScoreMode::broken_stick}) {
    TrainStats stats;
    const CbowModel m = train_cbow(corpus, tiny_cfg(), mode, &stats);
    const std::size_t a = *m.vocab.find("a"), b = *m.vocab.find("b");
    EXPECT_GT(score(m, a, m.input.row(b)), score(m, a, m.input.row(a))) << to_string(mode);
    ASSERT_EQ(stats.epoch_mean_loss.size(), 3u);
    EXPECT_GT(stats.epoch_mean_loss.front(), stats.epoch_mean_loss.back());
  }
}

TEST(TrainCbow, FrozenZeroStickReproducesLinearBitForBit) {
  const Corpus corpus = alternating_corpus(4000);
  TrainCfg cfg = tiny_cfg();
  cfg.stick_init_scale = 0.0;
  cfg.stick_lr_scale = 0.0;
  TrainStats lin_stats, stick_stats;
  const CbowModel lin = train_cbow(corpus, cfg, ScoreMode::linear, &lin_stats);
  const CbowModel stick = train_cbow(corpus, cfg, ScoreMode::broken_stick, &stick_stats);
  EXPECT_EQ(lin_stats.epoch_mean_loss, stick_stats.epoch_mean_loss);
  EXPECT_EQ(lin.input, stick.input);
  EXPECT_EQ(lin.output, stick.output);
}

TEST(TrainCbow, DeterministicSavedEmbeddings) {
  std::ostringstream text;
  GridConfig g;
  g.n_tokens = 20000;
  write_grid_corpus(g, text);
  std::istringstream in(text.str());
  const Corpus corpus = read_corpus(in, 1);
  TrainCfg cfg = tiny_cfg();
  cfg.window = 2;
  for (auto mode : {ScoreMode::linear, ScoreMode::broken_stick}) {
    std::ostringstream a, b;
    save_embeddings(train_cbow(corpus, cfg, mode), a);
    save_embeddings(train_cbow(corpus, cfg, mode), b);
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(TrainCbow, RejectsBadConfig) {
  const Corpus corpus = alternating_corpus(100);
  TrainCfg cfg = tiny_cfg();
  cfg.window = 0;
  EXPECT_THROW(train_cbow(corpus, cfg, ScoreMode::linear), std::invalid_argument);
  std::istringstream empty("");
  EXPECT_THROW(train_cbow(read_corpus(empty, 1), tiny_cfg(), ScoreMode::linear),
               std::invalid_argument);
}

TEST(Corpus, VocabOrderAndSentences) {
  std::istringstream in("b a c\nc b Z\n\nb z\n");
  const Corpus c = read_corpus(in, 2);
  ASSERT_EQ(c.vocab.size(), 2u);
  EXPECT_EQ(c.vocab.word(0), "b");
  EXPECT_EQ(c.vocab.word(1), "c");
  ASSERT_EQ(c.sentences.size(), 3u);
  EXPECT_EQ(c.sentences[0], (std::vector<std::size_t>{0, 1}));

  std::istringstream again("b a c\nc b Z\n\nb z\n");
  const Corpus lower = read_corpus(again, 2, true);
  EXPECT_EQ(lower.vocab.size(), 3u);
  EXPECT_EQ(lower.vocab.word(2), "z");
}

TEST(NoiseSamplerTest, FollowsSmoothedUnigram) {
  Vocab v;
  v.add("big", 81);
  v.add("small", 1);
  const NoiseSampler noise(v);
  SeededRng rng(4);
  int big = 0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) big += noise.draw(rng) == 0;
  // 81^0.75 = 27, so p(big) = 27/28
  EXPECT_NEAR(static_cast<double>(big) / draws, 27.0 / 28.0, 0.003);
}

TEST(Persistence, RoundTripAndHeader) {
  const CbowModel m = random_model(ScoreMode::linear, 20, 16, 9);
  std::stringstream ss;
  save_embeddings(m, ss);
  const std::string text = ss.str();
  EXPECT_EQ(text.substr(0, text.find('\n')), "20 16");
  const CbowModel back = load_embeddings(ss);
  ASSERT_EQ(back.vocab.size(), 20u);
  ASSERT_EQ(back.dim, 16u);
  for (std::size_t w = 0; w < 20; ++w) {
    EXPECT_EQ(back.vocab.word(w), m.vocab.word(w));
    for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(back.input(w, i), m.input(w, i), 1e-6);
  }

  Vocab hundred;
  for (int i = 0; i < 100; ++i) hundred.add("w" + std::to_string(i), 1);
  SeededRng rng(1);
  std::ostringstream out;
  save_embeddings(init_cbow(hundred, 16, ScoreMode::linear, rng), out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "100 16");
}

TEST(Persistence, WrongColumnCountNamesLine) {
  std::istringstream in("3 2\na 0.1 0.2\nb 0.3\nc 0.5 0.6\n");
  try {
    load_embeddings(in);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
  std::istringstream bad_header("x 2\n");
  EXPECT_THROW(load_embeddings(bad_header), FormatError);
  std::istringstream short_file("2 1\na 0.5\n");
  EXPECT_THROW(load_embeddings(short_file), FormatError);
}

CbowModel model_from(const std::vector<std::pair<std::string, Vector>>& rows) {
  CbowModel m;
  m.dim = rows.front().second.size();
  m.input = Matrix(rows.size(), m.dim);
  for (std::size_t w = 0; w < rows.size(); ++w) {
    m.vocab.add(rows[w].first, 1);
    std::copy(rows[w].second.begin(), rows[w].second.end(), m.input.row(w).begin());
  }
  return m;
}

TEST(Analogy, ParallelogramIsSolved) {
  const CbowModel m = model_from({{"man", {1, 0, 0}},
                                  {"woman", {1, 1, 0}},
                                  {"king", {0, 0, 1}},
                                  {"queen", {0, 1, 1}},
                                  {"apple", {-1, 0, 0}}});
  const std::vector<AnalogyQuery> qs = {{"man", "woman", "king", "queen"},
                                        {"man", "woman", "king", "apple"}};
  const auto r = analogy_eval(m, qs);
  EXPECT_EQ(r.scored, 2u);
  EXPECT_EQ(r.correct, 1u);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.5);
}

TEST(Analogy, IdentityOffsetPointsAtC) {
  // With a = b the query is v_c itself. c is excluded, so the answer is c's
  // nearest unit neighbour outside {a, c}.
  const CbowModel m = model_from({{"a", {1, 0}}, {"c", {0, 1}}, {"near", {0.1, 1}},
                                  {"far", {1, -0.2}}});
  const Matrix unit = normalized_inputs(m);
  EXPECT_EQ(answer_analogy(unit, 0, 0, 1), 2u);
}

TEST(Analogy, SkipsOutOfVocabulary) {
  const CbowModel m = model_from({{"a", {1, 0}}, {"b", {0, 1}}, {"c", {1, 1}}, {"d", {2, 1}}});
  const std::vector<AnalogyQuery> qs = {{"a", "b", "c", "d"}, {"a", "b", "zzz", "d"}};
  const auto r = analogy_eval(m, qs);
  EXPECT_EQ(r.scored, 1u);
  EXPECT_EQ(r.skipped, 1u);

  const std::vector<AnalogyQuery> none = {{"x", "y", "z", "w"}, {"a", "b", "c", "q"}};
  try {
    analogy_eval(m, none);
    FAIL() << "expected NoScoreableQueries";
  } catch (const NoScoreableQueries& e) {
    EXPECT_EQ(e.skipped(), 2u);
  }
}

TEST(Questions, HeadersSkippedAndArityChecked) {
  std::istringstream in(": capital\nA B C D\n\n: family\nman woman king queen\n");
  const auto qs = read_questions(in, true);
  ASSERT_EQ(qs.size(), 2u);
  EXPECT_EQ(qs[0].a, "a");
  EXPECT_EQ(qs[1].expected, "queen");
  std::istringstream bad("a b c\n");
  EXPECT_THROW(read_questions(bad), FormatError);
}

TEST(Grid, CorpusAndQuestions) {
  GridConfig g;
  g.n_tokens = 5000;
  std::ostringstream a, b;
  write_grid_corpus(g, a);
  write_grid_corpus(g, b);
  EXPECT_EQ(a.str(), b.str());
  std::istringstream in(a.str());
  const Corpus c = read_corpus(in, 1);
  EXPECT_EQ(c.n_tokens(), 5000u);
  EXPECT_EQ(c.vocab.size(), 64u);
  // every sentence shares a row or a column
  for (const auto& s : c.sentences) {
    bool same_row = true, same_col = true;
    for (auto w : s) {
      same_row &= c.vocab.word(w)[1] == c.vocab.word(s[0])[1];
      same_col &= c.vocab.word(w)[3] == c.vocab.word(s[0])[3];
    }
    EXPECT_TRUE(same_row || same_col);
  }
  const auto qs = grid_questions(g);
  EXPECT_EQ(qs.size(), 8u * 7u * 8u * 7u);
  std::ostringstream qtext;
  write_questions(qs, qtext);
  std::istringstream qin(qtext.str());
  EXPECT_EQ(read_questions(qin).size(), qs.size());
}

TEST(ScoreModeNames, RoundTrip) {
  EXPECT_EQ(parse_score_mode("linear"), ScoreMode::linear);
  EXPECT_EQ(parse_score_mode("stick"), ScoreMode::broken_stick);
  EXPECT_FALSE(parse_score_mode("relu").has_value());
}

}  // namespace
}  // namespace extrap::embeddings
