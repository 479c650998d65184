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

#include "extrap/relation.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace extrap::relation {
namespace {

RelationModel random_model(HeadVariant v, std::size_t vocab, std::size_t d, std::size_t h,
                           std::uint64_t seed) {
  RelationTrainConfig cfg;
  cfg.dim = d;
  cfg.hidden = h;
  cfg.seed = seed;
  return init_relation_model(v, vocab, cfg);
}

HeadParams zero_head(HeadVariant v, std::size_t d, std::size_t h) {
  HeadParams head;
  head.variant = v;
  head.transform = Matrix(h, 2 * d);
  head.classes = Matrix(3, h);
  head.contradiction = Matrix(2, h);
  head.conditional = Matrix(2, h);
  return head;
}

Vector random_vector(SeededRng& rng, std::size_t n) {
  Vector v(n);
  fill_uniform(v, rng, -2, 2);
  return v;
}

TEST(Encode, IdenticalSentencesGiveIdenticalSides) {
  const auto m = random_model(HeadVariant::baseline, 10, 4, 3, 1);
  const auto e = encode(m.encoder, {3}, {3});
  EXPECT_EQ(e.premise, e.hypothesis);
}

TEST(Encode, SwapSwapsOutputs) {
  const auto m = random_model(HeadVariant::baseline, 12, 5, 3, 2);
  const TokenSeq p{1, 4, 7}, h{2, 9};
  const auto ph = encode(m.encoder, p, h);
  const auto hp = encode(m.encoder, h, p);
  EXPECT_EQ(ph.premise, hp.hypothesis);
  EXPECT_EQ(ph.hypothesis, hp.premise);
}

TEST(Encode, ZeroEmbeddingsGiveZero) {
  auto m = random_model(HeadVariant::baseline, 6, 4, 3, 3);
  m.encoder.embedding = Matrix(6, 4);
  const auto e = encode(m.encoder, {1, 2}, {5});
  EXPECT_EQ(e.premise, Vector(4, 0.0));
  EXPECT_EQ(e.hypothesis, Vector(4, 0.0));
}

TEST(Encode, RejectsBadTokens) {
  const auto m = random_model(HeadVariant::baseline, 6, 4, 3, 3);
  EXPECT_THROW(encode(m.encoder, {}, {1}), std::invalid_argument);
  EXPECT_THROW(encode(m.encoder, {6}, {1}), std::invalid_argument);
}

TEST(HeadBaseline, ZeroWeightsUniform) {
  const auto p = head_baseline(zero_head(HeadVariant::baseline, 3, 2), Vector{1, 2, 3},
                               Vector{-1, 0, 4});
  for (double x : p) EXPECT_DOUBLE_EQ(x, 1.0 / 3.0);
}

TEST(HeadBaseline, NormalizedAndGenericallyAsymmetric) {
  SeededRng rng(8);
  int asymmetric = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_model(HeadVariant::baseline, 4, 4, 5, rng.next_u64());
    const Vector a = random_vector(rng, 4), b = random_vector(rng, 4);
    const Vector p = head_baseline(m.head, a, b);
    EXPECT_NEAR(p[0] + p[1] + p[2], 1.0, 1e-12);
    for (double x : p) EXPECT_GE(x, 0.0);
    if (std::abs(p[0] - head_baseline(m.head, b, a)[0]) > 1e-6) ++asymmetric;
  }
  EXPECT_GT(asymmetric, 100);
}

TEST(Heads, VariantMismatchThrows) {
  const Vector v{0, 0};
  EXPECT_THROW(head_baseline(zero_head(HeadVariant::symmetric, 2, 2), v, v),
               std::invalid_argument);
  EXPECT_THROW(head_symmetric(zero_head(HeadVariant::baseline, 2, 2), v, v),
               std::invalid_argument);
}

TEST(HeadSymmetric, ZeroWeights) {
  // 1/2 at stage one, then 1/2 · 1/2 for each of e and n
  const auto p = head_symmetric(zero_head(HeadVariant::symmetric, 3, 2), Vector{1, 2, 3},
                                Vector{0, 5, -1});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.25);
  EXPECT_DOUBLE_EQ(p[2], 0.25);
}

TEST(HeadSymmetric, ContradictionIsSwapInvariant) {
  SeededRng rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto m = random_model(HeadVariant::symmetric, 4, 4, 6, rng.next_u64());
    const Vector a = random_vector(rng, 4), b = random_vector(rng, 4);
    const Vector ab = head_symmetric(m.head, a, b);
    const Vector ba = head_symmetric(m.head, b, a);
    ASSERT_LE(std::abs(ab[0] - ba[0]), 1e-12);
    ASSERT_NEAR(ab[0] + ab[1] + ab[2], 1.0, 1e-12);
    for (double x : ab) ASSERT_GE(x, 0.0);
  }
}

class RelationGradCheck : public ::testing::TestWithParam<HeadVariant> {};

TEST_P(RelationGradCheck, FullLossMatchesFiniteDifferences) {
  SynthConfig sc;
  sc.vocab_size = 10;
  sc.n_train = 20;
  const auto data = gen_synthetic(sc).train;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto model = random_model(GetParam(), sc.vocab_size, 4, 3, seed);
    const LossWithGrad loss = [&](std::span<const double> p, Vector* g) {
      RelationModel m = model;
      unflatten(m, p);
      return loss_and_grad(m, data, g);
    };
    const auto r = finite_diff_gradcheck(loss, flatten(model), 1e-6);
    EXPECT_LT(r.max_rel_diff, 1e-5) << to_string(GetParam()) << " seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(BothHeads, RelationGradCheck,
                         ::testing::Values(HeadVariant::baseline, HeadVariant::symmetric));

TEST(Flatten, RoundTrip) {
  auto m = random_model(HeadVariant::symmetric, 7, 3, 2, 4);
  const Vector p = flatten(m);
  auto z = zeros_like(m);
  unflatten(z, p);
  EXPECT_EQ(flatten(z), p);
  EXPECT_THROW(unflatten(z, Vector(p.size() + 1)), std::invalid_argument);
}

TEST(GenSynthetic, FullBiasPutsNotInHypothesis) {
  const auto data = gen_synthetic(SynthConfig{});
  const SynthLayout layout(SynthConfig{}.vocab_size);
  auto has_not = [&](const TokenSeq& s) {
    return std::find(s.begin(), s.end(), layout.not_token) != s.end();
  };
  std::size_t contradictions = 0;
  for (const auto& part : {data.train, data.test})
    for (const auto& ex : part)
      if (ex.label == Label::contradiction) {
        ++contradictions;
        EXPECT_TRUE(has_not(ex.hypothesis));
        EXPECT_FALSE(has_not(ex.premise));
      }
  EXPECT_GT(contradictions, 0u);
}

TEST(GenSynthetic, BiasZeroPutsNotInPremise) {
  SynthConfig cfg;
  cfg.directional_bias = 0.0;
  const SynthLayout layout(cfg.vocab_size);
  for (const auto& ex : gen_synthetic(cfg).train) {
    if (ex.label != Label::contradiction) continue;
    EXPECT_NE(std::find(ex.premise.begin(), ex.premise.end(), layout.not_token),
              ex.premise.end());
  }
}

TEST(GenSynthetic, LabelsBalanced) {
  for (std::size_t n : {299u, 300u, 301u, 31u}) {
    SynthConfig cfg;
    cfg.n_train = n;
    const auto train = gen_synthetic(cfg).train;
    ASSERT_EQ(train.size(), n);
    for (auto l : {Label::contradiction, Label::entailment, Label::neutral}) {
      const double count = static_cast<double>(filter_label(train, l).size());
      EXPECT_LE(std::abs(count - static_cast<double>(n) / 3.0), 1.0);
    }
  }
}

TEST(GenSynthetic, ValidatesConfig) {
  SynthConfig cfg;
  cfg.vocab_size = 7;
  EXPECT_THROW(gen_synthetic(cfg), std::invalid_argument);
  cfg.vocab_size = 40;
  cfg.directional_bias = 1.5;
  EXPECT_THROW(gen_synthetic(cfg), std::invalid_argument);
}

TEST(GenSynthetic, DeterministicPerSeed) {
  SynthConfig cfg;
  cfg.seed = 9;
  EXPECT_EQ(gen_synthetic(cfg).train, gen_synthetic(cfg).train);
  SynthConfig other = cfg;
  other.seed = 10;
  EXPECT_NE(gen_synthetic(cfg).train, gen_synthetic(other).train);
}

TEST(ReverseContradictions, Contract) {
  EXPECT_TRUE(reverse_contradictions({}).empty());
  const auto test = gen_synthetic(SynthConfig{}).test;
  const auto contra = filter_label(test, Label::contradiction);
  const auto rev = reverse_contradictions(test);
  ASSERT_EQ(rev.size(), contra.size());
  for (std::size_t i = 0; i < rev.size(); ++i) {
    EXPECT_EQ(rev[i].label, Label::contradiction);
    EXPECT_EQ(rev[i].premise, contra[i].hypothesis);
    EXPECT_EQ(rev[i].hypothesis, contra[i].premise);
  }
  EXPECT_EQ(reverse_contradictions(rev), contra);
}

TEST(DatasetIo, RoundTrip) {
  const auto data = gen_synthetic(SynthConfig{}).train;
  std::stringstream ss;
  write_dataset(ss, data);
  EXPECT_EQ(read_dataset(ss), data);
}

TEST(DatasetIo, ErrorNamesLine) {
  std::istringstream in("1 2\t3\tc\n1 2\t3\te\n1 x\t3\tn\n");
  try {
    read_dataset(in);
    FAIL() << "expected parse error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::istringstream bad_label("1\t2\tq\n");
  EXPECT_THROW(read_dataset(bad_label), std::runtime_error);
}

TEST(EvalAccuracy, OracleAndChance) {
  const auto test = gen_synthetic(SynthConfig{}).test;
  EXPECT_EQ(eval_accuracy([](const PairExample& ex) { return ex.label; }, test), 1.0);

  SynthConfig big;
  big.n_test = 30000;
  const auto many = gen_synthetic(big).test;
  SeededRng rng(77);
  const double chance = eval_accuracy(
      [&](const PairExample&) { return static_cast<Label>(rng.below(3)); }, many);
  EXPECT_NEAR(chance, 1.0 / 3.0, 0.02);

  EXPECT_THROW(eval_accuracy([](const PairExample& ex) { return ex.label; },
                             std::span<const PairExample>{}),
               std::invalid_argument);
}

TEST(TrainRelation, LossDecreasesForSmallStep) {
  const auto train = gen_synthetic(SynthConfig{}).train;
  for (auto v : {HeadVariant::baseline, HeadVariant::symmetric}) {
    RelationTrainConfig cfg;
    cfg.epochs = 10;
    cfg.learning_rate = 0.01;
    std::vector<double> history;
    train_relation(v, cfg, train, SynthConfig{}.vocab_size, &history);
    ASSERT_EQ(history.size(), 10u);
    for (std::size_t i = 1; i < history.size(); ++i) EXPECT_LT(history[i], history[i - 1]);
  }
}

TEST(TrainRelation, DeterministicPerSeed) {
  const auto train = gen_synthetic(SynthConfig{}).train;
  RelationTrainConfig cfg;
  cfg.epochs = 30;
  cfg.seed = 5;
  const auto a = train_relation(HeadVariant::symmetric, cfg, train, 40);
  const auto b = train_relation(HeadVariant::symmetric, cfg, train, 40);
  EXPECT_EQ(flatten(a), flatten(b));
}

TEST(TrainRelation, FitsBiasedTrainingData) {
  const auto data = gen_synthetic(SynthConfig{});
  for (auto v : {HeadVariant::baseline, HeadVariant::symmetric}) {
    const auto m = train_relation(v, RelationTrainConfig{}, data.train, 40);
    EXPECT_GT(eval_accuracy(m, data.train), 0.9) << to_string(v);
  }
}

TEST(TrainRelation, DivergenceThrows) {
  const auto train = gen_synthetic(SynthConfig{}).train;
  RelationTrainConfig cfg;
  cfg.epochs = 50;
  cfg.learning_rate = 1e6;
  EXPECT_THROW(train_relation(HeadVariant::baseline, cfg, train, 40), RelationDiverged);
}

}  // namespace
}  // namespace extrap::relation
