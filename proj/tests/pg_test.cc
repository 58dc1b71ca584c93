#include "tagparse/pg.h"

#include <cmath>
#include <sstream>

#include "gtest/gtest.h"
#include "tagparse/errors.h"
#include "tagparse/metrics.h"
#include "tagparse/synth.h"
#include "tagparse/treebank.h"

namespace tagparse {
namespace {

const char kSmall[] = "(S (NP (D the) (N dog)) (VP (V barks)))";

ModelDims tiny_dims() { return ModelDims{3, 2, 5, 1}; }

TaggerModel model_for(const std::vector<Tree>& trees, const ModelDims& dims,
                      std::uint64_t seed = 3) {
  std::vector<TrainingSentence> corpus;
  for (const Tree& t : trees) corpus.push_back(make_training_sentence(t, Scheme::kRelative, {}));
  return TaggerModel(build_vocabularies(corpus, {}), Scheme::kRelative, dims, seed);
}

// Sentence of n tokens whose N head has two labels and C, U one each.
TaggerModel two_label_model(std::uint64_t seed) {
  Vocabularies v;
  for (const char* w : {"a", "b", "c"}) v.words.add(w);
  v.pos.add("X");
  v.tasks[kTaskN].add("r1");
  v.tasks[kTaskN].add("r-1");
  v.tasks[kTaskC].add("S");
  v.tasks[kTaskU].add(std::string(kNoChain));
  return TaggerModel(v, Scheme::kRelative, ModelDims{3, 2, 4, 1}, seed);
}

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / v.size();
}

TEST(AdvantageTrackerTest, MatchesTwoPassStatistics) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> d(0.3, 2.0);
  AdvantageTracker tracker(0);
  std::vector<double> xs;
  for (int i = 0; i < 500; ++i) {
    xs.push_back(d(rng));
    tracker.observe(xs.back());
  }
  const double m = mean(xs);
  double var = 0;
  for (double x : xs) var += (x - m) * (x - m);
  const double sd = std::sqrt(var / xs.size());
  EXPECT_NEAR(m, tracker.mean(), 1e-12);
  EXPECT_NEAR(sd, tracker.stddev(), 1e-12);
  EXPECT_NEAR((1.5 - m) / sd, tracker.standardize(1.5), 1e-12);
}

TEST(AdvantageTrackerTest, BurnInAndFloor) {
  AdvantageTracker tracker(3);
  tracker.observe(0.5);
  tracker.observe(0.5);
  EXPECT_EQ(0.7, tracker.standardize(0.7));
  tracker.observe(0.5);
  EXPECT_EQ(0.0, tracker.standardize(0.5));
  EXPECT_NEAR(0.2 / kStddevFloor, tracker.standardize(0.7), 1e-3);
}

TEST(PGConfigTest, Validation) {
  PGConfig c;
  EXPECT_NO_THROW(c.validate());
  c.samples = 0;
  EXPECT_THROW(c.validate(), ContractError);
  c = PGConfig();
  c.entropy_coef = -1;
  EXPECT_THROW(c.validate(), ContractError);
}

TEST(SampleSequenceTest, SaturatedPolicyMatchesGreedy) {
  const Tree tree = parse_tree(kSmall);
  TaggerModel model = model_for({tree}, tiny_dims());
  for (int task = 0; task < kMainTasks; ++task) {
    auto& w = model.head_weight(task).data;
    std::fill(w.begin(), w.end(), 0.0);
    auto& b = model.head_bias(task).data;
    for (std::size_t c = 0; c < b.size(); ++c) b[c] = c == 0 ? 40.0 : 0.0;
  }
  std::mt19937_64 rng(1);
  const Sentence s = sentence_of(tree);
  const EncodedSentence greedy = predict_greedy(model, s);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(greedy, sample_sequence(model, s, rng).labels);
}

TEST(SampleSequenceTest, UniformPolicyIsFair) {
  TaggerModel model = two_label_model(1);
  for (int task = 0; task < kMainTasks; ++task) {
    std::fill(model.head_weight(task).data.begin(), model.head_weight(task).data.end(), 0.0);
  }
  const Sentence s{{"a", "b"}, {"X", "X"}};
  std::mt19937_64 rng(8);
  int first = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    const SampledSequence seq = sample_sequence(model, s, rng);
    EXPECT_EQ(4, seq.decisions);  // N and C of the first word, U of both
    first += seq.ids[kTaskN][0] == 0;
    EXPECT_NEAR(std::log(0.5), seq.log_prob, 1e-12);
  }
  EXPECT_NEAR(0.5, static_cast<double>(first) / trials, 0.02);
}

TEST(SampleSequenceTest, LogProbIsSumOfSampledProbabilities) {
  auto trees = pcfg_corpus(4, 6, 12);
  TaggerModel model = model_for(trees, ModelDims{6, 3, 8, 2});
  std::mt19937_64 rng(5);
  for (const Tree& t : trees) {
    const Sentence s = sentence_of(t);
    for (double sigma : {0.0, 0.7}) {
      const SampledSequence seq = sample_sequence(model, s, rng, sigma);
      const ForwardPass pass = model.forward(index_sentence(s, model.vocab()));
      double expected = 0.0;
      for (int task = 0; task < kMainTasks; ++task) {
        const int k = model.task_size(task);
        for (std::size_t i = 0; i < s.size(); ++i) {
          const int id = seq.ids[task][i];
          if (id < 0) {
            EXPECT_TRUE(task != kTaskU && i + 1 == s.size());
            continue;
          }
          double z[64];
          double top = -1e300;
          for (int c = 0; c < k; ++c) {
            z[c] = pass.logits[task][i * k + c];
            if (!seq.noise.empty()) z[c] += seq.noise[task][i * k + c];
            top = std::max(top, z[c]);
          }
          double sum = 0;
          for (int c = 0; c < k; ++c) sum += std::exp(z[c] - top);
          expected += z[id] - top - std::log(sum);
        }
      }
      EXPECT_NEAR(expected, seq.log_prob, 1e-9);
      const std::vector<SampledSequence> one{seq};
      EXPECT_NEAR(seq.log_prob, policy_objective(model, s, one, std::vector<double>{1.0}, 0.0),
                  1e-9);
      EXPECT_EQ(sigma == 0.0, seq.divergence == 0.0);
    }
  }
}

TEST(TreeRewardTest, Examples) {
  const Tree gold = parse_tree("(S (NP (A a) (B b)) (VP (C c) (D d)))");
  EXPECT_EQ(1.0, tree_reward(encode_dynamic(gold), gold));
  const Tree flat = parse_tree("(S (A a) (B b) (C c) (D d))");
  EXPECT_DOUBLE_EQ(0.5, tree_reward(encode_relative(flat), gold));
  const Tree wrong = parse_tree("(Q (A a) (B b) (C c) (D d))");
  EXPECT_EQ(0.0, tree_reward(encode_relative(wrong), gold));
}

TEST(PolicyGradientTest, MatchesFiniteDifferences) {
  auto trees = pcfg_corpus(9, 3, 8);
  TaggerModel model = model_for(trees, ModelDims{3, 2, 4, 1}, 11);
  const Sentence s = sentence_of(trees[0]);
  std::mt19937_64 rng(12);
  std::vector<SampledSequence> samples;
  for (int i = 0; i < 3; ++i) samples.push_back(sample_sequence(model, s, rng, 0.5));
  const std::vector<double> adv{0.7, -1.2, 0.3};
  const double beta = 0.4;
  const Gradients g = policy_gradient(model, s, samples, adv, beta);
  std::vector<Tensor*> params = model.parameters();
  const double eps = 1e-5;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p]->data.size(); ++i) {
      const double keep = params[p]->data[i];
      params[p]->data[i] = keep + eps;
      const double up = policy_objective(model, s, samples, adv, beta);
      params[p]->data[i] = keep - eps;
      const double down = policy_objective(model, s, samples, adv, beta);
      params[p]->data[i] = keep;
      const double numeric = (up - down) / (2 * eps);
      EXPECT_NEAR(numeric, g[p].data[i], 1e-7 + 1e-5 * std::abs(numeric))
          << params[p]->name << "[" << i << "]";
    }
  }
}

TEST(PolicyGradientTest, UniformEntropyIsStationary) {
  const Tree tree = parse_tree(kSmall);
  TaggerModel model = model_for({tree}, tiny_dims());
  for (int task = 0; task < kMainTasks; ++task) {
    std::fill(model.head_weight(task).data.begin(), model.head_weight(task).data.end(), 0.0);
  }
  const Sentence s = sentence_of(tree);
  std::mt19937_64 rng(1);
  const std::vector<SampledSequence> samples{sample_sequence(model, s, rng)};
  // Entropy of each sampled head is ln k, summed over decisions.
  double expected = 0.0;
  for (int task = 0; task < kMainTasks; ++task) {
    const int decisions = task == kTaskU ? 3 : 2;
    expected += decisions * std::log(static_cast<double>(model.task_size(task)));
  }
  EXPECT_NEAR(expected, samples[0].entropy, 1e-12);
  const Gradients g = policy_gradient(model, s, samples, std::vector<double>{0.0}, 1.0);
  for (const Tensor& t : g) {
    for (double v : t.data) EXPECT_NEAR(0.0, v, 1e-15) << t.name;
  }
}

TEST(PolicyGradientTest, ZeroAdvantageWithoutEntropyIsInert) {
  auto trees = pcfg_corpus(9, 3, 8);
  TaggerModel model = model_for(trees, ModelDims{3, 2, 4, 1});
  const Sentence s = sentence_of(trees[1]);
  std::mt19937_64 rng(3);
  const std::vector<SampledSequence> samples{sample_sequence(model, s, rng),
                                             sample_sequence(model, s, rng)};
  const Gradients g = policy_gradient(model, s, samples, std::vector<double>{0.0, 0.0}, 0.0);
  EXPECT_EQ(0.0, squared_norm(g));
}

TEST(PolicyGradientTest, ReinforceEstimateIsUnbiased) {
  TaggerModel model = two_label_model(21);
  const Sentence s{{"a", "b", "c"}, {"X", "X", "X"}};
  const double reward[2][2] = {{1.0, 0.2}, {0.0, 0.6}};
  auto expected_reward = [&](const TaggerModel& m) {
    const ForwardPass pass = m.forward(index_sentence(s, m.vocab()));
    const auto& p = pass.probs[kTaskN];
    double e = 0;
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) e += p[a] * p[2 + b] * reward[a][b];
    }
    return e;
  };
  Gradients exact = model.zero_gradients();
  std::vector<Tensor*> params = model.parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < params[p]->data.size(); ++i) {
      const double keep = params[p]->data[i];
      params[p]->data[i] = keep + 1e-6;
      const double up = expected_reward(model);
      params[p]->data[i] = keep - 1e-6;
      const double down = expected_reward(model);
      params[p]->data[i] = keep;
      exact[p].data[i] = (up - down) / 2e-6;
    }
  }
  std::mt19937_64 rng(77);
  std::vector<SampledSequence> samples;
  std::vector<double> rewards;
  for (int i = 0; i < 10000; ++i) {
    samples.push_back(sample_sequence(model, s, rng));
    rewards.push_back(reward[samples.back().ids[kTaskN][0]][samples.back().ids[kTaskN][1]]);
  }
  const Gradients estimate = policy_gradient(model, s, samples, rewards, 0.0);
  double diff = 0, norm = 0;
  for (std::size_t p = 0; p < exact.size(); ++p) {
    for (std::size_t i = 0; i < exact[p].data.size(); ++i) {
      diff += std::pow(estimate[p].data[i] - exact[p].data[i], 2);
      norm += std::pow(exact[p].data[i], 2);
    }
  }
  EXPECT_LT(std::sqrt(diff / norm), 0.05);
}

TEST(AdaptNoiseTest, Multiplicative) {
  PGConfig c;
  EXPECT_DOUBLE_EQ(0.1 * 1.05, adapt_noise(0.1, 0.0, c));
  EXPECT_DOUBLE_EQ(0.1 * 1.05 * 1.05, adapt_noise(adapt_noise(0.1, 0.2, c), 0.3, c));
  EXPECT_DOUBLE_EQ(0.1 / 1.05, adapt_noise(0.1, 0.5, c));
  EXPECT_DOUBLE_EQ(0.1 / 1.05, adapt_noise(0.1, 0.9, c));
}

TEST(AdaptNoiseTest, SettlesAroundTarget) {
  auto trees = pcfg_corpus(14, 10, 12);
  TaggerModel model = model_for(trees, ModelDims{6, 3, 8, 2});
  PGConfig config;
  std::mt19937_64 rng(6);
  double sigma = config.noise_stddev;
  std::vector<double> trace;
  int first_crossing = -1;
  for (int batch = 0; batch < 400; ++batch) {
    const Sentence s = sentence_of(trees[batch % trees.size()]);
    double d = 0;
    int decisions = 0;
    for (int i = 0; i < config.samples; ++i) {
      const SampledSequence seq = sample_sequence(model, s, rng, sigma);
      d += seq.divergence;
      decisions += seq.decisions;
    }
    d /= decisions;
    if (first_crossing < 0 && d >= config.desired_divergence) first_crossing = batch;
    trace.push_back(d);
    sigma = adapt_noise(sigma, d, config);
  }
  ASSERT_GE(first_crossing, 0);
  EXPECT_LT(first_crossing, 200);
  std::vector<double> tail(trace.end() - 100, trace.end());
  EXPECT_NEAR(0.5, mean(tail), 0.1);
  int above = 0;
  for (double d : tail) above += d >= 0.5;
  EXPECT_GT(above, 20);
  EXPECT_LT(above, 80);
}

std::vector<EvalSentence> eval_set(const std::vector<Tree>& trees) {
  std::vector<EvalSentence> out;
  for (const Tree& t : trees) out.push_back({sentence_of(t), t});
  return out;
}

TEST(FinetuneTest, FreezesEmbeddingsAndKeepsBaseline) {
  auto trees = pcfg_corpus(31, 12, 12);
  std::vector<TrainingSentence> corpus;
  for (const Tree& t : trees) corpus.push_back(make_training_sentence(t, Scheme::kDynamic, {}));
  TrainConfig tc;
  tc.dims = ModelDims{8, 4, 16, 1};
  tc.epochs = 5;
  const TaggerModel initial = train_mtl(corpus, {}, tc);
  const TaggerModel snapshot = initial;
  PGConfig pc;
  pc.epochs = 2;
  pc.learning_rate = 0.01;
  pc.noise = true;
  std::ostringstream tsv;
  write_pg_log_header(tsv);
  std::vector<PGEpochLog> logs;
  const auto data = eval_set(trees);
  TaggerModel tuned = finetune(initial, data, {}, pc, [&](const PGEpochLog& l) {
    logs.push_back(l);
    write_pg_log(tsv, l);
  });
  ASSERT_EQ(2u, logs.size());
  for (const PGEpochLog& l : logs) {
    EXPECT_GE(l.mean_reward, 0.0);
    EXPECT_LE(l.mean_reward, 1.0);
    EXPECT_GT(l.noise_stddev, 0.0);
  }
  auto before = snapshot.parameters();
  auto base = initial.parameters();
  auto after = tuned.parameters();
  bool moved = false;
  for (std::size_t p = 0; p < before.size(); ++p) {
    EXPECT_EQ(before[p]->data, base[p]->data);
    if (before[p]->name == "word_embedding" || before[p]->name == "pos_embedding") {
      EXPECT_EQ(before[p]->data, after[p]->data) << before[p]->name;
    } else {
      moved |= before[p]->data != after[p]->data;
    }
  }
  EXPECT_TRUE(moved);
  std::istringstream lines(tsv.str());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    EXPECT_EQ(6, std::count(line.begin(), line.end(), '\t')) << line;
    ++count;
  }
  EXPECT_EQ(3, count);
}

TEST(FinetuneTest, ZeroLearningRateChangesNothing) {
  auto trees = pcfg_corpus(32, 8, 10);
  TaggerModel initial = model_for(trees, ModelDims{6, 3, 8, 1});
  PGConfig pc;
  pc.epochs = 1;
  pc.learning_rate = 0.0;
  pc.entropy_coef = 0.5;
  const auto data = eval_set(trees);
  TaggerModel tuned = finetune(initial, data, {}, pc);
  auto a = initial.parameters();
  auto b = tuned.parameters();
  for (std::size_t p = 0; p < a.size(); ++p) EXPECT_EQ(a[p]->data, b[p]->data);
}

}  // namespace
}  // namespace tagparse
