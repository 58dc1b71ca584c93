#ifndef TAGPARSE_PG_H_
#define TAGPARSE_PG_H_

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "tagparse/tagger.h"

namespace tagparse {

struct PGConfig {
  int samples = 8;
  double learning_rate = 0.0005;
  double entropy_coef = 0.01;
  int burn_in = 1000;
  std::vector<std::string> frozen{"word_embedding", "pos_embedding"};
  bool noise = false;
  double noise_stddev = 0.1;
  double desired_divergence = 0.5;
  double adaptation = 1.05;
  int epochs = 10;
  bool select_best = false;  // keep the epoch with the best dev F1
  std::uint64_t seed = 1;

  void validate() const;  // throws ContractError
};

// Running mean and standard deviation of raw advantages (Welford).
class AdvantageTracker {
 public:
  explicit AdvantageTracker(int burn_in = 1000) : burn_in_(burn_in) {}

  void observe(double advantage);
  // (a - mean) / max(std, 1e-8) once count() >= burn_in, otherwise a.
  double standardize(double advantage) const;

  long count() const { return count_; }
  double mean() const { return mean_; }
  double stddev() const;

 private:
  int burn_in_;
  long count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline constexpr double kStddevFloor = 1e-8;

// One sampled label sequence. noise[task] holds the logit perturbation used
// for every token (tokens x |task|), empty when sampling was noise-free.
// ids[task][t] is the sampled label; the last token's N and C entries are the
// forced dummy and carry no probability mass.
struct SampledSequence {
  EncodedSentence labels;
  std::vector<std::vector<int>> ids;
  std::vector<std::vector<double>> noise;
  double log_prob = 0.0;
  double entropy = 0.0;  // summed over sampled decisions
  double divergence = 0.0;  // summed L1 distance between noisy and clean rows
  int decisions = 0;
};

// Samples N, C and U for every token from softmax(logits + noise), with
// Gaussian noise of the given stddev (0 disables it).
SampledSequence sample_sequence(const TaggerModel& policy, const Sentence& sentence,
                                std::mt19937_64& rng, double noise_stddev = 0.0);
SampledSequence sample_sequence(const TaggerModel& policy, const TokenIds& ids,
                                const ForwardPass& pass, const Sentence& sentence,
                                std::mt19937_64& rng, double noise_stddev);

// Bracketing F1 of decode(sampled) against gold.
double tree_reward(const EncodedSentence& sampled, const Tree& gold);

// Gradient of mean_s[adv_s * log pi(sample_s) + entropy_coef * H(sample_s)]
// with respect to every policy parameter, using each sample's stored noise.
Gradients policy_gradient(const TaggerModel& policy, const Sentence& sentence,
                          std::span<const SampledSequence> samples,
                          std::span<const double> advantages, double entropy_coef);

// The same objective evaluated directly, for checking the gradient.
double policy_objective(const TaggerModel& policy, const Sentence& sentence,
                        std::span<const SampledSequence> samples,
                        std::span<const double> advantages, double entropy_coef);

struct PGStep {
  double mean_reward = 0.0;
  double baseline_reward = 0.0;
  double mean_advantage = 0.0;  // standardized
  double entropy = 0.0;         // mean per decision
  double divergence = 0.0;      // mean per decision
};

// One gradient-ascent step on a single sentence from config.samples samples.
// Tensors named in config.frozen are left untouched.
PGStep pg_update(TaggerModel& policy, const TaggerModel& baseline, const EvalSentence& example,
                 const PGConfig& config, AdvantageTracker& tracker, double noise_stddev,
                 std::mt19937_64& rng);

// Multiplies the stddev by config.adaptation when the measured divergence is
// below the target, divides otherwise.
double adapt_noise(double stddev, double divergence, const PGConfig& config);

struct PGEpochLog {
  int epoch = 0;
  double mean_reward = 0.0;
  double mean_baseline = 0.0;
  double mean_advantage = 0.0;
  double entropy = 0.0;
  double dev_f1 = 0.0;
  double noise_stddev = 0.0;
};

void write_pg_log_header(std::ostream& out);
void write_pg_log(std::ostream& out, const PGEpochLog& log);

// Fine-tunes a copy of `initial`, which also serves as the frozen baseline.
// Dev F1 is measured on `dev`, or on `train` when dev is empty.
TaggerModel finetune(const TaggerModel& initial, std::span<const EvalSentence> train,
                     std::span<const EvalSentence> dev, const PGConfig& config,
                     const std::function<void(const PGEpochLog&)>& on_epoch = {});

}  // namespace tagparse

#endif  // TAGPARSE_PG_H_
