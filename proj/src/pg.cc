#include "tagparse/pg.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

#include "tagparse/errors.h"
#include "tagparse/metrics.h"

namespace tagparse {

namespace {

// The last token's N and C labels are fixed by the encoding.
bool is_sampled(int task, int t, int n) { return task == kTaskU || t + 1 < n; }

void softmax(const double* logits, const double* noise, int k, std::vector<double>& out) {
  out.resize(k);
  double top = -INFINITY;
  for (int c = 0; c < k; ++c) {
    out[c] = logits[c] + (noise ? noise[c] : 0.0);
    top = std::max(top, out[c]);
  }
  double sum = 0.0;
  for (int c = 0; c < k; ++c) {
    out[c] = std::exp(out[c] - top);
    sum += out[c];
  }
  for (double& p : out) p /= sum;
}

double entropy_of(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p) {
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

const double* noise_row(const SampledSequence& s, int task, int t, int k) {
  if (s.noise.empty()) return nullptr;
  return s.noise[task].data() + static_cast<std::size_t>(t) * k;
}

void check_samples(std::span<const SampledSequence> samples, std::span<const double> advantages) {
  if (samples.empty() || samples.size() != advantages.size()) {
    throw ContractError("need one advantage per sample and at least one sample");
  }
}

}  // namespace

void PGConfig::validate() const {
  if (samples < 1) throw ContractError("samples must be >= 1");
  if (learning_rate < 0 || entropy_coef < 0 || burn_in < 0 || noise_stddev < 0 ||
      desired_divergence < 0 || adaptation <= 0 || epochs < 0) {
    throw ContractError("policy-gradient coefficients must be non-negative");
  }
}

void AdvantageTracker::observe(double advantage) {
  ++count_;
  const double delta = advantage - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (advantage - mean_);
}

double AdvantageTracker::stddev() const {
  return count_ < 2 ? 0.0 : std::sqrt(m2_ / static_cast<double>(count_));
}

double AdvantageTracker::standardize(double advantage) const {
  if (count_ < burn_in_) return advantage;
  return (advantage - mean_) / std::max(stddev(), kStddevFloor);
}

SampledSequence sample_sequence(const TaggerModel& policy, const TokenIds& ids,
                                const ForwardPass& pass, const Sentence& sentence,
                                std::mt19937_64& rng, double noise_stddev) {
  const int n = ids.size();
  SampledSequence out;
  out.ids.assign(kMainTasks, std::vector<int>(n, -1));
  if (noise_stddev > 0.0) out.noise.resize(kMainTasks);
  std::normal_distribution<double> gauss(0.0, noise_stddev > 0.0 ? noise_stddev : 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> noisy;
  for (int task = 0; task < kMainTasks; ++task) {
    const int k = policy.task_size(task);
    if (noise_stddev > 0.0) out.noise[task].assign(static_cast<std::size_t>(n) * k, 0.0);
    for (int t = 0; t < n; ++t) {
      if (!is_sampled(task, t, n)) continue;
      const std::size_t off = static_cast<std::size_t>(t) * k;
      if (noise_stddev > 0.0) {
        for (int c = 0; c < k; ++c) out.noise[task][off + c] = gauss(rng);
      }
      softmax(pass.logits[task].data() + off, noise_row(out, task, t, k), k, noisy);
      const double u = unit(rng);
      double cumulative = 0.0;
      int choice = k - 1;
      for (int c = 0; c < k; ++c) {
        cumulative += noisy[c];
        if (u < cumulative) {
          choice = c;
          break;
        }
      }
      // Guard against landing on a zero-probability tail through rounding.
      while (noisy[choice] == 0.0 && choice > 0) --choice;
      out.ids[task][t] = choice;
      out.log_prob += std::log(noisy[choice]);
      out.entropy += entropy_of(noisy);
      for (int c = 0; c < k; ++c) out.divergence += std::abs(noisy[c] - pass.probs[task][off + c]);
      ++out.decisions;
    }
  }
  out.labels = assemble_labels(policy, sentence, out.ids);
  return out;
}

SampledSequence sample_sequence(const TaggerModel& policy, const Sentence& sentence,
                                std::mt19937_64& rng, double noise_stddev) {
  validate(sentence);
  const TokenIds ids = index_sentence(sentence, policy.vocab());
  return sample_sequence(policy, ids, policy.forward(ids), sentence, rng, noise_stddev);
}

double tree_reward(const EncodedSentence& sampled, const Tree& gold) {
  return bracket_score(gold, decode(sampled)).f1();
}

Gradients policy_gradient(const TaggerModel& policy, const Sentence& sentence,
                          std::span<const SampledSequence> samples,
                          std::span<const double> advantages, double entropy_coef) {
  check_samples(samples, advantages);
  const TokenIds ids = index_sentence(sentence, policy.vocab());
  const ForwardPass pass = policy.forward(ids);
  const int n = ids.size();
  const double share = 1.0 / static_cast<double>(samples.size());
  std::vector<std::vector<double>> d_logits(policy.task_count());
  std::vector<double> p;
  for (int task = 0; task < kMainTasks; ++task) {
    const int k = policy.task_size(task);
    d_logits[task].assign(static_cast<std::size_t>(n) * k, 0.0);
    for (std::size_t s = 0; s < samples.size(); ++s) {
      const double a = advantages[s] * share;
      const double b = entropy_coef * share;
      for (int t = 0; t < n; ++t) {
        if (!is_sampled(task, t, n)) continue;
        const std::size_t off = static_cast<std::size_t>(t) * k;
        softmax(pass.logits[task].data() + off, noise_row(samples[s], task, t, k), k, p);
        const double h = entropy_of(p);
        double* d = d_logits[task].data() + off;
        d[samples[s].ids[task][t]] += a;
        for (int c = 0; c < k; ++c) {
          d[c] -= a * p[c];
          if (b != 0.0 && p[c] > 0.0) d[c] -= b * p[c] * (std::log(p[c]) + h);
        }
      }
    }
  }
  Gradients grads = policy.zero_gradients();
  policy.backward(ids, pass, d_logits, grads);
  return grads;
}

double policy_objective(const TaggerModel& policy, const Sentence& sentence,
                        std::span<const SampledSequence> samples,
                        std::span<const double> advantages, double entropy_coef) {
  check_samples(samples, advantages);
  const TokenIds ids = index_sentence(sentence, policy.vocab());
  const ForwardPass pass = policy.forward(ids);
  const int n = ids.size();
  double total = 0.0;
  std::vector<double> p;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    double log_prob = 0.0;
    double entropy = 0.0;
    for (int task = 0; task < kMainTasks; ++task) {
      const int k = policy.task_size(task);
      for (int t = 0; t < n; ++t) {
        if (!is_sampled(task, t, n)) continue;
        softmax(pass.logits[task].data() + static_cast<std::size_t>(t) * k,
                noise_row(samples[s], task, t, k), k, p);
        log_prob += std::log(p[samples[s].ids[task][t]]);
        entropy += entropy_of(p);
      }
    }
    total += advantages[s] * log_prob + entropy_coef * entropy;
  }
  return total / static_cast<double>(samples.size());
}

PGStep pg_update(TaggerModel& policy, const TaggerModel& baseline, const EvalSentence& example,
                 const PGConfig& config, AdvantageTracker& tracker, double noise_stddev,
                 std::mt19937_64& rng) {
  const Sentence& sentence = example.sentence;
  validate(sentence);
  PGStep step;
  step.baseline_reward = tree_reward(predict_greedy(baseline, sentence), example.gold);

  const TokenIds ids = index_sentence(sentence, policy.vocab());
  const ForwardPass pass = policy.forward(ids);
  std::vector<SampledSequence> samples;
  std::vector<double> advantages;
  int decisions = 0;
  for (int s = 0; s < config.samples; ++s) {
    std::mt19937_64 stream(rng());
    samples.push_back(sample_sequence(policy, ids, pass, sentence, stream, noise_stddev));
    const double reward = tree_reward(samples.back().labels, example.gold);
    const double raw = reward - step.baseline_reward;
    tracker.observe(raw);
    advantages.push_back(tracker.standardize(raw));
    step.mean_reward += reward;
    step.mean_advantage += advantages.back();
    step.entropy += samples.back().entropy;
    step.divergence += samples.back().divergence;
    decisions += samples.back().decisions;
  }
  step.mean_reward /= config.samples;
  step.mean_advantage /= config.samples;
  if (decisions > 0) {
    step.entropy /= decisions;
    step.divergence /= decisions;
  }

  const Gradients grads =
      policy_gradient(policy, sentence, samples, advantages, config.entropy_coef);
  if (!std::isfinite(squared_norm(grads))) throw NumericFault("pg_update: non-finite gradient");
  std::vector<Tensor*> params = policy.parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    const auto& frozen = config.frozen;
    if (std::find(frozen.begin(), frozen.end(), params[p]->name) != frozen.end()) continue;
    for (std::size_t i = 0; i < params[p]->data.size(); ++i) {
      params[p]->data[i] += config.learning_rate * grads[p].data[i];
    }
  }
  return step;
}

double adapt_noise(double stddev, double divergence, const PGConfig& config) {
  return divergence < config.desired_divergence ? stddev * config.adaptation
                                                : stddev / config.adaptation;
}

void write_pg_log_header(std::ostream& out) {
  out << "epoch\tmean_reward\tmean_baseline\tmean_advantage\tentropy\tdev_f1\tnoise_stddev\n";
}

void write_pg_log(std::ostream& out, const PGEpochLog& log) {
  out << log.epoch << std::fixed << std::setprecision(6) << '\t' << log.mean_reward << '\t'
      << log.mean_baseline << '\t' << log.mean_advantage << '\t' << log.entropy << '\t'
      << log.dev_f1 << '\t' << log.noise_stddev << '\n';
  out.unsetf(std::ios::floatfield);
}

TaggerModel finetune(const TaggerModel& initial, std::span<const EvalSentence> train,
                     std::span<const EvalSentence> dev, const PGConfig& config,
                     const std::function<void(const PGEpochLog&)>& on_epoch) {
  config.validate();
  if (train.empty()) throw ContractError("finetune: empty training set");
  const TaggerModel baseline = initial;
  TaggerModel policy = initial;
  const std::span<const EvalSentence> held_out = dev.empty() ? train : dev;
  AdvantageTracker tracker(config.burn_in);
  std::mt19937_64 rng(config.seed);
  double stddev = config.noise ? config.noise_stddev : 0.0;

  TaggerModel best = policy;
  double best_f1 = config.select_best ? evaluate_f1(policy, held_out) : 0.0;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    PGEpochLog log;
    log.epoch = epoch + 1;
    for (std::size_t i : order) {
      const PGStep step = pg_update(policy, baseline, train[i], config, tracker, stddev, rng);
      log.mean_reward += step.mean_reward;
      log.mean_baseline += step.baseline_reward;
      log.mean_advantage += step.mean_advantage;
      log.entropy += step.entropy;
      if (config.noise) stddev = adapt_noise(stddev, step.divergence, config);
    }
    const double count = static_cast<double>(train.size());
    log.mean_reward /= count;
    log.mean_baseline /= count;
    log.mean_advantage /= count;
    log.entropy /= count;
    log.noise_stddev = stddev;
    log.dev_f1 = evaluate_f1(policy, held_out);
    if (config.select_best && log.dev_f1 > best_f1) {
      best_f1 = log.dev_f1;
      best = policy;
    }
    if (on_epoch) on_epoch(log);
  }
  return config.select_best ? best : policy;
}

}  // namespace tagparse
