#include "tagparse/tagger.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tagparse/errors.h"
#include "tagparse/metrics.h"

namespace tagparse {

namespace {

void uniform_init(Tensor& t, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : t.data) v = dist(rng);
}

void softmax_row(const double* logits, double* out, int k) {
  const double top = *std::max_element(logits, logits + k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) {
    out[i] = std::exp(logits[i] - top);
    sum += out[i];
  }
  for (int i = 0; i < k; ++i) out[i] /= sum;
}

double log_sum_exp(const double* logits, int k) {
  const double top = *std::max_element(logits, logits + k);
  double sum = 0.0;
  for (int i = 0; i < k; ++i) sum += std::exp(logits[i] - top);
  return top + std::log(sum);
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> reserved)
    : tokens_(std::move(reserved)), reserved_(static_cast<int>(tokens_.size())) {}

int Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.try_emplace(token, size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

int Vocabulary::find(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? -1 : it->second;
}

int Vocabularies::word_id(const std::string& w) const {
  const int id = words.find(w);
  return id < 0 ? kOovId : id;
}

int Vocabularies::pos_id(const std::string& p) const {
  const int id = pos.find(p);
  return id < 0 ? kOovId : id;
}

std::string Vocabularies::task_name(int task) const {
  switch (task) {
    case kTaskN: return "N";
    case kTaskC: return "C";
    case kTaskU: return "U";
    default: return "aux:" + aux.at(task - kMainTasks).name();
  }
}

TokenIds index_sentence(const Sentence& sentence, const Vocabularies& vocab) {
  TokenIds ids;
  ids.words.reserve(sentence.size());
  ids.pos.reserve(sentence.size());
  for (std::size_t i = 0; i < sentence.size(); ++i) {
    ids.words.push_back(vocab.word_id(sentence.words[i]));
    ids.pos.push_back(vocab.pos_id(sentence.pos[i]));
  }
  return ids;
}

// ---------------------------------------------------------------------------
// WindowEncoder

WindowEncoder::WindowEncoder(int word_vocab, int pos_vocab, const ModelDims& dims,
                             std::mt19937_64& rng)
    : radius_(dims.window),
      word_embedding_("word_embedding", word_vocab, dims.word_dim),
      pos_embedding_("pos_embedding", pos_vocab, dims.pos_dim),
      hidden_weight_("hidden_weight", dims.hidden,
                     (2 * dims.window + 1) * (dims.word_dim + dims.pos_dim)),
      hidden_bias_("hidden_bias", 1, dims.hidden) {
  if (dims.word_dim < 1 || dims.pos_dim < 1 || dims.hidden < 1 || dims.window < 0) {
    throw ContractError("invalid model dimensions");
  }
  uniform_init(word_embedding_, std::sqrt(3.0 / dims.word_dim), rng);
  uniform_init(pos_embedding_, std::sqrt(3.0 / dims.pos_dim), rng);
  uniform_init(hidden_weight_, std::sqrt(6.0 / (hidden_weight_.rows + hidden_weight_.cols)), rng);
}

std::vector<Tensor*> WindowEncoder::parameters() {
  return {&word_embedding_, &pos_embedding_, &hidden_weight_, &hidden_bias_};
}

std::vector<const Tensor*> WindowEncoder::parameters() const {
  return {&word_embedding_, &pos_embedding_, &hidden_weight_, &hidden_bias_};
}

std::unique_ptr<Encoder> WindowEncoder::clone() const {
  return std::make_unique<WindowEncoder>(*this);
}

std::vector<std::pair<int, int>> WindowEncoder::window(const TokenIds& ids, int t) const {
  std::vector<std::pair<int, int>> slots;
  slots.reserve(2 * radius_ + 1);
  for (int j = t - radius_; j <= t + radius_; ++j) {
    if (j < 0) {
      slots.emplace_back(kBosId, kBosId);
    } else if (j >= ids.size()) {
      slots.emplace_back(kEosId, kEosId);
    } else {
      slots.emplace_back(ids.words[j], ids.pos[j]);
    }
  }
  return slots;
}

std::vector<double> WindowEncoder::featurize(const TokenIds& ids) const {
  const int n = ids.size();
  const int in = input_dim();
  const int wd = word_embedding_.cols;
  const int pd = pos_embedding_.cols;
  std::vector<double> x(static_cast<std::size_t>(n) * in);
  for (int t = 0; t < n; ++t) {
    double* out = x.data() + static_cast<std::size_t>(t) * in;
    for (auto [w, p] : window(ids, t)) {
      std::copy_n(word_embedding_.row(w), wd, out);
      std::copy_n(pos_embedding_.row(p), pd, out + wd);
      out += wd + pd;
    }
  }
  return x;
}

void WindowEncoder::forward(const TokenIds& ids, EncoderCache& cache,
                            const Dropout* dropout) const {
  const int n = ids.size();
  const int in = input_dim();
  const int h = output_dim();
  cache.tokens = n;
  cache.inputs = featurize(ids);
  cache.activations.assign(static_cast<std::size_t>(n) * h, 0.0);
  for (int t = 0; t < n; ++t) {
    const double* x = cache.inputs.data() + static_cast<std::size_t>(t) * in;
    double* a = cache.activations.data() + static_cast<std::size_t>(t) * h;
    for (int j = 0; j < h; ++j) {
      const double* w = hidden_weight_.row(j);
      double s = hidden_bias_.data[j];
      for (int d = 0; d < in; ++d) s += w[d] * x[d];
      a[j] = std::tanh(s);
    }
  }
  cache.hidden = cache.activations;
  cache.mask.clear();
  if (dropout && dropout->rate > 0.0 && dropout->rng) {
    const double keep = 1.0 - dropout->rate;
    std::bernoulli_distribution coin(keep);
    cache.mask.resize(cache.hidden.size());
    for (std::size_t i = 0; i < cache.mask.size(); ++i) {
      cache.mask[i] = coin(*dropout->rng) ? 1.0 / keep : 0.0;
      cache.hidden[i] *= cache.mask[i];
    }
  }
}

void WindowEncoder::backward(const TokenIds& ids, const EncoderCache& cache,
                             std::span<const double> d_hidden, std::span<Tensor> grads) const {
  const int n = cache.tokens;
  const int in = input_dim();
  const int h = output_dim();
  const int wd = word_embedding_.cols;
  const int pd = pos_embedding_.cols;
  Tensor& g_word = grads[0];
  Tensor& g_pos = grads[1];
  Tensor& g_weight = grads[2];
  Tensor& g_bias = grads[3];

  std::vector<double> d_pre(h);
  std::vector<double> d_x(in);
  for (int t = 0; t < n; ++t) {
    const double* a = cache.activations.data() + static_cast<std::size_t>(t) * h;
    const double* dh = d_hidden.data() + static_cast<std::size_t>(t) * h;
    for (int j = 0; j < h; ++j) {
      double g = dh[j];
      if (!cache.mask.empty()) g *= cache.mask[static_cast<std::size_t>(t) * h + j];
      d_pre[j] = g * (1.0 - a[j] * a[j]);
    }
    const double* x = cache.inputs.data() + static_cast<std::size_t>(t) * in;
    std::fill(d_x.begin(), d_x.end(), 0.0);
    for (int j = 0; j < h; ++j) {
      const double g = d_pre[j];
      if (g == 0.0) continue;
      g_bias.data[j] += g;
      double* gw = g_weight.row(j);
      const double* w = hidden_weight_.row(j);
      for (int d = 0; d < in; ++d) {
        gw[d] += g * x[d];
        d_x[d] += g * w[d];
      }
    }
    const double* dx = d_x.data();
    for (auto [w, p] : window(ids, t)) {
      double* gw = g_word.row(w);
      for (int k = 0; k < wd; ++k) gw[k] += dx[k];
      double* gp = g_pos.row(p);
      for (int k = 0; k < pd; ++k) gp[k] += dx[wd + k];
      dx += wd + pd;
    }
  }
}

// ---------------------------------------------------------------------------
// TaggerModel

TaggerModel::TaggerModel(Vocabularies vocab, Scheme scheme, const ModelDims& dims,
                         std::uint64_t seed)
    : vocab_(std::move(vocab)), scheme_(scheme), dims_(dims) {
  if (static_cast<int>(vocab_.tasks.size()) != kMainTasks + static_cast<int>(vocab_.aux.size())) {
    throw ContractError("vocabularies: task count does not match auxiliary specs");
  }
  for (const Vocabulary& v : vocab_.tasks) {
    if (v.size() == 0) throw ContractError("vocabularies: empty task vocabulary");
  }
  hyperparameters_.dims = dims;
  hyperparameters_.aux = vocab_.aux;
  std::mt19937_64 rng(seed);
  encoder_ = std::make_unique<WindowEncoder>(vocab_.words.size(), vocab_.pos.size(), dims, rng);
  const int h = encoder_->output_dim();
  for (int task = 0; task < task_count(); ++task) {
    const std::string name = "head." + vocab_.task_name(task);
    Tensor weight(name + ".weight", task_size(task), h);
    uniform_init(weight, std::sqrt(6.0 / (weight.rows + weight.cols)), rng);
    heads_.push_back(std::move(weight));
    heads_.emplace_back(name + ".bias", 1, task_size(task));
  }
}

TaggerModel::TaggerModel(const TaggerModel& other)
    : vocab_(other.vocab_),
      scheme_(other.scheme_),
      dims_(other.dims_),
      hyperparameters_(other.hyperparameters_),
      encoder_(other.encoder_->clone()),
      heads_(other.heads_) {}

TaggerModel& TaggerModel::operator=(const TaggerModel& other) {
  if (this != &other) {
    TaggerModel copy(other);
    *this = std::move(copy);
  }
  return *this;
}

std::vector<Tensor*> TaggerModel::parameters() {
  std::vector<Tensor*> out = encoder_->parameters();
  for (Tensor& t : heads_) out.push_back(&t);
  return out;
}

std::vector<const Tensor*> TaggerModel::parameters() const {
  std::vector<const Tensor*> out = std::as_const(*encoder_).parameters();
  for (const Tensor& t : heads_) out.push_back(&t);
  return out;
}

Gradients TaggerModel::zero_gradients() const {
  Gradients grads;
  for (const Tensor* t : parameters()) grads.push_back(t->zeros_like());
  return grads;
}

void TaggerModel::check_finite() const {
  std::string bad;
  for (const Tensor* t : parameters()) {
    if (!t->all_finite()) bad += (bad.empty() ? "" : ", ") + t->name;
  }
  if (!bad.empty()) throw NumericFault("non-finite parameters in " + bad);
}

ForwardPass TaggerModel::forward(const TokenIds& ids, const Dropout* dropout) const {
  ForwardPass pass;
  encoder_->forward(ids, pass.encoder, dropout);
  const int n = ids.size();
  const int h = encoder_->output_dim();
  pass.logits.resize(task_count());
  pass.probs.resize(task_count());
  for (int task = 0; task < task_count(); ++task) {
    const Tensor& w = heads_[2 * task];
    const Tensor& b = heads_[2 * task + 1];
    const int k = w.rows;
    std::vector<double>& logits = pass.logits[task];
    logits.resize(static_cast<std::size_t>(n) * k);
    for (int t = 0; t < n; ++t) {
      const double* hid = pass.encoder.hidden.data() + static_cast<std::size_t>(t) * h;
      double* out = logits.data() + static_cast<std::size_t>(t) * k;
      for (int c = 0; c < k; ++c) {
        const double* row = w.row(c);
        double s = b.data[c];
        for (int j = 0; j < h; ++j) s += row[j] * hid[j];
        out[c] = s;
      }
    }
    for (double v : logits) {
      if (!std::isfinite(v)) {
        check_finite();
        throw NumericFault("non-finite logits in head " + vocab_.task_name(task));
      }
    }
    pass.probs[task].resize(logits.size());
    for (int t = 0; t < n; ++t) {
      softmax_row(logits.data() + static_cast<std::size_t>(t) * k,
                  pass.probs[task].data() + static_cast<std::size_t>(t) * k, k);
    }
  }
  return pass;
}

void TaggerModel::backward(const TokenIds& ids, const ForwardPass& pass,
                           const std::vector<std::vector<double>>& d_logits,
                           Gradients& grads) const {
  const int n = ids.size();
  const int h = encoder_->output_dim();
  const std::size_t encoder_tensors = encoder_->parameters().size();
  std::vector<double> d_hidden(static_cast<std::size_t>(n) * h, 0.0);
  for (int task = 0; task < task_count(); ++task) {
    const Tensor& w = heads_[2 * task];
    const int k = w.rows;
    Tensor& gw = grads[encoder_tensors + 2 * task];
    Tensor& gb = grads[encoder_tensors + 2 * task + 1];
    const std::vector<double>& dl = d_logits[task];
    if (dl.empty()) continue;
    for (int t = 0; t < n; ++t) {
      const double* hid = pass.encoder.hidden.data() + static_cast<std::size_t>(t) * h;
      double* dh = d_hidden.data() + static_cast<std::size_t>(t) * h;
      for (int c = 0; c < k; ++c) {
        const double g = dl[static_cast<std::size_t>(t) * k + c];
        if (g == 0.0) continue;
        gb.data[c] += g;
        double* gwr = gw.row(c);
        const double* wr = w.row(c);
        for (int j = 0; j < h; ++j) {
          gwr[j] += g * hid[j];
          dh[j] += g * wr[j];
        }
      }
    }
  }
  encoder_->backward(ids, pass.encoder, d_hidden,
                     std::span<Tensor>(grads.data(), encoder_tensors));
}

// ---------------------------------------------------------------------------
// Supervised training

TrainingSentence make_training_sentence(const Tree& tree, Scheme scheme,
                                        const std::vector<AuxSpec>& aux) {
  TrainingSentence s;
  s.encoded = encode(tree, scheme);
  for (const AuxSpec& spec : aux) s.aux.push_back(make_aux(spec, tree, s.encoded));
  return s;
}

std::vector<std::vector<std::string>> task_tokens(const TrainingSentence& s) {
  std::vector<std::vector<std::string>> out(kMainTasks);
  for (const TagLabel& l : s.encoded.labels) {
    out[kTaskN].push_back(format_n(l.n));
    out[kTaskC].push_back(l.c);
    out[kTaskU].push_back(l.u.empty() ? std::string(kNoChain) : l.u);
  }
  for (const AuxTrack& a : s.aux) out.push_back(a.values);
  return out;
}

Vocabularies build_vocabularies(std::span<const TrainingSentence> corpus,
                                const std::vector<AuxSpec>& aux) {
  Vocabularies vocab;
  vocab.aux = aux;
  vocab.tasks.assign(kMainTasks + aux.size(), Vocabulary());
  for (const TrainingSentence& s : corpus) {
    if (s.aux.size() != aux.size()) {
      throw ContractError("training sentence carries " + std::to_string(s.aux.size()) +
                          " auxiliary tracks, expected " + std::to_string(aux.size()));
    }
    for (std::size_t i = 0; i < s.encoded.sentence.size(); ++i) {
      vocab.words.add(s.encoded.sentence.words[i]);
      vocab.pos.add(s.encoded.sentence.pos[i]);
    }
    auto tokens = task_tokens(s);
    for (std::size_t task = 0; task < tokens.size(); ++task) {
      for (const std::string& tok : tokens[task]) vocab.tasks[task].add(tok);
    }
  }
  return vocab;
}

Example make_example(const Vocabularies& vocab, const TrainingSentence& s) {
  validate(s.encoded.sentence);
  if (s.encoded.labels.size() != s.encoded.sentence.size()) {
    throw ContractError("label count differs from sentence length");
  }
  Example ex;
  ex.ids = index_sentence(s.encoded.sentence, vocab);
  auto tokens = task_tokens(s);
  if (tokens.size() != vocab.tasks.size()) {
    throw ContractError("sentence task count differs from the model's");
  }
  ex.targets.resize(tokens.size());
  for (std::size_t task = 0; task < tokens.size(); ++task) {
    if (tokens[task].size() != s.encoded.sentence.size()) {
      throw ContractError("track length differs from sentence length");
    }
    for (const std::string& tok : tokens[task]) {
      ex.targets[task].push_back(vocab.tasks[task].find(tok));
    }
  }
  return ex;
}

LossBreakdown supervised_loss(const TaggerModel& model, const Example& example,
                              double aux_weight, Gradients* grads, const Dropout* dropout) {
  const ForwardPass pass = model.forward(example.ids, dropout);
  const int n = example.ids.size();
  LossBreakdown loss;
  loss.task_losses.assign(model.task_count(), 0.0);
  std::vector<std::vector<double>> d_logits(model.task_count());
  for (int task = 0; task < model.task_count(); ++task) {
    const double weight = task < kMainTasks ? 1.0 : aux_weight;
    const int k = model.task_size(task);
    if (grads) d_logits[task].assign(static_cast<std::size_t>(n) * k, 0.0);
    for (int t = 0; t < n; ++t) {
      const int y = example.targets[task][t];
      if (y < 0) continue;
      const std::size_t off = static_cast<std::size_t>(t) * k;
      loss.task_losses[task] += log_sum_exp(pass.logits[task].data() + off, k) -
                                pass.logits[task][off + y];
      if (grads) {
        for (int c = 0; c < k; ++c) d_logits[task][off + c] = weight * pass.probs[task][off + c];
        d_logits[task][off + y] -= weight;
      }
    }
    loss.total += weight * loss.task_losses[task];
  }
  if (grads) model.backward(example.ids, pass, d_logits, *grads);
  return loss;
}

int argmax(std::span<const double> row) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(row.size()); ++i) {
    if (row[i] > row[best]) best = i;
  }
  return best;
}

EncodedSentence assemble_labels(const TaggerModel& model, const Sentence& sentence,
                                const std::vector<std::vector<int>>& ids) {
  const Vocabularies& v = model.vocab();
  EncodedSentence out;
  out.sentence = sentence;
  out.scheme = model.scheme();
  const std::size_t n = sentence.size();
  for (std::size_t t = 0; t < n; ++t) {
    TagLabel label;
    const std::string& u = v.tasks[kTaskU].token(ids[kTaskU][t]);
    label.u = u == kNoChain ? std::string() : u;
    if (t + 1 == n) {
      label.n = NComponent::Dummy();
      label.c = std::string(kDummy);
    } else {
      label.n = parse_n(v.tasks[kTaskN].token(ids[kTaskN][t]));
      label.c = v.tasks[kTaskC].token(ids[kTaskC][t]);
    }
    out.labels.push_back(std::move(label));
  }
  return out;
}

EncodedSentence predict_greedy(const TaggerModel& model, const Sentence& sentence) {
  validate(sentence);
  const ForwardPass pass = model.forward(index_sentence(sentence, model.vocab()));
  const int n = static_cast<int>(sentence.size());
  std::vector<std::vector<int>> ids(kMainTasks);
  for (int task = 0; task < kMainTasks; ++task) {
    const int k = model.task_size(task);
    for (int t = 0; t < n; ++t) {
      ids[task].push_back(argmax(std::span<const double>(
          pass.logits[task].data() + static_cast<std::size_t>(t) * k, k)));
    }
  }
  return assemble_labels(model, sentence, ids);
}

double evaluate_f1(const TaggerModel& model, std::span<const EvalSentence> data) {
  BracketScore total;
  for (const EvalSentence& s : data) {
    total += bracket_score(s.gold, decode(predict_greedy(model, s.sentence)));
  }
  return total.f1();
}

TaggerModel train_mtl(std::span<const TrainingSentence> corpus, std::span<const EvalSentence> dev,
                      const TrainConfig& config,
                      const std::function<void(const EpochLog&)>& on_epoch) {
  if (corpus.empty()) throw ContractError("train_mtl: empty corpus");
  if (config.aux_weight < 0.0) throw ContractError("train_mtl: aux weight must be >= 0");
  if (config.batch_size < 1 || config.epochs < 0) {
    throw ContractError("train_mtl: batch size must be >= 1 and epochs >= 0");
  }

  std::vector<TrainingSentence> capped;
  std::span<const TrainingSentence> data = corpus;
  if (config.distance_cap > 0) {
    capped.assign(corpus.begin(), corpus.end());
    for (TrainingSentence& s : capped) {
      for (AuxTrack& a : s.aux) {
        if (a.spec.kind == AuxKind::kSyntacticDistance) {
          a = cap_distances(std::move(a), config.distance_cap);
        }
      }
    }
    data = capped;
  }

  std::vector<AuxSpec> aux;
  for (const AuxTrack& a : data.front().aux) aux.push_back(a.spec);
  TaggerModel model(build_vocabularies(data, aux), data.front().encoded.scheme, config.dims,
                    config.seed);
  model.set_hyperparameters(config);

  std::vector<Example> examples;
  examples.reserve(data.size());
  for (const TrainingSentence& s : data) examples.push_back(make_example(model.vocab(), s));

  std::vector<EvalSentence> own_dev;
  if (dev.empty()) {
    for (const TrainingSentence& s : data) {
      own_dev.push_back({s.encoded.sentence, decode(s.encoded)});
    }
    dev = own_dev;
  }

  std::mt19937_64 rng(config.seed + 0x9e3779b97f4a7c15ULL);
  Dropout dropout{config.dropout, &rng};
  Gradients velocity = model.zero_gradients();
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);

  TaggerModel best = model;
  double best_f1 = -1.0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.learning_rate / (1.0 + config.decay * epoch);
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t epoch_tokens = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t stop = std::min(order.size(), start + config.batch_size);
      Gradients grads = model.zero_gradients();
      std::size_t tokens = 0;
      for (std::size_t i = start; i < stop; ++i) {
        const Example& ex = examples[order[i]];
        epoch_loss += supervised_loss(model, ex, config.aux_weight, &grads, &dropout).total;
        tokens += ex.ids.size();
      }
      epoch_tokens += tokens;
      double scale = 1.0 / static_cast<double>(tokens);
      const double norm = std::sqrt(squared_norm(grads)) * scale;
      if (!std::isfinite(norm)) throw NumericFault("train_mtl: non-finite gradient");
      if (config.clip_norm > 0.0 && norm > config.clip_norm) scale *= config.clip_norm / norm;
      std::vector<Tensor*> params = model.parameters();
      for (std::size_t p = 0; p < params.size(); ++p) {
        std::vector<double>& theta = params[p]->data;
        std::vector<double>& v = velocity[p].data;
        const std::vector<double>& g = grads[p].data;
        for (std::size_t i = 0; i < theta.size(); ++i) {
          v[i] = config.momentum * v[i] + scale * g[i];
          theta[i] -= lr * v[i];
        }
      }
    }
    if (!std::isfinite(epoch_loss)) throw NumericFault("train_mtl: loss diverged");
    EpochLog log;
    log.epoch = epoch + 1;
    log.loss = epoch_loss / static_cast<double>(epoch_tokens);
    log.learning_rate = lr;
    log.dev_f1 = evaluate_f1(model, dev);
    if (log.dev_f1 > best_f1) {
      best_f1 = log.dev_f1;
      best = model;
      log.best = true;
    }
    if (on_epoch) on_epoch(log);
  }
  return best;
}

}  // namespace tagparse
