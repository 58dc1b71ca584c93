#ifndef TAGPARSE_TAGGER_H_
#define TAGPARSE_TAGGER_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tagparse/auxlabels.h"
#include "tagparse/encodings.h"
#include "tagparse/tensor.h"
#include "tagparse/tree.h"

namespace tagparse {

// Dense string <-> id map. The first `reserved` ids belong to fixed tokens
// (OOV, padding) that are not reachable through find(), so a corpus word
// spelled like a reserved token still gets its own id.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> reserved);

  int add(const std::string& token);
  int find(const std::string& token) const;  // -1 when absent
  const std::string& token(int id) const { return tokens_.at(id); }
  int size() const { return static_cast<int>(tokens_.size()); }
  int reserved() const { return reserved_; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::vector<std::string> tokens_;
  int reserved_ = 0;
  std::unordered_map<std::string, int> index_;
};

inline constexpr int kOovId = 0;
inline constexpr int kBosId = 1;
inline constexpr int kEosId = 2;

// Task order inside a model: the three label components, then auxiliary tracks.
inline constexpr int kTaskN = 0;
inline constexpr int kTaskC = 1;
inline constexpr int kTaskU = 2;
inline constexpr int kMainTasks = 3;

struct Vocabularies {
  Vocabulary words{{"<oov>", "<bos>", "<eos>"}};
  Vocabulary pos{{"<oov>", "<bos>", "<eos>"}};
  std::vector<Vocabulary> tasks{3};
  std::vector<AuxSpec> aux;

  int word_id(const std::string& w) const;
  int pos_id(const std::string& p) const;
  std::string task_name(int task) const;
};

struct ModelDims {
  int word_dim = 100;
  int pos_dim = 20;
  int hidden = 128;
  int window = 2;  // tokens on each side
};

struct TrainConfig {
  double learning_rate = 0.2;
  double momentum = 0.9;
  // lr_epoch = learning_rate / (1 + decay * epoch)
  double decay = 0.05;
  int epochs = 100;
  int batch_size = 8;
  double aux_weight = 0.1;
  double dropout = 0.5;
  double clip_norm = 5.0;  // <= 0 disables
  int distance_cap = 0;    // <= 0 leaves syntactic distances unbounded
  std::uint64_t seed = 1;
  ModelDims dims;
  std::vector<AuxSpec> aux;
};

struct TokenIds {
  std::vector<int> words;
  std::vector<int> pos;

  int size() const { return static_cast<int>(words.size()); }
};

TokenIds index_sentence(const Sentence& sentence, const Vocabularies& vocab);

// Inverted dropout applied to the shared hidden layer at training time.
struct Dropout {
  double rate = 0.0;
  std::mt19937_64* rng = nullptr;
};

// Activations kept by Encoder::forward for the backward pass. `hidden` holds
// the shared representation (tokens x output_dim), after dropout.
struct EncoderCache {
  int tokens = 0;
  std::vector<double> inputs;
  std::vector<double> activations;
  std::vector<double> mask;
  std::vector<double> hidden;
};

// Produces one shared vector per token. Implementations own their parameter
// tensors.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual std::string kind() const = 0;
  virtual int output_dim() const = 0;
  virtual std::vector<Tensor*> parameters() = 0;
  virtual std::vector<const Tensor*> parameters() const = 0;
  virtual void forward(const TokenIds& ids, EncoderCache& cache,
                       const Dropout* dropout) const = 0;
  // Accumulates into grads, which line up with parameters().
  virtual void backward(const TokenIds& ids, const EncoderCache& cache,
                        std::span<const double> d_hidden, std::span<Tensor> grads) const = 0;
  virtual std::unique_ptr<Encoder> clone() const = 0;
};

// Concatenated word+POS embeddings of a (2r+1)-token window, one tanh layer.
class WindowEncoder final : public Encoder {
 public:
  WindowEncoder(int word_vocab, int pos_vocab, const ModelDims& dims, std::mt19937_64& rng);

  std::string kind() const override { return "window"; }
  int output_dim() const override { return hidden_weight_.rows; }
  int input_dim() const { return hidden_weight_.cols; }
  std::vector<Tensor*> parameters() override;
  std::vector<const Tensor*> parameters() const override;
  void forward(const TokenIds& ids, EncoderCache& cache, const Dropout* dropout) const override;
  void backward(const TokenIds& ids, const EncoderCache& cache, std::span<const double> d_hidden,
                std::span<Tensor> grads) const override;
  std::unique_ptr<Encoder> clone() const override;

  // (word id, POS id) for each window slot around token t; BOS/EOS outside.
  std::vector<std::pair<int, int>> window(const TokenIds& ids, int t) const;

  // Per-token input vectors (tokens x input_dim), row-major.
  std::vector<double> featurize(const TokenIds& ids) const;

 private:
  int radius_;
  Tensor word_embedding_;
  Tensor pos_embedding_;
  Tensor hidden_weight_;
  Tensor hidden_bias_;
};

// Result of one forward pass. logits/probs are per task, tokens x |task|.
struct ForwardPass {
  EncoderCache encoder;
  std::vector<std::vector<double>> logits;
  std::vector<std::vector<double>> probs;
};

// Shared encoder plus one affine softmax head per task (hard sharing: every
// head reads the same hidden vector).
class TaggerModel {
 public:
  TaggerModel(Vocabularies vocab, Scheme scheme, const ModelDims& dims, std::uint64_t seed);
  TaggerModel(const TaggerModel& other);
  TaggerModel& operator=(const TaggerModel& other);
  TaggerModel(TaggerModel&&) noexcept = default;
  TaggerModel& operator=(TaggerModel&&) noexcept = default;

  const Vocabularies& vocab() const { return vocab_; }
  Scheme scheme() const { return scheme_; }
  const ModelDims& dims() const { return dims_; }
  const Encoder& encoder() const { return *encoder_; }
  int task_count() const { return static_cast<int>(vocab_.tasks.size()); }
  int task_size(int task) const { return vocab_.tasks[task].size(); }

  const TrainConfig& hyperparameters() const { return hyperparameters_; }
  void set_hyperparameters(const TrainConfig& c) { hyperparameters_ = c; }

  // Encoder tensors first, then weight and bias of each head in task order.
  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;
  Gradients zero_gradients() const;

  Tensor& head_weight(int task) { return heads_[2 * task]; }
  Tensor& head_bias(int task) { return heads_[2 * task + 1]; }

  // Throws NumericFault naming the offending tensor if any logit is non-finite.
  ForwardPass forward(const TokenIds& ids, const Dropout* dropout = nullptr) const;

  // d_logits[task] is tokens x |task|; gradients accumulate into grads.
  void backward(const TokenIds& ids, const ForwardPass& pass,
                const std::vector<std::vector<double>>& d_logits, Gradients& grads) const;

  // Throws NumericFault listing non-finite tensors.
  void check_finite() const;

 private:
  Vocabularies vocab_;
  Scheme scheme_;
  ModelDims dims_;
  TrainConfig hyperparameters_;
  std::unique_ptr<Encoder> encoder_;
  std::vector<Tensor> heads_;
};

// Gold ids per task and token; -1 marks a label absent from the vocabulary,
// which contributes no loss.
struct Example {
  TokenIds ids;
  std::vector<std::vector<int>> targets;
};

struct TrainingSentence {
  EncodedSentence encoded;
  std::vector<AuxTrack> aux;
};

struct EvalSentence {
  Sentence sentence;
  Tree gold;
};

TrainingSentence make_training_sentence(const Tree& tree, Scheme scheme,
                                        const std::vector<AuxSpec>& aux);

// Label tokens of each task for one sentence.
std::vector<std::vector<std::string>> task_tokens(const TrainingSentence& s);

Vocabularies build_vocabularies(std::span<const TrainingSentence> corpus,
                                const std::vector<AuxSpec>& aux);

Example make_example(const Vocabularies& vocab, const TrainingSentence& s);

struct LossBreakdown {
  std::vector<double> task_losses;  // summed negative log-likelihood per task
  double total = 0.0;               // L_n + L_c + L_u + beta * sum(L_aux)
};

// Cross-entropy of every head. With grads set, accumulates d total / d theta.
LossBreakdown supervised_loss(const TaggerModel& model, const Example& example,
                              double aux_weight, Gradients* grads = nullptr,
                              const Dropout* dropout = nullptr);

struct EpochLog {
  int epoch = 0;
  double loss = 0.0;  // mean per token
  double learning_rate = 0.0;
  double dev_f1 = 0.0;
  bool best = false;
};

// Mini-batch SGD with momentum on the summed loss, averaged per token within a
// batch. After every epoch the dev set is parsed greedily and scored; the
// model with the best bracketing F1 is returned (the training set is used when
// dev is empty). Throws ContractError on an empty corpus and NumericFault when
// the loss diverges.
TaggerModel train_mtl(std::span<const TrainingSentence> corpus, std::span<const EvalSentence> dev,
                      const TrainConfig& config,
                      const std::function<void(const EpochLog&)>& on_epoch = {});

// Index of the largest value, lowest index on ties.
int argmax(std::span<const double> row);

// Argmax label per token and task, with the last word forced to the dummy n
// and c components.
EncodedSentence predict_greedy(const TaggerModel& model, const Sentence& sentence);

// Labels from chosen ids per main task (ids[task][token]).
EncodedSentence assemble_labels(const TaggerModel& model, const Sentence& sentence,
                                const std::vector<std::vector<int>>& ids);

// Corpus bracketing F1 of decode(predict_greedy(.)) against gold trees.
double evaluate_f1(const TaggerModel& model, std::span<const EvalSentence> data);

}  // namespace tagparse

#endif  // TAGPARSE_TAGGER_H_
