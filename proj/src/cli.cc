#include "tagparse/cli.h"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "tagparse/checkpoint.h"
#include "tagparse/errors.h"
#include "tagparse/metrics.h"
#include "tagparse/pg.h"
#include "tagparse/seqfile.h"
#include "tagparse/synth.h"
#include "tagparse/treebank.h"

namespace tagparse {

namespace {

const std::vector<std::string> kDefaultAlphabet{"S", "NP", "VP", "PP", "ADJP", "SBAR"};

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ":0: cannot open for writing");
  return out;
}

std::vector<AuxSpec> parse_aux(const std::vector<std::string>& names) {
  std::vector<AuxSpec> out;
  for (const std::string& n : names) out.push_back(AuxSpec::parse(n));
  return out;
}

// Trees with the line each one starts on, normalized for encoding.
struct TreeFile {
  std::vector<Tree> trees;
  std::vector<std::size_t> lines;
};

TreeFile load_trees(const std::string& path, bool strip_functions, bool remove_empty) {
  TreeFile f;
  f.trees = read_trees_file(path, &f.lines);
  NormalizeOptions opts;
  opts.strip_function_tags = strip_functions;
  opts.remove_empty_elements = remove_empty;
  for (std::size_t i = 0; i < f.trees.size(); ++i) {
    try {
      f.trees[i] = normalize(std::move(f.trees[i]), opts);
    } catch (const ContractError& e) {
      throw DataError(path + ":" + std::to_string(f.lines[i]) + ": " + e.what());
    }
  }
  return f;
}

std::vector<EvalSentence> eval_sentences(const TreeFile& f) {
  std::vector<EvalSentence> out;
  for (const Tree& t : f.trees) out.push_back({sentence_of(t), t});
  return out;
}

std::vector<EvalSentence> eval_sentences(const SeqFile& f) {
  std::vector<EvalSentence> out;
  for (const TrainingSentence& s : f.sentences) {
    out.push_back({s.encoded.sentence, decode(s.encoded)});
  }
  return out;
}

struct SynthArgs {
  std::string output;
  std::string kind = "pcfg";
  int count = 200;
  int max_leaves = 40;
  int max_depth = 12;
  std::uint64_t seed = 1;
};

struct EncodeArgs {
  std::string input, output;
  std::string scheme = "relative";
  std::vector<std::string> aux;
  bool strip_functions = false;
  bool remove_empty = false;
  std::uint64_t seed = 1;
};

struct DecodeArgs {
  std::string input, output;
  std::uint64_t seed = 1;
};

struct StatsArgs {
  std::string input;
  std::size_t rare_threshold = 5;
  std::uint64_t seed = 1;
};

struct TrainArgs {
  std::string train, model, dev, log;
  TrainConfig config;
};

struct FinetuneArgs {
  std::string model, train, output, dev, log;
  bool strip_functions = false;
  bool remove_empty = false;
  PGConfig config;
};

struct PredictArgs {
  std::string model, input, output;
  int batch_size = 128;
  int threads = 0;
  std::uint64_t seed = 1;
};

struct EvalArgs {
  std::string gold, predicted, per_n;
  std::string scheme = "relative";
  bool strip_functions = false;
  bool remove_empty = false;
  bool delete_punctuation = false;
  std::uint64_t seed = 1;
};

int do_synth(const SynthArgs& a, std::ostream& out) {
  std::vector<Tree> trees;
  if (a.kind == "pcfg") {
    trees = pcfg_corpus(a.seed, a.count, a.max_leaves);
  } else {
    trees = random_corpus(a.seed, a.count, a.max_leaves, a.max_depth, kDefaultAlphabet);
  }
  std::ofstream file = open_out(a.output);
  write_trees(file, trees);
  out << "wrote " << trees.size() << " trees to " << a.output << '\n';
  return kExitOk;
}

int do_encode(const EncodeArgs& a, std::ostream& out) {
  const TreeFile f = load_trees(a.input, a.strip_functions, a.remove_empty);
  SeqFile seq;
  seq.scheme = scheme_from_string(a.scheme);
  seq.aux = parse_aux(a.aux);
  for (std::size_t i = 0; i < f.trees.size(); ++i) {
    try {
      seq.sentences.push_back(make_training_sentence(f.trees[i], seq.scheme, seq.aux));
    } catch (const ContractError& e) {
      throw DataError(a.input + ":" + std::to_string(f.lines[i]) + ": " + e.what());
    }
  }
  std::ofstream file = open_out(a.output);
  write_seq(file, seq);
  out << "encoded " << seq.sentences.size() << " sentences\n";
  return kExitOk;
}

int do_decode(const DecodeArgs& a, std::ostream& out) {
  const SeqFile seq = read_seq_file(a.input);
  std::vector<Tree> trees;
  std::size_t repaired = 0;
  for (const TrainingSentence& s : seq.sentences) {
    DecodeReport report;
    trees.push_back(decode(s.encoded, &report));
    repaired += report.repaired();
  }
  std::ofstream file = open_out(a.output);
  write_trees(file, trees);
  out << "decoded " << trees.size() << " sentences";
  if (repaired) out << " (" << repaired << " needed repair)";
  out << '\n';
  return kExitOk;
}

int do_stats(const StatsArgs& a, std::ostream& out) {
  const SeqFile seq = read_seq_file(a.input);
  std::vector<EncodedSentence> encoded;
  std::size_t tokens = 0;
  for (const TrainingSentence& s : seq.sentences) {
    encoded.push_back(s.encoded);
    tokens += s.encoded.labels.size();
  }
  const LabelSpaceStats full = label_space_stats(encoded, false);
  const LabelSpaceStats parts = label_space_stats(encoded, true);
  char rare[32];
  std::snprintf(rare, sizeof rare, "%.4f", full.rare_fraction(a.rare_threshold));
  out << "scheme\t" << to_string(seq.scheme) << '\n'
      << "sentences\t" << seq.sentences.size() << '\n'
      << "tokens\t" << tokens << '\n'
      << "full_labels\t" << full.total_distinct << '\n'
      << "rare_fraction(" << a.rare_threshold << ")\t" << rare << '\n'
      << "decomposed_labels\t" << parts.total_distinct << '\n'
      << "n_labels\t" << parts.n_distinct << '\n'
      << "c_labels\t" << parts.c_distinct << '\n'
      << "u_labels\t" << parts.u_distinct << '\n';
  return kExitOk;
}

int do_train(TrainArgs a, std::ostream& out) {
  const SeqFile train = read_seq_file(a.train);
  if (train.sentences.empty()) throw DataError(a.train + ":1: no sentences");
  std::vector<EvalSentence> dev;
  if (!a.dev.empty()) dev = eval_sentences(read_seq_file(a.dev));
  a.config.aux = train.aux;
  std::ofstream log;
  if (!a.log.empty()) {
    log = open_out(a.log);
    log << "epoch\tloss\tlearning_rate\tdev_f1\tbest\n";
  }
  const TaggerModel model = train_mtl(train.sentences, dev, a.config, [&](const EpochLog& e) {
    if (log.is_open()) {
      log << e.epoch << '\t' << e.loss << '\t' << e.learning_rate << '\t' << e.dev_f1 << '\t'
          << (e.best ? 1 : 0) << '\n';
    }
  });
  save_checkpoint(model, a.model);
  out << "saved " << a.model << '\n';
  return kExitOk;
}

int do_finetune(const FinetuneArgs& a, std::ostream& out) {
  const TaggerModel initial = load_checkpoint(a.model);
  const std::vector<EvalSentence> train =
      eval_sentences(load_trees(a.train, a.strip_functions, a.remove_empty));
  std::vector<EvalSentence> dev;
  if (!a.dev.empty()) dev = eval_sentences(load_trees(a.dev, a.strip_functions, a.remove_empty));
  std::ofstream log;
  if (!a.log.empty()) {
    log = open_out(a.log);
    write_pg_log_header(log);
  }
  const TaggerModel tuned = finetune(initial, train, dev, a.config, [&](const PGEpochLog& e) {
    if (log.is_open()) write_pg_log(log, e);
  });
  save_checkpoint(tuned, a.output);
  out << "saved " << a.output << '\n';
  return kExitOk;
}

int do_predict(const PredictArgs& a, std::ostream& out) {
  const TaggerModel model = load_checkpoint(a.model);
  const std::vector<Sentence> sentences = read_tagged_file(a.input);
  std::vector<Tree> trees(sentences.size());
  const int cores = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int workers = a.threads > 0 ? a.threads : cores;
  for (std::size_t start = 0; start < sentences.size(); start += a.batch_size) {
    const std::size_t stop = std::min(sentences.size(), start + a.batch_size);
    auto work = [&](std::size_t first) {
      for (std::size_t i = first; i < stop; i += workers) {
        trees[i] = decode(predict_greedy(model, sentences[i]));
      }
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work, start + w);
    work(start);
    for (std::thread& t : pool) t.join();
  }
  std::ofstream file = open_out(a.output);
  write_trees(file, trees);
  out << "parsed " << trees.size() << " sentences\n";
  return kExitOk;
}

int do_eval(const EvalArgs& a, std::ostream& out) {
  const TreeFile gold = load_trees(a.gold, false, a.remove_empty);
  const TreeFile pred = load_trees(a.predicted, false, a.remove_empty);
  if (gold.trees.size() != pred.trees.size()) {
    throw DataError(a.predicted + ":0: " + std::to_string(pred.trees.size()) +
                    " trees, gold has " + std::to_string(gold.trees.size()));
  }
  ScoreOptions opts;
  opts.strip_function_tags = a.strip_functions;
  opts.delete_punctuation = a.delete_punctuation;
  BracketScore total;
  for (std::size_t i = 0; i < gold.trees.size(); ++i) {
    try {
      total += bracket_score(gold.trees[i], pred.trees[i], opts);
    } catch (const ContractError& e) {
      throw DataError(a.predicted + ":" + std::to_string(pred.lines[i]) + ": " + e.what());
    }
  }
  out << "P " << percent(total.precision()) << " R " << percent(total.recall()) << " F1 "
      << percent(total.f1()) << '\n';
  if (!a.per_n.empty()) {
    const Scheme scheme = scheme_from_string(a.scheme);
    std::vector<EncodedSentence> g, p;
    for (std::size_t i = 0; i < gold.trees.size(); ++i) {
      g.push_back(encode(gold.trees[i], scheme));
      p.push_back(encode(pred.trees[i], scheme));
      if (g.back().sentence.size() != p.back().sentence.size()) {
        throw DataError(a.predicted + ":" + std::to_string(pred.lines[i]) +
                        ": sentence length differs from gold");
      }
    }
    std::ofstream tsv = open_out(a.per_n);
    tsv << "n\tgold\tpredicted\tcorrect\tprecision\trecall\tf1\n";
    for (const auto& [n, s] : per_n_f1(g, p)) {
      tsv << format_n(n) << '\t' << s.gold << '\t' << s.predicted << '\t' << s.true_positive
          << '\t' << percent(s.precision()) << '\t' << percent(s.recall()) << '\t'
          << percent(s.f1()) << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constituency parsing as sequence labeling"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Generate a synthetic treebank");
  c_synth->add_option("output", synth.output, "Output .trees file")->required();
  c_synth->add_option("--kind", synth.kind, "random or pcfg")
      ->check(CLI::IsMember({"random", "pcfg"}));
  c_synth->add_option("--count", synth.count)->check(CLI::NonNegativeNumber);
  c_synth->add_option("--max-leaves", synth.max_leaves)->check(CLI::PositiveNumber);
  c_synth->add_option("--max-depth", synth.max_depth, "random trees only")
      ->check(CLI::Range(3, 1000));
  c_synth->add_option("--seed", synth.seed);

  EncodeArgs enc;
  auto* c_encode = app.add_subcommand("encode", "Trees to a label file");
  c_encode->add_option("input", enc.input, "Bracketed trees")->required();
  c_encode->add_option("output", enc.output, "Output .seq file")->required();
  c_encode->add_option("--scheme", enc.scheme)
      ->check(CLI::IsMember({"relative", "absolute", "dynamic"}));
  c_encode->add_option("--aux", enc.aux, "Auxiliary tracks: n+1, n-1, dist")->delimiter(',');
  c_encode->add_flag("--strip-functions", enc.strip_functions, "Drop function tags");
  c_encode->add_flag("--remove-empty", enc.remove_empty, "Drop -NONE- elements");
  c_encode->add_option("--seed", enc.seed);

  DecodeArgs dec;
  auto* c_decode = app.add_subcommand("decode", "Label file to trees");
  c_decode->add_option("input", dec.input, "Input .seq file")->required();
  c_decode->add_option("output", dec.output, "Output .trees file")->required();
  c_decode->add_option("--seed", dec.seed);

  StatsArgs stats;
  auto* c_stats = app.add_subcommand("stats", "Label-space statistics of a label file");
  c_stats->add_option("input", stats.input, "Input .seq file")->required();
  c_stats->add_option("--rare-threshold", stats.rare_threshold);
  c_stats->add_option("--seed", stats.seed);

  TrainArgs train;
  TrainConfig& tc = train.config;
  auto* c_train = app.add_subcommand("train", "Supervised multi-task training");
  c_train->add_option("train", train.train, "Training .seq file")->required();
  c_train->add_option("model", train.model, "Output checkpoint")->required();
  c_train->add_option("--dev", train.dev, "Development .seq file");
  c_train->add_option("--log", train.log, "Per-epoch TSV log");
  c_train->add_option("--lr", tc.learning_rate)->check(CLI::PositiveNumber);
  c_train->add_option("--momentum", tc.momentum)->check(CLI::Range(0.0, 1.0));
  c_train->add_option("--decay", tc.decay)->check(CLI::NonNegativeNumber);
  c_train->add_option("--epochs", tc.epochs)->check(CLI::NonNegativeNumber);
  c_train->add_option("--batch-size", tc.batch_size)->check(CLI::PositiveNumber);
  c_train->add_option("--aux-weight", tc.aux_weight)->check(CLI::NonNegativeNumber);
  c_train->add_option("--dropout", tc.dropout)->check(CLI::Range(0.0, 0.99));
  c_train->add_option("--clip-norm", tc.clip_norm);
  c_train->add_option("--distance-cap", tc.distance_cap);
  c_train->add_option("--word-dim", tc.dims.word_dim)->check(CLI::PositiveNumber);
  c_train->add_option("--pos-dim", tc.dims.pos_dim)->check(CLI::PositiveNumber);
  c_train->add_option("--hidden", tc.dims.hidden)->check(CLI::PositiveNumber);
  c_train->add_option("--window", tc.dims.window)->check(CLI::NonNegativeNumber);
  c_train->add_option("--seed", tc.seed);

  FinetuneArgs ft;
  PGConfig& pc = ft.config;
  auto* c_ft = app.add_subcommand("finetune", "Policy-gradient fine-tuning");
  c_ft->add_option("model", ft.model, "Input checkpoint")->required();
  c_ft->add_option("train", ft.train, "Training trees")->required();
  c_ft->add_option("output", ft.output, "Output checkpoint")->required();
  c_ft->add_option("--dev", ft.dev, "Development trees");
  c_ft->add_option("--log", ft.log, "Per-epoch TSV log");
  c_ft->add_flag("--strip-functions", ft.strip_functions, "Drop function tags");
  c_ft->add_flag("--remove-empty", ft.remove_empty, "Drop -NONE- elements");
  c_ft->add_option("--samples", pc.samples)->check(CLI::PositiveNumber);
  c_ft->add_option("--lr", pc.learning_rate)->check(CLI::NonNegativeNumber);
  c_ft->add_option("--entropy", pc.entropy_coef)->check(CLI::NonNegativeNumber);
  c_ft->add_option("--burn-in", pc.burn_in)->check(CLI::NonNegativeNumber);
  c_ft->add_flag("--noise", pc.noise, "Perturb the policy with adaptive Gaussian noise");
  c_ft->add_option("--noise-stddev", pc.noise_stddev)->check(CLI::NonNegativeNumber);
  c_ft->add_option("--desired-divergence", pc.desired_divergence)
      ->check(CLI::NonNegativeNumber);
  c_ft->add_option("--adaptation", pc.adaptation)->check(CLI::PositiveNumber);
  c_ft->add_option("--epochs", pc.epochs)->check(CLI::NonNegativeNumber);
  c_ft->add_flag("--select-best", pc.select_best, "Keep the epoch with the best dev F1");
  c_ft->add_option("--seed", pc.seed);

  PredictArgs pred;
  auto* c_predict = app.add_subcommand("predict", "Parse tagged sentences");
  c_predict->add_option("model", pred.model, "Checkpoint")->required();
  c_predict->add_option("input", pred.input, "word<TAB>POS lines, blank between sentences")
      ->required();
  c_predict->add_option("output", pred.output, "Output .trees file")->required();
  c_predict->add_option("--batch-size", pred.batch_size)->check(CLI::PositiveNumber);
  c_predict->add_option("--threads", pred.threads, "0 uses every core")
      ->check(CLI::NonNegativeNumber);
  c_predict->add_option("--seed", pred.seed);

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Bracketing precision, recall and F1");
  c_eval->add_option("gold", ev.gold, "Gold trees")->required();
  c_eval->add_option("predicted", ev.predicted, "Predicted trees")->required();
  c_eval->add_option("--per-n", ev.per_n, "Write per-n-label scores as TSV");
  c_eval->add_option("--scheme", ev.scheme, "Encoding used for --per-n")
      ->check(CLI::IsMember({"relative", "absolute", "dynamic"}));
  c_eval->add_flag("--strip-functions", ev.strip_functions, "Ignore function tags");
  c_eval->add_flag("--remove-empty", ev.remove_empty, "Drop -NONE- elements");
  c_eval->add_flag("--delete-punctuation", ev.delete_punctuation, "Ignore punctuation words");
  c_eval->add_option("--seed", ev.seed);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (app.get_subcommands().empty()) {
      err << app.help();
    } else {
      err << app.get_subcommands().front()->help();
    }
    return kExitUsage;
  }

  try {
    if (c_synth->parsed()) return do_synth(synth, out);
    if (c_encode->parsed()) return do_encode(enc, out);
    if (c_decode->parsed()) return do_decode(dec, out);
    if (c_stats->parsed()) return do_stats(stats, out);
    if (c_train->parsed()) return do_train(train, out);
    if (c_ft->parsed()) return do_finetune(ft, out);
    if (c_predict->parsed()) return do_predict(pred, out);
    if (c_eval->parsed()) return do_eval(ev, out);
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace tagparse
