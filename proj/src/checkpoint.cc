#include "tagparse/checkpoint.h"

#include <fstream>
#include <map>

#include "json.hpp"
#include "tagparse/errors.h"

namespace tagparse {

namespace {

using nlohmann::json;

json vocab_json(const Vocabulary& v) {
  return json{{"reserved", v.reserved()}, {"tokens", v.tokens()}};
}

Vocabulary vocab_from(const json& j) {
  const auto tokens = j.at("tokens").get<std::vector<std::string>>();
  const int reserved = j.at("reserved").get<int>();
  if (reserved < 0 || reserved > static_cast<int>(tokens.size())) {
    throw DataError("bad reserved count in vocabulary");
  }
  Vocabulary v(std::vector<std::string>(tokens.begin(), tokens.begin() + reserved));
  for (std::size_t i = reserved; i < tokens.size(); ++i) {
    if (v.add(tokens[i]) != static_cast<int>(i)) throw DataError("duplicate vocabulary token");
  }
  return v;
}

json config_json(const TrainConfig& c) {
  std::vector<std::string> aux;
  for (const AuxSpec& a : c.aux) aux.push_back(a.name());
  return json{{"learning_rate", c.learning_rate}, {"momentum", c.momentum},
              {"decay", c.decay},                 {"epochs", c.epochs},
              {"batch_size", c.batch_size},       {"aux_weight", c.aux_weight},
              {"dropout", c.dropout},             {"clip_norm", c.clip_norm},
              {"distance_cap", c.distance_cap},   {"seed", c.seed},
              {"aux", aux}};
}

TrainConfig config_from(const json& j, const ModelDims& dims) {
  TrainConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.momentum = j.at("momentum").get<double>();
  c.decay = j.at("decay").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.batch_size = j.at("batch_size").get<int>();
  c.aux_weight = j.at("aux_weight").get<double>();
  c.dropout = j.at("dropout").get<double>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.distance_cap = j.at("distance_cap").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& name : j.at("aux").get<std::vector<std::string>>()) {
    c.aux.push_back(AuxSpec::parse(name));
  }
  c.dims = dims;
  return c;
}

}  // namespace

void save_checkpoint(const TaggerModel& model, std::ostream& out) {
  const Vocabularies& v = model.vocab();
  const ModelDims& d = model.dims();
  json doc;
  doc["version"] = kCheckpointVersion;
  doc["encoder"] = model.encoder().kind();
  doc["scheme"] = to_string(model.scheme());
  doc["dims"] = {{"word_dim", d.word_dim}, {"pos_dim", d.pos_dim}, {"hidden", d.hidden},
                 {"window", d.window}};
  std::vector<std::string> aux;
  for (const AuxSpec& a : v.aux) aux.push_back(a.name());
  doc["aux"] = aux;
  doc["vocab"]["words"] = vocab_json(v.words);
  doc["vocab"]["pos"] = vocab_json(v.pos);
  doc["vocab"]["tasks"] = json::array();
  for (const Vocabulary& t : v.tasks) doc["vocab"]["tasks"].push_back(vocab_json(t));
  doc["hyperparameters"] = config_json(model.hyperparameters());
  doc["tensors"] = json::object();
  for (const Tensor* t : model.parameters()) {
    doc["tensors"][t->name] = {{"rows", t->rows}, {"cols", t->cols}, {"data", t->data}};
  }
  out << doc.dump() << '\n';
  if (!out) throw DataError("failed writing checkpoint");
}

void save_checkpoint(const TaggerModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot open for writing");
  save_checkpoint(model, out);
}

TaggerModel load_checkpoint(std::istream& in, const std::string& source) {
  try {
    const json doc = json::parse(in);
    if (doc.at("version").get<int>() != kCheckpointVersion) {
      throw DataError("unsupported checkpoint version");
    }
    if (doc.at("encoder").get<std::string>() != "window") {
      throw DataError("unknown encoder kind");
    }
    const json& jd = doc.at("dims");
    ModelDims dims{jd.at("word_dim").get<int>(), jd.at("pos_dim").get<int>(),
                   jd.at("hidden").get<int>(), jd.at("window").get<int>()};
    Vocabularies v;
    v.words = vocab_from(doc.at("vocab").at("words"));
    v.pos = vocab_from(doc.at("vocab").at("pos"));
    v.tasks.clear();
    for (const json& t : doc.at("vocab").at("tasks")) v.tasks.push_back(vocab_from(t));
    for (const auto& name : doc.at("aux").get<std::vector<std::string>>()) {
      v.aux.push_back(AuxSpec::parse(name));
    }
    TaggerModel model(std::move(v), scheme_from_string(doc.at("scheme").get<std::string>()),
                      dims, 0);
    model.set_hyperparameters(config_from(doc.at("hyperparameters"), dims));
    const json& tensors = doc.at("tensors");
    std::vector<Tensor*> params = model.parameters();
    if (tensors.size() != params.size()) throw DataError("tensor count mismatch");
    for (Tensor* t : params) {
      const json& jt = tensors.at(t->name);
      if (jt.at("rows").get<int>() != t->rows || jt.at("cols").get<int>() != t->cols) {
        throw DataError("shape mismatch for tensor " + t->name);
      }
      auto data = jt.at("data").get<std::vector<double>>();
      if (data.size() != t->data.size()) throw DataError("size mismatch for tensor " + t->name);
      t->data = std::move(data);
    }
    model.check_finite();
    return model;
  } catch (const DataError& e) {
    throw DataError(source + ": " + e.what());
  } catch (const NumericFault& e) {
    throw DataError(source + ": " + e.what());
  } catch (const ContractError& e) {
    throw DataError(source + ": " + e.what());
  } catch (const json::exception& e) {
    throw DataError(source + ": " + e.what());
  }
}

TaggerModel load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  return load_checkpoint(in, path);
}

}  // namespace tagparse
