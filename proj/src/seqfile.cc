#include "tagparse/seqfile.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "tagparse/errors.h"

namespace tagparse {

namespace {

std::vector<std::string> split(const std::string& line, char sep = '\t') {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find(sep, start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) return out;
    start = tab + 1;
  }
}

bool blank(const std::string& line) {
  return line.find_first_not_of(" \t") == std::string::npos;
}

std::string location(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

// Reads lines with their numbers, dropping a trailing '\r'.
bool next_line(std::istream& in, std::string& line, std::size_t& number) {
  if (!std::getline(in, line)) return false;
  ++number;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

void write_seq(std::ostream& out, const SeqFile& file) {
  out << "# scheme=" << to_string(file.scheme) << " aux=";
  if (file.aux.empty()) out << "none";
  for (std::size_t i = 0; i < file.aux.size(); ++i) {
    out << (i ? "," : "") << file.aux[i].name();
  }
  out << '\n';
  for (std::size_t s = 0; s < file.sentences.size(); ++s) {
    const TrainingSentence& ts = file.sentences[s];
    if (ts.aux.size() != file.aux.size()) {
      throw ContractError("sentence " + std::to_string(s + 1) + " has the wrong number of tracks");
    }
    if (s > 0) out << '\n';
    const Sentence& words = ts.encoded.sentence;
    for (std::size_t t = 0; t < words.size(); ++t) {
      out << words.words[t] << '\t' << words.pos[t] << '\t' << format_label(ts.encoded.labels[t]);
      for (const AuxTrack& a : ts.aux) out << '\t' << a.values.at(t);
      out << '\n';
    }
  }
}

void write_seq_file(const std::string& path, const SeqFile& file) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ":0: cannot open for writing");
  write_seq(out, file);
}

SeqFile read_seq(std::istream& in, const std::string& source) {
  SeqFile file;
  std::string line;
  std::size_t number = 0;
  if (!next_line(in, line, number) || line.rfind("# ", 0) != 0) {
    throw DataError(location(source, 1) + "missing '# scheme=... aux=...' header");
  }
  {
    std::istringstream header(line.substr(2));
    std::string field;
    bool have_scheme = false;
    bool have_aux = false;
    while (header >> field) {
      try {
        if (field.rfind("scheme=", 0) == 0) {
          file.scheme = scheme_from_string(field.substr(7));
          have_scheme = true;
        } else if (field.rfind("aux=", 0) == 0) {
          const std::string list = field.substr(4);
          if (list != "none") {
            for (const std::string& name : split(list, ',')) {
              file.aux.push_back(AuxSpec::parse(name));
            }
          }
          have_aux = true;
        } else {
          throw ContractError("unknown header field '" + field + "'");
        }
      } catch (const ContractError& e) {
        throw DataError(location(source, number) + e.what());
      }
    }
    if (!have_scheme || !have_aux) {
      throw DataError(location(source, number) + "header needs scheme= and aux=");
    }
  }

  const std::size_t columns = 3 + file.aux.size();
  TrainingSentence current;
  auto flush = [&] {
    if (current.encoded.labels.empty()) return;
    current.encoded.scheme = file.scheme;
    file.sentences.push_back(std::move(current));
    current = TrainingSentence();
  };
  auto start = [&] {
    for (const AuxSpec& spec : file.aux) current.aux.push_back(AuxTrack{spec, {}});
  };
  start();
  while (next_line(in, line, number)) {
    if (blank(line)) {
      flush();
      if (current.aux.empty()) start();
      continue;
    }
    const std::vector<std::string> cols = split(line);
    if (cols.size() != columns) {
      throw DataError(location(source, number) + "expected " + std::to_string(columns) +
                      " tab-separated columns, found " + std::to_string(cols.size()));
    }
    if (cols[0].empty() || cols[1].empty()) {
      throw DataError(location(source, number) + "empty word or POS column");
    }
    try {
      current.encoded.labels.push_back(parse_label(cols[2]));
    } catch (const ContractError& e) {
      throw DataError(location(source, number) + e.what());
    }
    current.encoded.sentence.words.push_back(cols[0]);
    current.encoded.sentence.pos.push_back(cols[1]);
    for (std::size_t i = 0; i < file.aux.size(); ++i) current.aux[i].values.push_back(cols[3 + i]);
  }
  flush();
  return file;
}

SeqFile read_seq_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ":0: cannot open file");
  return read_seq(in, path);
}

std::vector<Sentence> read_tagged(std::istream& in, const std::string& source) {
  std::vector<Sentence> out;
  Sentence current;
  std::string line;
  std::size_t number = 0;
  while (next_line(in, line, number)) {
    if (blank(line)) {
      if (current.size() > 0) out.push_back(std::move(current));
      current = Sentence();
      continue;
    }
    const std::vector<std::string> cols = split(line);
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      throw DataError(location(source, number) + "expected 'word<TAB>POS'");
    }
    current.words.push_back(cols[0]);
    current.pos.push_back(cols[1]);
  }
  if (current.size() > 0) out.push_back(std::move(current));
  return out;
}

std::vector<Sentence> read_tagged_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ":0: cannot open file");
  return read_tagged(in, path);
}

}  // namespace tagparse
