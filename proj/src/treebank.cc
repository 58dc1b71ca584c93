#include "tagparse/treebank.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "tagparse/errors.h"

namespace tagparse {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

class BracketReader {
 public:
  explicit BracketReader(std::string_view text) : text_(text) {}

  std::vector<Tree> read_all(std::vector<std::size_t>* starts) {
    std::vector<Tree> trees;
    skip_space();
    while (pos_ < text_.size()) {
      if (text_[pos_] == ')') throw ParseError("unmatched ')'", pos_);
      if (text_[pos_] != '(') throw ParseError("token outside brackets", pos_);
      if (starts) starts->push_back(pos_);
      trees.push_back(read_tree());
      skip_space();
    }
    return trees;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  bool at_end() const { return pos_ >= text_.size(); }

  std::string_view read_token() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_]) &&
           text_[pos_] != '(' && text_[pos_] != ')') {
      ++pos_;
    }
    return text_.substr(start, pos_ - start);
  }

  void expect_close() {
    skip_space();
    if (at_end()) throw ParseError("unexpected end of input", text_.size());
    if (text_[pos_] != ')') throw ParseError("expected ')'", pos_);
    ++pos_;
  }

  // Positioned on '('.
  Tree read_tree() {
    const std::size_t open = pos_;
    ++pos_;
    skip_space();
    if (at_end()) throw ParseError("unexpected end of input", text_.size());
    if (text_[pos_] == ')') throw ParseError("empty constituent", open);

    std::string label;
    if (text_[pos_] != '(') label = std::string(read_token());

    skip_space();
    if (at_end()) throw ParseError("unexpected end of input", text_.size());
    if (text_[pos_] == ')') {
      throw ParseError("constituent '" + label + "' has no children", open);
    }
    if (text_[pos_] != '(') {
      if (label.empty()) throw ParseError("word without a POS tag", pos_);
      std::string word(read_token());
      expect_close();
      return Tree::Leaf(std::move(label), std::move(word));
    }

    std::vector<Tree> children;
    while (true) {
      skip_space();
      if (at_end()) throw ParseError("unexpected end of input", text_.size());
      if (text_[pos_] == ')') {
        ++pos_;
        break;
      }
      if (text_[pos_] != '(') {
        throw ParseError("bare token among constituents", pos_);
      }
      children.push_back(read_tree());
    }
    Tree t;
    t.label = std::move(label);
    t.children = std::move(children);
    return t;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void write(const Tree& tree, std::string& out) {
  out += '(';
  out += tree.label;
  if (tree.is_leaf()) {
    out += ' ';
    out += tree.word;
  } else {
    for (const Tree& c : tree.children) {
      out += ' ';
      write(c, out);
    }
  }
  out += ')';
}

void strip_functions(Tree& tree) {
  if (tree.is_leaf()) return;
  tree.label = strip_function_tag(tree.label);
  for (Tree& c : tree.children) strip_functions(c);
}

// False when nothing but empty elements remained below `tree`.
bool remove_empty(Tree& tree) {
  if (tree.is_leaf()) return tree.label != "-NONE-";
  std::vector<Tree> kept;
  for (Tree& c : tree.children) {
    if (remove_empty(c)) kept.push_back(std::move(c));
  }
  tree.children = std::move(kept);
  return !tree.children.empty();
}

}  // namespace

std::vector<Tree> parse_bracketed(std::string_view text, std::vector<std::size_t>* starts) {
  return BracketReader(text).read_all(starts);
}

Tree parse_tree(std::string_view text) {
  std::vector<Tree> trees = parse_bracketed(text);
  if (trees.size() != 1) {
    throw ParseError("expected exactly one tree, found " +
                         std::to_string(trees.size()),
                     0);
  }
  return std::move(trees.front());
}

std::string serialize(const Tree& tree) {
  std::string out;
  write(tree, out);
  return out;
}

std::string strip_function_tag(const std::string& label) {
  if (label.empty() || label[0] == '-') return label;
  std::size_t cut = label.find_first_of("-=", 1);
  return cut == std::string::npos ? label : label.substr(0, cut);
}

Tree normalize(Tree tree, const NormalizeOptions& options) {
  if (options.strip_root_wrapper) {
    while (!tree.is_leaf() && tree.label.empty() && tree.children.size() == 1) {
      Tree child = std::move(tree.children.front());
      tree = std::move(child);
    }
  }
  if (options.strip_function_tags) strip_functions(tree);
  if (options.remove_empty_elements && !remove_empty(tree)) {
    throw ContractError("tree holds only empty elements");
  }
  return tree;
}

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

std::vector<Tree> read_trees(std::istream& in, const std::string& source,
                             std::vector<std::size_t>* lines) {
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    std::vector<std::size_t> starts;
    std::vector<Tree> trees = parse_bracketed(text, lines ? &starts : nullptr);
    if (lines) {
      lines->clear();
      std::size_t line = 1;
      std::size_t scanned = 0;
      for (std::size_t start : starts) {
        line += std::count(text.begin() + scanned, text.begin() + start, '\n');
        scanned = start;
        lines->push_back(line);
      }
    }
    return trees;
  } catch (const ParseError& e) {
    throw DataError(source + ":" +
                    std::to_string(line_of_offset(text, e.offset())) + ": " +
                    e.what());
  }
}

std::vector<Tree> read_trees_file(const std::string& path, std::vector<std::size_t>* lines) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ":0: cannot open file");
  return read_trees(in, path, lines);
}

void write_trees(std::ostream& out, const std::vector<Tree>& trees) {
  for (const Tree& t : trees) out << serialize(t) << '\n';
}

}  // namespace tagparse
