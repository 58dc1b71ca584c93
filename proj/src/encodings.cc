#include "tagparse/encodings.h"

#include <algorithm>
#include <cctype>
#include <charconv>

#include "tagparse/collapsed.h"
#include "tagparse/errors.h"

namespace tagparse {

namespace {

constexpr int kDynamicMaxLevel = 3;
constexpr int kDynamicMaxDrop = -2;

void check_nonterminal(const std::string& label) {
  if (label.empty()) throw ContractError("cannot encode an empty nonterminal label");
  if (label == kDummy || label == kNoChain) {
    throw ContractError("nonterminal '" + label + "' is a reserved token");
  }
  for (char ch : label) {
    if (ch == kChainSeparator || ch == kFieldSeparator ||
        std::isspace(static_cast<unsigned char>(ch))) {
      throw ContractError("nonterminal '" + label + "' contains a reserved character");
    }
  }
}

void check_tree(const Tree& tree) {
  if (tree.is_leaf()) return;
  check_nonterminal(tree.label);
  for (const Tree& c : tree.children) check_tree(c);
}

}  // namespace

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kRelative: return "relative";
    case Scheme::kAbsolute: return "absolute";
    case Scheme::kDynamic: return "dynamic";
  }
  return "relative";
}

Scheme scheme_from_string(std::string_view name) {
  if (name == "relative") return Scheme::kRelative;
  if (name == "absolute") return Scheme::kAbsolute;
  if (name == "dynamic") return Scheme::kDynamic;
  throw ContractError("unknown scheme '" + std::string(name) + "'");
}

std::string format_n(const NComponent& n) {
  switch (n.scale) {
    case Scale::kDummy: return std::string(kDummy);
    case Scale::kAbsolute: return "a" + std::to_string(n.value);
    case Scale::kRelative:
      if (n.value > 0) return "r+" + std::to_string(n.value);
      return "r" + std::to_string(n.value);
  }
  return std::string(kDummy);
}

NComponent parse_n(std::string_view token) {
  if (token == kDummy) return NComponent::Dummy();
  if (token.size() < 2 || (token[0] != 'r' && token[0] != 'a')) {
    throw ContractError("bad n-token '" + std::string(token) + "'");
  }
  std::string_view digits = token.substr(1);
  if (token[0] == 'r' && digits.front() == '+') digits.remove_prefix(1);
  int value = 0;
  auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || end != digits.data() + digits.size() || digits.empty()) {
    throw ContractError("bad n-token '" + std::string(token) + "'");
  }
  if (token[0] == 'a') {
    if (value < 1 || token[1] == '-' || token[1] == '+') {
      throw ContractError("absolute n-token must be >= 1: '" + std::string(token) + "'");
    }
    return NComponent::Absolute(value);
  }
  return NComponent::Relative(value);
}

std::string format_label(const TagLabel& label) {
  std::string out = format_n(label.n);
  out += kFieldSeparator;
  out += label.c.empty() ? std::string(kPlaceholderLabel) : label.c;
  out += kFieldSeparator;
  out += label.u.empty() ? std::string(kNoChain) : label.u;
  return out;
}

TagLabel parse_label(std::string_view surface) {
  const std::size_t first = surface.find(kFieldSeparator);
  const std::size_t second =
      first == std::string_view::npos ? first : surface.find(kFieldSeparator, first + 1);
  if (second == std::string_view::npos ||
      surface.find(kFieldSeparator, second + 1) != std::string_view::npos) {
    throw ContractError("label '" + std::string(surface) + "' is not <n>~<c>~<u>");
  }
  TagLabel label;
  label.n = parse_n(surface.substr(0, first));
  label.c = std::string(surface.substr(first + 1, second - first - 1));
  std::string_view u = surface.substr(second + 1);
  if (label.c.empty() || u.empty()) {
    throw ContractError("label '" + std::string(surface) + "' has an empty field");
  }
  if (u != kNoChain) label.u = std::string(u);
  return label;
}

std::pair<int, std::string> common_ancestors(const Tree& tree, int t) {
  const CollapsedTree ct = collapse(tree);
  const int n = static_cast<int>(ct.leaves.size());
  if (t < 1 || t >= n) {
    throw ContractError("common_ancestors: t=" + std::to_string(t) +
                        " outside [1, " + std::to_string(n - 1) + "]");
  }
  return {ct.pair_levels[t - 1], ct.nodes[ct.pair_lca[t - 1]].label};
}

EncodedSentence encode(const Tree& tree, Scheme scheme) {
  check_tree(tree);
  const CollapsedTree ct = collapse(tree);
  EncodedSentence out;
  out.scheme = scheme;
  out.sentence = sentence_of(tree);
  const std::size_t n = ct.leaves.size();
  out.labels.reserve(n);
  int previous = 0;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const int level = ct.pair_levels[t];
    const int change = level - previous;
    NComponent nc = NComponent::Relative(change);
    if (scheme == Scheme::kAbsolute ||
        (scheme == Scheme::kDynamic && level <= kDynamicMaxLevel &&
         change <= kDynamicMaxDrop)) {
      nc = NComponent::Absolute(level);
    }
    out.labels.push_back({nc, ct.nodes[ct.pair_lca[t]].label, join_chain(ct.leaves[t].chain)});
    previous = level;
  }
  out.labels.push_back({NComponent::Dummy(), std::string(kDummy),
                        join_chain(ct.leaves[n - 1].chain)});
  return out;
}

EncodedSentence encode_relative(const Tree& tree) { return encode(tree, Scheme::kRelative); }
EncodedSentence encode_absolute(const Tree& tree) { return encode(tree, Scheme::kAbsolute); }
EncodedSentence encode_dynamic(const Tree& tree) { return encode(tree, Scheme::kDynamic); }

namespace {

// Decoding state. Node children are node ids (>= 0) or ~leaf (< 0).
struct Builder {
  struct Node {
    std::string label;
    bool labeled = false;
    bool split = false;
    std::vector<int> children;
  };

  std::vector<Node> nodes;
  int root = 0;  // node id, or ~leaf for a one-word sentence

  int add_node(std::vector<int>& path) {
    const int id = static_cast<int>(nodes.size());
    nodes.emplace_back();
    if (path.empty()) {
      root = id;
    } else {
      nodes[path.back()].children.push_back(id);
    }
    path.push_back(id);
    return id;
  }

  static Tree wrap(Tree inner, const std::vector<std::string>& chain) {
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      inner = Tree::Internal(*it, {std::move(inner)});
    }
    return inner;
  }

  Tree build(int item, const EncodedSentence& in, DecodeReport& report) const {
    if (item < 0) {
      const int leaf = ~item;
      return wrap(Tree::Leaf(in.sentence.pos[leaf], in.sentence.words[leaf]),
                  split_chain(in.labels[leaf].u));
    }
    const Node& node = nodes[item];
    if (!node.split) {
      ++report.spliced;
      return build(node.children.front(), in, report);
    }
    std::vector<Tree> kids;
    kids.reserve(node.children.size());
    for (int c : node.children) kids.push_back(build(c, in, report));
    std::string label = node.label;
    if (!node.labeled) {
      ++report.placeholders;
      label = std::string(kPlaceholderLabel);
    }
    std::vector<std::string> chain = split_chain(label);
    Tree t = Tree::Internal(chain.back(), std::move(kids));
    chain.pop_back();
    return wrap(std::move(t), chain);
  }
};

bool usable_nonterminal(const std::string& c) {
  if (c.empty() || c == kDummy) return false;
  for (const std::string& part : split_chain(c)) {
    if (part.empty()) return false;
  }
  return true;
}

}  // namespace

Tree decode(const EncodedSentence& in, DecodeReport* report_out) {
  const std::size_t n = in.sentence.words.size();
  if (n == 0) throw ContractError("decode: empty sentence");
  if (in.sentence.pos.size() != n || in.labels.size() != n) {
    throw ContractError("decode: " + std::to_string(n) + " words, " +
                        std::to_string(in.sentence.pos.size()) + " POS tags, " +
                        std::to_string(in.labels.size()) + " labels");
  }
  DecodeReport report;

  // Shared levels per adjacent pair, repaired to at least the root.
  std::vector<int> levels(n - 1);
  int previous = 0;
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const NComponent& nc = in.labels[t].n;
    int level = previous;
    if (nc.scale == Scale::kAbsolute) level = nc.value;
    if (nc.scale == Scale::kRelative) level = previous + nc.value;
    if (level < 1) {
      ++report.clamped;
      level = 1;
    }
    levels[t] = level;
    previous = level;
  }
  auto word_depth = [&](std::size_t t) {
    int d = 0;
    if (t > 0) d = levels[t - 1];
    if (t + 1 < n) d = std::max(d, levels[t]);
    return d;
  };

  Builder b;
  std::vector<int> path;
  for (std::size_t t = 0; t < n; ++t) {
    if (t > 0) {
      const int level = levels[t - 1];
      Builder::Node& lca = b.nodes[path[level - 1]];
      lca.split = true;
      const std::string& c = in.labels[t - 1].c;
      if (usable_nonterminal(c)) {
        if (!lca.labeled) {
          lca.label = c;
          lca.labeled = true;
        } else if (lca.label != c) {
          ++report.conflicts;
        }
      }
      path.resize(level);
    }
    while (static_cast<int>(path.size()) < word_depth(t)) b.add_node(path);
    if (path.empty()) {
      b.root = ~static_cast<int>(t);
    } else {
      b.nodes[path.back()].children.push_back(~static_cast<int>(t));
    }
  }

  Tree tree = b.build(b.root, in, report);
  if (report_out) *report_out = report;
  return tree;
}

}  // namespace tagparse
