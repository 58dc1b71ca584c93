#include "tagparse/collapsed.h"

#include <algorithm>

#include "tagparse/encodings.h"

namespace tagparse {

namespace {

class Collapser {
 public:
  explicit Collapser(CollapsedTree& out) : out_(out) {}

  // Returns the priority of the subtree just built.
  int build(const Tree& node, int parent, std::vector<std::string> pending) {
    if (node.is_leaf()) {
      out_.leaves.push_back({node.label, node.word, std::move(pending), parent});
      return 0;
    }
    if (node.children.size() == 1) {
      pending.push_back(node.label);
      return build(node.children.front(), parent, std::move(pending));
    }
    pending.push_back(node.label);
    const int id = static_cast<int>(out_.nodes.size());
    CollapsedTree::Node n;
    n.label = join_chain(pending);
    n.parent = parent;
    n.level = parent < 0 ? 1 : out_.nodes[parent].level + 1;
    out_.nodes.push_back(std::move(n));
    int highest = 0;
    for (const Tree& c : node.children) highest = std::max(highest, build(c, id, {}));
    out_.nodes[id].priority = highest + 1;
    return highest + 1;
  }

 private:
  CollapsedTree& out_;
};

std::vector<int> path_to_root(const CollapsedTree& t, int node) {
  std::vector<int> path;
  for (; node >= 0; node = t.nodes[node].parent) path.push_back(node);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

int CollapsedTree::max_level() const {
  int m = 0;
  for (const Node& n : nodes) m = std::max(m, n.level);
  return m;
}

CollapsedTree collapse(const Tree& tree) {
  CollapsedTree out;
  Collapser(out).build(tree, -1, {});
  const std::size_t n = out.leaves.size();
  std::vector<int> prev = path_to_root(out, out.leaves[0].parent);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    std::vector<int> next = path_to_root(out, out.leaves[t + 1].parent);
    std::size_t shared = 0;
    while (shared < prev.size() && shared < next.size() && prev[shared] == next[shared]) {
      ++shared;
    }
    out.pair_levels.push_back(static_cast<int>(shared));
    out.pair_lca.push_back(shared == 0 ? -1 : prev[shared - 1]);
    prev = std::move(next);
  }
  return out;
}

std::string join_chain(const std::vector<std::string>& chain) {
  std::string out;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i) out += kChainSeparator;
    out += chain[i];
  }
  return out;
}

std::vector<std::string> split_chain(const std::string& joined) {
  std::vector<std::string> parts;
  if (joined.empty()) return parts;
  std::size_t start = 0;
  while (true) {
    std::size_t cut = joined.find(kChainSeparator, start);
    parts.push_back(joined.substr(start, cut - start));
    if (cut == std::string::npos) break;
    start = cut + 1;
  }
  return parts;
}

}  // namespace tagparse
