#ifndef TAGPARSE_COLLAPSED_H_
#define TAGPARSE_COLLAPSED_H_

#include <string>
#include <vector>

#include "tagparse/tree.h"

namespace tagparse {

// View of a tree with unary chains folded away. A nonterminal with a single
// nonterminal child is merged into it ("S" over "VP" becomes "S+VP"); a chain
// ending in a preterminal is stored on the leaf instead. Every remaining
// node therefore has at least two children.
struct CollapsedTree {
  struct Node {
    std::string label;
    int parent = -1;
    int level = 1;  // root is 1
    // Split priority: 1 + max over children, leaves count 0.
    int priority = 0;
  };
  struct Leaf {
    std::string pos;
    std::string word;
    std::vector<std::string> chain;  // outermost first
    int parent = -1;
  };

  std::vector<Node> nodes;
  std::vector<Leaf> leaves;
  // For each adjacent pair (t, t+1), 0-based: shared levels and LCA node id.
  std::vector<int> pair_levels;
  std::vector<int> pair_lca;

  int max_level() const;
};

CollapsedTree collapse(const Tree& tree);

std::string join_chain(const std::vector<std::string>& chain);
std::vector<std::string> split_chain(const std::string& joined);

}  // namespace tagparse

#endif  // TAGPARSE_COLLAPSED_H_
