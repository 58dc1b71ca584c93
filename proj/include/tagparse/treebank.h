#ifndef TAGPARSE_TREEBANK_H_
#define TAGPARSE_TREEBANK_H_

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "tagparse/tree.h"

namespace tagparse {

// Reads zero or more PTB-style bracketed trees. Whitespace between tokens is
// insignificant. "-LRB-"/"-RRB-" escapes are kept as they are. An unlabeled
// wrapper such as "( (S ...) )" is accepted and yields a node with an empty
// label; see strip_root_wrapper().
//
// Throws ParseError (with byte offset) on unbalanced brackets, "()", a
// constituent without children, or stray tokens.
// When `starts` is set it receives the byte offset of each tree's '('.
std::vector<Tree> parse_bracketed(std::string_view text,
                                  std::vector<std::size_t>* starts = nullptr);

// Parses exactly one tree; throws ParseError if the text holds zero or more
// than one.
Tree parse_tree(std::string_view text);

// Single-line canonical form with single spaces and no trailing newline.
std::string serialize(const Tree& tree);

struct NormalizeOptions {
  // "NP-SBJ-1" -> "NP", "PP=2" -> "PP". Labels that start with '-' (-NONE-)
  // are left alone. POS tags are never touched.
  bool strip_function_tags = false;
  // Removes an empty-labelled root that has a single child.
  bool strip_root_wrapper = true;
  // Drops -NONE- leaves and the constituents left without words.
  bool remove_empty_elements = false;
};

// Throws ContractError when removing empty elements leaves nothing.
Tree normalize(Tree tree, const NormalizeOptions& options);

std::string strip_function_tag(const std::string& label);

// File helpers. Diagnostics from read_trees carry "<source>:<line>"; `lines`
// receives the 1-based line on which each tree starts.
std::vector<Tree> read_trees(std::istream& in, const std::string& source,
                             std::vector<std::size_t>* lines = nullptr);
std::vector<Tree> read_trees_file(const std::string& path,
                                  std::vector<std::size_t>* lines = nullptr);
void write_trees(std::ostream& out, const std::vector<Tree>& trees);

// 1-based line number of a byte offset.
std::size_t line_of_offset(std::string_view text, std::size_t offset);

}  // namespace tagparse

#endif  // TAGPARSE_TREEBANK_H_
