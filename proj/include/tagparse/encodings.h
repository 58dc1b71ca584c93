#ifndef TAGPARSE_ENCODINGS_H_
#define TAGPARSE_ENCODINGS_H_

#include <compare>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tagparse/tree.h"

namespace tagparse {

// Reserved surface tokens.
inline constexpr std::string_view kDummy = "DUMMY";
inline constexpr std::string_view kNoChain = "NONE";
inline constexpr char kChainSeparator = '+';
inline constexpr char kFieldSeparator = '~';

enum class Scale { kRelative, kAbsolute, kDummy };

enum class Scheme { kRelative, kAbsolute, kDynamic };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(std::string_view name);  // throws ContractError

// The level component of a label: how many top levels w_t shares with w_t+1,
// either as a change against the previous pair (relative) or directly
// (absolute, root = level 1). The last word carries a dummy.
struct NComponent {
  Scale scale = Scale::kDummy;
  int value = 0;

  static NComponent Relative(int v) { return {Scale::kRelative, v}; }
  static NComponent Absolute(int v) { return {Scale::kAbsolute, v}; }
  static NComponent Dummy() { return {Scale::kDummy, 0}; }

  bool is_dummy() const { return scale == Scale::kDummy; }

  friend auto operator<=>(const NComponent&, const NComponent&) = default;
};

// One label per word: level component n, lowest-common-ancestor nonterminal c
// (kDummy on the last word) and the leaf unary chain u ("+"-joined, empty when
// the word has none).
struct TagLabel {
  NComponent n;
  std::string c;
  std::string u;

  friend bool operator==(const TagLabel&, const TagLabel&) = default;
};

struct EncodedSentence {
  Sentence sentence;
  std::vector<TagLabel> labels;
  Scheme scheme = Scheme::kRelative;

  friend bool operator==(const EncodedSentence&, const EncodedSentence&) = default;
};

// Surface syntax. n-tokens are "r+2", "r-3", "r0", "a1" or "DUMMY"; full labels
// are "<n>~<c>~<u>" with "NONE" for an empty chain, e.g. "r-3~S~NONE".
std::string format_n(const NComponent& n);
NComponent parse_n(std::string_view token);  // throws ContractError
std::string format_label(const TagLabel& label);
TagLabel parse_label(std::string_view surface);  // throws ContractError

// Number of shared nonterminal levels between the words at 1-based positions t
// and t+1 (preterminals excluded, root counted as level 1, unary chains
// collapsed) and the label of their lowest common ancestor.
// Requires 1 <= t < leaf_count(tree).
std::pair<int, std::string> common_ancestors(const Tree& tree, int t);

EncodedSentence encode_relative(const Tree& tree);
EncodedSentence encode_absolute(const Tree& tree);

// Relative by default; absolute at position t iff abs_t <= 3 and
// abs_t - abs_{t-1} <= -2.
EncodedSentence encode_dynamic(const Tree& tree);

EncodedSentence encode(const Tree& tree, Scheme scheme);

// Repairs applied by decode().
struct DecodeReport {
  int clamped = 0;       // levels raised to 1
  int spliced = 0;       // levels no pair split, removed
  int placeholders = 0;  // split levels that got no usable nonterminal
  int conflicts = 0;     // later nonterminals ignored in favour of the first

  bool repaired() const {
    return clamped + spliced + placeholders + conflicts > 0;
  }
};

inline constexpr std::string_view kPlaceholderLabel = "X";

// Rebuilds the tree over labels.sentence. Exact inverse of the encoders and
// total on any label sequence of the right length. Throws ContractError on an
// empty sentence or when |labels| != |words|.
Tree decode(const EncodedSentence& labels, DecodeReport* report = nullptr);

}  // namespace tagparse

#endif  // TAGPARSE_ENCODINGS_H_
