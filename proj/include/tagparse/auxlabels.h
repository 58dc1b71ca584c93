#ifndef TAGPARSE_AUXLABELS_H_
#define TAGPARSE_AUXLABELS_H_

#include <string>
#include <string_view>
#include <vector>

#include "tagparse/encodings.h"
#include "tagparse/tree.h"

namespace tagparse {

inline constexpr std::string_view kPad = "PAD";

enum class AuxKind { kShiftedN, kSyntacticDistance };

// Which auxiliary track to produce. Spelled "n+1", "n-1", "n+2", ... or "dist".
struct AuxSpec {
  AuxKind kind = AuxKind::kShiftedN;
  int shift = 1;

  std::string name() const;
  static AuxSpec parse(std::string_view name);  // throws ContractError

  friend bool operator==(const AuxSpec&, const AuxSpec&) = default;
};

// One label token per word.
struct AuxTrack {
  AuxSpec spec;
  std::vector<std::string> values;

  friend bool operator==(const AuxTrack&, const AuxTrack&) = default;
};

// values[t] is the n-token of labels[t + k], or PAD when t + k falls outside
// the sentence. k == 0 is rejected.
AuxTrack shifted_n(const EncodedSentence& encoded, int k);

// Split priorities on the unary-collapsed tree: leaves and preterminals are 0,
// a nonterminal is one more than its highest child. values[t] is the priority
// of the lowest common ancestor of w_t and w_t+1; the last word gets PAD.
AuxTrack syntactic_distances(const Tree& tree);

// Distances above `cap` become "cap" itself; cap <= 0 leaves the track alone.
AuxTrack cap_distances(AuxTrack track, int cap);

AuxTrack make_aux(const AuxSpec& spec, const Tree& tree, const EncodedSentence& encoded);

}  // namespace tagparse

#endif  // TAGPARSE_AUXLABELS_H_
