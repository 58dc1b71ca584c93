#include "tagparse/auxlabels.h"

#include <charconv>

#include "tagparse/collapsed.h"
#include "tagparse/errors.h"

namespace tagparse {

std::string AuxSpec::name() const {
  if (kind == AuxKind::kSyntacticDistance) return "dist";
  return shift > 0 ? "n+" + std::to_string(shift) : "n" + std::to_string(shift);
}

AuxSpec AuxSpec::parse(std::string_view name) {
  if (name == "dist") return {AuxKind::kSyntacticDistance, 0};
  if (name.size() >= 3 && name[0] == 'n' && (name[1] == '+' || name[1] == '-')) {
    int k = 0;
    std::string_view digits = name.substr(2);
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (ec == std::errc() && end == digits.data() + digits.size() && k > 0) {
      return {AuxKind::kShiftedN, name[1] == '-' ? -k : k};
    }
  }
  throw ContractError("unknown auxiliary task '" + std::string(name) + "'");
}

AuxTrack shifted_n(const EncodedSentence& encoded, int k) {
  if (k == 0) throw ContractError("shifted_n: k must be non-zero");
  AuxTrack track{{AuxKind::kShiftedN, k}, {}};
  const int n = static_cast<int>(encoded.labels.size());
  track.values.reserve(n);
  for (int t = 0; t < n; ++t) {
    const int source = t + k;
    track.values.push_back(source >= 0 && source < n ? format_n(encoded.labels[source].n)
                                                     : std::string(kPad));
  }
  return track;
}

AuxTrack syntactic_distances(const Tree& tree) {
  const CollapsedTree ct = collapse(tree);
  AuxTrack track{{AuxKind::kSyntacticDistance, 0}, {}};
  for (int lca : ct.pair_lca) track.values.push_back(std::to_string(ct.nodes[lca].priority));
  track.values.emplace_back(kPad);
  return track;
}

AuxTrack cap_distances(AuxTrack track, int cap) {
  if (cap <= 0) return track;
  for (std::string& v : track.values) {
    if (v == kPad) continue;
    if (std::stoi(v) > cap) v = std::to_string(cap);
  }
  return track;
}

AuxTrack make_aux(const AuxSpec& spec, const Tree& tree, const EncodedSentence& encoded) {
  if (spec.kind == AuxKind::kSyntacticDistance) return syntactic_distances(tree);
  return shifted_n(encoded, spec.shift);
}

}  // namespace tagparse
