#include "tagparse/encodings.h"

#include <random>
#include <set>

#include "gtest/gtest.h"
#include "tagparse/errors.h"
#include "tagparse/synth.h"
#include "tagparse/treebank.h"

namespace tagparse {
namespace {

const std::vector<std::string> kAlphabet{"S", "NP", "VP", "PP", "ADJP", "SBAR"};
const char kDog[] = "(S (NP (D the) (N dog)) (VP (V barks)))";

// Oracle: explicit root-to-leaf paths on the uncollapsed tree. Only branching
// nodes open a level; the unary run directly above a branching node is part of
// its label.
struct PathOracle {
  struct Step {
    const Tree* node;
    std::string label;
  };
  std::vector<std::vector<Step>> paths;

  explicit PathOracle(const Tree& t) { walk(t, {}, {}); }

  void walk(const Tree& t, std::vector<Step> path, std::vector<std::string> run) {
    if (t.is_leaf()) {
      paths.push_back(path);
      return;
    }
    run.push_back(t.label);
    if (t.children.size() == 1) {
      walk(t.children[0], path, run);
      return;
    }
    std::string label;
    for (std::size_t i = 0; i < run.size(); ++i) label += (i ? "+" : "") + run[i];
    path.push_back({&t, label});
    for (const Tree& c : t.children) walk(c, path, {});
  }

  std::pair<int, std::string> shared(int t) const {  // 1-based pair
    const auto& a = paths[t - 1];
    const auto& b = paths[t];
    int k = 0;
    while (k < static_cast<int>(a.size()) && k < static_cast<int>(b.size()) &&
           a[k].node == b[k].node) {
      ++k;
    }
    return {k, a[k - 1].label};
  }
};

std::vector<std::string> n_tokens(const EncodedSentence& e) {
  std::vector<std::string> out;
  for (const TagLabel& l : e.labels) out.push_back(format_n(l.n));
  return out;
}

std::vector<std::string> c_labels(const EncodedSentence& e) {
  std::vector<std::string> out;
  for (const TagLabel& l : e.labels) out.push_back(l.c);
  return out;
}

std::vector<std::string> u_labels(const EncodedSentence& e) {
  std::vector<std::string> out;
  for (const TagLabel& l : e.labels) out.push_back(l.u);
  return out;
}

using Strings = std::vector<std::string>;

TEST(CommonAncestorsTest, SpecExamples) {
  const Tree dog = parse_tree(kDog);
  EXPECT_EQ(std::make_pair(2, std::string("NP")), common_ancestors(dog, 1));
  EXPECT_EQ(std::make_pair(1, std::string("S")), common_ancestors(dog, 2));
  EXPECT_EQ(std::make_pair(1, std::string("X")),
            common_ancestors(parse_tree("(X (A a) (B b))"), 1));
}

TEST(CommonAncestorsTest, OutOfRange) {
  const Tree dog = parse_tree(kDog);
  EXPECT_THROW(common_ancestors(dog, 0), ContractError);
  EXPECT_THROW(common_ancestors(dog, 3), ContractError);
}

TEST(CommonAncestorsTest, MatchesPathOracle) {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Tree t = random_tree(seed, 15, 8, kAlphabet);
    PathOracle oracle(t);
    const int n = static_cast<int>(leaf_count(t));
    for (int i = 1; i < n; ++i) {
      ASSERT_EQ(oracle.shared(i), common_ancestors(t, i)) << serialize(t) << " t=" << i;
    }
  }
}

TEST(EncodeRelativeTest, ThreeWordTree) {
  EncodedSentence e = encode_relative(parse_tree(kDog));
  EXPECT_EQ((Strings{"r+2", "r-1", "DUMMY"}), n_tokens(e));
  EXPECT_EQ((Strings{"NP", "S", "DUMMY"}), c_labels(e));
  // "barks" sits under a leaf unary VP, which the u component carries.
  EXPECT_EQ((Strings{"", "", "VP"}), u_labels(e));
  EXPECT_EQ(Scheme::kRelative, e.scheme);
  EXPECT_EQ((Strings{"the", "dog", "barks"}), e.sentence.words);
}

TEST(EncodeRelativeTest, LeafUnaryChains) {
  EncodedSentence e = encode_relative(parse_tree("(S (NP (NN dogs)) (VP (VBP bark)))"));
  EXPECT_EQ((Strings{"r+1", "DUMMY"}), n_tokens(e));
  EXPECT_EQ((Strings{"S", "DUMMY"}), c_labels(e));
  EXPECT_EQ((Strings{"NP", "VP"}), u_labels(e));
}

TEST(EncodeRelativeTest, SingleWord) {
  EncodedSentence e = encode_relative(parse_tree("(X (N a))"));
  EXPECT_EQ((Strings{"DUMMY"}), n_tokens(e));
  EXPECT_EQ((Strings{"DUMMY"}), c_labels(e));
  EXPECT_EQ((Strings{"X"}), u_labels(e));
}

TEST(EncodeRelativeTest, InternalUnaryChainIsJoined) {
  EncodedSentence e = encode_relative(parse_tree("(A (B (C (D d) (E e))) (F (G g) (H h)))"));
  EXPECT_EQ((Strings{"r+2", "r-1", "r+1", "DUMMY"}), n_tokens(e));
  EXPECT_EQ((Strings{"B+C", "A", "F", "DUMMY"}), c_labels(e));
}

TEST(EncodeRelativeTest, MatchesOracleDifferences) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    Tree t = random_tree(seed, 20, 9, kAlphabet);
    PathOracle oracle(t);
    EncodedSentence e = encode_relative(t);
    int prev = 0;
    for (std::size_t i = 0; i + 1 < e.labels.size(); ++i) {
      auto [level, label] = oracle.shared(static_cast<int>(i) + 1);
      ASSERT_EQ(NComponent::Relative(level - prev), e.labels[i].n);
      ASSERT_EQ(label, e.labels[i].c);
      prev = level;
    }
    EXPECT_TRUE(e.labels.back().n.is_dummy());
    EXPECT_EQ(kDummy, e.labels.back().c);
  }
}

TEST(EncodeAbsoluteTest, Examples) {
  EXPECT_EQ((Strings{"a2", "a1", "DUMMY"}), n_tokens(encode_absolute(parse_tree(kDog))));
  EXPECT_EQ((Strings{"a1", "a1", "DUMMY"}),
            n_tokens(encode_absolute(parse_tree("(S (A a) (B b) (C c))"))));
  EXPECT_EQ((Strings{"a1", "a2", "a3", "a4", "DUMMY"}),
            n_tokens(encode_absolute(parse_tree(
                "(S (A a) (S (B b) (S (C c) (S (D d) (E e)))))"))));
}

TEST(EncodeDynamicTest, SwitchesOnDeepClosing) {
  Tree t = parse_tree(
      "(S (NP (NP (D a) (N b)) (PP (P c) (NP (D d) (N e)))) (VP (V f)))");
  EXPECT_EQ((Strings{"a3", "a2", "a3", "a4", "a1", "DUMMY"}), n_tokens(encode_absolute(t)));
  EXPECT_EQ((Strings{"r+3", "r-1", "r+1", "r+1", "r-3", "DUMMY"}),
            n_tokens(encode_relative(t)));
  EXPECT_EQ((Strings{"r+3", "r-1", "r+1", "r+1", "a1", "DUMMY"}),
            n_tokens(encode_dynamic(t)));
}

TEST(EncodeDynamicTest, ShallowTreesStayRelative) {
  Tree flat = parse_tree("(S (A a) (B b))");
  EncodedSentence dyn = encode_dynamic(flat);
  EncodedSentence rel = encode_relative(flat);
  EXPECT_EQ(rel.labels, dyn.labels);
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Tree t = random_tree(seed, 12, 3, kAlphabet);
    ASSERT_EQ(encode_relative(t).labels, encode_dynamic(t).labels) << serialize(t);
  }
}

TEST(EncodeDynamicTest, RuleHoldsExhaustively) {
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Tree t = random_tree(seed, 30, 10, kAlphabet);
    EncodedSentence abs = encode_absolute(t);
    EncodedSentence rel = encode_relative(t);
    EncodedSentence dyn = encode_dynamic(t);
    for (std::size_t i = 0; i + 1 < dyn.labels.size(); ++i) {
      const bool fire = abs.labels[i].n.value <= 3 && rel.labels[i].n.value <= -2;
      ASSERT_EQ(fire ? abs.labels[i].n : rel.labels[i].n, dyn.labels[i].n);
    }
  }
}

TEST(EncodeTest, RejectsReservedLabels) {
  EXPECT_THROW(encode_relative(parse_tree("(A+B (C c) (D d))")), ContractError);
  EXPECT_THROW(encode_relative(parse_tree("(DUMMY (C c) (D d))")), ContractError);
  EXPECT_THROW(encode_relative(parse_tree("( (C c) (D d))")), ContractError);
}

TEST(LabelSurfaceTest, Format) {
  EXPECT_EQ("r-3~S~NONE", format_label({NComponent::Relative(-3), "S", ""}));
  EXPECT_EQ("a1~S~NP", format_label({NComponent::Absolute(1), "S", "NP"}));
  EXPECT_EQ("r+2~NP~NONE", format_label({NComponent::Relative(2), "NP", ""}));
  EXPECT_EQ("r0~VP~ADJP+JJP", format_label({NComponent::Relative(0), "VP", "ADJP+JJP"}));
  EXPECT_EQ("DUMMY~DUMMY~VP", format_label({NComponent::Dummy(), "DUMMY", "VP"}));
}

TEST(LabelSurfaceTest, Parse) {
  EXPECT_EQ((TagLabel{NComponent::Relative(-3), "S", ""}), parse_label("r-3~S~NONE"));
  EXPECT_EQ((TagLabel{NComponent::Absolute(1), "S", "NP"}), parse_label("a1~S~NP"));
  EXPECT_EQ(NComponent::Relative(0), parse_n("r+0"));
  EXPECT_EQ(NComponent::Relative(0), parse_n("r0"));
  EXPECT_EQ(NComponent::Dummy(), parse_n("DUMMY"));
  for (const char* bad : {"", "r", "a0", "a-1", "x3", "r+", "r3x", "a+2"}) {
    EXPECT_THROW(parse_n(bad), ContractError) << bad;
  }
  for (const char* bad : {"r1~S", "r1~S~NONE~X", "r1~~NONE", "r1~S~", "q~S~NONE"}) {
    EXPECT_THROW(parse_label(bad), ContractError) << bad;
  }
}

TEST(DecodeTest, RoundTripExamples) {
  for (const char* text : {kDog, "(X (N a))", "(N a)", "(S (NP (NN dogs)) (VP (VBP bark)))",
                           "(A (B (C (D d) (E e))) (F (G (H h))) (I i))",
                           "(TOP (S (NP (NP (D a) (N b)) (PP (P c) (NP (D d) (N e)))) "
                           "(VP (V f))))"}) {
    Tree t = parse_tree(text);
    for (Scheme s : {Scheme::kRelative, Scheme::kAbsolute, Scheme::kDynamic}) {
      DecodeReport report;
      EXPECT_EQ(t, decode(encode(t, s), &report)) << text;
      EXPECT_FALSE(report.repaired());
    }
  }
}

TEST(DecodeTest, RoundTripRandomTrees) {
  for (std::uint64_t seed = 0; seed < 3000; ++seed) {
    Tree t = random_tree(seed, 40, 12, kAlphabet);
    for (Scheme s : {Scheme::kRelative, Scheme::kAbsolute, Scheme::kDynamic}) {
      DecodeReport report;
      ASSERT_EQ(t, decode(encode(t, s), &report)) << serialize(t);
      ASSERT_FALSE(report.repaired());
    }
  }
}

TEST(DecodeTest, OvershootingLevelsCollapseToFlatTree) {
  EncodedSentence e;
  e.sentence = {{"w0", "w1"}, {"P0", "P1"}};
  e.labels = {{NComponent::Relative(5), "C", ""}, {NComponent::Dummy(), "DUMMY", ""}};
  DecodeReport report;
  EXPECT_EQ(parse_tree("(C (P0 w0) (P1 w1))"), decode(e, &report));
  EXPECT_TRUE(report.repaired());
}

TEST(DecodeTest, ClampsToRoot) {
  EncodedSentence e;
  e.sentence = {{"a", "b", "c"}, {"A", "B", "C"}};
  e.labels = {{NComponent::Relative(-2), "S", ""},
              {NComponent::Relative(-4), "T", ""},
              {NComponent::Dummy(), "DUMMY", ""}};
  DecodeReport report;
  EXPECT_EQ(parse_tree("(S (A a) (B b) (C c))"), decode(e, &report));
  EXPECT_EQ(2, report.clamped);
  EXPECT_EQ(1, report.conflicts);
}

TEST(DecodeTest, FirstAssignmentWinsAndPlaceholders) {
  EncodedSentence e;
  e.sentence = {{"a", "b", "c", "d"}, {"A", "B", "C", "D"}};
  e.labels = {{NComponent::Absolute(2), "", ""},
              {NComponent::Absolute(1), "S", ""},
              {NComponent::Absolute(1), "T", ""},
              {NComponent::Dummy(), "DUMMY", "U"}};
  DecodeReport report;
  EXPECT_EQ(parse_tree("(S (X (A a) (B b)) (C c) (U (D d)))"), decode(e, &report));
  EXPECT_EQ(1, report.placeholders);
  EXPECT_EQ(1, report.conflicts);
}

TEST(DecodeTest, ContractErrors) {
  EncodedSentence empty;
  EXPECT_THROW(decode(empty), ContractError);
  EncodedSentence e = encode_relative(parse_tree(kDog));
  e.labels.pop_back();
  EXPECT_THROW(decode(e), ContractError);
}

TEST(DecodeTest, TotalOnArbitraryLabels) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> cs{"S", "NP", "", "DUMMY", "A+B", "VP"};
  const std::vector<std::string> us{"", "", "NP", "X+Y"};
  for (int trial = 0; trial < 5000; ++trial) {
    const int n = std::uniform_int_distribution<int>(1, 12)(rng);
    EncodedSentence e;
    for (int i = 0; i < n; ++i) {
      e.sentence.words.push_back("w" + std::to_string(i));
      e.sentence.pos.push_back("P");
      const int kind = std::uniform_int_distribution<int>(0, 2)(rng);
      const int value = std::uniform_int_distribution<int>(-6, 6)(rng);
      NComponent nc = kind == 0   ? NComponent::Relative(value)
                      : kind == 1 ? NComponent::Absolute(std::max(1, value))
                                  : NComponent::Dummy();
      e.labels.push_back({nc, cs[rng() % cs.size()], us[rng() % us.size()]});
    }
    Tree t = decode(e);
    ASSERT_EQ(e.sentence, sentence_of(t));
    ASSERT_EQ(t, parse_tree(serialize(t)));
  }
}

TEST(DynamicVariabilityTest, AbsoluteTokensReplaceDeepClosings) {
  std::set<NComponent> rel;
  std::set<NComponent> dyn;
  std::size_t rel_far = 0, dyn_far = 0;
  for (const Tree& t : random_corpus(5, 3000, 40, 12, kAlphabet)) {
    for (const TagLabel& l : encode_relative(t).labels) {
      rel.insert(l.n);
      rel_far += !l.n.is_dummy() && std::abs(l.n.value) >= 3;
    }
    for (const TagLabel& l : encode_dynamic(t).labels) {
      dyn.insert(l.n);
      dyn_far += !l.n.is_dummy() && std::abs(l.n.value) >= 3;
    }
  }
  for (const NComponent& n : dyn) {
    if (n.scale == Scale::kAbsolute) {
      EXPECT_LE(n.value, 3);
    } else {
      EXPECT_TRUE(rel.count(n)) << format_n(n);
    }
  }
  EXPECT_LT(dyn_far, rel_far);
}

}  // namespace
}  // namespace tagparse
