#include <gtest/gtest.h>

#include "oracles.h"
#include "tcl/errors.h"
#include "tcl/eval.h"

namespace tcl {
namespace {

std::vector<int> Ids(const LabelSet &set, std::initializer_list<const char *> names) {
  std::vector<int> out;
  for (const char *n : names) out.push_back(set.Id(n));
  return out;
}

TEST(DecodeTest, WellFormedAndRepaired) {
  const LabelSet seg = LabelSet::Segmentation();
  EXPECT_EQ(DecodeBmes(Ids(seg, {"B", "E", "S"}), seg), (SpanSet{{0, 2, ""}, {2, 3, ""}}));
  EXPECT_EQ(DecodeBmes(Ids(seg, {"M", "E"}), seg), (SpanSet{{0, 2, ""}}));
  EXPECT_EQ(DecodeBmes(Ids(seg, {"B", "M"}), seg), (SpanSet{{0, 2, ""}}));
  EXPECT_EQ(DecodeBmes(Ids(seg, {"E", "E"}), seg), (SpanSet{{0, 1, ""}, {1, 2, ""}}));
  EXPECT_EQ(DecodeBmes(Ids(seg, {"B", "B", "E"}), seg), (SpanSet{{0, 1, ""}, {1, 3, ""}}));
  EXPECT_TRUE(DecodeBmes(std::vector<int>{}, seg).empty());
}

TEST(DecodeTest, JointTakesFirstTokenPos) {
  const LabelSet joint = LabelSet::Joint({"NN", "VV"});
  EXPECT_EQ(DecodeBmes(Ids(joint, {"VV-B", "NN-E", "NN-S"}), joint),
            (SpanSet{{0, 2, "VV"}, {2, 3, "NN"}}));
}

// Every label sequence up to length 6 against the boundary-based decoder.
TEST(DecodeTest, MatchesReferenceDecoderExhaustively) {
  const LabelSet seg = LabelSet::Segmentation();
  size_t checked = 0;
  for (int len = 1; len <= 6; ++len) {
    int total = 1;
    for (int i = 0; i < len; ++i) total *= 4;
    for (int code = 0; code < total; ++code) {
      std::vector<int> labels(len);
      for (int i = 0, c = code; i < len; ++i, c /= 4) labels[i] = c % 4;
      const SpanSet got = DecodeBmes(labels, seg);
      ASSERT_EQ(got, oracle::ReferenceDecode(labels, seg));
      // Tiling.
      int next = 0;
      for (const auto &s : got) {
        ASSERT_EQ(s.start, next);
        ASSERT_GT(s.end, s.start);
        next = s.end;
      }
      ASSERT_EQ(next, len);
      ++checked;
    }
  }
  EXPECT_EQ(checked, 4u + 16 + 64 + 256 + 1024 + 4096);
}

TEST(F1Test, Examples) {
  const LabelSet seg = LabelSet::Segmentation();
  const SpanSet gold = DecodeBmes(Ids(seg, {"B", "E", "B", "M", "E"}), seg);
  const SpanSet pred = DecodeBmes(Ids(seg, {"B", "E", "S", "S", "S"}), seg);
  const Prf prf = F1(pred, gold, false);
  EXPECT_EQ(prf.precision, 0.25);
  EXPECT_EQ(prf.recall, 0.5);
  EXPECT_EQ(prf.f1, 1.0 / 3.0);
  const Prf same = F1(gold, gold, false);
  EXPECT_EQ(same.precision, 1.0);
  EXPECT_EQ(same.recall, 1.0);
  EXPECT_EQ(same.f1, 1.0);
}

TEST(F1Test, JointRequiresMatchingPos) {
  const SpanSet gold{{0, 2, "NN"}, {2, 3, "VV"}};
  const SpanSet pred{{0, 2, "NN"}, {2, 3, "NN"}};
  EXPECT_EQ(F1(pred, gold, false).f1, 1.0);
  EXPECT_EQ(F1(pred, gold, true).precision, 0.5);
}

TEST(F1Test, NoOverlapGivesZeroAndLengthMismatchThrows) {
  const SpanSet gold{{0, 2, ""}};
  const SpanSet pred{{0, 1, ""}, {1, 2, ""}};
  EXPECT_EQ(F1(pred, gold, false).f1, 0.0);
  EXPECT_THROW(F1(SpanSet{{0, 3, ""}}, gold, false), Error);
}

TEST(F1Test, SwappingPredAndGoldSwapsPrecisionAndRecall) {
  const LabelSet seg = LabelSet::Segmentation();
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int len = 1 + static_cast<int>(rng.Below(12));
    std::vector<int> a(len), b(len);
    for (auto &x : a) x = static_cast<int>(rng.Below(4));
    for (auto &x : b) x = static_cast<int>(rng.Below(4));
    const Prf ab = F1(DecodeBmes(a, seg), DecodeBmes(b, seg), false);
    const Prf ba = F1(DecodeBmes(b, seg), DecodeBmes(a, seg), false);
    EXPECT_EQ(ab.precision, ba.recall);
    EXPECT_EQ(ab.recall, ba.precision);
    EXPECT_NEAR(ab.f1, ba.f1, 1e-15);
  }
}

TEST(EvaluateTest, MicroAveragesCounts) {
  auto raw = ParseColumnText("a\tB\nb\tE\nc\tS\n\nd\tS\n\n", Scheme::kSegmentation);
  Dataset data = MakeDataset(raw, LabelSet::Segmentation(), BuildVocab(raw));
  const LabelSet &seg = data.label_set();
  // Sentence 0: 1 of 3 predicted correct; sentence 1: 1 of 1.
  const EvalReport r = EvaluateLabels({Ids(seg, {"S", "S", "S"}), Ids(seg, {"S"})}, data);
  EXPECT_EQ(r.cws.precision, 2.0 / 4.0);
  EXPECT_EQ(r.cws.recall, 2.0 / 3.0);
  EXPECT_FALSE(r.joint.has_value());
  EXPECT_EQ(r.sentences, 2u);
  EXPECT_EQ(r.tokens, 4u);
  // The per-sentence mean would be (0.5 + 1) / 2.
  EXPECT_NE(r.cws.f1, 0.75);
}

TEST(EvaluateTest, EmptyDatasetFails) {
  EXPECT_THROW(EvaluateLabels({}, Dataset({}, LabelSet::Segmentation(), std::make_shared<Vocab>())),
               Error);
}

}  // namespace
}  // namespace tcl
