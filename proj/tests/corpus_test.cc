#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "tcl/corpus.h"
#include "tcl/errors.h"

namespace tcl {
namespace {

std::filesystem::path TempFile(const std::string &name, const std::string &content) {
  auto dir = std::filesystem::temp_directory_path() / "tcl_corpus_test";
  std::filesystem::create_directories(dir);
  auto path = dir / name;
  std::ofstream(path, std::ios::binary) << content;
  return path;
}

SynthConfig SmallSynth() {
  SynthConfig c;
  c.vocab_a = 60;
  c.vocab_b = 40;
  c.chars_a = 40;
  c.chars_b = 30;
  c.train_size = 200;
  c.dev_size = 40;
  c.test_size = 40;
  c.noise_rate = 0.05;
  return c;
}

TEST(LabelSetTest, CanonicalOrderings) {
  EXPECT_EQ(LabelSet::Segmentation().labels(), (std::vector<std::string>{"B", "M", "E", "S"}));
  auto joint = LabelSet::Joint({"VV", "NN", "NN"});
  EXPECT_EQ(joint.labels(), (std::vector<std::string>{"NN-B", "NN-M", "NN-E", "NN-S", "VV-B",
                                                      "VV-M", "VV-E", "VV-S"}));
  EXPECT_EQ(joint.Id("VV-E"), 6);
  EXPECT_EQ(joint.Pos(6), "VV");
  EXPECT_EQ(joint.Tag(6), Bmes::kE);
  EXPECT_EQ(joint.PosTags(), (std::vector<std::string>{"NN", "VV"}));
  EXPECT_THROW(joint.Id("VV-X"), SchemeError);
}

TEST(ParseColumnTest, MinimalFile) {
  auto path = TempFile("min.txt", "阿\tB\n里\tE\n\n");
  Dataset d = ParseColumnFile(path, Scheme::kSegmentation);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].tokens, (std::vector<std::string>{"阿", "里"}));
  EXPECT_EQ(d[0].labels, (std::vector<int>{0, 2}));
  EXPECT_EQ(d[0].id, 0);
  EXPECT_EQ(d.vocab().Lookup("阿"), 2);
  EXPECT_EQ(d.vocab().Lookup("里"), 3);
}

TEST(ParseColumnTest, SpaceSeparatorIsAParseErrorAtLine1) {
  try {
    ParseColumnText("阿 B\n", Scheme::kSegmentation);
    FAIL() << "expected ParseError";
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(ParseColumnTest, ErrorsCarryLineNumbers) {
  try {
    ParseColumnText("a\tB\nb\tE\n\nc\tS\td\n", Scheme::kSegmentation);
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 4u);
  }
  EXPECT_THROW(ParseColumnText("a\t\n", Scheme::kSegmentation), ParseError);
  EXPECT_THROW(ParseColumnText("a\tX\n", Scheme::kSegmentation), SchemeError);
  EXPECT_THROW(ParseColumnText("a\tNN\n", Scheme::kJoint), SchemeError);
  EXPECT_THROW(ParseColumnText("ab\tS\n", Scheme::kSegmentation), ParseError);
  EXPECT_NO_THROW(ParseColumnText("ab\tX\n", Scheme::kGeneric));
  EXPECT_THROW(ParseColumnText("", Scheme::kSegmentation), ParseError);
  EXPECT_THROW(ParseColumnText("\n\n", Scheme::kSegmentation), ParseError);
}

TEST(ParseColumnTest, FinalBlankLineIsOptional) {
  auto a = ParseColumnText("a\tB\nb\tE\n\nc\tS\n", Scheme::kSegmentation);
  auto b = ParseColumnText("a\tB\nb\tE\n\nc\tS\n\n", Scheme::kSegmentation);
  ASSERT_EQ(a.size(), 2u);
  EXPECT_EQ(a[1].tokens, b[1].tokens);
}

TEST(ParseColumnTest, JointLabelSetFromFile) {
  auto path = TempFile("joint.txt", "我\tPN-S\n喜\tVV-B\n欢\tVV-E\n\n");
  Dataset d = ParseColumnFile(path, Scheme::kJoint);
  EXPECT_EQ(d.label_set().size(), 8u);
  EXPECT_EQ(d.label_set().Name(d[0].labels[0]), "PN-S");
  // Max label id is |T| - 1.
  EXPECT_EQ(d.label_set().Id("VV-S"), 7);
}

TEST(ParseColumnTest, AgainstFixedVocabularyMapsUnknownsToZero) {
  auto train = ParseColumnText("a\tS\nb\tS\n\n", Scheme::kSegmentation);
  auto vocab = BuildVocab(train);
  auto path = TempFile("dev.txt", "a\tS\nz\tS\n\n");
  Dataset dev = ParseColumnFile(path, LabelSet::Segmentation(), vocab);
  EXPECT_EQ(dev[0].token_ids, (std::vector<int>{2, Vocab::kUnknown}));
}

TEST(ParseColumnTest, RoundTripIsByteIdentical) {
  const std::string text = "阿\tB\n里\tE\n\n我\tS\n\n";
  auto path = TempFile("rt.txt", text);
  EXPECT_EQ(FormatColumnText(ParseColumnFile(path, Scheme::kSegmentation)), text);
}

TEST(WordSpansTest, Bmes) {
  RawSentence r = WordSpansToBmes({{"我", std::nullopt}, {"喜欢", std::nullopt}});
  EXPECT_EQ(r.tokens, (std::vector<std::string>{"我", "喜", "欢"}));
  EXPECT_EQ(r.labels, (std::vector<std::string>{"S", "B", "E"}));
  r = WordSpansToBmes({{"我", "PN"}});
  EXPECT_EQ(r.labels, (std::vector<std::string>{"PN-S"}));
  r = WordSpansToBmes({{"abcd", "X"}});
  EXPECT_EQ(r.labels, (std::vector<std::string>{"X-B", "X-M", "X-M", "X-E"}));
  EXPECT_THROW(WordSpansToBmes({}), Error);
  EXPECT_THROW(WordSpansToBmes({{"", std::nullopt}}), Error);
  EXPECT_THROW(WordSpansToBmes({{"a", "NN"}, {"b", std::nullopt}}), Error);
}

TEST(SynthTest, Deterministic) {
  const SynthConfig c = SmallSynth();
  auto a = GenerateSynthetic(c, 7);
  auto b = GenerateSynthetic(c, 7);
  EXPECT_EQ(FormatColumnText(a.train), FormatColumnText(b.train));
  EXPECT_EQ(FormatColumnText(a.dev), FormatColumnText(b.dev));
  EXPECT_EQ(FormatColumnText(a.test), FormatColumnText(b.test));
  auto other = GenerateSynthetic(c, 8);
  EXPECT_NE(FormatColumnText(a.train), FormatColumnText(other.train));
}

TEST(SynthTest, MixRatioOneUsesOnlyDomainA) {
  SynthConfig c = SmallSynth();
  c.mix_ratio = 1.0;
  auto corpus = GenerateSynthetic(c, 3);
  for (const Dataset *d : {&corpus.train, &corpus.dev, &corpus.test}) {
    for (const auto &s : d->sentences()) {
      for (const auto &t : s.tokens) ASSERT_EQ(SynthCharDomain(t, c), 0) << t;
    }
  }
  c.mix_ratio = 0.5;
  corpus = GenerateSynthetic(c, 3);
  int seen[2] = {0, 0};
  for (const auto &s : corpus.train.sentences()) ++seen[SynthCharDomain(s.tokens[0], c)];
  EXPECT_GT(seen[0], 0);
  EXPECT_GT(seen[1], 0);
}

TEST(SynthTest, SplitsAreDisjoint) {
  auto corpus = GenerateSynthetic(SmallSynth(), 5);
  std::set<std::vector<std::string>> train;
  for (const auto &s : corpus.train.sentences()) train.insert(s.tokens);
  for (const Dataset *d : {&corpus.dev, &corpus.test}) {
    for (const auto &s : d->sentences()) EXPECT_FALSE(train.count(s.tokens));
  }
  EXPECT_EQ(corpus.train.size(), 200u);
  EXPECT_EQ(corpus.dev.size(), 40u);
  EXPECT_EQ(corpus.test.size(), 40u);
}

TEST(SynthTest, OversizedSplitsFail) {
  SynthConfig c = SmallSynth();
  c.vocab_a = c.vocab_b = 3;
  c.min_words = c.max_words = 1;
  EXPECT_THROW(GenerateSynthetic(c, 1), ConfigError);
}

TEST(SynthTest, ValidationRejectsOutOfRangeFields) {
  SynthConfig c;
  c.noise_rate = 0.2;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = SynthConfig();
  c.num_pos = 3;
  EXPECT_THROW(c.Validate(), ConfigError);
  c = SynthConfig();
  c.mix_ratio = 1.5;
  EXPECT_THROW(c.Validate(), ConfigError);
}

// Generate -> write -> parse is the identity, for both label schemes and
// several seeds; BMES decoding of every generated sentence inverts the
// encoding.
TEST(SynthTest, ParsingIsTotalOverGeneratorOutput) {
  for (Scheme scheme : {Scheme::kSegmentation, Scheme::kJoint}) {
    for (uint64_t seed : {1, 2, 3}) {
      SynthConfig c = SmallSynth();
      c.scheme = scheme;
      auto corpus = GenerateSynthetic(c, seed);
      const std::string text = FormatColumnText(corpus.train);
      auto path = TempFile("gen.txt", text);
      Dataset parsed = ParseColumnFile(path, scheme);
      EXPECT_EQ(FormatColumnText(parsed), text);
      EXPECT_EQ(parsed.label_set(), corpus.train.label_set());
      EXPECT_EQ(parsed.vocab(), corpus.train.vocab());
      for (size_t i = 0; i < parsed.size(); ++i) {
        EXPECT_EQ(parsed[i].token_ids, corpus.train[i].token_ids);
        RawSentence raw{parsed[i].tokens, {}};
        for (int l : parsed[i].labels) raw.labels.push_back(parsed.label_set().Name(l));
        const auto words = BmesToWordSpans(raw);
        const RawSentence again = WordSpansToBmes(words);
        EXPECT_EQ(again.tokens, raw.tokens);
        EXPECT_EQ(again.labels, raw.labels);
        EXPECT_EQ(BmesToWordSpans(again), words);
      }
    }
  }
}

TEST(SynthTest, DevTokensUseTrainVocabulary) {
  auto corpus = GenerateSynthetic(SmallSynth(), 9);
  EXPECT_EQ(corpus.dev.vocab_ptr(), corpus.train.vocab_ptr());
  for (const auto &s : corpus.dev.sentences()) {
    for (size_t i = 0; i < s.size(); ++i) {
      EXPECT_EQ(s.token_ids[i], corpus.train.vocab().Lookup(s.tokens[i]));
    }
  }
}

}  // namespace
}  // namespace tcl
