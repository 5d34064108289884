#ifndef TCL_CORPUS_H_
#define TCL_CORPUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tcl {

enum class Scheme { kSegmentation, kJoint, kGeneric };

// "bmes", "joint" or "generic".
std::string_view SchemeName(Scheme scheme);
Scheme ParseScheme(std::string_view name);

// Word-boundary tag of a BMES or joint label.
enum class Bmes { kB = 0, kM = 1, kE = 2, kS = 3 };

char BmesChar(Bmes tag);

// The ordered tag inventory. Label id == position in labels().
//
// Canonical orderings:
//   segmentation: B, M, E, S
//   joint:        POS tags sorted lexicographically, then B, M, E, S within
//                 each, spelled "<pos>-<tag>"
//   generic:      labels sorted lexicographically
class LabelSet {
 public:
  LabelSet() = default;

  static LabelSet Segmentation();
  static LabelSet Joint(std::vector<std::string> pos_tags);
  static LabelSet Generic(std::vector<std::string> labels);

  Scheme scheme() const { return scheme_; }
  const std::vector<std::string> &labels() const { return labels_; }
  size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  std::optional<int> Find(std::string_view label) const;
  // Throws SchemeError for labels outside the set.
  int Id(std::string_view label) const;
  const std::string &Name(int id) const { return labels_.at(id); }

  // Only meaningful for segmentation and joint schemes.
  Bmes Tag(int id) const { return tags_.at(id); }
  // Empty for the segmentation scheme.
  const std::string &Pos(int id) const { return pos_.at(id); }
  // Distinct POS tags in canonical order (joint scheme only).
  std::vector<std::string> PosTags() const;

  bool operator==(const LabelSet &other) const {
    return scheme_ == other.scheme_ && labels_ == other.labels_;
  }

 private:
  Scheme scheme_ = Scheme::kSegmentation;
  std::vector<std::string> labels_;
  std::vector<Bmes> tags_;
  std::vector<std::string> pos_;
  std::unordered_map<std::string, int> index_;

  void BuildIndex();
};

// Token vocabulary. Ids 0 and 1 are reserved for unknown tokens and
// out-of-sentence padding; real tokens start at 2.
class Vocab {
 public:
  static constexpr int kUnknown = 0;
  static constexpr int kBoundary = 1;

  Vocab();

  // Returns the existing id if the token is already present.
  int Add(std::string_view token);
  // kUnknown when absent.
  int Lookup(std::string_view token) const;
  bool Contains(std::string_view token) const;

  size_t size() const { return tokens_.size(); }
  // Entry i is the token with id i. Reserved entries are "<unk>" and "<pad>"
  // but are never matched by Lookup().
  const std::vector<std::string> &tokens() const { return tokens_; }

  bool operator==(const Vocab &other) const { return tokens_ == other.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct Sentence {
  int id = 0;
  std::vector<std::string> tokens;
  std::vector<int> labels;
  // tokens encoded against the owning dataset's vocabulary.
  std::vector<int> token_ids;

  size_t size() const { return tokens.size(); }
};

// Sentences, their label inventory and the vocabulary they are encoded with.
// Immutable once constructed.
class Dataset {
 public:
  Dataset() = default;
  // Validates the sentence invariants (non-empty, aligned, labels in range,
  // ids 0..n-1, token ids in range of the vocabulary).
  Dataset(std::vector<Sentence> sentences, LabelSet label_set,
          std::shared_ptr<const Vocab> vocab);

  const std::vector<Sentence> &sentences() const { return sentences_; }
  const Sentence &operator[](size_t i) const { return sentences_.at(i); }
  size_t size() const { return sentences_.size(); }
  bool empty() const { return sentences_.empty(); }
  size_t token_count() const;

  const LabelSet &label_set() const { return label_set_; }
  const Vocab &vocab() const { return *vocab_; }
  std::shared_ptr<const Vocab> vocab_ptr() const { return vocab_; }

  // Same sentences encoded against another vocabulary; tokens missing from
  // it map to Vocab::kUnknown.
  Dataset Reencode(std::shared_ptr<const Vocab> vocab) const;

 private:
  std::vector<Sentence> sentences_;
  LabelSet label_set_;
  std::shared_ptr<const Vocab> vocab_;
};

// One sentence before label ids are assigned.
struct RawSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> labels;
};

// Builds a label set for the scheme from the labels that occur in raw.
LabelSet InferLabelSet(const std::vector<RawSentence> &raw, Scheme scheme);

// Builds a vocabulary from raw tokens in order of first occurrence.
std::shared_ptr<Vocab> BuildVocab(const std::vector<RawSentence> &raw);

// Assigns ids 0..n-1 and encodes labels and tokens.
Dataset MakeDataset(const std::vector<RawSentence> &raw, LabelSet label_set,
                    std::shared_ptr<const Vocab> vocab);

// Column format: "<token>\t<label>\n" per token, a blank line after each
// sentence. The final blank line is optional on input.
std::vector<RawSentence> ParseColumnText(std::string_view text, Scheme scheme);

Dataset ParseColumnFile(const std::filesystem::path &path, Scheme scheme);
// Parses against a fixed label set and vocabulary (dev/test data, or data
// scored with a checkpoint).
Dataset ParseColumnFile(const std::filesystem::path &path,
                        const LabelSet &label_set,
                        std::shared_ptr<const Vocab> vocab);

std::string FormatColumnText(const Dataset &data);
void WriteColumnFile(const Dataset &data, const std::filesystem::path &path);

// Splits a UTF-8 string into unicode scalar values. Throws ParseError on
// invalid encodings.
std::vector<std::string> SplitCodepoints(std::string_view text);

struct Word {
  std::string surface;
  std::optional<std::string> pos;

  bool operator==(const Word &) const = default;
};

// Character-level BMES encoding of a word sequence. Words carrying a POS
// produce joint labels "<pos>-<tag>". Either every word has a POS or none.
RawSentence WordSpansToBmes(const std::vector<Word> &words);
// Inverse of WordSpansToBmes for well-formed label sequences.
std::vector<Word> BmesToWordSpans(const RawSentence &sentence);

struct SynthConfig {
  // Word lexicon and character inventory sizes of the two sub-domains.
  int vocab_a = 400;
  int vocab_b = 400;
  int chars_a = 160;
  int chars_b = 160;
  // Probability of word lengths 1, 2 and 3.
  std::array<double, 3> word_length_probs{0.35, 0.45, 0.20};
  int num_pos = 6;
  // Sentence length range, in words.
  int min_words = 4;
  int max_words = 12;
  int train_size = 4000;
  int dev_size = 500;
  int test_size = 500;
  // Per-word corruption rate applied to the training split.
  double noise_rate = 0.02;
  // Fraction of sentences drawn from sub-domain A.
  double mix_ratio = 0.7;
  Scheme scheme = Scheme::kSegmentation;

  // Throws ConfigError.
  void Validate() const;
};

struct SynthCorpus {
  Dataset train;
  Dataset dev;
  Dataset test;
};

// Deterministic for a given (config, seed). Dev and test are encoded against
// the training vocabulary.
SynthCorpus GenerateSynthetic(const SynthConfig &config, uint64_t seed);

// Sub-domain (0 = A, 1 = B) of a generated character, -1 if it is not one.
int SynthCharDomain(std::string_view ch, const SynthConfig &config);

// POS inventory used by the generator.
std::vector<std::string> SynthPosTags(int num_pos);

}  // namespace tcl

#endif  // TCL_CORPUS_H_
