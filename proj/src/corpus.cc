#include "tcl/corpus.h"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <unordered_set>

#include "tcl/errors.h"
#include "tcl/rng.h"

namespace tcl {

namespace {

constexpr std::array<Bmes, 4> kAllTags{Bmes::kB, Bmes::kM, Bmes::kE, Bmes::kS};

std::optional<Bmes> TagFromChar(char c) {
  switch (c) {
    case 'B': return Bmes::kB;
    case 'M': return Bmes::kM;
    case 'E': return Bmes::kE;
    case 'S': return Bmes::kS;
    default: return std::nullopt;
  }
}

// Splits "<pos>-<tag>" at the last '-'.
bool SplitJointLabel(std::string_view label, std::string_view *pos, Bmes *tag) {
  size_t dash = label.rfind('-');
  if (dash == std::string_view::npos || dash == 0 || dash + 2 != label.size()) {
    return false;
  }
  auto t = TagFromChar(label.back());
  if (!t) return false;
  *pos = label.substr(0, dash);
  *tag = *t;
  return true;
}

bool LabelFitsScheme(std::string_view label, Scheme scheme) {
  switch (scheme) {
    case Scheme::kSegmentation:
      return label.size() == 1 && TagFromChar(label[0]).has_value();
    case Scheme::kJoint: {
      std::string_view pos;
      Bmes tag;
      return SplitJointLabel(label, &pos, &tag);
    }
    case Scheme::kGeneric:
      return !label.empty();
  }
  return false;
}

void AppendUtf8(uint32_t cp, std::string *out) {
  if (cp < 0x80) {
    out->push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out->push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out->push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out->push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out->push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes a single-codepoint UTF-8 string, or returns nullopt.
std::optional<uint32_t> DecodeSingle(std::string_view s) {
  std::vector<std::string> cps;
  try {
    cps = SplitCodepoints(s);
  } catch (const ParseError &) {
    return std::nullopt;
  }
  if (cps.size() != 1) return std::nullopt;
  const auto *b = reinterpret_cast<const unsigned char *>(cps[0].data());
  switch (cps[0].size()) {
    case 1: return b[0];
    case 2: return ((b[0] & 0x1Fu) << 6) | (b[1] & 0x3Fu);
    case 3: return ((b[0] & 0x0Fu) << 12) | ((b[1] & 0x3Fu) << 6) | (b[2] & 0x3Fu);
    default:
      return ((b[0] & 0x07u) << 18) | ((b[1] & 0x3Fu) << 12) |
             ((b[2] & 0x3Fu) << 6) | (b[3] & 0x3Fu);
  }
}

constexpr uint32_t kSynthFirstChar = 0x4E00;

}  // namespace

std::string_view SchemeName(Scheme scheme) {
  switch (scheme) {
    case Scheme::kSegmentation: return "bmes";
    case Scheme::kJoint: return "joint";
    case Scheme::kGeneric: return "generic";
  }
  return "?";
}

Scheme ParseScheme(std::string_view name) {
  if (name == "bmes" || name == "segmentation") return Scheme::kSegmentation;
  if (name == "joint") return Scheme::kJoint;
  if (name == "generic") return Scheme::kGeneric;
  throw ConfigError("unknown label scheme '" + std::string(name) + "'");
}

char BmesChar(Bmes tag) { return "BMES"[static_cast<int>(tag)]; }

// ---------------------------------------------------------------------------
// LabelSet

LabelSet LabelSet::Segmentation() {
  LabelSet set;
  set.scheme_ = Scheme::kSegmentation;
  set.labels_ = {"B", "M", "E", "S"};
  set.BuildIndex();
  return set;
}

LabelSet LabelSet::Joint(std::vector<std::string> pos_tags) {
  std::sort(pos_tags.begin(), pos_tags.end());
  pos_tags.erase(std::unique(pos_tags.begin(), pos_tags.end()), pos_tags.end());
  if (pos_tags.empty()) throw SchemeError("joint label set needs at least one POS tag");
  LabelSet set;
  set.scheme_ = Scheme::kJoint;
  for (const auto &pos : pos_tags) {
    if (pos.empty() || pos.find_first_of("\t\n ") != std::string::npos) {
      throw SchemeError("invalid POS tag '" + pos + "'");
    }
    for (Bmes tag : kAllTags) set.labels_.push_back(pos + "-" + BmesChar(tag));
  }
  set.BuildIndex();
  return set;
}

LabelSet LabelSet::Generic(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  LabelSet set;
  set.scheme_ = Scheme::kGeneric;
  for (const auto &label : labels) {
    if (label.empty()) throw SchemeError("empty label");
  }
  set.labels_ = std::move(labels);
  set.BuildIndex();
  return set;
}

void LabelSet::BuildIndex() {
  index_.clear();
  tags_.clear();
  pos_.clear();
  for (size_t i = 0; i < labels_.size(); ++i) {
    const std::string &label = labels_[i];
    if (!index_.emplace(label, static_cast<int>(i)).second) {
      throw SchemeError("duplicate label '" + label + "'");
    }
    switch (scheme_) {
      case Scheme::kSegmentation:
        if (!LabelFitsScheme(label, scheme_)) {
          throw SchemeError("label '" + label + "' is not a BMES tag");
        }
        tags_.push_back(*TagFromChar(label[0]));
        pos_.emplace_back();
        break;
      case Scheme::kJoint: {
        std::string_view pos;
        Bmes tag;
        if (!SplitJointLabel(label, &pos, &tag)) {
          throw SchemeError("label '" + label + "' is not of the form <pos>-<B|M|E|S>");
        }
        tags_.push_back(tag);
        pos_.emplace_back(pos);
        break;
      }
      case Scheme::kGeneric:
        tags_.push_back(Bmes::kS);
        pos_.emplace_back();
        break;
    }
  }
}

std::optional<int> LabelSet::Find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int LabelSet::Id(std::string_view label) const {
  if (auto id = Find(label)) return *id;
  throw SchemeError("label '" + std::string(label) + "' is not in the " +
                    std::string(SchemeName(scheme_)) + " label set");
}

std::vector<std::string> LabelSet::PosTags() const {
  std::vector<std::string> out;
  for (const auto &p : pos_) {
    if (!p.empty() && (out.empty() || out.back() != p)) out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vocab

Vocab::Vocab() : tokens_{"<unk>", "<pad>"} {}

int Vocab::Add(std::string_view token) {
  auto [it, inserted] =
      index_.emplace(std::string(token), static_cast<int>(tokens_.size()));
  if (inserted) tokens_.emplace_back(token);
  return it->second;
}

int Vocab::Lookup(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnknown : it->second;
}

bool Vocab::Contains(std::string_view token) const {
  return index_.count(std::string(token)) > 0;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<Sentence> sentences, LabelSet label_set,
                 std::shared_ptr<const Vocab> vocab)
    : sentences_(std::move(sentences)),
      label_set_(std::move(label_set)),
      vocab_(std::move(vocab)) {
  if (!vocab_) throw Error("dataset requires a vocabulary");
  const int num_labels = static_cast<int>(label_set_.size());
  const int vocab_size = static_cast<int>(vocab_->size());
  for (size_t i = 0; i < sentences_.size(); ++i) {
    const Sentence &s = sentences_[i];
    if (s.id != static_cast<int>(i)) {
      throw Error("sentence ids must be 0..n-1 (found " + std::to_string(s.id) +
                  " at position " + std::to_string(i) + ")");
    }
    if (s.tokens.empty()) throw Error("sentence " + std::to_string(i) + " is empty");
    if (s.labels.size() != s.tokens.size() || s.token_ids.size() != s.tokens.size()) {
      throw Error("sentence " + std::to_string(i) + " has misaligned tokens and labels");
    }
    for (int label : s.labels) {
      if (label < 0 || label >= num_labels) {
        throw SchemeError("sentence " + std::to_string(i) + " has label id " +
                          std::to_string(label) + " outside the label set");
      }
    }
    for (int id : s.token_ids) {
      if (id < 0 || id >= vocab_size) {
        throw Error("sentence " + std::to_string(i) + " has token id outside the vocabulary");
      }
    }
  }
}

size_t Dataset::token_count() const {
  size_t n = 0;
  for (const auto &s : sentences_) n += s.size();
  return n;
}

Dataset Dataset::Reencode(std::shared_ptr<const Vocab> vocab) const {
  std::vector<Sentence> out = sentences_;
  for (auto &s : out) {
    for (size_t i = 0; i < s.tokens.size(); ++i) s.token_ids[i] = vocab->Lookup(s.tokens[i]);
  }
  return Dataset(std::move(out), label_set_, std::move(vocab));
}

LabelSet InferLabelSet(const std::vector<RawSentence> &raw, Scheme scheme) {
  switch (scheme) {
    case Scheme::kSegmentation:
      return LabelSet::Segmentation();
    case Scheme::kJoint: {
      std::set<std::string> pos;
      for (const auto &s : raw) {
        for (const auto &label : s.labels) {
          std::string_view p;
          Bmes tag;
          if (!SplitJointLabel(label, &p, &tag)) {
            throw SchemeError("label '" + label + "' is not of the form <pos>-<B|M|E|S>");
          }
          pos.emplace(p);
        }
      }
      return LabelSet::Joint({pos.begin(), pos.end()});
    }
    case Scheme::kGeneric: {
      std::set<std::string> labels;
      for (const auto &s : raw) labels.insert(s.labels.begin(), s.labels.end());
      return LabelSet::Generic({labels.begin(), labels.end()});
    }
  }
  throw SchemeError("unknown scheme");
}

std::shared_ptr<Vocab> BuildVocab(const std::vector<RawSentence> &raw) {
  auto vocab = std::make_shared<Vocab>();
  for (const auto &s : raw) {
    for (const auto &t : s.tokens) vocab->Add(t);
  }
  return vocab;
}

Dataset MakeDataset(const std::vector<RawSentence> &raw, LabelSet label_set,
                    std::shared_ptr<const Vocab> vocab) {
  std::vector<Sentence> sentences;
  sentences.reserve(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    const RawSentence &r = raw[i];
    if (r.tokens.size() != r.labels.size()) {
      throw Error("sentence " + std::to_string(i) + " has misaligned tokens and labels");
    }
    Sentence s;
    s.id = static_cast<int>(i);
    s.tokens = r.tokens;
    s.labels.reserve(r.labels.size());
    s.token_ids.reserve(r.tokens.size());
    for (const auto &label : r.labels) s.labels.push_back(label_set.Id(label));
    for (const auto &t : r.tokens) s.token_ids.push_back(vocab->Lookup(t));
    sentences.push_back(std::move(s));
  }
  return Dataset(std::move(sentences), std::move(label_set), std::move(vocab));
}

// ---------------------------------------------------------------------------
// Column format

std::vector<RawSentence> ParseColumnText(std::string_view text, Scheme scheme) {
  if (text.empty()) throw ParseError("empty corpus file");
  std::vector<RawSentence> out;
  RawSentence current;
  size_t line_no = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (line.empty()) {
      if (!current.tokens.empty()) out.push_back(std::move(current));
      current = RawSentence();
      continue;
    }
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos || line.find('\t', tab + 1) != std::string_view::npos) {
      throw ParseError("expected exactly two tab-separated columns", line_no);
    }
    std::string_view token = line.substr(0, tab);
    std::string_view label = line.substr(tab + 1);
    if (token.empty()) throw ParseError("empty token", line_no);
    if (label.empty()) throw ParseError("empty label", line_no);
    if (scheme != Scheme::kGeneric && !DecodeSingle(token)) {
      throw ParseError("token '" + std::string(token) +
                           "' is not a single character",
                       line_no);
    }
    if (!LabelFitsScheme(label, scheme)) {
      throw SchemeError("line " + std::to_string(line_no) + ": label '" +
                        std::string(label) + "' does not fit the " +
                        std::string(SchemeName(scheme)) + " scheme");
    }
    current.tokens.emplace_back(token);
    current.labels.emplace_back(label);
  }
  if (!current.tokens.empty()) out.push_back(std::move(current));
  if (out.empty()) throw ParseError("corpus contains no sentences");
  return out;
}

namespace {

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

Dataset ParseColumnFile(const std::filesystem::path &path, Scheme scheme) {
  auto raw = ParseColumnText(ReadFile(path), scheme);
  LabelSet labels = InferLabelSet(raw, scheme);
  auto vocab = BuildVocab(raw);
  return MakeDataset(raw, std::move(labels), std::move(vocab));
}

Dataset ParseColumnFile(const std::filesystem::path &path,
                        const LabelSet &label_set,
                        std::shared_ptr<const Vocab> vocab) {
  auto raw = ParseColumnText(ReadFile(path), label_set.scheme());
  return MakeDataset(raw, label_set, std::move(vocab));
}

std::string FormatColumnText(const Dataset &data) {
  std::string out;
  for (const auto &s : data.sentences()) {
    for (size_t i = 0; i < s.size(); ++i) {
      out += s.tokens[i];
      out += '\t';
      out += data.label_set().Name(s.labels[i]);
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

void WriteColumnFile(const Dataset &data, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << FormatColumnText(data);
  if (!out) throw Error("write failed for " + path.string());
}

std::vector<std::string> SplitCodepoints(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    const auto lead = static_cast<unsigned char>(text[i]);
    size_t len;
    uint32_t cp;
    if (lead < 0x80) {
      len = 1;
      cp = lead;
    } else if ((lead & 0xE0) == 0xC0) {
      len = 2;
      cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
      len = 3;
      cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
      len = 4;
      cp = lead & 0x07;
    } else {
      throw ParseError("invalid UTF-8 lead byte");
    }
    if (i + len > text.size()) throw ParseError("truncated UTF-8 sequence");
    for (size_t k = 1; k < len; ++k) {
      const auto c = static_cast<unsigned char>(text[i + k]);
      if ((c & 0xC0) != 0x80) throw ParseError("invalid UTF-8 continuation byte");
      cp = (cp << 6) | (c & 0x3F);
    }
    static constexpr uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      throw ParseError("invalid UTF-8 code point");
    }
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

// ---------------------------------------------------------------------------
// BMES word encoding

RawSentence WordSpansToBmes(const std::vector<Word> &words) {
  if (words.empty()) throw Error("word list is empty");
  const bool joint = words.front().pos.has_value();
  RawSentence out;
  for (const auto &w : words) {
    if (w.pos.has_value() != joint) {
      throw Error("either every word or no word must carry a POS tag");
    }
    auto chars = SplitCodepoints(w.surface);
    if (chars.empty()) throw Error("word surface is empty");
    const std::string prefix = joint ? *w.pos + "-" : std::string();
    for (size_t i = 0; i < chars.size(); ++i) {
      Bmes tag = chars.size() == 1      ? Bmes::kS
                 : i == 0               ? Bmes::kB
                 : i + 1 == chars.size() ? Bmes::kE
                                         : Bmes::kM;
      out.tokens.push_back(std::move(chars[i]));
      out.labels.push_back(prefix + BmesChar(tag));
    }
  }
  return out;
}

std::vector<Word> BmesToWordSpans(const RawSentence &sentence) {
  std::vector<Word> out;
  bool open = false;
  for (size_t i = 0; i < sentence.tokens.size(); ++i) {
    const std::string &label = sentence.labels.at(i);
    std::optional<std::string> pos;
    Bmes tag;
    if (label.size() == 1 && TagFromChar(label[0])) {
      tag = *TagFromChar(label[0]);
    } else {
      std::string_view p;
      if (!SplitJointLabel(label, &p, &tag)) {
        throw SchemeError("label '" + label + "' is not a BMES label");
      }
      pos = std::string(p);
    }
    if (!open || tag == Bmes::kB || tag == Bmes::kS) {
      out.push_back(Word{"", pos});
    }
    out.back().surface += sentence.tokens[i];
    open = tag == Bmes::kB || tag == Bmes::kM;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic corpus

void SynthConfig::Validate() const {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) throw ConfigError("synth config: " + what);
  };
  require(vocab_a >= 1 && vocab_b >= 1, "vocab sizes must be positive");
  require(chars_a >= 2 && chars_b >= 2, "character inventories need at least 2 characters");
  require(chars_a + chars_b <= 20000, "character inventories exceed 20000 characters");
  double total = 0;
  for (double p : word_length_probs) {
    require(p >= 0, "word length probabilities must be non-negative");
    total += p;
  }
  require(total > 0, "word length probabilities must not all be zero");
  require(num_pos >= 4 && num_pos <= 8, "num_pos must be in [4, 8]");
  require(min_words >= 1 && min_words <= max_words, "invalid sentence length range");
  require(train_size >= 1 && dev_size >= 1 && test_size >= 1, "split sizes must be positive");
  require(noise_rate >= 0 && noise_rate <= 0.1, "noise_rate must be in [0, 0.1]");
  require(mix_ratio >= 0 && mix_ratio <= 1, "mix_ratio must be in [0, 1]");
  require(scheme != Scheme::kGeneric, "the generator emits bmes or joint labels only");
}

std::vector<std::string> SynthPosTags(int num_pos) {
  static const char *kTags[] = {"NN", "VV", "AD", "JJ", "PN", "P", "CD", "DT"};
  if (num_pos < 1 || num_pos > 8) throw ConfigError("num_pos must be in [1, 8]");
  return {kTags, kTags + num_pos};
}

int SynthCharDomain(std::string_view ch, const SynthConfig &config) {
  auto cp = DecodeSingle(ch);
  if (!cp || *cp < kSynthFirstChar) return -1;
  uint32_t offset = *cp - kSynthFirstChar;
  if (offset < static_cast<uint32_t>(config.chars_a)) return 0;
  if (offset < static_cast<uint32_t>(config.chars_a + config.chars_b)) return 1;
  return -1;
}

namespace {

struct LexiconEntry {
  std::string surface;
  int pos;
};

// Draws an index from unnormalized cumulative weights.
size_t SampleCumulative(const std::vector<double> &cumulative, Rng &rng) {
  double u = rng.Uniform() * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<size_t>(it - cumulative.begin(), cumulative.size() - 1);
}

std::vector<LexiconEntry> BuildLexicon(int size, uint32_t first_char, int num_chars,
                                       const SynthConfig &config, Rng &rng) {
  std::vector<double> length_cdf;
  double acc = 0;
  for (double p : config.word_length_probs) length_cdf.push_back(acc += p);

  std::vector<LexiconEntry> lexicon;
  std::unordered_set<std::string> seen;
  const long budget = 200L * size + 1000;
  for (long attempt = 0; attempt < budget && static_cast<int>(lexicon.size()) < size;
       ++attempt) {
    size_t len = SampleCumulative(length_cdf, rng) + 1;
    std::string surface;
    for (size_t i = 0; i < len; ++i) {
      AppendUtf8(first_char + static_cast<uint32_t>(rng.Below(num_chars)), &surface);
    }
    int pos = static_cast<int>(rng.Below(config.num_pos));
    if (seen.insert(surface).second) lexicon.push_back({std::move(surface), pos});
  }
  if (static_cast<int>(lexicon.size()) < size) {
    throw ConfigError("synth config: cannot build " + std::to_string(size) +
                      " distinct words from " + std::to_string(num_chars) + " characters");
  }
  return lexicon;
}

using WordSeq = std::vector<std::pair<std::string, int>>;

// Applies per-word corruption: a POS flip, a boundary split, or a merge with
// the following word.
WordSeq Corrupt(const WordSeq &words, const SynthConfig &config, Rng &rng) {
  WordSeq out;
  for (size_t i = 0; i < words.size(); ++i) {
    const auto &[surface, pos] = words[i];
    if (!rng.Bernoulli(config.noise_rate)) {
      out.push_back(words[i]);
      continue;
    }
    auto chars = SplitCodepoints(surface);
    const bool can_merge = i + 1 < words.size();
    const bool can_split = chars.size() > 1;
    uint64_t kind = rng.Below(3);
    if (kind == 1 && !can_split) kind = can_merge ? 2 : 0;
    if (kind == 2 && !can_merge) kind = can_split ? 1 : 0;
    if (kind == 0) {
      int flipped = static_cast<int>((pos + 1 + rng.Below(config.num_pos - 1)) % config.num_pos);
      out.emplace_back(surface, flipped);
    } else if (kind == 1) {
      size_t cut = 1 + rng.Below(chars.size() - 1);
      std::string left, right;
      for (size_t k = 0; k < chars.size(); ++k) (k < cut ? left : right) += chars[k];
      out.emplace_back(std::move(left), pos);
      out.emplace_back(std::move(right), pos);
    } else {
      out.emplace_back(surface + words[i + 1].first, pos);
      ++i;
    }
  }
  return out;
}

RawSentence ToRaw(const WordSeq &words, const std::vector<std::string> &pos_names,
                  Scheme scheme) {
  std::vector<Word> ws;
  ws.reserve(words.size());
  for (const auto &[surface, pos] : words) {
    ws.push_back(Word{surface, scheme == Scheme::kJoint
                                   ? std::optional<std::string>(pos_names[pos])
                                   : std::nullopt});
  }
  return WordSpansToBmes(ws);
}

}  // namespace

SynthCorpus GenerateSynthetic(const SynthConfig &config, uint64_t seed) {
  config.Validate();
  const auto pos_names = SynthPosTags(config.num_pos);

  Rng lex_rng(DeriveSeed(seed, {1}));
  std::array<std::vector<LexiconEntry>, 2> lexicons = {
      BuildLexicon(config.vocab_a, kSynthFirstChar, config.chars_a, config, lex_rng),
      BuildLexicon(config.vocab_b, kSynthFirstChar + config.chars_a, config.chars_b,
                   config, lex_rng)};
  // Zipfian word frequencies, weight 1/(rank+1).
  std::array<std::vector<double>, 2> zipf;
  for (int d = 0; d < 2; ++d) {
    double acc = 0;
    for (size_t r = 0; r < lexicons[d].size(); ++r) {
      zipf[d].push_back(acc += 1.0 / static_cast<double>(r + 1));
    }
  }

  const size_t total = static_cast<size_t>(config.train_size) + config.dev_size + config.test_size;
  Rng sent_rng(DeriveSeed(seed, {2}));
  std::vector<WordSeq> population;
  std::unordered_set<std::string> seen;
  const size_t budget = 50 * total + 1000;
  for (size_t attempt = 0; attempt < budget && population.size() < total; ++attempt) {
    const int domain = sent_rng.Uniform() < config.mix_ratio ? 0 : 1;
    const int n_words =
        config.min_words + static_cast<int>(sent_rng.Below(config.max_words - config.min_words + 1));
    WordSeq words;
    std::string key;
    for (int w = 0; w < n_words; ++w) {
      const auto &entry = lexicons[domain][SampleCumulative(zipf[domain], sent_rng)];
      words.emplace_back(entry.surface, entry.pos);
      key += entry.surface;
    }
    // Splits stay disjoint at the character-sequence level.
    if (seen.insert(key).second) population.push_back(std::move(words));
  }
  if (population.size() < total) {
    throw ConfigError("synth config: split sizes (" + std::to_string(total) +
                      ") exceed the distinct sentences the generator produced (" +
                      std::to_string(population.size()) + ")");
  }

  Rng noise_rng(DeriveSeed(seed, {3}));
  std::vector<RawSentence> train_raw, dev_raw, test_raw;
  for (size_t i = 0; i < total; ++i) {
    if (i < static_cast<size_t>(config.train_size)) {
      const WordSeq noisy =
          config.noise_rate > 0 ? Corrupt(population[i], config, noise_rng) : population[i];
      train_raw.push_back(ToRaw(noisy, pos_names, config.scheme));
    } else if (i < static_cast<size_t>(config.train_size + config.dev_size)) {
      dev_raw.push_back(ToRaw(population[i], pos_names, config.scheme));
    } else {
      test_raw.push_back(ToRaw(population[i], pos_names, config.scheme));
    }
  }

  LabelSet labels = config.scheme == Scheme::kJoint ? LabelSet::Joint(pos_names)
                                                    : LabelSet::Segmentation();
  std::shared_ptr<const Vocab> vocab = BuildVocab(train_raw);
  return SynthCorpus{MakeDataset(train_raw, labels, vocab),
                     MakeDataset(dev_raw, labels, vocab),
                     MakeDataset(test_raw, labels, vocab)};
}

}  // namespace tcl
