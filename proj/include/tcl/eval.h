#ifndef TCL_EVAL_H_
#define TCL_EVAL_H_

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tcl/corpus.h"
#include "tcl/tagger.h"

namespace tcl {

// Word span [start, end) with the POS of its first token (empty for plain
// segmentation labels).
struct WordSpan {
  int start = 0;
  int end = 0;
  std::string pos;

  auto operator<=>(const WordSpan &) const = default;
};

using SpanSet = std::vector<WordSpan>;

// Greedy left-to-right decoding that repairs ill-formed sequences: an M or E
// with no open word starts one, B and S always start one, and an open B/M run
// is closed at the end. The result tiles [0, labels.size()).
SpanSet DecodeBmes(std::span<const int> labels, const LabelSet &label_set);

struct Prf {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

struct SpanCounts {
  size_t correct = 0;
  size_t predicted = 0;
  size_t gold = 0;

  SpanCounts &operator+=(const SpanCounts &o) {
    correct += o.correct;
    predicted += o.predicted;
    gold += o.gold;
    return *this;
  }
  Prf Score() const;
};

// A predicted span is correct iff gold holds the same (start, end) and, with
// joint set, the same POS. Throws if the span sets cover different lengths.
SpanCounts MatchSpans(const SpanSet &pred, const SpanSet &gold, bool joint);
Prf F1(const SpanSet &pred, const SpanSet &gold, bool joint);

struct EvalReport {
  Prf cws;
  // Present for the joint scheme.
  std::optional<Prf> joint;
  size_t sentences = 0;
  size_t tokens = 0;
};

// Micro-averaged scores of predicted label sequences against data's gold.
EvalReport EvaluateLabels(const std::vector<std::vector<int>> &predicted, const Dataset &data);

// Argmax decoding with dropout off, then EvaluateLabels.
EvalReport Evaluate(const TaggerParams &params, const Dataset &data);

}  // namespace tcl

#endif  // TCL_EVAL_H_
