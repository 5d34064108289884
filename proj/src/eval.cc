#include "tcl/eval.h"

#include <algorithm>

#include "tcl/errors.h"

namespace tcl {

SpanSet DecodeBmes(std::span<const int> labels, const LabelSet &label_set) {
  if (label_set.scheme() == Scheme::kGeneric) {
    throw SchemeError("BMES decoding needs a bmes or joint label set");
  }
  SpanSet spans;
  bool open = false;
  for (size_t i = 0; i < labels.size(); ++i) {
    const Bmes tag = label_set.Tag(labels[i]);
    if (!open || tag == Bmes::kB || tag == Bmes::kS) {
      spans.push_back(WordSpan{static_cast<int>(i), static_cast<int>(i) + 1,
                               label_set.Pos(labels[i])});
    } else {
      spans.back().end = static_cast<int>(i) + 1;
    }
    open = tag == Bmes::kB || tag == Bmes::kM;
  }
  return spans;
}

Prf SpanCounts::Score() const {
  Prf out;
  out.precision = predicted ? static_cast<double>(correct) / predicted : 0.0;
  out.recall = gold ? static_cast<double>(correct) / gold : 0.0;
  const double s = out.precision + out.recall;
  out.f1 = s > 0 ? 2 * out.precision * out.recall / s : 0.0;
  return out;
}

SpanCounts MatchSpans(const SpanSet &pred, const SpanSet &gold, bool joint) {
  const int pred_len = pred.empty() ? 0 : pred.back().end;
  const int gold_len = gold.empty() ? 0 : gold.back().end;
  if (pred_len != gold_len) {
    throw Error("span sets cover different lengths (" + std::to_string(pred_len) + " vs " +
                std::to_string(gold_len) + ")");
  }
  SpanCounts counts{0, pred.size(), gold.size()};
  // Both sets are sorted by start and non-overlapping.
  size_t g = 0;
  for (const WordSpan &p : pred) {
    while (g < gold.size() && gold[g].start < p.start) ++g;
    if (g < gold.size() && gold[g].start == p.start && gold[g].end == p.end &&
        (!joint || gold[g].pos == p.pos)) {
      ++counts.correct;
    }
  }
  return counts;
}

Prf F1(const SpanSet &pred, const SpanSet &gold, bool joint) {
  return MatchSpans(pred, gold, joint).Score();
}

EvalReport EvaluateLabels(const std::vector<std::vector<int>> &predicted, const Dataset &data) {
  if (data.empty()) throw Error("cannot evaluate an empty data set");
  if (predicted.size() != data.size()) {
    throw Error("prediction count does not match the data set");
  }
  const LabelSet &labels = data.label_set();
  const bool joint = labels.scheme() == Scheme::kJoint;
  SpanCounts cws, joint_counts;
  EvalReport report;
  for (size_t i = 0; i < data.size(); ++i) {
    const Sentence &s = data[i];
    if (predicted[i].size() != s.size()) {
      throw Error("prediction for sentence " + std::to_string(s.id) + " has the wrong length");
    }
    const SpanSet gold = DecodeBmes(s.labels, labels);
    const SpanSet pred = DecodeBmes(predicted[i], labels);
    cws += MatchSpans(pred, gold, false);
    if (joint) joint_counts += MatchSpans(pred, gold, true);
    report.tokens += s.size();
  }
  report.sentences = data.size();
  report.cws = cws.Score();
  if (joint) report.joint = joint_counts.Score();
  return report;
}

EvalReport Evaluate(const TaggerParams &params, const Dataset &data) {
  std::vector<std::vector<int>> predicted;
  predicted.reserve(data.size());
  for (const auto &s : data.sentences()) predicted.push_back(Predict(params, s));
  return EvaluateLabels(predicted, data);
}

}  // namespace tcl
