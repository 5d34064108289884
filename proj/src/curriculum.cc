#include "tcl/curriculum.h"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <unordered_set>

#include "tcl/errors.h"
#include "tcl/eval.h"

namespace tcl {

namespace {

// Stream keys under the run seed.
enum : uint64_t {
  kTeacherInit = 11,
  kTeacherTrain = 12,
  kStudentInit = 21,
  kStudentTrain = 22,
  kScoring = 31,
};

using Clock = std::chrono::steady_clock;

double MillisSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<const Sentence *> Gather(const Dataset &data, const std::vector<int> &ids) {
  std::vector<const Sentence *> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(&data[id]);
  return out;
}

void CheckRunInputs(const Dataset &train, const Dataset &dev) {
  if (train.empty()) throw Error("training data is empty");
  if (dev.empty()) throw Error("dev data is empty");
  if (!(train.label_set() == dev.label_set())) {
    throw ShapeError("train and dev use different label sets");
  }
  if (train.vocab_ptr() != dev.vocab_ptr() && !(train.vocab() == dev.vocab())) {
    throw ShapeError("dev data is not encoded with the training vocabulary");
  }
}

TaggerParams InitTagger(const Dataset &train, const RunConfig &cfg, uint64_t stream) {
  Rng rng(DeriveSeed(cfg.seed, {stream}));
  return TaggerParams::Init(cfg.tagger, train.vocab().size(), train.label_set().size(), rng);
}

// Tracks dev scores and keeps the best parameters.
class DevTracker {
 public:
  explicit DevTracker(const Dataset &dev) : dev_(dev) {}

  void Observe(const TaggerParams &params, int epoch, EpochRecord *record) {
    const EvalReport report = Evaluate(params, dev_);
    record->dev_f1_cws = report.cws.f1;
    if (report.joint) record->dev_f1_joint = report.joint->f1;
    const double primary = report.joint ? report.joint->f1 : report.cws.f1;
    if (epoch >= 0 && (best_epoch_ < 0 || primary > best_f1_)) {
      best_f1_ = primary;
      best_epoch_ = epoch;
      best_ = params;
    }
  }

  double best_f1() const { return best_f1_; }
  int best_epoch() const { return best_epoch_; }
  TaggerParams &best() { return best_; }

 private:
  const Dataset &dev_;
  double best_f1_ = 0;
  int best_epoch_ = -1;
  TaggerParams best_;
};

}  // namespace

void RunConfig::Validate(bool curriculum) const {
  if (e0 < 1) throw ConfigError("run config: e0 must be >= 1");
  if (es < 1) throw ConfigError("run config: es must be >= 1");
  if (curriculum && e0 >= es) {
    throw ConfigError("run config: teacher epochs e0 must be fewer than student epochs es");
  }
  if (score_threads < 1) throw ConfigError("run config: score_threads must be >= 1");
  schedule.Validate();
  metric.Validate();
  tagger.Validate();
}

// ---------------------------------------------------------------------------
// CurriculumState

CurriculumState::CurriculumState(std::vector<int> ranked, size_t initial_size) {
  initial_size = std::min(initial_size, ranked.size());
  selected_.assign(ranked.begin(), ranked.begin() + initial_size);
  remaining_.assign(ranked.begin() + initial_size, ranked.end());
}

void CurriculumState::Rerank(std::vector<int> ranked_remaining) {
  std::vector<int> a = remaining_, b = ranked_remaining;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw std::logic_error("re-ranked pool is not a permutation of the remaining ids");
  remaining_ = std::move(ranked_remaining);
}

size_t CurriculumState::Admit(size_t target) {
  if (target <= selected_.size()) return 0;
  const size_t n = std::min(target - selected_.size(), remaining_.size());
  selected_.insert(selected_.end(), remaining_.begin(), remaining_.begin() + n);
  remaining_.erase(remaining_.begin(), remaining_.begin() + n);
  return n;
}

std::vector<std::string> CurriculumState::Violations(size_t corpus_size) const {
  std::vector<std::string> out;
  std::vector<int> seen(corpus_size, 0);
  auto visit = [&](const std::vector<int> &ids, const char *which) {
    for (int id : ids) {
      if (id < 0 || static_cast<size_t>(id) >= corpus_size) {
        out.push_back(std::string(which) + " holds out-of-range id " + std::to_string(id));
      } else if (seen[id]++) {
        out.push_back("id " + std::to_string(id) + " appears more than once");
      }
    }
  };
  visit(selected_, "selected");
  visit(remaining_, "remaining");
  for (size_t i = 0; i < corpus_size; ++i) {
    if (!seen[i]) out.push_back("id " + std::to_string(i) + " is missing");
  }
  return out;
}

std::vector<int> RankAscending(std::span<const DifficultyScore> scores) {
  std::unordered_set<int> ids;
  for (const auto &s : scores) {
    if (!ids.insert(s.sentence_id).second) {
      throw Error("duplicate sentence id " + std::to_string(s.sentence_id) + " in scores");
    }
  }
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&scores](size_t a, size_t b) {
    if (scores[a].score != scores[b].score) return scores[a].score < scores[b].score;
    return scores[a].sentence_id < scores[b].sentence_id;
  });
  std::vector<int> out;
  out.reserve(order.size());
  for (size_t i : order) out.push_back(scores[i].sentence_id);
  return out;
}

// ---------------------------------------------------------------------------
// Runs

TaggerParams TrainTeacher(const Dataset &train, const RunConfig &cfg) {
  cfg.Validate(true);
  if (train.empty()) throw Error("training data is empty");
  TaggerParams teacher = InitTagger(train, cfg, kTeacherInit);
  Rng rng(DeriveSeed(cfg.seed, {kTeacherTrain}));
  for (int e = 0; e < cfg.e0; ++e) TrainOneEpoch(teacher, train, cfg.tagger, rng);
  return teacher;
}

RunResult RunTcl(const Dataset &train, const Dataset &dev, const RunConfig &cfg,
                 const EpochObserver &observer) {
  cfg.Validate(true);
  CheckRunInputs(train, dev);
  const auto run_start = Clock::now();
  const size_t corpus = train.size();
  ScoringOptions scoring{cfg.tagger.dropout_rate, cfg.score_threads};
  Rng score_rng(DeriveSeed(cfg.seed, {kScoring}));
  RunResult result;
  DevTracker tracker(dev);
  uint64_t visits = 0;

  // Data level: teacher warm-up and initial ranking.
  auto stage_start = Clock::now();
  TaggerParams teacher = InitTagger(train, cfg, kTeacherInit);
  {
    Rng rng(DeriveSeed(cfg.seed, {kTeacherTrain}));
    EpochRecord rec;
    rec.stage = "teacher";
    rec.epoch = -1;
    for (int e = 0; e < cfg.e0; ++e) {
      rec.train_loss = TrainOneEpoch(teacher, train, cfg.tagger, rng);
      visits += corpus;
    }
    rec.selected_size = corpus;
    rec.cumulative_sentence_visits = visits;
    tracker.Observe(teacher, -1, &rec);
    rec.wall_ms = MillisSince(stage_start);
    result.log.records.push_back(rec);
  }
  result.log.summary.teacher_visits = visits;

  const auto teacher_scores = ScoreDataset(&teacher, train, cfg.metric, scoring, score_rng);
  CurriculumState state(RankAscending(teacher_scores), TargetSize(cfg.schedule, 0, corpus));
  state.lambda = LambdaAt(cfg.schedule, 0);

  // Model level: self-paced growth of the student's training set.
  TaggerParams student = InitTagger(train, cfg, kStudentInit);
  Rng train_rng(DeriveSeed(cfg.seed, {kStudentTrain}));
  for (int e = 0; e < cfg.es; ++e) {
    stage_start = Clock::now();
    if (state.lambda < 1.0 && state.selected().size() != TargetSize(cfg.schedule, e, corpus)) {
      throw std::logic_error("selected set diverged from the schedule at epoch " +
                             std::to_string(e));
    }
    EpochRecord rec;
    rec.stage = "student";
    rec.epoch = e;
    rec.lambda = state.lambda;
    rec.selected_size = state.selected().size();
    const auto batch = Gather(train, state.selected());
    rec.train_loss = TrainOneEpoch(student, batch, cfg.tagger, train_rng);
    visits += batch.size();

    if (state.lambda < 1.0) {
      const auto pool = Gather(train, state.remaining());
      const auto scores = ScoreDataset(&student, pool, cfg.metric, scoring, score_rng);
      state.Rerank(RankAscending(scores));
      state.lambda = LambdaAt(cfg.schedule, e + 1);
      rec.newly_added = state.Admit(TargetSize(cfg.schedule, e + 1, corpus));
    }
    state.epoch = e + 1;
    if (auto v = state.Violations(corpus); !v.empty()) {
      throw std::logic_error("curriculum partition broken after epoch " + std::to_string(e) +
                             ": " + v.front());
    }

    rec.cumulative_sentence_visits = visits;
    tracker.Observe(student, e, &rec);
    rec.wall_ms = MillisSince(stage_start);
    result.log.records.push_back(rec);
    if (observer) observer(state, rec);
  }

  result.student = std::move(student);
  result.best = std::move(tracker.best());
  result.log.summary.total_visits = visits;
  result.log.summary.best_dev_f1 = tracker.best_f1();
  result.log.summary.best_epoch = tracker.best_epoch();
  result.log.summary.total_wall_ms = MillisSince(run_start);
  return result;
}

RunResult RunBaseline(const Dataset &train, const Dataset &dev, const RunConfig &cfg,
                      const EpochObserver &observer) {
  cfg.Validate(false);
  CheckRunInputs(train, dev);
  const auto run_start = Clock::now();
  const size_t corpus = train.size();
  std::vector<int> all(corpus);
  std::iota(all.begin(), all.end(), 0);
  CurriculumState state(all, corpus);
  state.lambda = 1.0;

  RunResult result;
  DevTracker tracker(dev);
  uint64_t visits = 0;
  TaggerParams student = InitTagger(train, cfg, kStudentInit);
  Rng train_rng(DeriveSeed(cfg.seed, {kStudentTrain}));
  for (int e = 0; e < cfg.es; ++e) {
    const auto stage_start = Clock::now();
    EpochRecord rec;
    rec.stage = "student";
    rec.epoch = e;
    rec.selected_size = corpus;
    rec.train_loss = TrainOneEpoch(student, train, cfg.tagger, train_rng);
    visits += corpus;
    state.epoch = e + 1;
    rec.cumulative_sentence_visits = visits;
    tracker.Observe(student, e, &rec);
    rec.wall_ms = MillisSince(stage_start);
    result.log.records.push_back(rec);
    if (observer) observer(state, rec);
  }
  result.student = std::move(student);
  result.best = std::move(tracker.best());
  result.log.summary.total_visits = visits;
  result.log.summary.best_dev_f1 = tracker.best_f1();
  result.log.summary.best_epoch = tracker.best_epoch();
  result.log.summary.total_wall_ms = MillisSince(run_start);
  return result;
}

}  // namespace tcl
