#ifndef TCL_CURRICULUM_H_
#define TCL_CURRICULUM_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tcl/corpus.h"
#include "tcl/difficulty.h"
#include "tcl/scheduler.h"
#include "tcl/tagger.h"

namespace tcl {

struct RunConfig {
  // Teacher epochs on all of D.
  int e0 = 5;
  // Student epochs.
  int es = 50;
  ScheduleConfig schedule;
  MetricConfig metric;
  // Shared by teacher and student.
  TaggerConfig tagger;
  uint64_t seed = 0;
  // Worker threads for difficulty scoring.
  int score_threads = 1;

  // Throws ConfigError. With `curriculum` set, also requires e0 < es.
  void Validate(bool curriculum) const;
};

// One line of the run log. The teacher stage contributes a single record
// with stage "teacher" and epoch -1.
struct EpochRecord {
  std::string stage;
  int epoch = 0;
  double lambda = 1.0;
  // Sentences trained on in this epoch.
  size_t selected_size = 0;
  // Sentences admitted after this epoch.
  size_t newly_added = 0;
  double train_loss = 0;
  double dev_f1_cws = 0;
  std::optional<double> dev_f1_joint;
  uint64_t cumulative_sentence_visits = 0;
  double wall_ms = 0;
};

struct RunSummary {
  double total_wall_ms = 0;
  uint64_t total_visits = 0;
  uint64_t teacher_visits = 0;
  double best_dev_f1 = 0;
  int best_epoch = -1;
};

struct RunLog {
  std::vector<EpochRecord> records;
  RunSummary summary;

  // One JSON object per line; the summary comes last. With
  // include_wall_clock unset the wall_ms fields are omitted.
  std::string ToJsonLines(bool include_wall_clock = true) const;
  // Throws ParseError carrying the 1-based line number of a malformed line.
  static RunLog FromJsonLines(std::string_view text);

  std::vector<const EpochRecord *> StudentRecords() const;
};

// Selected (D_s) and remaining (D_o) sentence ids. remaining is kept in its
// current ranked order.
class CurriculumState {
 public:
  CurriculumState(std::vector<int> ranked, size_t initial_size);

  const std::vector<int> &selected() const { return selected_; }
  const std::vector<int> &remaining() const { return remaining_; }

  // Replaces remaining with a re-ranked permutation of itself.
  void Rerank(std::vector<int> ranked_remaining);
  // Moves the head of remaining into selected until |selected| == target.
  // Returns the number of ids moved.
  size_t Admit(size_t target);

  // Describes every broken partition invariant; empty when the state is a
  // disjoint cover of 0..corpus_size-1.
  std::vector<std::string> Violations(size_t corpus_size) const;

  int epoch = 0;
  double lambda = 0;

 private:
  std::vector<int> selected_;
  std::vector<int> remaining_;
};

// Stable ascending order by score, ties by ascending id. Throws on
// duplicate ids.
std::vector<int> RankAscending(std::span<const DifficultyScore> scores);

// Fresh tagger trained for cfg.e0 epochs on all of train.
TaggerParams TrainTeacher(const Dataset &train, const RunConfig &cfg);

struct RunResult {
  TaggerParams student;
  // Parameters at the best dev epoch.
  TaggerParams best;
  RunLog log;
};

// Called after every student epoch with the post-update state.
using EpochObserver = std::function<void(const CurriculumState &, const EpochRecord &)>;

// Teacher warm-up and initial ranking, then self-paced growth of the student
// training set under the root schedule, re-ranking the remainder with the
// current student after each epoch until lambda reaches 1.
RunResult RunTcl(const Dataset &train, const Dataset &dev, const RunConfig &cfg,
                 const EpochObserver &observer = {});

// Plain training on all of train for cfg.es epochs, from the same student
// initialization as RunTcl.
RunResult RunBaseline(const Dataset &train, const Dataset &dev, const RunConfig &cfg,
                      const EpochObserver &observer = {});

}  // namespace tcl

#endif  // TCL_CURRICULUM_H_
