#include <algorithm>
#include <set>

#include <gtest/gtest.h>

#include "oracles.h"
#include "tcl/curriculum.h"
#include "tcl/errors.h"

namespace tcl {
namespace {

SynthConfig SmallSynth(int train = 300) {
  SynthConfig c;
  c.vocab_a = 80;
  c.vocab_b = 60;
  c.chars_a = 50;
  c.chars_b = 40;
  c.train_size = train;
  c.dev_size = 50;
  c.test_size = 50;
  return c;
}

RunConfig SmallRun(MetricKind metric = MetricKind::kBu) {
  RunConfig cfg;
  cfg.e0 = 2;
  cfg.es = 8;
  cfg.schedule = {0.3, 5};
  cfg.metric.kind = metric;
  cfg.tagger.embed_dim = 8;
  cfg.tagger.hidden_dim = 16;
  cfg.tagger.window = 1;
  cfg.seed = 3;
  return cfg;
}

TEST(RankAscendingTest, TieBreakByIdAndPermutation) {
  std::vector<DifficultyScore> s{{0, 0.5}, {1, 0.1}, {2, 0.5}};
  EXPECT_EQ(RankAscending(s), (std::vector<int>{1, 0, 2}));
  std::vector<DifficultyScore> sorted{{3, 0.1}, {1, 0.2}, {2, 0.3}};
  EXPECT_EQ(RankAscending(sorted), (std::vector<int>{3, 1, 2}));
  std::vector<DifficultyScore> dup{{0, 0.5}, {0, 0.1}};
  EXPECT_THROW(RankAscending(dup), Error);

  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DifficultyScore> scores;
    for (int i = 0; i < 30; ++i) scores.push_back({i, static_cast<double>(rng.Below(5))});
    rng.Shuffle(std::span<DifficultyScore>(scores));
    auto order = RankAscending(scores);
    auto ids = order;
    std::sort(ids.begin(), ids.end());
    for (int i = 0; i < 30; ++i) ASSERT_EQ(ids[i], i);
  }
}

TEST(CurriculumStateTest, AdmitAndRerank) {
  CurriculumState st({4, 2, 0, 1, 3}, 2);
  EXPECT_EQ(st.selected(), (std::vector<int>{4, 2}));
  EXPECT_EQ(st.remaining(), (std::vector<int>{0, 1, 3}));
  EXPECT_TRUE(st.Violations(5).empty());
  st.Rerank({3, 1, 0});
  EXPECT_EQ(st.Admit(4), 2u);
  EXPECT_EQ(st.selected(), (std::vector<int>{4, 2, 3, 1}));
  EXPECT_EQ(st.Admit(3), 0u);
  EXPECT_THROW(st.Rerank({7}), std::logic_error);
  EXPECT_EQ(st.Admit(99), 1u);
  EXPECT_TRUE(st.remaining().empty());
  EXPECT_TRUE(st.Violations(5).empty());
  EXPECT_FALSE(st.Violations(6).empty());
}

TEST(RunConfigTest, Validation) {
  RunConfig cfg;
  EXPECT_NO_THROW(cfg.Validate(true));
  cfg.e0 = 0;
  EXPECT_THROW(cfg.Validate(true), ConfigError);
  cfg = RunConfig();
  cfg.e0 = 50;
  EXPECT_THROW(cfg.Validate(true), ConfigError);
  EXPECT_NO_THROW(cfg.Validate(false));
}

TEST(TeacherTest, ZeroEpochsIsAConfigErrorAndSeedIsDeterministic) {
  auto corpus = GenerateSynthetic(SmallSynth(100), 1);
  RunConfig cfg = SmallRun();
  cfg.e0 = 0;
  EXPECT_THROW(TrainTeacher(corpus.train, cfg), ConfigError);
  cfg.e0 = 2;
  EXPECT_EQ(TrainTeacher(corpus.train, cfg), TrainTeacher(corpus.train, cfg));
}

TEST(RunTclTest, InvariantsHoldEveryEpoch) {
  auto corpus = GenerateSynthetic(SmallSynth(), 2);
  for (MetricKind metric : {MetricKind::kBu, MetricKind::kTlc, MetricKind::kMnlp,
                            MetricKind::kLength, MetricKind::kRandom}) {
    RunConfig cfg = SmallRun(metric);
    const size_t n = corpus.train.size();
    std::set<int> previous;
    uint64_t student_visits = 0;
    int epochs = 0;
    auto observer = [&](const CurriculumState &st, const EpochRecord &rec) {
      EXPECT_TRUE(st.Violations(n).empty());
      EXPECT_EQ(rec.selected_size, TargetSize(cfg.schedule, rec.epoch, n));
      EXPECT_EQ(st.selected().size(), TargetSize(cfg.schedule, rec.epoch + 1, n));
      std::set<int> now(st.selected().begin(), st.selected().end());
      EXPECT_TRUE(std::includes(now.begin(), now.end(), previous.begin(), previous.end()));
      previous = now;
      student_visits += rec.selected_size;
      ++epochs;
    };
    RunResult res = RunTcl(corpus.train, corpus.dev, cfg, observer);
    EXPECT_EQ(epochs, cfg.es);
    EXPECT_EQ(res.log.summary.teacher_visits, cfg.e0 * n);
    EXPECT_EQ(res.log.summary.total_visits, cfg.e0 * n + student_visits);
    EXPECT_LT(student_visits, cfg.es * n);
    ASSERT_EQ(res.log.records.size(), static_cast<size_t>(cfg.es + 1));
    EXPECT_EQ(res.log.records[0].stage, "teacher");
    for (size_t i = 1; i < res.log.records.size(); ++i) {
      EXPECT_GT(res.log.records[i].cumulative_sentence_visits,
                res.log.records[i - 1].cumulative_sentence_visits);
    }
  }
}

TEST(RunTclTest, LambdaZeroPointThreeOnFourThousandSentences) {
  SynthConfig sc = SmallSynth(4000);
  sc.vocab_a = 300;
  sc.vocab_b = 300;
  sc.chars_a = 150;
  sc.chars_b = 150;
  auto corpus = GenerateSynthetic(sc, 4);
  RunConfig cfg = SmallRun(MetricKind::kLength);
  cfg.tagger.embed_dim = 2;
  cfg.tagger.hidden_dim = 4;
  cfg.e0 = 1;
  cfg.es = 12;
  cfg.schedule = ScheduleConfig{};
  std::vector<size_t> sizes;
  RunTcl(corpus.train, corpus.dev, cfg,
         [&](const CurriculumState &, const EpochRecord &rec) { sizes.push_back(rec.selected_size); });
  ASSERT_EQ(sizes.size(), 12u);
  EXPECT_EQ(sizes[0], 1200u);
  for (int e = 0; e < 12; ++e) {
    EXPECT_EQ(sizes[e], oracle::ExactTargetSize(3, 10, 10, e, 4000)) << "epoch " << e;
  }
  EXPECT_EQ(sizes[10], 4000u);
}

TEST(RunTclTest, LambdaOneTrainsOnEverythingFromTheStart) {
  auto corpus = GenerateSynthetic(SmallSynth(), 5);
  RunConfig cfg = SmallRun();
  cfg.schedule.lambda0 = 1.0;
  RunResult res = RunTcl(corpus.train, corpus.dev, cfg, [&](const CurriculumState &st, const EpochRecord &rec) {
    EXPECT_EQ(rec.selected_size, corpus.train.size());
    EXPECT_TRUE(st.remaining().empty());
  });
  EXPECT_EQ(res.log.summary.total_visits, (cfg.e0 + cfg.es) * corpus.train.size());
}

TEST(RunTclTest, DeterministicForAFixedSeed) {
  auto corpus = GenerateSynthetic(SmallSynth(), 6);
  const RunConfig cfg = SmallRun();
  RunResult a = RunTcl(corpus.train, corpus.dev, cfg);
  RunResult b = RunTcl(corpus.train, corpus.dev, cfg);
  EXPECT_EQ(a.student, b.student);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.log.ToJsonLines(false), b.log.ToJsonLines(false));
}

TEST(RunTclTest, ScoringThreadsDoNotChangeTheRun) {
  auto corpus = GenerateSynthetic(SmallSynth(), 7);
  RunConfig cfg = SmallRun();
  RunResult a = RunTcl(corpus.train, corpus.dev, cfg);
  cfg.score_threads = 3;
  RunResult b = RunTcl(corpus.train, corpus.dev, cfg);
  EXPECT_EQ(a.student, b.student);
  EXPECT_EQ(a.log.ToJsonLines(false), b.log.ToJsonLines(false));
}

TEST(RunTclTest, MismatchedDevLabelSetFails) {
  auto corpus = GenerateSynthetic(SmallSynth(), 8);
  SynthConfig joint = SmallSynth();
  joint.scheme = Scheme::kJoint;
  auto other = GenerateSynthetic(joint, 8);
  EXPECT_THROW(RunTcl(corpus.train, other.dev, SmallRun()), ShapeError);
}

TEST(RunBaselineTest, VisitsAndDeterminism) {
  auto corpus = GenerateSynthetic(SmallSynth(), 9);
  const RunConfig cfg = SmallRun();
  RunResult a = RunBaseline(corpus.train, corpus.dev, cfg);
  RunResult b = RunBaseline(corpus.train, corpus.dev, cfg);
  EXPECT_EQ(a.log.summary.total_visits, cfg.es * corpus.train.size());
  EXPECT_EQ(a.student, b.student);
  EXPECT_EQ(a.log.records.size(), static_cast<size_t>(cfg.es));
  EXPECT_GE(a.log.summary.best_epoch, 0);
}

TEST(RunLogTest, JsonLinesRoundTrip) {
  RunLog log;
  EpochRecord t;
  t.stage = "teacher";
  t.epoch = -1;
  t.cumulative_sentence_visits = 10;
  t.dev_f1_cws = 0.25;
  log.records.push_back(t);
  EpochRecord s;
  s.stage = "student";
  s.epoch = 0;
  s.lambda = 0.3;
  s.selected_size = 3;
  s.newly_added = 2;
  s.train_loss = 1.0 / 3.0;
  s.dev_f1_cws = 0.5;
  s.dev_f1_joint = 0.4;
  s.cumulative_sentence_visits = 13;
  s.wall_ms = 1.5;
  log.records.push_back(s);
  log.summary = {2.0, 13, 10, 0.5, 0};
  const std::string text = log.ToJsonLines();
  const RunLog back = RunLog::FromJsonLines(text);
  EXPECT_EQ(back.ToJsonLines(), text);
  EXPECT_EQ(back.StudentRecords().size(), 1u);
  EXPECT_EQ(log.ToJsonLines(false).find("wall_ms"), std::string::npos);
}

TEST(RunLogTest, MalformedLineReportsLineNumber) {
  try {
    RunLog::FromJsonLines("{\"stage\":\"summary\",\"total_visits\":1,\"best_dev_f1\":0,\"best_epoch\":0}\n{oops\n");
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

}  // namespace
}  // namespace tcl
