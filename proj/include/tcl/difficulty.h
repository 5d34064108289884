#ifndef TCL_DIFFICULTY_H_
#define TCL_DIFFICULTY_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tcl/corpus.h"
#include "tcl/rng.h"
#include "tcl/tagger.h"

namespace tcl {

enum class MetricKind { kRandom, kLength, kTlc, kMnlp, kBu };

// "random", "length", "tlc", "mnlp" or "bu".
std::string_view MetricName(MetricKind kind);
MetricKind ParseMetric(std::string_view name);

struct MetricConfig {
  MetricKind kind = MetricKind::kBu;
  // Tokens averaged by TLC.
  int top_n = 5;
  // Stochastic forward passes for BU.
  int passes = 3;
  // Seed of the random baseline.
  uint64_t seed = 0;

  bool model_dependent() const {
    return kind == MetricKind::kTlc || kind == MetricKind::kMnlp || kind == MetricKind::kBu;
  }
  // Throws ConfigError.
  void Validate() const;
};

struct DifficultyScore {
  int sentence_id = 0;
  double score = 0;
  MetricKind metric = MetricKind::kLength;
};

// Probabilities below this are clamped before taking logs in MNLP.
inline constexpr double kMnlpMinProb = 1e-12;

// Least confidence of one token: 1 - max probability.
double LcToken(std::span<const double> dist);

// Mean of the min(n, M) largest per-token least confidences. Equal values
// are taken in ascending token order.
double ScoreTlc(const Distributions &dists, int n);

// -(1/M) * sum_i log(max_t p_i(t)). Each clamped token increments *clamped
// when it is given.
double ScoreMnlp(const Distributions &dists, size_t *clamped = nullptr);

// Bayesian uncertainty from K recorded passes over the same sentence:
// per token, var = sum_t [mean_k p_k(t)^2 - (mean_k p_k(t))^2]; the score is
// max_i var_i + mean_i var_i.
double BuFromPasses(std::span<const Distributions> passes);

// Runs `passes` forward passes with dropout on. Pass k draws its masks from
// Rng(DeriveSeed(stream_seed, {k})). When `record` is given the sampled
// distributions are appended to it.
double ScoreBu(const TaggerParams &params, const Sentence &sentence, int passes,
               double dropout_rate, uint64_t stream_seed,
               std::vector<Distributions> *record = nullptr);

double ScoreLength(const Sentence &sentence);

// Hash of (sentence_id, seed) mapped to [0, 1). Stable for a run.
double ScoreRandom(int sentence_id, uint64_t seed);

struct ScoringOptions {
  // Dropout rate of the BU passes.
  double dropout_rate = 0.1;
  // Worker threads; results do not depend on this.
  int threads = 1;
};

struct ScoringStats {
  size_t mnlp_clamped = 0;
};

// One score per sentence, in input order. params may be null for the random
// and length metrics. Model-dependent metrics never modify params. Draws one
// value from rng; BU streams are derived from it and the sentence id.
std::vector<DifficultyScore> ScoreDataset(const TaggerParams *params,
                                          std::span<const Sentence *const> sentences,
                                          const MetricConfig &metric,
                                          const ScoringOptions &options, Rng &rng,
                                          ScoringStats *stats = nullptr);
std::vector<DifficultyScore> ScoreDataset(const TaggerParams *params, const Dataset &data,
                                          const MetricConfig &metric,
                                          const ScoringOptions &options, Rng &rng,
                                          ScoringStats *stats = nullptr);

}  // namespace tcl

#endif  // TCL_DIFFICULTY_H_
