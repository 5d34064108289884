#include "tcl/difficulty.h"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "tcl/errors.h"

namespace tcl {

std::string_view MetricName(MetricKind kind) {
  switch (kind) {
    case MetricKind::kRandom: return "random";
    case MetricKind::kLength: return "length";
    case MetricKind::kTlc: return "tlc";
    case MetricKind::kMnlp: return "mnlp";
    case MetricKind::kBu: return "bu";
  }
  return "?";
}

MetricKind ParseMetric(std::string_view name) {
  for (MetricKind k : {MetricKind::kRandom, MetricKind::kLength, MetricKind::kTlc,
                       MetricKind::kMnlp, MetricKind::kBu}) {
    if (MetricName(k) == name) return k;
  }
  throw ConfigError("unknown difficulty metric '" + std::string(name) + "'");
}

void MetricConfig::Validate() const {
  if (top_n < 1) throw ConfigError("metric config: N must be >= 1");
  if (passes < 2) throw ConfigError("metric config: K must be >= 2");
}

double LcToken(std::span<const double> dist) {
  return 1.0 - *std::max_element(dist.begin(), dist.end());
}

double ScoreTlc(const Distributions &dists, int n) {
  const auto m = static_cast<size_t>(dists.rows());
  if (m == 0) throw Error("TLC needs at least one token");
  std::vector<double> lc(m);
  for (size_t i = 0; i < m; ++i) lc[i] = 1.0 - dists.row(i).maxCoeff();
  std::vector<size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&lc](size_t a, size_t b) { return lc[a] > lc[b]; });
  const size_t k = std::min(m, static_cast<size_t>(std::max(n, 1)));
  double sum = 0;
  for (size_t i = 0; i < k; ++i) sum += lc[order[i]];
  return sum / static_cast<double>(k);
}

double ScoreMnlp(const Distributions &dists, size_t *clamped) {
  const auto m = dists.rows();
  if (m == 0) throw Error("MNLP needs at least one token");
  double sum = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double p = dists.row(i).maxCoeff();
    if (p < kMnlpMinProb) {
      p = kMnlpMinProb;
      if (clamped) ++*clamped;
    }
    sum += std::log(p);
  }
  return -sum / static_cast<double>(m);
}

double BuFromPasses(std::span<const Distributions> passes) {
  if (passes.size() < 2) throw Error("BU needs at least two passes");
  const Eigen::Index m = passes[0].rows();
  const Eigen::Index t = passes[0].cols();
  if (m == 0) throw Error("BU needs at least one token");
  for (const auto &p : passes) {
    if (p.rows() != m || p.cols() != t) throw ShapeError("BU passes disagree in shape");
  }
  const double k = static_cast<double>(passes.size());
  double var_max = 0;
  double var_sum = 0;
  for (Eigen::Index i = 0; i < m; ++i) {
    double var = 0;
    for (Eigen::Index y = 0; y < t; ++y) {
      // Shifted by the first pass so identical passes give exactly zero.
      const double shift = passes[0](i, y);
      double s = 0, s2 = 0;
      for (const auto &p : passes) {
        const double d = p(i, y) - shift;
        s += d;
        s2 += d * d;
      }
      var += std::max(s2 / k - (s / k) * (s / k), 0.0);
    }
    var_max = std::max(var_max, var);
    var_sum += var;
  }
  return var_max + var_sum / static_cast<double>(m);
}

double ScoreBu(const TaggerParams &params, const Sentence &sentence, int passes,
               double dropout_rate, uint64_t stream_seed,
               std::vector<Distributions> *record) {
  if (passes < 2) throw ConfigError("BU needs K >= 2");
  std::vector<Distributions> dists;
  dists.reserve(passes);
  for (int k = 0; k < passes; ++k) {
    Rng rng(DeriveSeed(stream_seed, {static_cast<uint64_t>(k)}));
    dists.push_back(Forward(params, sentence, DropoutMode::On(dropout_rate, rng)));
  }
  const double score = BuFromPasses(dists);
  if (record) {
    for (auto &d : dists) record->push_back(std::move(d));
  }
  return score;
}

double ScoreLength(const Sentence &sentence) {
  return static_cast<double>(sentence.size());
}

double ScoreRandom(int sentence_id, uint64_t seed) {
  return BitsToUnit(DeriveSeed(seed, {0x72616e64ULL, static_cast<uint64_t>(sentence_id)}));
}

std::vector<DifficultyScore> ScoreDataset(const TaggerParams *params,
                                          std::span<const Sentence *const> sentences,
                                          const MetricConfig &metric,
                                          const ScoringOptions &options, Rng &rng,
                                          ScoringStats *stats) {
  metric.Validate();
  if (metric.model_dependent() && params == nullptr) {
    throw ConfigError(std::string(MetricName(metric.kind)) + " scoring needs model parameters");
  }
  const uint64_t base = rng.NextU64();
  const size_t n = sentences.size();
  std::vector<DifficultyScore> out(n);
  std::vector<size_t> clamped(n, 0);

  auto score_one = [&](size_t i) {
    const Sentence &s = *sentences[i];
    double v = 0;
    switch (metric.kind) {
      case MetricKind::kRandom: v = ScoreRandom(s.id, metric.seed); break;
      case MetricKind::kLength: v = ScoreLength(s); break;
      case MetricKind::kTlc:
        v = ScoreTlc(Forward(*params, s, DropoutMode::Off()), metric.top_n);
        break;
      case MetricKind::kMnlp:
        v = ScoreMnlp(Forward(*params, s, DropoutMode::Off()), &clamped[i]);
        break;
      case MetricKind::kBu:
        v = ScoreBu(*params, s, metric.passes, options.dropout_rate,
                    DeriveSeed(base, {static_cast<uint64_t>(s.id)}));
        break;
    }
    out[i] = DifficultyScore{s.id, v, metric.kind};
  };

  const size_t threads =
      std::clamp<size_t>(options.threads < 1 ? 1 : options.threads, 1, std::max<size_t>(n, 1));
  if (threads <= 1 || !metric.model_dependent()) {
    for (size_t i = 0; i < n; ++i) score_one(i);
  } else {
    std::vector<std::exception_ptr> errors(threads);
    {
      std::vector<std::jthread> workers;
      for (size_t w = 0; w < threads; ++w) {
        workers.emplace_back([&, w] {
          try {
            for (size_t i = w; i < n; i += threads) score_one(i);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (auto &e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  if (stats) {
    for (size_t c : clamped) stats->mnlp_clamped += c;
  }
  return out;
}

std::vector<DifficultyScore> ScoreDataset(const TaggerParams *params, const Dataset &data,
                                          const MetricConfig &metric,
                                          const ScoringOptions &options, Rng &rng,
                                          ScoringStats *stats) {
  std::vector<const Sentence *> ptrs;
  ptrs.reserve(data.size());
  for (const auto &s : data.sentences()) ptrs.push_back(&s);
  return ScoreDataset(params, ptrs, metric, options, rng, stats);
}

}  // namespace tcl
