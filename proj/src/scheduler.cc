#include "tcl/scheduler.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tcl/errors.h"

namespace tcl {

void ScheduleConfig::Validate() const {
  if (!(lambda0 > 0 && lambda0 <= 1)) throw ConfigError("schedule: lambda0 must be in (0, 1]");
  if (e_grow < 1) throw ConfigError("schedule: e_grow must be >= 1");
}

double LambdaAt(const ScheduleConfig &config, int epoch) {
  if (epoch < 0) throw ConfigError("schedule: epoch must be >= 0");
  // The endpoints are returned exactly rather than through sqrt().
  if (epoch == 0) return config.lambda0;
  if (epoch >= config.e_grow) return 1.0;
  const double l2 = config.lambda0 * config.lambda0;
  const double v = std::sqrt((1.0 - l2) / config.e_grow * epoch + l2);
  return std::min(1.0, v);
}

size_t TargetSize(const ScheduleConfig &config, int epoch, size_t corpus_size) {
  if (corpus_size == 0) throw ConfigError("schedule: corpus must not be empty");
  const double lambda = LambdaAt(config, epoch);
  if (lambda >= 1.0) return corpus_size;
  // Products like 0.3 * 4000 land a few ulps below the integer they denote.
  constexpr double kSlack = 1e-9;
  const double raw = std::floor(lambda * static_cast<double>(corpus_size) + kSlack);
  return std::clamp<size_t>(static_cast<size_t>(raw), 1, corpus_size);
}

}  // namespace tcl
