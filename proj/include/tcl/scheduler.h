#ifndef TCL_SCHEDULER_H_
#define TCL_SCHEDULER_H_

#include <cstddef>

namespace tcl {

// Root pacing function
//   lambda(e) = min(1, sqrt((1 - lambda0^2) / e_grow * e + lambda0^2))
// which starts at lambda0 and first reaches 1 at epoch e_grow.
struct ScheduleConfig {
  double lambda0 = 0.3;
  int e_grow = 10;

  // Throws ConfigError.
  void Validate() const;
};

double LambdaAt(const ScheduleConfig &config, int epoch);

// max(1, floor(lambda(epoch) * corpus_size)); exactly corpus_size once
// epoch >= e_grow.
size_t TargetSize(const ScheduleConfig &config, int epoch, size_t corpus_size);

}  // namespace tcl

#endif  // TCL_SCHEDULER_H_
