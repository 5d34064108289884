#include <cmath>

#include <gtest/gtest.h>

#include "oracles.h"
#include "tcl/errors.h"
#include "tcl/scheduler.h"

namespace tcl {
namespace {

TEST(LambdaTest, DefaultSchedule) {
  const ScheduleConfig c;
  EXPECT_NEAR(LambdaAt(c, 0), 0.3, 1e-12);
  EXPECT_NEAR(LambdaAt(c, 10), 1.0, 1e-12);
  EXPECT_NEAR(LambdaAt(c, 5), 0.738241, 1e-6);
  EXPECT_EQ(LambdaAt(c, 20), 1.0);
}

TEST(LambdaTest, MonotoneAndSquareIsAffine) {
  for (double l0 : {0.05, 0.3, 0.5, 0.99}) {
    for (int grow : {1, 3, 10, 25}) {
      const ScheduleConfig c{l0, grow};
      for (int e = 0; e < 60; ++e) {
        EXPECT_LE(LambdaAt(c, e), LambdaAt(c, e + 1));
        EXPECT_GT(LambdaAt(c, e), 0.0);
        EXPECT_LE(LambdaAt(c, e), 1.0);
      }
      // Second differences of lambda^2 vanish before the clamp.
      for (int e = 0; e + 2 <= grow; ++e) {
        const double a = std::pow(LambdaAt(c, e), 2), b = std::pow(LambdaAt(c, e + 1), 2),
                     d = std::pow(LambdaAt(c, e + 2), 2);
        EXPECT_NEAR(d - 2 * b + a, 0.0, 1e-12);
      }
    }
  }
}

TEST(LambdaTest, InvalidConfig) {
  EXPECT_THROW((ScheduleConfig{0.0, 10}.Validate()), ConfigError);
  EXPECT_THROW((ScheduleConfig{1.5, 10}.Validate()), ConfigError);
  EXPECT_THROW((ScheduleConfig{0.3, 0}.Validate()), ConfigError);
  EXPECT_NO_THROW((ScheduleConfig{1.0, 1}.Validate()));
}

TEST(TargetSizeTest, Examples) {
  const ScheduleConfig c;
  EXPECT_EQ(TargetSize(c, 0, 100), 30u);
  EXPECT_EQ(TargetSize(c, 10, 100), 100u);
  EXPECT_EQ(TargetSize(c, 37, 100), 100u);
  EXPECT_EQ(TargetSize(c, 0, 1), 1u);
  EXPECT_EQ(TargetSize(c, 0, 4000), 1200u);
}

// Sizes against exact integer arithmetic for rational lambda0.
TEST(TargetSizeTest, MatchesIntegerOracle) {
  struct Case { uint64_t num, den; };
  for (Case r : {Case{3, 10}, Case{1, 2}, Case{1, 10}, Case{7, 10}, Case{1, 4}}) {
    for (int grow : {1, 4, 10, 13}) {
      for (size_t corpus : {1, 2, 7, 100, 999, 4000, 12345}) {
        const ScheduleConfig c{static_cast<double>(r.num) / r.den, grow};
        size_t prev = 0;
        for (int e = 0; e <= grow + 2; ++e) {
          const size_t got = TargetSize(c, e, corpus);
          EXPECT_EQ(got, oracle::ExactTargetSize(r.num, r.den, grow, e, corpus))
              << r.num << "/" << r.den << " grow " << grow << " corpus " << corpus << " e " << e;
          EXPECT_GE(got, prev);
          EXPECT_GE(got, 1u);
          EXPECT_LE(got, corpus);
          prev = got;
        }
      }
    }
  }
}

}  // namespace
}  // namespace tcl
