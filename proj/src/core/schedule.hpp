#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/common.hpp"

namespace bdbm {

enum class ScheduleKind : uint8_t { brownian = 0, custom_table = 1 };
enum class TimeMode : uint8_t { discrete = 0, continuous = 1 };

// One point of a custom-table schedule; interpolation between knots is linear.
struct ScheduleKnot {
  double t;
  double alpha;
  double beta;
  double sigma2;
};

struct ScheduleTriple {
  double alpha;
  double beta;
  double sigma2;
};

// The bridge schedule alpha_t, beta_t, sigma_t^2 on [0, T].
//
// brownian:  alpha = 1 - t/T, beta = t/T, sigma^2 = k (t/T)(1 - t/T)
// custom_table: piecewise-linear through user knots (boundary knots mandatory).
class BridgeSchedule {
 public:
  static BridgeSchedule brownian(double k, double T, TimeMode mode = TimeMode::continuous,
                                 uint32_t steps = 0);
  static BridgeSchedule custom(std::vector<ScheduleKnot> knots, TimeMode mode = TimeMode::continuous,
                               uint32_t steps = 0);

  ScheduleKind kind() const { return kind_; }
  double k() const { return k_; }
  double T() const { return T_; }
  TimeMode time_mode() const { return mode_; }
  uint32_t steps() const { return steps_; }  // 0 in continuous mode
  double dt() const;
  const std::vector<ScheduleKnot>& knots() const { return knots_; }

  ScheduleTriple eval(double t) const;

  // One line per violated condition ("<what> at t=<t>: residual <r>").
  // Empty report means the schedule is valid.
  std::vector<std::string> validate() const;

 private:
  ScheduleKind kind_ = ScheduleKind::brownian;
  double k_ = 2.0;
  double T_ = 1.0;
  TimeMode mode_ = TimeMode::continuous;
  uint32_t steps_ = 0;
  std::vector<ScheduleKnot> knots_;  // custom_table only

  void check_time(double t) const;
};

enum class DeltaVariant : uint8_t { A_zero = 0, B_beta_ratio = 1, C_alpha_ratio = 2 };

struct TransitionVariancePolicy {
  DeltaVariant variant = DeltaVariant::C_alpha_ratio;
  double eta = 1.0;
};

const char* variant_name(DeltaVariant v);
DeltaVariant variant_from_name(const std::string& s);

// Transition variance delta^2_{s,t} for 0 <= t < s <= T.  Negative values
// within 1e-12 of zero are clamped to zero; anything more negative means the
// (schedule, policy) pair cannot produce a valid kernel at (t, s).
double delta2(const BridgeSchedule& sched, const TransitionVariancePolicy& policy, double t,
              double s);

}  // namespace bdbm
