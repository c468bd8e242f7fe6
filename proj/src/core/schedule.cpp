#include "core/schedule.hpp"

#include <algorithm>
#include <cmath>

namespace bdbm {

BridgeSchedule BridgeSchedule::brownian(double k, double T, TimeMode mode, uint32_t steps) {
  if (!(k > 0.0) || !std::isfinite(k)) throw ConfigError(cat("schedule: k must be positive, got ", k));
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError(cat("schedule: T must be positive, got ", T));
  if (mode == TimeMode::discrete && steps == 0)
    throw ConfigError("schedule: discrete time mode needs steps >= 1");
  BridgeSchedule s;
  s.kind_ = ScheduleKind::brownian;
  s.k_ = k;
  s.T_ = T;
  s.mode_ = mode;
  s.steps_ = (mode == TimeMode::discrete) ? steps : 0;
  return s;
}

BridgeSchedule BridgeSchedule::custom(std::vector<ScheduleKnot> knots, TimeMode mode,
                                      uint32_t steps) {
  if (knots.size() < 2) throw ConfigError("schedule: custom table needs at least 2 knots");
  for (size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].t > knots[i - 1].t))
      throw ConfigError(cat("schedule: knot times must strictly increase (index ", i, ")"));
  if (knots.front().t != 0.0)
    throw ConfigError("schedule: first knot must sit at t=0");
  if (mode == TimeMode::discrete && steps == 0)
    throw ConfigError("schedule: discrete time mode needs steps >= 1");
  BridgeSchedule s;
  s.kind_ = ScheduleKind::custom_table;
  s.k_ = 0.0;
  s.T_ = knots.back().t;
  s.mode_ = mode;
  s.steps_ = (mode == TimeMode::discrete) ? steps : 0;
  s.knots_ = std::move(knots);
  return s;
}

double BridgeSchedule::dt() const {
  if (mode_ != TimeMode::discrete) throw DomainError("schedule: dt undefined in continuous mode");
  return T_ / steps_;
}

void BridgeSchedule::check_time(double t) const {
  if (!(t >= 0.0 && t <= T_))
    throw DomainError(cat("schedule: t=", t, " outside [0, ", T_, "]"));
  if (mode_ == TimeMode::discrete) {
    double u = t / dt();
    if (std::abs(u - std::round(u)) > 1e-9)
      throw DomainError(cat("schedule: t=", t, " off the discrete grid (dt=", dt(), ")"));
  }
}

ScheduleTriple BridgeSchedule::eval(double t) const {
  check_time(t);
  if (kind_ == ScheduleKind::brownian) {
    double u = t / T_;
    return {1.0 - u, u, k_ * u * (1.0 - u)};
  }
  // piecewise linear over the knot table
  auto it = std::lower_bound(knots_.begin(), knots_.end(), t,
                             [](const ScheduleKnot& k, double v) { return k.t < v; });
  if (it == knots_.end()) return {knots_.back().alpha, knots_.back().beta, knots_.back().sigma2};
  if (it->t == t || it == knots_.begin()) return {it->alpha, it->beta, it->sigma2};
  const ScheduleKnot& hi = *it;
  const ScheduleKnot& lo = *(it - 1);
  double w = (t - lo.t) / (hi.t - lo.t);
  return {lo.alpha + w * (hi.alpha - lo.alpha), lo.beta + w * (hi.beta - lo.beta),
          lo.sigma2 + w * (hi.sigma2 - lo.sigma2)};
}

std::vector<std::string> BridgeSchedule::validate() const {
  std::vector<std::string> report;
  const double tol = 1e-12;
  auto boundary = [&](double t, double want_a, double want_b, double want_s2) {
    ScheduleTriple v = eval(t);
    if (std::abs(v.alpha - want_a) > tol)
      report.push_back(cat("alpha boundary at t=", t, ": residual ", v.alpha - want_a));
    if (std::abs(v.beta - want_b) > tol)
      report.push_back(cat("beta boundary at t=", t, ": residual ", v.beta - want_b));
    if (std::abs(v.sigma2 - want_s2) > tol)
      report.push_back(cat("sigma2 boundary at t=", t, ": residual ", v.sigma2 - want_s2));
  };
  boundary(0.0, 1.0, 0.0, 0.0);
  boundary(T_, 0.0, 1.0, 0.0);

  // interior positivity, sampled on a grid (knots included for custom tables)
  std::vector<double> probes;
  uint32_t n = (mode_ == TimeMode::discrete) ? steps_ : 256;
  for (uint32_t i = 1; i < n; ++i) probes.push_back(T_ * i / n);
  if (kind_ == ScheduleKind::custom_table)
    for (const auto& kn : knots_)
      if (kn.t > 0.0 && kn.t < T_ && mode_ != TimeMode::discrete) probes.push_back(kn.t);
  for (double t : probes) {
    ScheduleTriple v = eval(t);
    if (!(v.sigma2 > 0.0))
      report.push_back(cat("sigma2 interior positivity at t=", t, ": residual ", v.sigma2));
  }
  return report;
}

const char* variant_name(DeltaVariant v) {
  switch (v) {
    case DeltaVariant::A_zero: return "A";
    case DeltaVariant::B_beta_ratio: return "B";
    case DeltaVariant::C_alpha_ratio: return "C";
  }
  return "?";
}

DeltaVariant variant_from_name(const std::string& s) {
  if (s == "A" || s == "a" || s == "a_zero") return DeltaVariant::A_zero;
  if (s == "B" || s == "b" || s == "b_beta_ratio") return DeltaVariant::B_beta_ratio;
  if (s == "C" || s == "c" || s == "c_alpha_ratio") return DeltaVariant::C_alpha_ratio;
  throw ConfigError(cat("unknown delta variant '", s, "' (expected A, B or C)"));
}

double delta2(const BridgeSchedule& sched, const TransitionVariancePolicy& policy, double t,
              double s) {
  if (!(t < s)) throw DomainError(cat("delta2: need t < s, got t=", t, " s=", s));
  if (policy.eta < 0.0 || policy.eta > 1.0)
    throw ConfigError(cat("delta2: eta must lie in [0,1], got ", policy.eta));
  if (policy.variant == DeltaVariant::A_zero) return 0.0;

  ScheduleTriple at = sched.eval(t);
  ScheduleTriple as = sched.eval(s);
  double ratio2;
  if (policy.variant == DeltaVariant::B_beta_ratio) {
    if (at.beta == 0.0 || !std::isfinite(at.sigma2 / (at.beta * at.beta)))
      throw DomainError(cat("delta2: variant B incompatible with this schedule at t=", t, ", s=", s,
                            " (beta_t=0)"));
    ratio2 = (as.beta * as.beta) / (at.beta * at.beta);
  } else {
    if (at.alpha == 0.0)
      throw DomainError(cat("delta2: variant C incompatible with this schedule at t=", t, ", s=", s,
                            " (alpha_t=0)"));
    ratio2 = (as.alpha * as.alpha) / (at.alpha * at.alpha);
  }
  double d2 = policy.eta * (as.sigma2 - at.sigma2 * ratio2);
  if (d2 < 0.0) {
    if (d2 >= -1e-12) return 0.0;
    throw DomainError(cat("delta2: variant ", variant_name(policy.variant),
                          " incompatible with this schedule at t=", t, ", s=", s, " (delta2=", d2,
                          ")"));
  }
  return d2;
}

}  // namespace bdbm
