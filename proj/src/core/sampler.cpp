#include "core/sampler.hpp"

#include <cmath>

namespace bdbm {

Direction direction_from_string(const std::string& s) {
  if (s == "forward") return Direction::forward;
  if (s == "backward") return Direction::backward;
  throw ConfigError(cat("unknown direction '", s, "' (expected forward or backward)"));
}

const char* direction_string(Direction d) {
  return d == Direction::forward ? "forward" : "backward";
}

PredictorIface net_predictor(const NetParams& params, double T) {
  PredictorIface p;
  p.param = params.param;
  p.fn = [&params, T](double t, const vec& x_t, const vec& known, int m) {
    return net_predict(params, t / T, x_t, known, m);
  };
  return p;
}

std::vector<double> time_grid(const BridgeSchedule& sched, uint32_t nfe) {
  if (nfe == 0) throw DomainError("time_grid: nfe must be >= 1");
  if (sched.time_mode() == TimeMode::discrete) {
    uint32_t steps = sched.steps();
    if (nfe > steps) throw DomainError(cat("time_grid: nfe=", nfe, " exceeds steps=", steps));
    if (steps % nfe != 0)
      throw DomainError(cat("time_grid: nfe=", nfe, " does not divide steps=", steps));
    uint32_t stride = steps / nfe;
    std::vector<double> grid(nfe + 1);
    for (uint32_t i = 0; i <= nfe; ++i) grid[i] = double(i * stride) * sched.dt();
    return grid;
  }
  std::vector<double> grid(nfe + 1);
  for (uint32_t i = 0; i <= nfe; ++i) grid[i] = sched.T() * double(i) / double(nfe);
  return grid;
}

vec predict_opposite_endpoint(const PredictorIface& pred, const BridgeSchedule& sched, double t,
                              const vec& x_t, const vec& known_endpoint, int m) {
  if (m != 0 && m != 1) throw DomainError("predict_opposite_endpoint: m must be 0 or 1");
  vec out = pred.fn(t, x_t, known_endpoint, m);
  size_t d = x_t.size();
  switch (pred.param) {
    case Parameterization::z_pred: {
      ScheduleTriple c = sched.eval(t);
      double div = (m == 0) ? c.beta : c.alpha;
      if (!(std::abs(div) > 1e-9))
        throw DomainError(cat("predict_opposite_endpoint: degenerate divisor at t=", t,
                              " (use the bootstrap step)"));
      double sigma = std::sqrt(c.sigma2);
      vec est(d);
      if (m == 0)
        for (size_t i = 0; i < d; ++i)
          est[i] = (x_t[i] - c.alpha * known_endpoint[i] - sigma * out[i]) / c.beta;
      else
        for (size_t i = 0; i < d; ++i)
          est[i] = (x_t[i] - c.beta * known_endpoint[i] - sigma * out[i]) / c.alpha;
      return est;
    }
    case Parameterization::endpoint_sum: {
      vec est(d);
      for (size_t i = 0; i < d; ++i) est[i] = out[i] - known_endpoint[i];
      return est;
    }
    case Parameterization::endpoint_pair: {
      if (out.size() != 2 * d) throw DomainError("predict_opposite_endpoint: pair output dim");
      vec est(d);
      size_t off = (m == 0) ? 0 : d;  // output is (xT ‖ x0)
      for (size_t i = 0; i < d; ++i) est[i] = out[off + i];
      return est;
    }
  }
  throw DomainError("predict_opposite_endpoint: unknown parameterization");
}

vec predict_opposite_endpoint(const NetParams& params, const BridgeSchedule& sched, double t,
                              const vec& x_t, const vec& known_endpoint, int m) {
  return predict_opposite_endpoint(net_predictor(params, sched.T()), sched, t, x_t,
                                   known_endpoint, m);
}

namespace {

void check_state(const vec& x, const char* what, double t) {
  if (!all_finite(x)) throw NumericError(cat(what, ": non-finite state at t=", t));
}

// Policy-scaled variance of the very first backward step (s = T), where the
// generic backward variance delta^2 sigma_t^2 / sigma_s^2 is 0/0.  For the
// Brownian schedule the variant-C limit is eta * sigma_t^2 (full marginal
// noise at eta=1, none at eta=0); variant A is deterministic; variant B has
// no valid limit here.
double backward_boot_var(const BridgeSchedule& sched, const TransitionVariancePolicy& policy,
                         double t) {
  switch (policy.variant) {
    case DeltaVariant::A_zero: return 0.0;
    case DeltaVariant::C_alpha_ratio: return policy.eta * sched.eval(t).sigma2;
    case DeltaVariant::B_beta_ratio:
      throw DomainError(cat("backward bootstrap: variant B has no valid kernel at s=T (t=", t, ")"));
  }
  throw DomainError("backward bootstrap: unknown variant");
}

}  // namespace

vec forward_step(const PredictorIface& pred, const BridgeSchedule& sched,
                 const TransitionVariancePolicy& policy, double t, double s, const vec& x_t,
                 const vec& x0, Rng& rng, bool last) {
  if (!(t < s)) throw DomainError(cat("forward_step: need t < s, got t=", t, " s=", s));
  check_state(x_t, "forward_step", t);
  ScheduleTriple ct = sched.eval(t);
  ScheduleTriple cs = sched.eval(s);
  size_t d = x_t.size();
  vec mean;
  double var;
  if (ct.sigma2 == 0.0) {
    // departure bootstrap: query the model at the first interior time with the
    // source standing in for the state, then draw from the conditioned marginal
    vec xT_hat = predict_opposite_endpoint(pred, sched, s, x_t, x0, 0);
    mean.resize(d);
    for (size_t i = 0; i < d; ++i) mean[i] = cs.alpha * x0[i] + cs.beta * xT_hat[i];
    var = delta2(sched, policy, t, s);
  } else if (pred.param == Parameterization::z_pred) {
    vec z_hat = pred.fn(t, x_t, x0, 0);
    mean = forward_mean_zform(sched, policy, t, s, x_t, x0, z_hat);
    var = delta2(sched, policy, t, s);
  } else {
    vec xT_hat = predict_opposite_endpoint(pred, sched, t, x_t, x0, 0);
    GaussianTransition k = forward_transition(sched, policy, t, s, x_t, {x0, xT_hat});
    mean = std::move(k.mean);
    var = k.var;
  }
  if (!last && var > 0.0) {
    double sd = std::sqrt(var);
    for (size_t i = 0; i < d; ++i) mean[i] += sd * rng.normal();
  }
  check_state(mean, "forward_step", s);
  return mean;
}

vec backward_step(const PredictorIface& pred, const BridgeSchedule& sched,
                  const TransitionVariancePolicy& policy, double t, double s, const vec& x_s,
                  const vec& xT, Rng& rng, bool last) {
  if (!(t < s)) throw DomainError(cat("backward_step: need t < s, got t=", t, " s=", s));
  check_state(x_s, "backward_step", s);
  ScheduleTriple ct = sched.eval(t);
  ScheduleTriple cs = sched.eval(s);
  size_t d = x_s.size();
  vec mean;
  double var;
  if (cs.sigma2 == 0.0) {
    // departure bootstrap from s = T, mirror of the forward case
    vec x0_hat = predict_opposite_endpoint(pred, sched, t, x_s, xT, 1);
    mean.resize(d);
    for (size_t i = 0; i < d; ++i) mean[i] = ct.alpha * x0_hat[i] + ct.beta * xT[i];
    var = backward_boot_var(sched, policy, t);
  } else if (pred.param == Parameterization::z_pred) {
    vec z_hat = pred.fn(s, x_s, xT, 1);
    mean = backward_mean_zform(sched, policy, t, s, x_s, xT, z_hat);
    var = delta2(sched, policy, t, s) * ct.sigma2 / cs.sigma2;
  } else {
    vec x0_hat = predict_opposite_endpoint(pred, sched, s, x_s, xT, 1);
    GaussianTransition k = backward_transition(sched, policy, t, s, x_s, {x0_hat, xT});
    mean = std::move(k.mean);
    var = k.var;
  }
  if (!last && var > 0.0) {
    double sd = std::sqrt(var);
    for (size_t i = 0; i < d; ++i) mean[i] += sd * rng.normal();
  }
  check_state(mean, "backward_step", t);
  return mean;
}

vec forward_step(const NetParams& params, const BridgeSchedule& sched,
                 const TransitionVariancePolicy& policy, double t, double s, const vec& x_t,
                 const vec& x0, Rng& rng, bool last) {
  return forward_step(net_predictor(params, sched.T()), sched, policy, t, s, x_t, x0, rng, last);
}

vec backward_step(const NetParams& params, const BridgeSchedule& sched,
                  const TransitionVariancePolicy& policy, double t, double s, const vec& x_s,
                  const vec& xT, Rng& rng, bool last) {
  return backward_step(net_predictor(params, sched.T()), sched, policy, t, s, x_s, xT, rng, last);
}

vec sample(const PredictorIface& pred, const BridgeSchedule& sched,
           const TransitionVariancePolicy& policy, const SamplerConfig& cfg, const vec& source,
           Trajectory* traj) {
  if (!(cfg.eta >= 0.0 && cfg.eta <= 1.0))
    throw ConfigError(cat("sample: eta=", cfg.eta, " outside [0,1]"));
  if (!all_finite(source) || source.empty()) throw DomainError("sample: bad source vector");
  TransitionVariancePolicy pol = policy;
  pol.eta = cfg.eta;
  std::vector<double> grid = time_grid(sched, cfg.nfe);
  Rng rng(cfg.seed);
  vec x = source;
  if (traj) {
    traj->states.clear();
    traj->states.emplace_back(cfg.direction == Direction::forward ? 0.0 : sched.T(), x);
  }
  try {
    if (cfg.direction == Direction::forward) {
      for (uint32_t i = 0; i < cfg.nfe; ++i) {
        bool last = (i + 1 == cfg.nfe);
        x = forward_step(pred, sched, pol, grid[i], grid[i + 1], x, source, rng, last);
        if (traj) traj->states.emplace_back(grid[i + 1], x);
      }
    } else {
      for (uint32_t i = cfg.nfe; i > 0; --i) {
        bool last = (i == 1);
        x = backward_step(pred, sched, pol, grid[i - 1], grid[i], x, source, rng, last);
        if (traj) traj->states.emplace_back(grid[i - 1], x);
      }
    }
  } catch (const NumericError& e) {
    throw NumericError(cat(e.what(), " (sampling ", direction_string(cfg.direction), ", seed ",
                           cfg.seed, ")"));
  }
  return x;
}

vec sample(const NetParams& params, const BridgeSchedule& sched,
           const TransitionVariancePolicy& policy, const SamplerConfig& cfg, const vec& source,
           Trajectory* traj) {
  return sample(net_predictor(params, sched.T()), sched, policy, cfg, source, traj);
}

}  // namespace bdbm
