#pragma once

#include <functional>
#include <utility>

#include "core/kernels.hpp"
#include "core/net.hpp"

namespace bdbm {

enum class Direction { forward, backward };

Direction direction_from_string(const std::string& s);
const char* direction_string(Direction d);

struct SamplerConfig {
  Direction direction = Direction::forward;
  uint32_t nfe = 200;
  double eta = 1.0;  // overrides the policy's eta for this run
  uint64_t seed = 0;
  bool record_trajectory = false;
};

struct Trajectory {
  std::vector<std::pair<double, vec>> states;  // (t, x) from source to destination
};

// The samplers only need "query the model at (t, x, known endpoint, m)" plus
// the parameterization to invert its output; tests substitute doubles here.
struct PredictorIface {
  Parameterization param = Parameterization::z_pred;
  std::function<vec(double t, const vec& x_t, const vec& known, int m)> fn;
};

PredictorIface net_predictor(const NetParams& params, double T);

// Uniform-stride time grid with nfe intervals covering [0, T].  In discrete
// mode nfe must divide the step count exactly (no silent rounding).
std::vector<double> time_grid(const BridgeSchedule& sched, uint32_t nfe);

// Recover the opposite endpoint estimate from one model query.
//   z_pred:        inverts x_t = alpha x0 + beta xT + sigma z (divisor beta
//                  forward / alpha backward must exceed 1e-9)
//   endpoint_sum:  prediction minus the known endpoint
//   endpoint_pair: the relevant output half (xT first, x0 second)
vec predict_opposite_endpoint(const PredictorIface& pred, const BridgeSchedule& sched, double t,
                              const vec& x_t, const vec& known_endpoint, int m);
vec predict_opposite_endpoint(const NetParams& params, const BridgeSchedule& sched, double t,
                              const vec& x_t, const vec& known_endpoint, int m);

// One ancestral step t -> s (forward) or s -> t (backward).  `last` zeroes
// the injected noise (final step of the travel direction).  At the departure
// boundary (sigma = 0) the step bootstraps: the model is queried at the
// destination time with the source value standing in for the state, and the
// step samples from the endpoint-conditioned marginal scaled by the policy.
vec forward_step(const PredictorIface& pred, const BridgeSchedule& sched,
                 const TransitionVariancePolicy& policy, double t, double s, const vec& x_t,
                 const vec& x0, Rng& rng, bool last);
vec backward_step(const PredictorIface& pred, const BridgeSchedule& sched,
                  const TransitionVariancePolicy& policy, double t, double s, const vec& x_s,
                  const vec& xT, Rng& rng, bool last);
vec forward_step(const NetParams& params, const BridgeSchedule& sched,
                 const TransitionVariancePolicy& policy, double t, double s, const vec& x_t,
                 const vec& x0, Rng& rng, bool last);
vec backward_step(const NetParams& params, const BridgeSchedule& sched,
                  const TransitionVariancePolicy& policy, double t, double s, const vec& x_s,
                  const vec& xT, Rng& rng, bool last);

// Full ancestral run across the NFE grid; returns the destination endpoint.
vec sample(const PredictorIface& pred, const BridgeSchedule& sched,
           const TransitionVariancePolicy& policy, const SamplerConfig& cfg, const vec& source,
           Trajectory* traj = nullptr);
vec sample(const NetParams& params, const BridgeSchedule& sched,
           const TransitionVariancePolicy& policy, const SamplerConfig& cfg, const vec& source,
           Trajectory* traj = nullptr);

}  // namespace bdbm
