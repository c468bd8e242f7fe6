#pragma once

#include "core/rng.hpp"
#include "core/schedule.hpp"
#include "core/smallmat.hpp"

namespace bdbm {

// A coupled endpoint sample: x0 from domain A, xT from domain B.
struct EndpointPair {
  vec x0;
  vec xT;
};

// Isotropic Gaussian kernel: N(mean, var * I).
struct GaussianTransition {
  vec mean;
  double var = 0.0;
};

// A bridge sample x at time t together with the noise realization that
// produced it (x = alpha_t x0 + beta_t xT + sigma_t z).
struct BridgeState {
  double t = 0.0;
  vec x;
  vec z;
};

// Conditional form of a jointly Gaussian coupling:
//   y_B | y_A = x0  ~  N(M x0 + c, v_B * I)
// Used by the analytic-score oracle.
struct GaussianCouplingSpec {
  Mat M;
  vec c;
  double v_B = 0.0;
};

void check_pair(const EndpointPair& pair);

// Bridge marginal q(x_t | x0, xT): N(alpha_t x0 + beta_t xT, sigma_t^2 I).
GaussianTransition marginal(const BridgeSchedule& sched, double t, const EndpointPair& pair);

BridgeState sample_marginal(const BridgeSchedule& sched, double t, const EndpointPair& pair,
                            Rng& rng);

// Forward transition q(x_s | x_t, x0, xT) for t < s, endpoint form:
//   mean = alpha_s x0 + beta_s xT + sqrt(sigma_s^2 - delta^2) (x_t - alpha_t x0 - beta_t xT)/sigma_t
//   var  = delta^2
// At sigma_t = 0 the conditioning is vacuous and the kernel collapses to the
// marginal at s (mean alpha_s x0 + beta_s xT, var sigma_s^2).
GaussianTransition forward_transition(const BridgeSchedule& sched,
                                      const TransitionVariancePolicy& policy, double t, double s,
                                      const vec& x_t, const EndpointPair& pair);

// Backward transition q(x_t | x_s, x0, xT) for t < s:
//   mean = alpha_t x0 + beta_t xT + sigma_t sqrt(sigma_s^2 - delta^2) (x_s - alpha_s x0 - beta_s xT)/sigma_s^2
//   var  = delta^2 sigma_t^2 / sigma_s^2
// At s = T (sigma_s = 0) it collapses to the marginal at t.
GaussianTransition backward_transition(const BridgeSchedule& sched,
                                       const TransitionVariancePolicy& policy, double t, double s,
                                       const vec& x_s, const EndpointPair& pair);

// Noise forms of the same means, written against the recorded/predicted z
// instead of the unknown endpoint.  These are what the ancestral samplers
// evaluate; they agree with the endpoint forms identically.
//   forward:  (beta_s/beta_t) x_t + (alpha_s - alpha_t beta_s/beta_t) x0
//             + (sqrt(sigma_s^2-delta^2) - sigma_t beta_s/beta_t) z
//   backward: (alpha_t/alpha_s) x_s + (beta_t - beta_s alpha_t/alpha_s) xT
//             + (sigma_t sqrt(sigma_s^2-delta^2)/sigma_s - sigma_s alpha_t/alpha_s) z
vec forward_mean_zform(const BridgeSchedule& sched, const TransitionVariancePolicy& policy,
                       double t, double s, const vec& x_t, const vec& x0, const vec& z);
vec backward_mean_zform(const BridgeSchedule& sched, const TransitionVariancePolicy& policy,
                        double t, double s, const vec& x_s, const vec& xT, const vec& z);

// Log-density of N(mean, var I) at x; var must be positive (a Dirac kernel
// has no density).
double log_density(const GaussianTransition& kernel, const vec& x);

// Posterior endpoint mean via Tweedie's formula:
//   E[y_B | x, y_A] = (x - alpha y_A + sigma2 * score) / beta
// where score = grad_x log p(x | y_A).
vec tweedie_endpoint(const vec& x, const vec& y_A, double alpha, double beta, double sigma2,
                     const vec& score);

// Exact score of p(x_t | x0) when the coupling is Gaussian:
// x_t | x0 ~ N(alpha_t x0 + beta_t (M x0 + c), (beta_t^2 v_B + sigma_t^2) I).
vec analytic_score_gaussian_coupling(const BridgeSchedule& sched, double t, const vec& x_t,
                                     const vec& x0, const GaussianCouplingSpec& coupling);

}  // namespace bdbm
