#pragma once

#include "core/coupling.hpp"
#include "core/doob.hpp"
#include "core/metrics.hpp"
#include "core/net.hpp"

namespace bdbm {

// Composition residual of marginal(t) with the t->s transition against the
// marginal at s: mean and variance must match by Gaussian moment algebra.
double cke_composition_check(const BridgeSchedule& sched, const TransitionVariancePolicy& policy,
                             int trials, Rng& rng);

// Pointwise log-density identity
//   log q(x_s|x_t) + log q(x_t) = log q(x_t|x_s) + log q(x_s)
// maximized over random draws.  Needs delta2 > 0 (both kernels must have
// densities).  backward_var_scale != 1 deliberately mis-scales the backward
// variance to prove the check is sensitive.
double bayes_duality_check(const BridgeSchedule& sched, const TransitionVariancePolicy& policy,
                           int trials, Rng& rng, double backward_var_scale = 1.0);

// Posterior-mean identity check: analytic Tweedie endpoint vs a Monte-Carlo
// window estimate of E[y_B | x_t, y_A].  Returns the deviation in standard
// errors.  score_scale != 1 corrupts the score to prove sensitivity.
double tweedie_mc_check(Coupling& coupling, const BridgeSchedule& sched, double t,
                        size_t n_samples, Rng& rng, double score_scale = 1.0);

struct CheckRow {
  std::string check;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

// Deliberate defects for verifying that the suite actually fails when the
// implementation is wrong.
struct MutationFlags {
  double backward_var_scale = 1.0;   // mis-scale the backward-transition variance
  bool drop_mask_channel = false;    // zero the mask channels before the net sees them
  bool wrong_delta_variant = false;  // evaluate the variance-policy spot value under variant A
};

std::vector<CheckRow> run_kernel_checks(uint64_t seed, const MutationFlags& m = {});
std::vector<CheckRow> run_doob_checks(uint64_t seed);
std::vector<CheckRow> run_tweedie_checks(uint64_t seed);
std::vector<CheckRow> run_grad_checks(uint64_t seed, const MutationFlags& m = {});

// suite in {kernels, doob, tweedie, grad, all}
std::vector<CheckRow> run_suite(const std::string& suite, uint64_t seed,
                                const MutationFlags& m = {});

bool all_pass(const std::vector<CheckRow>& rows);

}  // namespace bdbm
