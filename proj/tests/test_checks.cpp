#include <algorithm>

#include "core/checks.hpp"
#include "doctest.h"

using namespace bdbm;

namespace {

const CheckRow& row_named(const std::vector<CheckRow>& rows, const std::string& name) {
  for (const auto& r : rows)
    if (r.check == name) return r;
  REQUIRE_MESSAGE(false, "missing row: ", name);
  static CheckRow dummy;
  return dummy;
}

}  // namespace

TEST_CASE("kernel suite passes on the honest implementation") {
  std::vector<CheckRow> rows = run_kernel_checks(31337);
  CHECK(all_pass(rows));
  CHECK(rows.size() >= 5);
  for (const char* name : {"cke_composition", "bayes_duality", "delta2_spot",
                           "zform_mean_agreement", "boundary_collapse"})
    CHECK(row_named(rows, name).pass);
}

TEST_CASE("doob, tweedie and grad suites pass") {
  CHECK(all_pass(run_doob_checks(7)));
  CHECK(all_pass(run_tweedie_checks(7)));
  CHECK(all_pass(run_grad_checks(7)));
}

TEST_CASE("run_suite dispatch and the all-suites aggregate") {
  std::vector<CheckRow> all = run_suite("all", 11);
  CHECK(all_pass(all));
  CHECK(all.size() > run_suite("kernels", 11).size());
  CHECK_THROWS_AS((void)run_suite("bogus", 11), ConfigError);
  CHECK(!all_pass({}));  // an empty report is not a pass
}

TEST_CASE("a mis-scaled backward variance is caught by the duality check") {
  MutationFlags m;
  m.backward_var_scale = 2.0;
  std::vector<CheckRow> rows = run_kernel_checks(31337, m);
  CHECK(!all_pass(rows));
  CHECK(!row_named(rows, "bayes_duality").pass);
  // the policy spot value does not involve the backward kernel
  CHECK(row_named(rows, "delta2_spot").pass);
}

TEST_CASE("the wrong variance-policy variant is caught by the spot check") {
  MutationFlags m;
  m.wrong_delta_variant = true;
  std::vector<CheckRow> rows = run_kernel_checks(31337, m);
  CHECK(!row_named(rows, "delta2_spot").pass);
  CHECK(row_named(rows, "bayes_duality").pass);  // duality holds for any valid variant
}

TEST_CASE("dropping the mask channels is caught by the sensitivity check") {
  std::vector<CheckRow> honest = run_grad_checks(5);
  CHECK(row_named(honest, "mask_channel_sensitivity").pass);
  CHECK(row_named(honest, "mask_slot_layout").pass);

  MutationFlags m;
  m.drop_mask_channel = true;
  std::vector<CheckRow> rows = run_grad_checks(5, m);
  CHECK(!row_named(rows, "mask_channel_sensitivity").pass);
  CHECK(!all_pass(rows));
}

TEST_CASE("cke composition residual stays at solver precision across policies") {
  BridgeSchedule sched = BridgeSchedule::brownian(2.0, 1.0);
  Rng rng(63);
  for (double eta : {0.0, 0.37, 1.0}) {
    TransitionVariancePolicy pol;
    pol.variant = DeltaVariant::C_alpha_ratio;
    pol.eta = eta;
    CHECK(cke_composition_check(sched, pol, 200, rng) < 1e-9);
  }
  TransitionVariancePolicy pa;
  pa.variant = DeltaVariant::A_zero;
  CHECK(cke_composition_check(sched, pa, 200, rng) < 1e-9);
}

TEST_CASE("bayes duality needs densities on both sides") {
  BridgeSchedule sched = BridgeSchedule::brownian(2.0, 1.0);
  Rng rng(64);
  TransitionVariancePolicy pa;
  pa.variant = DeltaVariant::A_zero;  // Dirac kernels have no density
  CHECK_THROWS_WITH_AS((void)bayes_duality_check(sched, pa, 10, rng),
                       doctest::Contains("delta2 > 0"), DomainError);

  TransitionVariancePolicy pc;
  pc.variant = DeltaVariant::C_alpha_ratio;
  CHECK(bayes_duality_check(sched, pc, 200, rng) < 1e-9);
  // the same identity evaluated with a corrupted backward variance blows up
  CHECK(bayes_duality_check(sched, pc, 200, rng, 2.0) > 1e-3);
}

TEST_CASE("tweedie window estimate agrees with the analytic posterior mean") {
  Mat cov(2, 2);
  cov(0, 0) = 1.0;
  cov(0, 1) = 0.6;
  cov(1, 0) = 0.6;
  cov(1, 1) = 1.5;
  Coupling c = Coupling::gaussian({0.2, -0.1}, cov);
  BridgeSchedule sched = BridgeSchedule::brownian(2.0, 1.0);
  Rng rng(99);
  double z = tweedie_mc_check(c, sched, 0.5, 60000, rng);
  CHECK(z < 3.0);
  // corrupting the score by 2x must push the estimate many sigmas out
  Rng rng2(99);
  CHECK(tweedie_mc_check(c, sched, 0.5, 60000, rng2, 2.0) > 3.0);
}

TEST_CASE("tweedie check refuses windows that are too sparse") {
  Mat cov(2, 2);
  cov(0, 0) = 1.0;
  cov(1, 1) = 1.0;
  Coupling c = Coupling::gaussian({0.0, 0.0}, cov);
  BridgeSchedule sched = BridgeSchedule::brownian(2.0, 1.0);
  Rng rng(1);
  CHECK_THROWS_WITH_AS((void)tweedie_mc_check(c, sched, 0.5, 50, rng),
                       doctest::Contains("sparse"), DomainError);
}
