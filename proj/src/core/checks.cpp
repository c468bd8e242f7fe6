#include "core/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace bdbm {

namespace {

// random interior t < s with enough separation to keep the algebra away from
// degenerate denominators
void draw_times(const BridgeSchedule& sched, Rng& rng, double& t, double& s) {
  const double T = sched.T();
  for (;;) {
    double a = rng.uniform(0.001 * T, 0.999 * T);
    double b = rng.uniform(0.001 * T, 0.999 * T);
    if (a > b) std::swap(a, b);
    if (b - a >= 1e-3 * T) {
      t = a;
      s = b;
      return;
    }
  }
}

EndpointPair draw_pair(size_t d, Rng& rng) {
  EndpointPair pair;
  pair.x0.resize(d);
  pair.xT.resize(d);
  for (size_t i = 0; i < d; ++i) {
    pair.x0[i] = rng.uniform(-2.0, 2.0);
    pair.xT[i] = rng.uniform(-2.0, 2.0);
  }
  return pair;
}

}  // namespace

double cke_composition_check(const BridgeSchedule& sched, const TransitionVariancePolicy& policy,
                             int trials, Rng& rng) {
  require(trials >= 1, "cke_composition_check: trials must be >= 1");
  const size_t d = 2;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    double t, s;
    draw_times(sched, rng, t, s);
    EndpointPair pair = draw_pair(d, rng);
    GaussianTransition mt = marginal(sched, t, pair);
    GaussianTransition ms = marginal(sched, s, pair);

    // E[mean_{t->s}(x_t)] over x_t ~ marginal(t) is the mean evaluated there
    GaussianTransition tr0 = forward_transition(sched, policy, t, s, mt.mean, pair);
    for (size_t i = 0; i < d; ++i) worst = std::max(worst, std::abs(tr0.mean[i] - ms.mean[i]));

    // transition mean is affine in x_t; recover the coefficient by offsetting
    vec shifted = mt.mean;
    for (double& v : shifted) v += 1.0;
    GaussianTransition tr1 = forward_transition(sched, policy, t, s, shifted, pair);
    double coeff = tr1.mean[0] - tr0.mean[0];
    double composed_var = coeff * coeff * mt.var + tr0.var;
    worst = std::max(worst, std::abs(composed_var - ms.var));
  }
  return worst;
}

double bayes_duality_check(const BridgeSchedule& sched, const TransitionVariancePolicy& policy,
                           int trials, Rng& rng, double backward_var_scale) {
  require(trials >= 1, "bayes_duality_check: trials must be >= 1");
  const size_t d = 2;
  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    double t, s;
    draw_times(sched, rng, t, s);
    if (delta2(sched, policy, t, s) <= 0.0)
      throw DomainError(
          "bayes_duality_check: needs delta2 > 0 (eta > 0 and a stochastic variant); both "
          "kernels must have densities");
    EndpointPair pair = draw_pair(d, rng);
    BridgeState bt = sample_marginal(sched, t, pair, rng);

    GaussianTransition fwd = forward_transition(sched, policy, t, s, bt.x, pair);
    vec x_s = fwd.mean;
    double sd = std::sqrt(fwd.var);
    for (double& v : x_s) v += sd * rng.normal();

    GaussianTransition bwd = backward_transition(sched, policy, t, s, x_s, pair);
    bwd.var *= backward_var_scale;

    double lhs = log_density(fwd, x_s) + log_density(marginal(sched, t, pair), bt.x);
    double rhs = log_density(bwd, bt.x) + log_density(marginal(sched, s, pair), x_s);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

double tweedie_mc_check(Coupling& coupling, const BridgeSchedule& sched, double t,
                        size_t n_samples, Rng& rng, double score_scale) {
  require(coupling.kind() == CouplingKind::gaussian,
          "tweedie_mc_check: needs a Gaussian coupling (analytic score)");
  require(t > 0.0 && t < sched.T(), "tweedie_mc_check: t must be interior");
  const GaussianCouplingSpec spec = coupling.conditional();
  const size_t d = coupling.d();
  const ScheduleTriple tr = sched.eval(t);
  const double sigma = std::sqrt(tr.sigma2);

  // condition on one fixed y_A; the posterior identity is per-source
  vec y_A = coupling.sample(rng).x0;
  vec cond_mean = matvec(spec.M, y_A);
  for (size_t i = 0; i < d; ++i) cond_mean[i] += spec.c[i];
  const double sd_B = std::sqrt(spec.v_B);

  std::vector<vec> xs(n_samples), ys(n_samples);
  for (size_t i = 0; i < n_samples; ++i) {
    vec y_B(d), x(d);
    for (size_t k = 0; k < d; ++k) {
      y_B[k] = cond_mean[k] + sd_B * rng.normal();
      x[k] = tr.alpha * y_A[k] + tr.beta * y_B[k] + sigma * rng.normal();
    }
    ys[i] = std::move(y_B);
    xs[i] = std::move(x);
  }

  // window: k nearest draws to the conditional mode of x_t
  const size_t k_window = std::max<size_t>(100, n_samples / 200);
  if (n_samples < k_window)
    throw DomainError("tweedie_mc_check: window too sparse (<" + std::to_string(k_window) +
                      " samples); increase n_samples");
  // probe one sd off the conditional mode: the score vanishes at the mode
  // itself, which would make the check blind to score corruption
  const double probe_sd = std::sqrt(tr.beta * tr.beta * spec.v_B + tr.sigma2);
  vec query(d);
  for (size_t i = 0; i < d; ++i)
    query[i] = tr.alpha * y_A[i] + tr.beta * cond_mean[i] + probe_sd;
  std::vector<size_t> order(n_samples);
  std::iota(order.begin(), order.end(), size_t{0});
  auto dist2 = [&](size_t i) {
    double r = 0.0;
    for (size_t kk = 0; kk < d; ++kk) {
      double dd = xs[i][kk] - query[kk];
      r += dd * dd;
    }
    return r;
  };
  std::nth_element(order.begin(), order.begin() + long(k_window), order.end(),
                   [&](size_t a, size_t b) { return dist2(a) < dist2(b); });

  // evaluate the analytic side at the window's own mean x so the locally
  // linear part of E[y_B|x] cancels instead of biasing the comparison
  vec xbar(d, 0.0), mhat(d, 0.0);
  for (size_t w = 0; w < k_window; ++w) {
    for (size_t i = 0; i < d; ++i) {
      xbar[i] += xs[order[w]][i];
      mhat[i] += ys[order[w]][i];
    }
  }
  for (size_t i = 0; i < d; ++i) {
    xbar[i] /= double(k_window);
    mhat[i] /= double(k_window);
  }
  vec svar(d, 0.0);
  for (size_t w = 0; w < k_window; ++w)
    for (size_t i = 0; i < d; ++i) {
      double c = ys[order[w]][i] - mhat[i];
      svar[i] += c * c;
    }
  for (size_t i = 0; i < d; ++i) svar[i] /= double(k_window - 1);

  vec score = analytic_score_gaussian_coupling(sched, t, xbar, y_A, spec);
  for (double& v : score) v *= score_scale;
  vec yhat = tweedie_endpoint(xbar, y_A, tr.alpha, tr.beta, tr.sigma2, score);

  double z = 0.0;
  for (size_t i = 0; i < d; ++i) {
    double se = std::sqrt(svar[i] / double(k_window));
    se = std::max(se, 1e-12 * (1.0 + std::abs(mhat[i])));
    z = std::max(z, std::abs(yhat[i] - mhat[i]) / se);
  }
  require(std::isfinite(z), "tweedie_mc_check: non-finite z-score");
  return z;
}

std::vector<CheckRow> run_kernel_checks(uint64_t seed, const MutationFlags& m) {
  std::vector<CheckRow> rows;
  BridgeSchedule sched = BridgeSchedule::brownian(2.0, 1.0);
  TransitionVariancePolicy pol_c{DeltaVariant::C_alpha_ratio, 1.0};
  TransitionVariancePolicy pol_c0{DeltaVariant::C_alpha_ratio, 0.0};
  TransitionVariancePolicy pol_a{DeltaVariant::A_zero, 1.0};

  {
    Rng rng(substream_seed(seed, 1));
    double v = cke_composition_check(sched, pol_c, 1000, rng);
    rows.push_back({"cke_composition", v, 1e-9, v < 1e-9});
  }
  {
    Rng rng(substream_seed(seed, 2));
    double v = cke_composition_check(sched, pol_c0, 1000, rng);
    rows.push_back({"cke_composition_eta0", v, 1e-9, v < 1e-9});
  }
  {
    Rng rng(substream_seed(seed, 3));
    double v = cke_composition_check(sched, pol_a, 1000, rng);
    rows.push_back({"cke_composition_deterministic", v, 1e-9, v < 1e-9});
  }
  {
    Rng rng(substream_seed(seed, 4));
    double v = bayes_duality_check(sched, pol_c, 1000, rng, m.backward_var_scale);
    rows.push_back({"bayes_duality", v, 1e-9, v < 1e-9});
  }
  {
    // frozen spot value: brownian k=2, T=1, (t,s)=(0.25,0.5) has delta2 = 1/3
    TransitionVariancePolicy pol = pol_c;
    if (m.wrong_delta_variant) pol.variant = DeltaVariant::A_zero;
    double v = std::abs(delta2(sched, pol, 0.25, 0.5) - 1.0 / 3.0);
    rows.push_back({"delta2_spot", v, 1e-12, v < 1e-12});
  }
  {
    // endpoint-form and noise-form transition means are the same function
    Rng rng(substream_seed(seed, 6));
    double v = 0.0;
    for (const auto& pol : {pol_c, pol_a}) {
      for (int i = 0; i < 1000; ++i) {
        double t, s;
        draw_times(sched, rng, t, s);
        EndpointPair pair = draw_pair(2, rng);
        vec z = rng.normal_vec(2);
        ScheduleTriple et = sched.eval(t), es = sched.eval(s);
        vec x_t(2), x_s(2);
        for (size_t kk = 0; kk < 2; ++kk) {
          x_t[kk] = et.alpha * pair.x0[kk] + et.beta * pair.xT[kk] + std::sqrt(et.sigma2) * z[kk];
          x_s[kk] = es.alpha * pair.x0[kk] + es.beta * pair.xT[kk] + std::sqrt(es.sigma2) * z[kk];
        }
        vec fz = forward_mean_zform(sched, pol, t, s, x_t, pair.x0, z);
        vec bz = backward_mean_zform(sched, pol, t, s, x_s, pair.xT, z);
        GaussianTransition fe = forward_transition(sched, pol, t, s, x_t, pair);
        GaussianTransition be = backward_transition(sched, pol, t, s, x_s, pair);
        for (size_t kk = 0; kk < 2; ++kk) {
          v = std::max(v, std::abs(fz[kk] - fe.mean[kk]));
          v = std::max(v, std::abs(bz[kk] - be.mean[kk]));
        }
      }
    }
    rows.push_back({"zform_mean_agreement", v, 1e-10, v < 1e-10});
  }
  {
    // kernels from a degenerate boundary must collapse to the plain marginal
    Rng rng(substream_seed(seed, 5));
    double v = 0.0;
    for (int i = 0; i < 100; ++i) {
      EndpointPair pair = draw_pair(2, rng);
      double s = rng.uniform(0.01, 0.99);
      GaussianTransition fb = forward_transition(sched, pol_c, 0.0, s, pair.x0, pair);
      GaussianTransition ms = marginal(sched, s, pair);
      GaussianTransition bb = backward_transition(sched, pol_c, s, 1.0, pair.xT, pair);
      for (size_t kk = 0; kk < 2; ++kk) {
        v = std::max(v, std::abs(fb.mean[kk] - ms.mean[kk]));
        v = std::max(v, std::abs(bb.mean[kk] - ms.mean[kk]));
      }
      v = std::max(v, std::abs(fb.var - ms.var));
      v = std::max(v, std::abs(bb.var - ms.var));
    }
    rows.push_back({"boundary_collapse", v, 1e-12, v < 1e-12});
  }
  return rows;
}

std::vector<CheckRow> run_doob_checks(uint64_t seed) {
  std::vector<CheckRow> rows;
  double max_dev = 0.0, max_mass_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(substream_seed(seed, uint64_t(trial), 0x0d00b));
    size_t n = 2 + rng.below(15);    // 2..16 states
    size_t steps = 1 + rng.below(10);  // 1..10 steps
    ChainSpec chain = random_chain(n, steps, rng);
    size_t start = rng.below(n);
    size_t target = rng.below(n);
    DoobReport rep = doob_check(chain, start, target);
    max_dev = std::max(max_dev, rep.max_dev);
    max_mass_err = std::max(max_mass_err, std::abs(rep.terminal_mass - 1.0));
  }
  rows.push_back({"doob_marginals", max_dev, 1e-12, max_dev < 1e-12});
  rows.push_back({"doob_terminal_mass", max_mass_err, 1e-12, max_mass_err < 1e-12});
  return rows;
}

std::vector<CheckRow> run_tweedie_checks(uint64_t seed) {
  std::vector<CheckRow> rows;
  Rng rng(substream_seed(seed, 0x7e3d1));
  vec mean = {0.3, -0.2};
  Mat cov(2, 2);
  cov(0, 0) = 1.0;
  cov(0, 1) = 0.6;
  cov(1, 0) = 0.6;
  cov(1, 1) = 1.3;
  Coupling coupling = Coupling::gaussian(mean, cov);
  BridgeSchedule sched = BridgeSchedule::brownian(2.0, 1.0);
  double z = tweedie_mc_check(coupling, sched, 0.4, 100000, rng);
  rows.push_back({"tweedie_posterior_mean", z, 3.0, z < 3.0});
  return rows;
}

std::vector<CheckRow> run_grad_checks(uint64_t seed, const MutationFlags& m) {
  std::vector<CheckRow> rows;
  {
    Rng rng(substream_seed(seed, 0x96ad));
    double worst = 0.0;
    Parameterization params[] = {Parameterization::z_pred, Parameterization::endpoint_pair};
    for (Parameterization pz : params) {
      NetParams p = make_net(2, {16, 16}, 4, pz, substream_seed(seed, uint64_t(pz), 0x91));
      vec x_t = rng.normal_vec(2), known = rng.normal_vec(2);
      vec input = assemble_input(p, rng.uniform(), x_t, known, int(rng.below(2)));
      worst = std::max(worst, grad_check(p, input, 100, rng));
    }
    rows.push_back({"grad_finite_diff", worst, 1e-4, worst < 1e-4});
  }
  {
    // flipping only the mask channels (both slots zero) must move the output
    Rng rng(substream_seed(seed, 0x3a5c));
    NetParams p = make_net(2, {16, 16}, 4, Parameterization::z_pred, substream_seed(seed, 7, 0x91));
    vec x_t = rng.normal_vec(2);
    vec zero(2, 0.0);
    vec in0 = assemble_input(p, 0.5, x_t, zero, 0);
    vec in1 = assemble_input(p, 0.5, x_t, zero, 1);
    if (m.drop_mask_channel) {
      size_t n = p.input_dim();
      in0[n - 2] = in0[n - 1] = 0.0;
      in1[n - 2] = in1[n - 1] = 0.0;
    }
    vec y0 = net_forward(p, in0);
    vec y1 = net_forward(p, in1);
    double v = 0.0;
    for (size_t i = 0; i < y0.size(); ++i) v = std::max(v, std::abs(y0[i] - y1[i]));
    rows.push_back({"mask_channel_sensitivity", v, 1e-8, v > 1e-8});
  }
  {
    // the unused endpoint slot must be exactly zero, not just small
    Rng rng(substream_seed(seed, 0x5107));
    NetParams p = make_net(3, {8}, 4, Parameterization::z_pred, substream_seed(seed, 9, 0x91));
    vec x_t = rng.normal_vec(3), known = rng.normal_vec(3);
    vec in0 = assemble_input(p, 0.25, x_t, known, 0);
    vec in1 = assemble_input(p, 0.25, x_t, known, 1);
    double v = 0.0;
    for (size_t i = 0; i < 3; ++i) {
      v = std::max(v, std::abs(in0[2 * 3 + i]));  // slot_B dead when m=0
      v = std::max(v, std::abs(in1[3 + i]));      // slot_A dead when m=1
    }
    size_t n = p.input_dim();
    v = std::max(v, std::abs(in0[n - 2] - 0.0) + std::abs(in0[n - 1] - 1.0));
    v = std::max(v, std::abs(in1[n - 2] - 1.0) + std::abs(in1[n - 1] - 0.0));
    rows.push_back({"mask_slot_layout", v, 0.0, v == 0.0});
  }
  return rows;
}

std::vector<CheckRow> run_suite(const std::string& suite, uint64_t seed, const MutationFlags& m) {
  std::vector<CheckRow> rows;
  auto append = [&rows](std::vector<CheckRow> r) {
    for (auto& row : r) rows.push_back(std::move(row));
  };
  if (suite == "kernels")
    append(run_kernel_checks(seed, m));
  else if (suite == "doob")
    append(run_doob_checks(seed));
  else if (suite == "tweedie")
    append(run_tweedie_checks(seed));
  else if (suite == "grad")
    append(run_grad_checks(seed, m));
  else if (suite == "all") {
    append(run_kernel_checks(seed, m));
    append(run_doob_checks(seed));
    append(run_tweedie_checks(seed));
    append(run_grad_checks(seed, m));
  } else {
    throw ConfigError("unknown verify suite '" + suite +
                      "' (expected kernels, doob, tweedie, grad, or all)");
  }
  return rows;
}

bool all_pass(const std::vector<CheckRow>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return !rows.empty();
}

}  // namespace bdbm
