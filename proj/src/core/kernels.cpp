#include "core/kernels.hpp"

#include <cmath>

namespace bdbm {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_vec(const vec& v, size_t d, const char* what) {
  if (v.size() != d) throw DomainError(cat(what, ": dimension ", v.size(), " != ", d));
  if (!all_finite(v)) throw DomainError(cat(what, ": non-finite entries"));
}
}  // namespace

void check_pair(const EndpointPair& pair) {
  if (pair.x0.size() != pair.xT.size())
    throw DomainError(cat("endpoint pair: dim mismatch ", pair.x0.size(), " vs ", pair.xT.size()));
  if (pair.x0.empty()) throw DomainError("endpoint pair: empty vectors");
  if (!all_finite(pair.x0) || !all_finite(pair.xT))
    throw DomainError("endpoint pair: non-finite entries");
}

GaussianTransition marginal(const BridgeSchedule& sched, double t, const EndpointPair& pair) {
  check_pair(pair);
  ScheduleTriple c = sched.eval(t);
  GaussianTransition out;
  out.var = c.sigma2;
  out.mean.resize(pair.x0.size());
  for (size_t i = 0; i < pair.x0.size(); ++i)
    out.mean[i] = c.alpha * pair.x0[i] + c.beta * pair.xT[i];
  return out;
}

BridgeState sample_marginal(const BridgeSchedule& sched, double t, const EndpointPair& pair,
                            Rng& rng) {
  GaussianTransition m = marginal(sched, t, pair);
  BridgeState st;
  st.t = t;
  st.z = rng.normal_vec(m.mean.size());
  st.x.resize(m.mean.size());
  double sigma = std::sqrt(m.var);
  for (size_t i = 0; i < m.mean.size(); ++i) st.x[i] = m.mean[i] + sigma * st.z[i];
  return st;
}

GaussianTransition forward_transition(const BridgeSchedule& sched,
                                      const TransitionVariancePolicy& policy, double t, double s,
                                      const vec& x_t, const EndpointPair& pair) {
  if (!(t < s)) throw DomainError(cat("forward_transition: need t < s, got t=", t, " s=", s));
  check_pair(pair);
  check_vec(x_t, pair.x0.size(), "forward_transition: x_t");
  ScheduleTriple ct = sched.eval(t);
  ScheduleTriple cs = sched.eval(s);
  GaussianTransition out;
  out.mean.resize(x_t.size());
  if (ct.sigma2 == 0.0) {
    // conditioning on a Dirac state is vacuous: direct marginal at s
    for (size_t i = 0; i < x_t.size(); ++i)
      out.mean[i] = cs.alpha * pair.x0[i] + cs.beta * pair.xT[i];
    out.var = cs.sigma2;
    return out;
  }
  double d2 = delta2(sched, policy, t, s);
  double a = std::sqrt(cs.sigma2 - d2) / std::sqrt(ct.sigma2);
  for (size_t i = 0; i < x_t.size(); ++i) {
    double mu_t = ct.alpha * pair.x0[i] + ct.beta * pair.xT[i];
    out.mean[i] = cs.alpha * pair.x0[i] + cs.beta * pair.xT[i] + a * (x_t[i] - mu_t);
  }
  out.var = d2;
  return out;
}

GaussianTransition backward_transition(const BridgeSchedule& sched,
                                       const TransitionVariancePolicy& policy, double t, double s,
                                       const vec& x_s, const EndpointPair& pair) {
  if (!(t < s)) throw DomainError(cat("backward_transition: need t < s, got t=", t, " s=", s));
  check_pair(pair);
  check_vec(x_s, pair.x0.size(), "backward_transition: x_s");
  ScheduleTriple ct = sched.eval(t);
  ScheduleTriple cs = sched.eval(s);
  GaussianTransition out;
  out.mean.resize(x_s.size());
  if (cs.sigma2 == 0.0) {
    // s = T: conditioning on x_T at time T is vacuous; direct marginal at t
    for (size_t i = 0; i < x_s.size(); ++i)
      out.mean[i] = ct.alpha * pair.x0[i] + ct.beta * pair.xT[i];
    out.var = ct.sigma2;
    return out;
  }
  double d2 = delta2(sched, policy, t, s);
  double sigma_t = std::sqrt(ct.sigma2);
  double a = sigma_t * std::sqrt(cs.sigma2 - d2) / cs.sigma2;
  for (size_t i = 0; i < x_s.size(); ++i) {
    double mu_s = cs.alpha * pair.x0[i] + cs.beta * pair.xT[i];
    out.mean[i] = ct.alpha * pair.x0[i] + ct.beta * pair.xT[i] + a * (x_s[i] - mu_s);
  }
  out.var = d2 * ct.sigma2 / cs.sigma2;
  return out;
}

vec forward_mean_zform(const BridgeSchedule& sched, const TransitionVariancePolicy& policy,
                       double t, double s, const vec& x_t, const vec& x0, const vec& z) {
  if (!(t < s)) throw DomainError(cat("forward_mean_zform: need t < s, got t=", t, " s=", s));
  ScheduleTriple ct = sched.eval(t);
  ScheduleTriple cs = sched.eval(s);
  if (!(ct.beta > 0.0))
    throw DomainError(cat("forward_mean_zform: beta_t = 0 at t=", t, " (use the bootstrap step)"));
  if (x_t.size() != x0.size() || x_t.size() != z.size())
    throw DomainError("forward_mean_zform: dimension mismatch");
  double d2 = delta2(sched, policy, t, s);
  double ratio = cs.beta / ct.beta;
  double sigma_t = std::sqrt(ct.sigma2);
  double cx = ratio;
  double c0 = cs.alpha - ct.alpha * ratio;
  double cz = std::sqrt(cs.sigma2 - d2) - sigma_t * ratio;
  vec mean(x_t.size());
  for (size_t i = 0; i < x_t.size(); ++i) mean[i] = cx * x_t[i] + c0 * x0[i] + cz * z[i];
  return mean;
}

vec backward_mean_zform(const BridgeSchedule& sched, const TransitionVariancePolicy& policy,
                        double t, double s, const vec& x_s, const vec& xT, const vec& z) {
  if (!(t < s)) throw DomainError(cat("backward_mean_zform: need t < s, got t=", t, " s=", s));
  ScheduleTriple ct = sched.eval(t);
  ScheduleTriple cs = sched.eval(s);
  if (!(cs.alpha > 0.0))
    throw DomainError(cat("backward_mean_zform: alpha_s = 0 at s=", s, " (use the bootstrap step)"));
  if (cs.sigma2 == 0.0)
    throw DomainError(cat("backward_mean_zform: sigma_s = 0 at s=", s, " (use the bootstrap step)"));
  if (x_s.size() != xT.size() || x_s.size() != z.size())
    throw DomainError("backward_mean_zform: dimension mismatch");
  double d2 = delta2(sched, policy, t, s);
  double ratio = ct.alpha / cs.alpha;
  double sigma_t = std::sqrt(ct.sigma2);
  double sigma_s = std::sqrt(cs.sigma2);
  double cx = ratio;
  double cT = ct.beta - cs.beta * ratio;
  double cz = sigma_t * std::sqrt(cs.sigma2 - d2) / sigma_s - sigma_s * ratio;
  vec mean(x_s.size());
  for (size_t i = 0; i < x_s.size(); ++i) mean[i] = cx * x_s[i] + cT * xT[i] + cz * z[i];
  return mean;
}

double log_density(const GaussianTransition& kernel, const vec& x) {
  if (!(kernel.var > 0.0)) throw DomainError("log_density: Dirac kernel (var=0) has no density");
  if (x.size() != kernel.mean.size()) throw DomainError("log_density: dimension mismatch");
  double d = static_cast<double>(x.size());
  double q = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double r = x[i] - kernel.mean[i];
    q += r * r;
  }
  return -0.5 * d * std::log(kTwoPi * kernel.var) - 0.5 * q / kernel.var;
}

vec tweedie_endpoint(const vec& x, const vec& y_A, double alpha, double beta, double sigma2,
                     const vec& score) {
  if (beta == 0.0) throw DomainError("tweedie_endpoint: beta = 0, endpoint not recoverable");
  if (x.size() != y_A.size() || x.size() != score.size())
    throw DomainError("tweedie_endpoint: dimension mismatch");
  vec out(x.size());
  for (size_t i = 0; i < x.size(); ++i)
    out[i] = (x[i] - alpha * y_A[i] + sigma2 * score[i]) / beta;
  return out;
}

vec analytic_score_gaussian_coupling(const BridgeSchedule& sched, double t, const vec& x_t,
                                     const vec& x0, const GaussianCouplingSpec& coupling) {
  if (!(t > 0.0 && t < sched.T()))
    throw DomainError(cat("analytic score: density degenerate at t=", t));
  if (x_t.size() != x0.size()) throw DomainError("analytic score: dimension mismatch");
  ScheduleTriple c = sched.eval(t);
  vec cond_mean = matvec(coupling.M, x0);
  for (size_t i = 0; i < cond_mean.size(); ++i) cond_mean[i] += coupling.c[i];
  double var = c.beta * c.beta * coupling.v_B + c.sigma2;
  vec score(x_t.size());
  for (size_t i = 0; i < x_t.size(); ++i) {
    double mean = c.alpha * x0[i] + c.beta * cond_mean[i];
    score[i] = -(x_t[i] - mean) / var;
  }
  return score;
}

}  // namespace bdbm
