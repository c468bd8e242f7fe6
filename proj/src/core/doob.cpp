#include "core/doob.hpp"

#include <cmath>

namespace bdbm {

void validate_chain(const ChainSpec& chain) {
  require(chain.n_states > 0, "chain: n_states must be positive");
  require(chain.step_count > 0, "chain: step_count must be positive");
  require(chain.kernels.size() == chain.step_count, "chain: kernel count != step_count");
  for (size_t t = 0; t < chain.step_count; ++t) {
    const Mat& P = chain.kernels[t];
    require(P.rows == chain.n_states && P.cols == chain.n_states,
            "chain: kernel " + std::to_string(t) + " has wrong shape");
    for (size_t i = 0; i < P.rows; ++i) {
      double s = 0.0;
      for (size_t j = 0; j < P.cols; ++j) {
        double p = P(i, j);
        require(p >= 0.0 && p <= 1.0, "chain: entry outside [0,1]");
        s += p;
      }
      require(std::abs(s - 1.0) <= 1e-12, "chain: row " + std::to_string(i) + " of kernel " +
                                              std::to_string(t) + " does not sum to 1");
    }
  }
}

ChainSpec random_chain(size_t n_states, size_t step_count, Rng& rng) {
  ChainSpec chain;
  chain.n_states = n_states;
  chain.step_count = step_count;
  chain.kernels.reserve(step_count);
  for (size_t t = 0; t < step_count; ++t) {
    Mat P(n_states, n_states);
    for (size_t i = 0; i < n_states; ++i) {
      double s = 0.0;
      for (size_t j = 0; j < n_states; ++j) {
        // strictly positive so every state reaches every other
        double e = rng.uniform(0.05, 1.0);
        P(i, j) = e;
        s += e;
      }
      double acc = 0.0;
      for (size_t j = 0; j + 1 < n_states; ++j) {
        P(i, j) /= s;
        acc += P(i, j);
      }
      P(i, n_states - 1) = 1.0 - acc;  // exact row sum, no 1e-16 slop
    }
    chain.kernels.push_back(std::move(P));
  }
  return chain;
}

std::vector<vec> h_backward(const ChainSpec& chain, size_t target_state) {
  validate_chain(chain);
  require(target_state < chain.n_states, "h_backward: target out of range");
  std::vector<vec> h(chain.step_count + 1, vec(chain.n_states, 0.0));
  h[chain.step_count][target_state] = 1.0;
  for (size_t t = chain.step_count; t-- > 0;) h[t] = matvec(chain.kernels[t], h[t + 1]);
  return h;
}

vec h_transform_row(const ChainSpec& chain, const std::vector<vec>& h, size_t t, size_t x) {
  require(t < chain.step_count, "h_transform_row: step out of range");
  require(x < chain.n_states, "h_transform_row: state out of range");
  double hx = h[t][x];
  if (hx <= 0.0)
    throw DomainError("h_transform_row: h(" + std::to_string(t) + "," + std::to_string(x) +
                      ") = 0, state cannot reach target");
  const Mat& P = chain.kernels[t];
  vec row(chain.n_states);
  for (size_t j = 0; j < chain.n_states; ++j) row[j] = P(x, j) * h[t + 1][j] / hx;
  return row;
}

ChainSpec h_transform_kernel(const ChainSpec& chain, const std::vector<vec>& h) {
  require(h.size() == chain.step_count + 1, "h_transform_kernel: h table has wrong height");
  ChainSpec out;
  out.n_states = chain.n_states;
  out.step_count = chain.step_count;
  out.kernels.reserve(chain.step_count);
  for (size_t t = 0; t < chain.step_count; ++t) {
    Mat Q(chain.n_states, chain.n_states);
    for (size_t x = 0; x < chain.n_states; ++x) {
      if (h[t][x] > 0.0) {
        vec row = h_transform_row(chain, h, t, x);
        for (size_t j = 0; j < chain.n_states; ++j) Q(x, j) = row[j];
      } else {
        Q(x, x) = 1.0;  // never entered by the conditioned process
      }
    }
    out.kernels.push_back(std::move(Q));
  }
  return out;
}

DoobReport doob_check(const ChainSpec& chain, size_t start_state, size_t target_state) {
  require(start_state < chain.n_states, "doob_check: start out of range");
  std::vector<vec> h = h_backward(chain, target_state);
  if (h[0][start_state] <= 0.0)
    throw DomainError("doob_check: target unreachable from start state");
  ChainSpec tilde = h_transform_kernel(chain, h);

  // marginals of the transformed process, forward products
  vec mu(chain.n_states, 0.0);
  mu[start_state] = 1.0;
  // exact conditioning: p(x_t|x_0,x_T) = f_t(x) h_t(x) / h_0(start)
  vec f(chain.n_states, 0.0);
  f[start_state] = 1.0;
  const double h0 = h[0][start_state];

  DoobReport rep;
  for (size_t t = 0; t <= chain.step_count; ++t) {
    for (size_t x = 0; x < chain.n_states; ++x) {
      double cond = f[x] * h[t][x] / h0;
      double d = std::abs(mu[x] - cond);
      if (d > rep.max_dev) rep.max_dev = d;
    }
    if (t < chain.step_count) {
      mu = vecmat(mu, tilde.kernels[t]);
      f = vecmat(f, chain.kernels[t]);
    }
  }
  rep.terminal_mass = mu[target_state];
  return rep;
}

}  // namespace bdbm
