#pragma once

#include "core/rng.hpp"
#include "core/smallmat.hpp"

namespace bdbm {

// Finite-state time-inhomogeneous Markov chain.  kernels[t] is the row-stochastic
// transition matrix from step t to t+1.
struct ChainSpec {
  size_t n_states = 0;
  size_t step_count = 0;
  std::vector<Mat> kernels;
};

void validate_chain(const ChainSpec& chain);

ChainSpec random_chain(size_t n_states, size_t step_count, Rng& rng);

// h(T,.) = indicator of target; h(t,.) = P_t h(t+1,.).  Returns step_count+1 rows.
std::vector<vec> h_backward(const ChainSpec& chain, size_t target_state);

// One transformed row: p~(.|x_t) = p(.|x_t) h(t+1,.) / h(t,x_t).
// Errors when h(t,x)=0 -- the state cannot reach the target.
vec h_transform_row(const ChainSpec& chain, const std::vector<vec>& h, size_t t, size_t x);

// Whole transformed chain.  Rows with h(t,x)=0 are unreachable under the
// conditioned process; they get a self-loop so the result stays row-stochastic.
ChainSpec h_transform_kernel(const ChainSpec& chain, const std::vector<vec>& h);

struct DoobReport {
  double max_dev = 0.0;       // max |transformed marginal - conditioned marginal|
  double terminal_mass = 0.0; // transformed-process mass on target at the horizon
};

// Forward matrix products through the h-transformed chain vs. exact Bayes
// conditioning p(x_t | x_0 = start, x_T = target).
DoobReport doob_check(const ChainSpec& chain, size_t start_state, size_t target_state);

}  // namespace bdbm
