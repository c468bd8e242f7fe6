#pragma once

#include <cstdint>

#include "core/rng.hpp"

namespace bdbm {

enum class Parameterization : uint8_t { z_pred = 0, endpoint_sum = 1, endpoint_pair = 2 };

const char* parameterization_name(Parameterization p);
Parameterization parameterization_from_name(const std::string& s);

struct Layer {
  uint32_t rows = 0, cols = 0;  // W is rows x cols, row-major; b has rows entries
  vec W;
  vec b;
};

// Masked noise/endpoint predictor: tanh hidden layers, identity output.
// Input layout: x_t | slot_A ((1-m) x0) | slot_B (m xT) | time features | m | 1-m
struct NetParams {
  std::vector<Layer> layers;
  uint32_t d = 0;
  uint32_t time_emb_dim = 0;
  Parameterization param = Parameterization::z_pred;
  bool mask_channels = true;

  size_t input_dim() const {
    return 3ul * d + (time_emb_dim + 1ul) + (mask_channels ? 2ul : 0ul);
  }
  size_t output_dim() const {
    return param == Parameterization::endpoint_pair ? 2ul * d : d;
  }
  size_t n_params() const;
};

// Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
NetParams make_net(uint32_t d, const std::vector<uint32_t>& hidden, uint32_t time_emb_dim,
                   Parameterization param, uint64_t seed);

// [t_norm, sin(pi 2^i t)..., cos(pi 2^i t)...]; time_emb_dim sinusoidal
// components after the raw scalar (sines first, extra one goes to sin when odd).
vec embed_time(double t_norm, uint32_t time_emb_dim);

vec assemble_input(const NetParams& p, double t_norm, const vec& x_t, const vec& known_endpoint,
                   int m);

struct Grads {
  std::vector<Layer> layers;  // same shapes as the net
};
Grads zero_grads(const NetParams& p);
void scale_grads(Grads& g, double a);
void add_grads(Grads& dst, const Grads& src);

// Reusable activation/delta buffers so the training loop does not allocate
// per element.
struct NetWorkspace {
  std::vector<vec> acts;    // acts[0] = input, acts[i] = output of layer i-1
  std::vector<vec> deltas;  // scratch
};

void net_forward(const NetParams& p, const vec& input, NetWorkspace& ws);
vec net_forward(const NetParams& p, const vec& input);

// Accumulates (+=) exact reverse-mode gradients of dot(output, grad_out) into
// `acc`.  Requires the workspace from the matching forward pass.
void net_backward(const NetParams& p, NetWorkspace& ws, const vec& grad_out, Grads& acc);

// Network queried as z_phi(t, x_t, (1-m) x0, m xT) (or the endpoint variants).
vec net_predict(const NetParams& p, double t_norm, const vec& x_t, const vec& known_endpoint,
                int m);

// Worst relative error of backward vs central finite differences (step 1e-5)
// on `probes` randomly chosen parameters, for the scalar objective
// dot(output, g) with a fixed random g.
double grad_check(const NetParams& p, const vec& input, int probes, Rng& rng);

struct AdamState {
  uint64_t step = 0;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::vector<Layer> m;  // first/second moment accumulators, net-shaped
  std::vector<Layer> v;
};

AdamState make_adam(const NetParams& p, double lr = 1e-4);
void adam_step(AdamState& st, NetParams& p, const Grads& g);

}  // namespace bdbm
