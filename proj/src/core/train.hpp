#pragma once

#include <functional>

#include "core/coupling.hpp"
#include "core/net.hpp"

namespace bdbm {

enum class DirectionMode { bidirectional, forward_only, backward_only };

DirectionMode direction_from_name(const std::string& s);

struct LossConfig {
  Parameterization param = Parameterization::z_pred;
  DirectionMode direction = DirectionMode::bidirectional;
  uint32_t batch = 256;
  uint32_t iterations = 1;
  uint32_t accum = 1;
  uint64_t seed = 0;
};

struct NetConfig {
  std::vector<uint32_t> hidden{128, 128};
  uint32_t time_emb_dim = 16;
  uint64_t seed = 1;
};

// One training example drawn from an endpoint pair: bridge time, state,
// direction bit and regression target (the drawn z, x0+xT, or xT ‖ x0).
struct LossExample {
  double t = 0.0;
  vec x_t;
  vec z;
  int m = 0;
  vec target;
};

LossExample draw_example(const BridgeSchedule& sched, const LossConfig& cfg,
                         const EndpointPair& pair, Rng& rng);

// Batch loss (mean of per-element squared residuals) and, when `out_grads`
// is non-null, its exact gradient.  Per-element randomness comes from streams
// split off `batch_seed` by element index (or from `element_seeds` when the
// caller supplies them).  Gradients reduce over fixed 32-element chunks in
// index order, so results are bitwise independent of the worker count.
double masked_loss(const NetParams& params, const BridgeSchedule& sched, const LossConfig& cfg,
                   const std::vector<EndpointPair>& pairs, uint64_t batch_seed, Grads* out_grads,
                   int threads = 1, vec* per_element = nullptr,
                   const std::vector<uint64_t>* element_seeds = nullptr);

// Named variants per parameterization (thin wrappers over masked_loss).
double bdbm_loss(const NetParams&, const BridgeSchedule&, const LossConfig&,
                 const std::vector<EndpointPair>&, uint64_t batch_seed, Grads* out_grads,
                 int threads = 1);
double endpoint_sum_loss(const NetParams&, const BridgeSchedule&, const LossConfig&,
                         const std::vector<EndpointPair>&, uint64_t batch_seed, Grads* out_grads,
                         int threads = 1);
double endpoint_pair_loss(const NetParams&, const BridgeSchedule&, const LossConfig&,
                          const std::vector<EndpointPair>&, uint64_t batch_seed, Grads* out_grads,
                          int threads = 1);

struct TrainResult {
  NetParams params;
  std::vector<double> loss_curve;  // one entry per iteration
};

// Bidirectional training: iterations x (accum micro-batches -> one Adam step).
// Fully reproducible from the seeds in the configs.
TrainResult train(Coupling& coupling, const BridgeSchedule& sched, const LossConfig& loss_cfg,
                  const NetConfig& net_cfg, int threads = 1);

// Chunk scheduler shared by training and the samplers' batch paths.
void run_chunks(int n_chunks, int threads, const std::function<void(int)>& fn);

int resolve_threads();  // BDBM_THREADS, default 1

}  // namespace bdbm
