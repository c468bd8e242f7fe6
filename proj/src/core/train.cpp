#include "core/train.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>

namespace bdbm {

namespace {
constexpr uint32_t kChunk = 32;  // reduction granularity, fixed for determinism
}

DirectionMode direction_from_name(const std::string& s) {
  if (s == "bidirectional") return DirectionMode::bidirectional;
  if (s == "forward_only") return DirectionMode::forward_only;
  if (s == "backward_only") return DirectionMode::backward_only;
  throw ConfigError(cat("unknown direction mode '", s, "'"));
}

int resolve_threads() {
  const char* env = std::getenv("BDBM_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (end == env || *end || v < 1 || v > 256)
    throw ConfigError(cat("BDBM_THREADS='", env, "' is not a thread count"));
  return int(v);
}

void run_chunks(int n_chunks, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n_chunks <= 1) {
    for (int i = 0; i < n_chunks; ++i) fn(i);
    return;
  }
  int workers = std::min(threads, n_chunks);
  std::atomic<int> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  auto body = [&]() {
    try {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n_chunks) return;
        fn(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mu);
      if (!err) err = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

LossExample draw_example(const BridgeSchedule& sched, const LossConfig& cfg,
                         const EndpointPair& pair, Rng& rng) {
  check_pair(pair);
  LossExample ex;
  // t = T is excluded: sigma_T = 0 makes the target carry no information
  if (sched.time_mode() == TimeMode::discrete)
    ex.t = double(rng.below(sched.steps())) * sched.dt();
  else
    ex.t = rng.uniform(0.0, sched.T());
  ScheduleTriple c = sched.eval(ex.t);
  size_t d = pair.x0.size();
  ex.z = rng.normal_vec(d);
  ex.x_t.resize(d);
  double sigma = std::sqrt(c.sigma2);
  for (size_t i = 0; i < d; ++i)
    ex.x_t[i] = c.alpha * pair.x0[i] + c.beta * pair.xT[i] + sigma * ex.z[i];
  switch (cfg.direction) {
    case DirectionMode::bidirectional: ex.m = rng.bernoulli(0.5) ? 1 : 0; break;
    case DirectionMode::forward_only: ex.m = 0; break;
    case DirectionMode::backward_only: ex.m = 1; break;
  }
  switch (cfg.param) {
    case Parameterization::z_pred:
      ex.target = ex.z;
      break;
    case Parameterization::endpoint_sum:
      ex.target.resize(d);
      for (size_t i = 0; i < d; ++i) ex.target[i] = pair.x0[i] + pair.xT[i];
      break;
    case Parameterization::endpoint_pair:
      ex.target.resize(2 * d);
      for (size_t i = 0; i < d; ++i) ex.target[i] = pair.xT[i];
      for (size_t i = 0; i < d; ++i) ex.target[d + i] = pair.x0[i];
      break;
  }
  return ex;
}

double masked_loss(const NetParams& params, const BridgeSchedule& sched, const LossConfig& cfg,
                   const std::vector<EndpointPair>& pairs, uint64_t batch_seed, Grads* out_grads,
                   int threads, vec* per_element, const std::vector<uint64_t>* element_seeds) {
  if (pairs.empty()) throw DomainError("loss: empty batch");
  if (element_seeds && element_seeds->size() != pairs.size())
    throw DomainError("loss: element seed count != batch size");
  size_t n = pairs.size();
  int n_chunks = int((n + kChunk - 1) / kChunk);

  vec losses(n, 0.0);
  std::vector<Grads> chunk_grads;
  if (out_grads) chunk_grads.assign(size_t(n_chunks), zero_grads(params));

  double inv_n = 1.0 / double(n);
  run_chunks(n_chunks, threads, [&](int ci) {
    NetWorkspace ws;
    vec grad_out;
    size_t lo = size_t(ci) * kChunk;
    size_t hi = std::min(n, lo + kChunk);
    for (size_t e = lo; e < hi; ++e) {
      uint64_t es = element_seeds ? (*element_seeds)[e] : substream_seed(batch_seed, e);
      Rng rng(es);
      LossExample ex = draw_example(sched, cfg, pairs[e], rng);
      const vec& known = (ex.m == 0) ? pairs[e].x0 : pairs[e].xT;
      vec input = assemble_input(params, ex.t / sched.T(), ex.x_t, known, ex.m);
      net_forward(params, input, ws);
      const vec& out = ws.acts.back();
      if (out.size() != ex.target.size()) throw DomainError("loss: output/target dim mismatch");
      double l = 0.0;
      grad_out.resize(out.size());
      for (size_t i = 0; i < out.size(); ++i) {
        double r = out[i] - ex.target[i];
        l += r * r;
        grad_out[i] = 2.0 * r * inv_n;
      }
      losses[e] = l;
      if (out_grads) net_backward(params, ws, grad_out, chunk_grads[size_t(ci)]);
    }
  });

  double loss = 0.0;
  for (size_t e = 0; e < n; ++e) loss += losses[e];  // index order, always
  loss *= inv_n;
  if (!std::isfinite(loss)) throw NumericError(cat("loss non-finite (", loss, ")"));
  if (out_grads) {
    *out_grads = zero_grads(params);
    for (int ci = 0; ci < n_chunks; ++ci) add_grads(*out_grads, chunk_grads[size_t(ci)]);
  }
  if (per_element) *per_element = losses;
  return loss;
}

namespace {
double named_loss(Parameterization want, const NetParams& p, const BridgeSchedule& sched,
                  const LossConfig& cfg, const std::vector<EndpointPair>& pairs,
                  uint64_t batch_seed, Grads* g, int threads) {
  if (cfg.param != want)
    throw DomainError(cat("loss: config parameterization is ", parameterization_name(cfg.param),
                          ", expected ", parameterization_name(want)));
  return masked_loss(p, sched, cfg, pairs, batch_seed, g, threads);
}
}  // namespace

double bdbm_loss(const NetParams& p, const BridgeSchedule& s, const LossConfig& c,
                 const std::vector<EndpointPair>& pairs, uint64_t seed, Grads* g, int threads) {
  return named_loss(Parameterization::z_pred, p, s, c, pairs, seed, g, threads);
}
double endpoint_sum_loss(const NetParams& p, const BridgeSchedule& s, const LossConfig& c,
                         const std::vector<EndpointPair>& pairs, uint64_t seed, Grads* g,
                         int threads) {
  return named_loss(Parameterization::endpoint_sum, p, s, c, pairs, seed, g, threads);
}
double endpoint_pair_loss(const NetParams& p, const BridgeSchedule& s, const LossConfig& c,
                          const std::vector<EndpointPair>& pairs, uint64_t seed, Grads* g,
                          int threads) {
  return named_loss(Parameterization::endpoint_pair, p, s, c, pairs, seed, g, threads);
}

TrainResult train(Coupling& coupling, const BridgeSchedule& sched, const LossConfig& loss_cfg,
                  const NetConfig& net_cfg, int threads) {
  if (loss_cfg.batch == 0) throw ConfigError("train: batch must be >= 1");
  if (loss_cfg.accum == 0) throw ConfigError("train: accum must be >= 1");
  TrainResult res;
  res.params = make_net(uint32_t(coupling.d()), net_cfg.hidden, net_cfg.time_emb_dim,
                        loss_cfg.param, net_cfg.seed);
  AdamState adam = make_adam(res.params);
  res.loss_curve.reserve(loss_cfg.iterations);

  std::vector<EndpointPair> pairs(loss_cfg.batch);
  Grads total = zero_grads(res.params);
  Grads micro = zero_grads(res.params);
  for (uint32_t it = 0; it < loss_cfg.iterations; ++it) {
    double iter_loss = 0.0;
    bool first = true;
    for (uint32_t a = 0; a < loss_cfg.accum; ++a) {
      uint64_t batch_seed = substream_seed(loss_cfg.seed, it, a, 0x1055);
      Rng pair_rng(substream_seed(loss_cfg.seed, it, a, 0x9a12));
      for (auto& pr : pairs) pr = coupling.sample(pair_rng);
      double l;
      try {
        l = masked_loss(res.params, sched, loss_cfg, pairs, batch_seed, &micro, threads);
      } catch (const NumericError& e) {
        throw NumericError(cat(e.what(), " at iteration ", it));
      }
      iter_loss += l;
      if (first) {
        std::swap(total, micro);
        first = false;
      } else {
        add_grads(total, micro);
      }
    }
    if (loss_cfg.accum > 1) scale_grads(total, 1.0 / double(loss_cfg.accum));
    adam_step(adam, res.params, total);
    res.loss_curve.push_back(iter_loss / double(loss_cfg.accum));
  }
  return res;
}

}  // namespace bdbm
