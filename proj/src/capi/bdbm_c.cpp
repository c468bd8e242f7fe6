#include "bdbm/bdbm.h"

#include <cstring>
#include <iostream>
#include <string>

#include "core/checkpoint.hpp"
#include "core/commands.hpp"
#include "core/config.hpp"
#include "core/kernels.hpp"
#include "core/sampler.hpp"

namespace {

thread_local std::string g_last_error;

template <class Fn>
bdbm_status wrap(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const bdbm::ConfigError& e) {
    g_last_error = e.what();
    return BDBM_E_CONFIG;
  } catch (const bdbm::NumericError& e) {
    g_last_error = e.what();
    return BDBM_E_NUMERIC;
  } catch (const bdbm::IoError& e) {
    g_last_error = e.what();
    return BDBM_E_IO;
  } catch (const bdbm::FormatError& e) {
    g_last_error = e.what();
    return BDBM_E_FORMAT;
  } catch (const bdbm::DomainError& e) {
    g_last_error = e.what();
    return BDBM_E_DOMAIN;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BDBM_E_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown error";
    return BDBM_E_UNKNOWN;
  }
}

bdbm_status require_arg(bool ok, const char* msg) {
  if (ok) return BDBM_OK;
  g_last_error = msg;
  return BDBM_E_CONFIG;
}

bdbm::TransitionVariancePolicy policy_of(int variant, double eta) {
  if (variant < 0 || variant > 2) throw bdbm::ConfigError("variant must be 0, 1 or 2");
  return {static_cast<bdbm::DeltaVariant>(variant), eta};
}

bdbm::MutationFlags mutation_of(const char* name) {
  bdbm::MutationFlags m;
  if (!name || !*name || std::strcmp(name, "none") == 0) return m;
  if (std::strcmp(name, "backward-variance") == 0) {
    m.backward_var_scale = 2.0;
  } else if (std::strcmp(name, "drop-mask") == 0) {
    m.drop_mask_channel = true;
  } else if (std::strcmp(name, "delta-variant") == 0) {
    m.wrong_delta_variant = true;
  } else {
    throw bdbm::ConfigError(std::string("unknown mutation '") + name +
                            "' (expected none, backward-variance, drop-mask, delta-variant)");
  }
  return m;
}

}  // namespace

struct bdbm_schedule {
  bdbm::BridgeSchedule impl;
};

struct bdbm_model {
  bdbm::Checkpoint impl;
};

extern "C" {

const char* bdbm_last_error(void) { return g_last_error.c_str(); }

const char* bdbm_version(void) { return "1.0.0"; }

bdbm_status bdbm_schedule_brownian(double k, double T, uint32_t steps, bdbm_schedule** out) {
  if (require_arg(out != nullptr, "out is null")) return BDBM_E_CONFIG;
  return wrap([&] {
    auto mode = steps == 0 ? bdbm::TimeMode::continuous : bdbm::TimeMode::discrete;
    *out = new bdbm_schedule{bdbm::BridgeSchedule::brownian(k, T, mode, steps)};
    return BDBM_OK;
  });
}

bdbm_status bdbm_schedule_custom(const double* knots, size_t n_knots, uint32_t steps,
                                 bdbm_schedule** out) {
  if (require_arg(out && knots, "null argument")) return BDBM_E_CONFIG;
  return wrap([&] {
    std::vector<bdbm::ScheduleKnot> ks(n_knots);
    for (size_t i = 0; i < n_knots; ++i)
      ks[i] = {knots[4 * i], knots[4 * i + 1], knots[4 * i + 2], knots[4 * i + 3]};
    auto mode = steps == 0 ? bdbm::TimeMode::continuous : bdbm::TimeMode::discrete;
    *out = new bdbm_schedule{bdbm::BridgeSchedule::custom(std::move(ks), mode, steps)};
    return BDBM_OK;
  });
}

void bdbm_schedule_free(bdbm_schedule* sched) { delete sched; }

bdbm_status bdbm_schedule_eval(const bdbm_schedule* sched, double t, double* alpha, double* beta,
                               double* sigma2) {
  if (require_arg(sched && alpha && beta && sigma2, "null argument")) return BDBM_E_CONFIG;
  return wrap([&] {
    bdbm::ScheduleTriple tr = sched->impl.eval(t);
    *alpha = tr.alpha;
    *beta = tr.beta;
    *sigma2 = tr.sigma2;
    return BDBM_OK;
  });
}

bdbm_status bdbm_schedule_validate(const bdbm_schedule* sched, char* buf, size_t buflen,
                                   size_t* n_violations) {
  if (require_arg(sched && n_violations, "null argument")) return BDBM_E_CONFIG;
  return wrap([&] {
    std::vector<std::string> report = sched->impl.validate();
    *n_violations = report.size();
    if (buf && buflen > 0) {
      std::string joined;
      for (const auto& line : report) {
        joined += line;
        joined += '\n';
      }
      size_t n = joined.size() < buflen - 1 ? joined.size() : buflen - 1;
      std::memcpy(buf, joined.data(), n);
      buf[n] = '\0';
    }
    return BDBM_OK;
  });
}

bdbm_status bdbm_delta2(const bdbm_schedule* sched, int variant, double eta, double t, double s,
                        double* out) {
  if (require_arg(sched && out, "null argument")) return BDBM_E_CONFIG;
  return wrap([&] {
    *out = bdbm::delta2(sched->impl, policy_of(variant, eta), t, s);
    return BDBM_OK;
  });
}

bdbm_status bdbm_marginal(const bdbm_schedule* sched, double t, const double* x0,
                          const double* xT, size_t d, double* mean_out, double* var_out) {
  if (require_arg(sched && x0 && xT && mean_out && var_out && d > 0, "null or empty argument"))
    return BDBM_E_CONFIG;
  return wrap([&] {
    bdbm::EndpointPair pair{bdbm::vec(x0, x0 + d), bdbm::vec(xT, xT + d)};
    bdbm::GaussianTransition g = bdbm::marginal(sched->impl, t, pair);
    std::memcpy(mean_out, g.mean.data(), d * sizeof(double));
    *var_out = g.var;
    return BDBM_OK;
  });
}

bdbm_status bdbm_forward_transition(const bdbm_schedule* sched, int variant, double eta, double t,
                                    double s, const double* x_t, const double* x0,
                                    const double* xT, size_t d, double* mean_out,
                                    double* var_out) {
  if (require_arg(sched && x_t && x0 && xT && mean_out && var_out && d > 0,
                  "null or empty argument"))
    return BDBM_E_CONFIG;
  return wrap([&] {
    bdbm::EndpointPair pair{bdbm::vec(x0, x0 + d), bdbm::vec(xT, xT + d)};
    bdbm::GaussianTransition g = bdbm::forward_transition(sched->impl, policy_of(variant, eta), t,
                                                          s, bdbm::vec(x_t, x_t + d), pair);
    std::memcpy(mean_out, g.mean.data(), d * sizeof(double));
    *var_out = g.var;
    return BDBM_OK;
  });
}

bdbm_status bdbm_backward_transition(const bdbm_schedule* sched, int variant, double eta, double t,
                                     double s, const double* x_s, const double* x0,
                                     const double* xT, size_t d, double* mean_out,
                                     double* var_out) {
  if (require_arg(sched && x_s && x0 && xT && mean_out && var_out && d > 0,
                  "null or empty argument"))
    return BDBM_E_CONFIG;
  return wrap([&] {
    bdbm::EndpointPair pair{bdbm::vec(x0, x0 + d), bdbm::vec(xT, xT + d)};
    bdbm::GaussianTransition g = bdbm::backward_transition(sched->impl, policy_of(variant, eta), t,
                                                           s, bdbm::vec(x_s, x_s + d), pair);
    std::memcpy(mean_out, g.mean.data(), d * sizeof(double));
    *var_out = g.var;
    return BDBM_OK;
  });
}

bdbm_status bdbm_model_load(const char* path, bdbm_model** out) {
  if (require_arg(path && out, "null argument")) return BDBM_E_CONFIG;
  return wrap([&] {
    *out = new bdbm_model{bdbm::load_checkpoint(path)};
    return BDBM_OK;
  });
}

void bdbm_model_free(bdbm_model* model) { delete model; }

bdbm_status bdbm_model_dim(const bdbm_model* model, uint32_t* d) {
  if (require_arg(model && d, "null argument")) return BDBM_E_CONFIG;
  *d = model->impl.params.d;
  return BDBM_OK;
}

bdbm_status bdbm_model_output_dim(const bdbm_model* model, uint32_t* out_dim) {
  if (require_arg(model && out_dim, "null argument")) return BDBM_E_CONFIG;
  *out_dim = uint32_t(model->impl.params.output_dim());
  return BDBM_OK;
}

bdbm_status bdbm_model_predict(const bdbm_model* model, double t, const double* x_t,
                               const double* known, int m, double* out) {
  if (require_arg(model && x_t && known && out, "null argument")) return BDBM_E_CONFIG;
  return wrap([&] {
    const size_t d = model->impl.params.d;
    if (m != 0 && m != 1) throw bdbm::ConfigError("m must be 0 or 1");
    double t_norm = t / model->impl.sched.T();
    bdbm::vec y = bdbm::net_predict(model->impl.params, t_norm, bdbm::vec(x_t, x_t + d),
                                    bdbm::vec(known, known + d), m);
    std::memcpy(out, y.data(), y.size() * sizeof(double));
    return BDBM_OK;
  });
}

bdbm_status bdbm_model_sample(const bdbm_model* model, int direction, uint32_t nfe, double eta,
                              uint64_t seed, const double* source, double* dest) {
  if (require_arg(model && source && dest, "null argument")) return BDBM_E_CONFIG;
  return wrap([&] {
    if (direction != 0 && direction != 1)
      throw bdbm::ConfigError("direction must be 0 (forward) or 1 (backward)");
    const size_t d = model->impl.params.d;
    bdbm::SamplerConfig cfg;
    cfg.direction = direction == 0 ? bdbm::Direction::forward : bdbm::Direction::backward;
    cfg.nfe = nfe;
    cfg.eta = eta;
    cfg.seed = seed;
    bdbm::vec out = bdbm::sample(model->impl.params, model->impl.sched, model->impl.policy, cfg,
                                 bdbm::vec(source, source + d));
    std::memcpy(dest, out.data(), d * sizeof(double));
    return BDBM_OK;
  });
}

bdbm_status bdbm_file_digest(const char* path, uint64_t* out) {
  if (require_arg(path && out, "null argument")) return BDBM_E_CONFIG;
  return wrap([&] {
    *out = bdbm::file_digest(path);
    return BDBM_OK;
  });
}

bdbm_status bdbm_cmd_train(const char* config_path, const char* out_path) {
  if (require_arg(config_path && out_path, "null argument")) return BDBM_E_CONFIG;
  return wrap([&] {
    bdbm::cmd_train(config_path, out_path, std::cout);
    return BDBM_OK;
  });
}

bdbm_status bdbm_cmd_sample(const char* ckpt_path, const char* direction, uint32_t nfe, double eta,
                            uint64_t seed, const char* in_csv, const char* out_csv) {
  if (require_arg(ckpt_path && direction && in_csv && out_csv, "null argument"))
    return BDBM_E_CONFIG;
  return wrap([&] {
    bdbm::cmd_sample(ckpt_path, direction, nfe, eta, seed, in_csv, out_csv, std::cout);
    return BDBM_OK;
  });
}

bdbm_status bdbm_cmd_verify(const char* suite, uint64_t seed, const char* mutation) {
  if (require_arg(suite != nullptr, "null argument")) return BDBM_E_CONFIG;
  return wrap([&]() -> bdbm_status {
    bool ok = bdbm::cmd_verify(suite, seed, mutation_of(mutation), std::cout);
    if (!ok) {
      g_last_error = "one or more verification checks failed";
      return BDBM_E_VERIFY_FAILED;
    }
    return BDBM_OK;
  });
}

bdbm_status bdbm_cmd_eval(const char* ckpt_path, const char* coupling_config,
                          const char* metrics_csv, const char* out_csv) {
  if (require_arg(ckpt_path && coupling_config && metrics_csv && out_csv, "null argument"))
    return BDBM_E_CONFIG;
  return wrap([&] {
    std::vector<std::string> metrics;
    std::string cur;
    for (const char* p = metrics_csv;; ++p) {
      if (*p == ',' || *p == '\0') {
        if (!cur.empty()) metrics.push_back(cur);
        cur.clear();
        if (*p == '\0') break;
      } else if (*p != ' ') {
        cur += *p;
      }
    }
    bdbm::cmd_eval(ckpt_path, coupling_config, metrics, out_csv, std::cout);
    return BDBM_OK;
  });
}

bdbm_status bdbm_cmd_plot(const char* in_csv, const char* out_svg) {
  if (require_arg(in_csv && out_svg, "null argument")) return BDBM_E_CONFIG;
  return wrap([&] {
    bdbm::cmd_plot(in_csv, out_svg, std::cout);
    return BDBM_OK;
  });
}

}  // extern "C"
