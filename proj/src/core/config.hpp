#pragma once

#include <map>
#include <string>

#include "core/coupling.hpp"
#include "core/sampler.hpp"
#include "core/train.hpp"

namespace bdbm {

// Flat `section.key = value` run configuration.  Unknown keys are rejected at
// parse time so typos cannot be silently ignored.
struct RunConfig {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  const std::string& require_key(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  double require_double(const std::string& key) const;
  long get_int(const std::string& key, long fallback) const;
  long require_int(const std::string& key) const;
  bool get_bool(const std::string& key, bool fallback) const;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// comma-separated doubles / semicolon-separated rows of comma-separated doubles
vec parse_vec(const std::string& s);
Mat parse_mat(const std::string& s);

BridgeSchedule build_schedule(const RunConfig& cfg);
TransitionVariancePolicy build_policy(const RunConfig& cfg);
NetConfig build_net_config(const RunConfig& cfg);
LossConfig build_loss_config(const RunConfig& cfg);
Coupling build_coupling(const RunConfig& cfg);
SamplerConfig build_sampler_config(const RunConfig& cfg);

}  // namespace bdbm
