#include "core/config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "core/csvio.hpp"

namespace bdbm {

namespace {

const std::set<std::string> kKnownKeys = {
    "schedule.kind",     "schedule.k",        "schedule.T",       "schedule.steps",
    "schedule.knots",    "policy.variant",    "policy.eta",       "net.hidden",
    "net.time_emb_dim",  "net.seed",          "net.param",        "train.iters",
    "train.batch",       "train.accum",       "train.seed",       "train.direction",
    "coupling.kind",     "coupling.mean",     "coupling.cov",     "coupling.base",
    "coupling.map_a",    "coupling.map_b",    "coupling.noise_std", "coupling.path",
    "coupling.reshuffle", "sample.direction", "sample.nfe",       "sample.eta",
    "sample.seed",       "eval.n",            "eval.seed",        "eval.nfe",
    "eval.eta",          "eval.generations",  "eval.sources",
};

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& s) {
  const char* c = s.c_str();
  char* end = nullptr;
  double v = std::strtod(c, &end);
  if (end == c || *end != '\0') throw ConfigError(cat("config key '", key, "': bad number '", s, "'"));
  return v;
}

long to_int(const std::string& key, const std::string& s) {
  const char* c = s.c_str();
  char* end = nullptr;
  long v = std::strtol(c, &end, 10);
  if (end == c || *end != '\0')
    throw ConfigError(cat("config key '", key, "': bad integer '", s, "'"));
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(trim(s.substr(start)));
      return out;
    }
    out.push_back(trim(s.substr(start, pos - start)));
    start = pos + 1;
  }
}

}  // namespace

const std::string& RunConfig::require_key(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError(cat("missing required config key '", key, "'"));
  return it->second;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : to_double(key, it->second);
}

double RunConfig::require_double(const std::string& key) const {
  return to_double(key, require_key(key));
}

long RunConfig::get_int(const std::string& key, long fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : to_int(key, it->second);
}

long RunConfig::require_int(const std::string& key) const { return to_int(key, require_key(key)); }

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
  auto it = values.find(key);
  if (it == values.end()) return fallback;
  const std::string& v = it->second;
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError(cat("config key '", key, "': bad boolean '", v, "'"));
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream is(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string t = trim(line);
    if (t.empty()) continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError(cat("config line ", lineno, ": expected 'section.key = value'"));
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (!kKnownKeys.count(key))
      throw ConfigError(cat("config line ", lineno, ": unknown key '", key, "'"));
    if (cfg.values.count(key))
      throw ConfigError(cat("config line ", lineno, ": duplicate key '", key, "'"));
    if (value.empty()) throw ConfigError(cat("config line ", lineno, ": empty value for '", key, "'"));
    cfg.values.emplace(std::move(key), std::move(value));
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str());
}

vec parse_vec(const std::string& s) {
  std::vector<std::string> cells = split(s, ',');
  vec out(cells.size());
  for (size_t i = 0; i < cells.size(); ++i) out[i] = to_double("<vector>", cells[i]);
  return out;
}

Mat parse_mat(const std::string& s) {
  std::vector<std::string> rows = split(s, ';');
  require(!rows.empty(), "matrix literal is empty");
  std::vector<vec> parsed;
  for (const auto& r : rows) parsed.push_back(parse_vec(r));
  size_t cols = parsed[0].size();
  for (const auto& r : parsed)
    if (r.size() != cols) throw ConfigError("matrix literal has ragged rows");
  Mat m(parsed.size(), cols);
  for (size_t i = 0; i < parsed.size(); ++i)
    for (size_t j = 0; j < cols; ++j) m(i, j) = parsed[i][j];
  return m;
}

BridgeSchedule build_schedule(const RunConfig& cfg) {
  std::string kind = cfg.get_string("schedule.kind", "brownian");
  long steps = cfg.get_int("schedule.steps", 0);
  if (steps < 0) throw ConfigError("schedule.steps must be >= 0 (0 = continuous)");
  TimeMode mode = steps == 0 ? TimeMode::continuous : TimeMode::discrete;
  if (kind == "brownian") {
    double k = cfg.get_double("schedule.k", 2.0);
    double T = cfg.get_double("schedule.T", 1.0);
    return BridgeSchedule::brownian(k, T, mode, uint32_t(steps));
  }
  if (kind == "custom") {
    // knots: "t:alpha:beta:sigma2; t:alpha:beta:sigma2; ..."
    std::string text = cfg.require_key("schedule.knots");
    std::vector<ScheduleKnot> knots;
    for (const auto& item : split(text, ';')) {
      std::vector<std::string> f = split(item, ':');
      if (f.size() != 4)
        throw ConfigError("schedule.knots: each knot needs t:alpha:beta:sigma2");
      knots.push_back({to_double("schedule.knots", f[0]), to_double("schedule.knots", f[1]),
                       to_double("schedule.knots", f[2]), to_double("schedule.knots", f[3])});
    }
    return BridgeSchedule::custom(std::move(knots), mode, uint32_t(steps));
  }
  throw ConfigError(cat("schedule.kind: unknown kind '", kind, "' (expected brownian or custom)"));
}

TransitionVariancePolicy build_policy(const RunConfig& cfg) {
  TransitionVariancePolicy pol;
  pol.variant = variant_from_name(cfg.get_string("policy.variant", "C"));
  pol.eta = cfg.get_double("policy.eta", 1.0);
  if (pol.eta < 0.0 || pol.eta > 1.0) throw ConfigError("policy.eta must lie in [0,1]");
  return pol;
}

NetConfig build_net_config(const RunConfig& cfg) {
  NetConfig nc;
  std::string hidden = cfg.get_string("net.hidden", "128,128");
  nc.hidden.clear();
  for (const auto& h : split(hidden, ',')) {
    long v = to_int("net.hidden", h);
    if (v < 1 || v > 4096) throw ConfigError("net.hidden: layer widths must lie in [1,4096]");
    nc.hidden.push_back(uint32_t(v));
  }
  long emb = cfg.get_int("net.time_emb_dim", 16);
  if (emb < 0 || emb > 256) throw ConfigError("net.time_emb_dim must lie in [0,256]");
  nc.time_emb_dim = uint32_t(emb);
  nc.seed = uint64_t(cfg.get_int("net.seed", 1));
  return nc;
}

LossConfig build_loss_config(const RunConfig& cfg) {
  LossConfig lc;
  lc.param = parameterization_from_name(cfg.get_string("net.param", "z_pred"));
  lc.direction = direction_from_name(cfg.get_string("train.direction", "bidirectional"));
  long iters = cfg.require_int("train.iters");
  if (iters < 0) throw ConfigError("train.iters must be >= 0");
  lc.iterations = uint32_t(iters);
  long batch = cfg.get_int("train.batch", 256);
  if (batch < 1) throw ConfigError("train.batch must be >= 1");
  lc.batch = uint32_t(batch);
  long accum = cfg.get_int("train.accum", 1);
  if (accum < 1) throw ConfigError("train.accum must be >= 1");
  lc.accum = uint32_t(accum);
  lc.seed = uint64_t(cfg.get_int("train.seed", 0));
  return lc;
}

Coupling build_coupling(const RunConfig& cfg) {
  std::string kind = cfg.get_string("coupling.kind", "gaussian");
  if (kind == "gaussian") {
    vec mean = parse_vec(cfg.require_key("coupling.mean"));
    Mat cov = parse_mat(cfg.require_key("coupling.cov"));
    return Coupling::gaussian(std::move(mean), std::move(cov));
  }
  if (kind == "mapped2d") {
    Base2D base = base2d_from_name(cfg.require_key("coupling.base"));
    AffineMap map;
    map.A = cfg.has("coupling.map_a") ? parse_mat(cfg.require_key("coupling.map_a"))
                                      : Mat::identity(2);
    map.b = cfg.has("coupling.map_b") ? parse_vec(cfg.require_key("coupling.map_b")) : vec(2, 0.0);
    double noise = cfg.get_double("coupling.noise_std", 0.0);
    return Coupling::mapped2d(base, std::move(map), noise);
  }
  if (kind == "csv") {
    CsvDoc doc = read_csv_file(cfg.require_key("coupling.path"));
    if (doc.rows.empty()) throw ConfigError("coupling.path: csv has no data rows");
    return Coupling::csv_rows(std::move(doc.rows), cfg.get_bool("coupling.reshuffle", false));
  }
  throw ConfigError(cat("coupling.kind: unknown kind '", kind,
                        "' (expected gaussian, mapped2d or csv)"));
}

SamplerConfig build_sampler_config(const RunConfig& cfg) {
  SamplerConfig sc;
  sc.direction = direction_from_string(cfg.get_string("sample.direction", "forward"));
  long nfe = cfg.get_int("sample.nfe", 200);
  if (nfe < 1) throw ConfigError("sample.nfe must be >= 1");
  sc.nfe = uint32_t(nfe);
  sc.eta = cfg.get_double("sample.eta", 1.0);
  if (sc.eta < 0.0 || sc.eta > 1.0) throw ConfigError("sample.eta must lie in [0,1]");
  sc.seed = uint64_t(cfg.get_int("sample.seed", 0));
  return sc;
}

}  // namespace bdbm
