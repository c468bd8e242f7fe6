#include "core/commands.hpp"

#include <ostream>
#include <sstream>

#include "core/checkpoint.hpp"
#include "core/config.hpp"
#include "core/csvio.hpp"
#include "core/sampler.hpp"
#include "core/svgplot.hpp"
#include "core/train.hpp"

namespace bdbm {

namespace {

std::vector<vec> csv_points(const CsvDoc& doc) { return doc.rows; }

// deterministic per-row sampling: each row gets its own stream off the run seed
vec sample_row(const Checkpoint& ck, const SamplerConfig& cfg, const vec& source) {
  return sample(ck.params, ck.sched, ck.policy, cfg, source);
}

}  // namespace

void cmd_train(const std::string& config_path, const std::string& out_path, std::ostream& out) {
  RunConfig cfg = load_config(config_path);
  BridgeSchedule sched = build_schedule(cfg);
  TransitionVariancePolicy policy = build_policy(cfg);
  Coupling coupling = build_coupling(cfg);
  NetConfig net_cfg = build_net_config(cfg);
  LossConfig loss_cfg = build_loss_config(cfg);

  TrainResult res = train(coupling, sched, loss_cfg, net_cfg, resolve_threads());
  save_checkpoint(res.params, sched, policy, out_path);

  CsvDoc curve;
  curve.meta.emplace_back("seed", std::to_string(loss_cfg.seed));
  curve.meta.emplace_back("iterations", std::to_string(loss_cfg.iterations));
  curve.meta.emplace_back("batch", std::to_string(loss_cfg.batch));
  curve.header = {"iteration", "loss"};
  for (size_t i = 0; i < res.loss_curve.size(); ++i)
    curve.rows.push_back({double(i), res.loss_curve[i]});
  write_csv_file(out_path + ".loss.csv", curve);

  out << "iterations " << loss_cfg.iterations << "\n";
  if (!res.loss_curve.empty()) out << "final_loss " << format_double(res.loss_curve.back()) << "\n";
  out << "checkpoint " << out_path << " digest " << digest_hex(file_digest(out_path)) << "\n";
}

void cmd_sample(const std::string& ckpt_path, const std::string& direction, uint32_t nfe,
                double eta, uint64_t seed, const std::string& in_csv, const std::string& out_csv,
                std::ostream& out) {
  Checkpoint ck = load_checkpoint(ckpt_path);
  SamplerConfig cfg;
  cfg.direction = direction_from_string(direction);
  cfg.nfe = nfe;
  cfg.eta = eta;
  CsvDoc in = read_csv_file(in_csv);
  if (in.rows.empty()) throw ConfigError("sample: input csv has no data rows");
  for (const auto& r : in.rows)
    if (r.size() != ck.params.d)
      throw ConfigError(cat("sample: input row has ", r.size(), " columns but the model is ",
                            ck.params.d, "-dimensional"));
  time_grid(ck.sched, nfe);  // reject a bad grid before doing any work

  CsvDoc doc;
  doc.meta.emplace_back("command", "sample");
  doc.meta.emplace_back("checkpoint_digest", digest_hex(file_digest(ckpt_path)));
  doc.meta.emplace_back("direction", direction_string(cfg.direction));
  doc.meta.emplace_back("nfe", std::to_string(nfe));
  doc.meta.emplace_back("eta", format_double(eta));
  doc.meta.emplace_back("seed", std::to_string(seed));
  for (uint32_t i = 0; i < ck.params.d; ++i) doc.header.push_back("dim" + std::to_string(i));
  for (size_t i = 0; i < in.rows.size(); ++i) {
    SamplerConfig row_cfg = cfg;
    row_cfg.seed = substream_seed(seed, i, 0x5a11);
    doc.rows.push_back(sample_row(ck, row_cfg, in.rows[i]));
  }
  write_csv_file(out_csv, doc);
  out << "wrote " << doc.rows.size() << " rows to " << out_csv << "\n";
}

bool cmd_verify(const std::string& suite, uint64_t seed, const MutationFlags& mutation,
                std::ostream& out) {
  std::vector<CheckRow> rows = run_suite(suite, seed, mutation);
  out << "check,value,threshold,pass\n";
  for (const auto& r : rows)
    out << r.check << "," << format_double(r.value) << "," << format_double(r.threshold) << ","
        << (r.pass ? 1 : 0) << "\n";
  return all_pass(rows);
}

void cmd_eval(const std::string& ckpt_path, const std::string& coupling_config,
              const std::vector<std::string>& metrics, const std::string& out_csv,
              std::ostream& out) {
  if (metrics.empty()) throw ConfigError("eval: metrics list is empty");
  for (const auto& m : metrics)
    if (m != "energy" && m != "mse" && m != "diversity")
      throw ConfigError(cat("eval: unknown metric '", m, "' (expected energy, mse, diversity)"));

  Checkpoint ck = load_checkpoint(ckpt_path);
  RunConfig cfg = load_config(coupling_config);
  Coupling coupling = build_coupling(cfg);
  if (coupling.d() != ck.params.d)
    throw ConfigError("eval: coupling dimension does not match the checkpoint");

  const uint64_t seed = uint64_t(cfg.get_int("eval.seed", 0));
  const size_t n = size_t(cfg.get_int("eval.n", 256));
  const uint32_t nfe = uint32_t(cfg.get_int("eval.nfe", 200));
  const double eta = cfg.get_double("eval.eta", 1.0);
  const size_t generations = size_t(cfg.get_int("eval.generations", 4));
  const size_t sources = size_t(cfg.get_int("eval.sources", 16));
  if (n < 2) throw ConfigError("eval.n must be >= 2");
  if (generations < 2) throw ConfigError("eval.generations must be >= 2");
  time_grid(ck.sched, nfe);

  Rng pair_rng(substream_seed(seed, 0xda7a));
  std::vector<EndpointPair> pairs(n), ref_pairs(n);
  for (size_t i = 0; i < n; ++i) pairs[i] = coupling.sample(pair_rng);
  for (size_t i = 0; i < n; ++i) ref_pairs[i] = coupling.sample(pair_rng);

  std::ostringstream body;
  body << "# checkpoint_digest = " << digest_hex(file_digest(ckpt_path)) << "\n";
  body << "# seed = " << seed << "\n";
  body << "# n = " << n << "\n# nfe = " << nfe << "\n# eta = " << format_double(eta) << "\n";
  body << "direction,metric,value\n";

  for (Direction dir : {Direction::forward, Direction::backward}) {
    const bool fwd = dir == Direction::forward;
    SamplerConfig scfg;
    scfg.direction = dir;
    scfg.nfe = nfe;
    scfg.eta = eta;

    std::vector<vec> generated(n), reference(n), paired_truth(n);
    for (size_t i = 0; i < n; ++i) {
      scfg.seed = substream_seed(seed, i, fwd ? 0xf0 : 0xb0);
      generated[i] = sample_row(ck, scfg, fwd ? pairs[i].x0 : pairs[i].xT);
      reference[i] = fwd ? ref_pairs[i].xT : ref_pairs[i].x0;
      paired_truth[i] = fwd ? pairs[i].xT : pairs[i].x0;
    }
    for (const auto& m : metrics) {
      double value = 0.0;
      if (m == "energy") {
        value = energy_distance(generated, reference);
      } else if (m == "mse") {
        value = coupling_mse(generated, paired_truth);
      } else {
        std::vector<std::vector<vec>> sets(std::min(sources, n));
        for (size_t s = 0; s < sets.size(); ++s) {
          sets[s].resize(generations);
          for (size_t g = 0; g < generations; ++g) {
            scfg.seed = substream_seed(seed, s, fwd ? 0xd1f0 : 0xd1b0, g);
            sets[s][g] = sample_row(ck, scfg, fwd ? pairs[s].x0 : pairs[s].xT);
          }
        }
        value = diversity(sets);
      }
      body << direction_string(dir) << "," << m << "," << format_double(value) << "\n";
      out << direction_string(dir) << " " << m << " " << format_double(value) << "\n";
    }
  }
  atomic_write_file(out_csv, body.str());
}

void cmd_plot(const std::string& in_csv, const std::string& out_svg, std::ostream& out) {
  CsvDoc doc = read_csv_file(in_csv);
  write_scatter_svg(out_svg, csv_points(doc));
  out << "wrote " << doc.rows.size() << " points to " << out_svg << "\n";
}

}  // namespace bdbm
