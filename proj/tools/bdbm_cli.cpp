// bdbm: train / sample / verify / eval / plot front end over the C API.
#include <cstdint>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "bdbm/bdbm.h"

namespace {

// exit codes: 0 ok, 1 verification failure, 2 bad input, 3 numeric blow-up
int exit_code(bdbm_status st) {
  switch (st) {
    case BDBM_OK: return 0;
    case BDBM_E_VERIFY_FAILED: return 1;
    case BDBM_E_NUMERIC: return 3;
    default: return 2;
  }
}

int finish(bdbm_status st) {
  if (st != BDBM_OK && st != BDBM_E_VERIFY_FAILED)
    std::fprintf(stderr, "error: %s\n", bdbm_last_error());
  if (st == BDBM_E_VERIFY_FAILED) std::fprintf(stderr, "verification failed\n");
  return exit_code(st);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bdbm: bidirectional diffusion-bridge engine"};
  app.require_subcommand(1);

  std::string config_path, out_path, ckpt_path, in_path;
  std::string direction = "forward";
  std::string suite = "all";
  std::string mutation = "none";
  std::string metrics = "energy,mse,diversity";
  uint32_t nfe = 200;
  double eta = 1.0;
  uint64_t seed = 0;

  CLI::App* train = app.add_subcommand("train", "train a model from a config file");
  train->add_option("--config", config_path, "run configuration file")->required();
  train->add_option("--out", out_path, "checkpoint output path")->required();

  CLI::App* sample = app.add_subcommand("sample", "generate endpoints from csv sources");
  sample->add_option("--ckpt", ckpt_path, "model checkpoint")->required();
  sample->add_option("--direction", direction, "forward (x0 -> xT) or backward (xT -> x0)");
  sample->add_option("--nfe", nfe, "sampling steps (default 200)");
  sample->add_option("--eta", eta, "noise scale in [0,1] (default 1)");
  sample->add_option("--seed", seed, "rng seed (default 0)");
  sample->add_option("--in", in_path, "input csv of source endpoints")->required();
  sample->add_option("--out", out_path, "output csv")->required();

  CLI::App* verify = app.add_subcommand("verify", "run the oracle verification suites");
  verify->add_option("--suite", suite, "kernels, doob, tweedie, grad or all (default all)");
  verify->add_option("--seed", seed, "rng seed (default 0)");
  verify->add_option("--mutate", mutation,
                     "deliberate defect: none, backward-variance, drop-mask, delta-variant");

  CLI::App* eval = app.add_subcommand("eval", "sample both directions and report metrics");
  eval->add_option("--ckpt", ckpt_path, "model checkpoint")->required();
  eval->add_option("--config", config_path, "coupling/eval configuration")->required();
  eval->add_option("--metrics", metrics, "comma-separated: energy,mse,diversity");
  eval->add_option("--out", out_path, "output csv")->required();

  CLI::App* plot = app.add_subcommand("plot", "render a 2d sample csv as an svg scatter plot");
  plot->add_option("--in", in_path, "input csv (2 columns)")->required();
  plot->add_option("--out", out_path, "output svg")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (train->parsed()) return finish(bdbm_cmd_train(config_path.c_str(), out_path.c_str()));
  if (sample->parsed())
    return finish(bdbm_cmd_sample(ckpt_path.c_str(), direction.c_str(), nfe, eta, seed,
                                  in_path.c_str(), out_path.c_str()));
  if (verify->parsed()) return finish(bdbm_cmd_verify(suite.c_str(), seed, mutation.c_str()));
  if (eval->parsed())
    return finish(bdbm_cmd_eval(ckpt_path.c_str(), config_path.c_str(), metrics.c_str(),
                                out_path.c_str()));
  if (plot->parsed()) return finish(bdbm_cmd_plot(in_path.c_str(), out_path.c_str()));
  return 2;
}
