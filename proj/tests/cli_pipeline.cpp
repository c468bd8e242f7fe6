// End-to-end exercise of the command-line binary: spawns the real executable
// (path in argv[1]) and checks exit codes and artifacts.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

int g_failures = 0;
std::string g_cli;

#define EXPECT(cond, what)                                                  \
  do {                                                                      \
    if (!(cond)) {                                                          \
      ++g_failures;                                                         \
      std::cerr << "FAIL " << __FILE__ << ":" << __LINE__ << "  " << (what) \
                << "\n";                                                    \
    }                                                                       \
  } while (0)

int run(const std::string& args) {
  std::string cmd = g_cli + " " + args + " > cli_stdout.txt 2> cli_stderr.txt";
  int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) return "<unreadable:" + path + ">";
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  f << text;
}

size_t count_data_rows(const std::string& csv) {
  std::istringstream is(csv);
  std::string line;
  size_t n = 0;
  bool header_seen = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ++n;
  }
  return n;
}

size_t count_substr(const std::string& hay, const std::string& needle) {
  size_t n = 0, at = 0;
  while ((at = hay.find(needle, at)) != std::string::npos) {
    ++n;
    at += needle.size();
  }
  return n;
}

const char* kBaseConfig =
    "schedule.kind = brownian\n"
    "schedule.k = 2\n"
    "schedule.T = 1\n"
    "net.hidden = 8,8\n"
    "net.time_emb_dim = 2\n"
    "net.seed = 5\n"
    "train.batch = 8\n"
    "train.seed = 3\n"
    "coupling.kind = gaussian\n"
    "coupling.mean = 0,0,0.5,0.5\n"
    "coupling.cov = 1,0,0.5,0; 0,1,0,0.5; 0.5,0,1,0; 0,0.5,0,1\n";

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_pipeline <path-to-cli>\n";
    return 2;
  }
  g_cli = argv[1];

  // ---- bad invocations --------------------------------------------------
  EXPECT(run("") == 2, "no subcommand is a usage error");
  EXPECT(run("--help") == 0, "--help exits clean");
  EXPECT(run("frobnicate") == 2, "unknown subcommand");

  // ---- train ------------------------------------------------------------
  write_text("cli_train.cfg", std::string(kBaseConfig) + "train.iters = 30\n");
  EXPECT(run("train --config cli_train.cfg --out cli_model.ckpt") == 0, "train happy path");
  EXPECT(slurp("cli_stdout.txt").find("final_loss") != std::string::npos,
         "train prints the final loss");
  EXPECT(slurp("cli_stdout.txt").find("checkpoint") != std::string::npos,
         "train prints the checkpoint digest line");
  EXPECT(slurp("cli_model.ckpt").size() > 64, "checkpoint written");
  EXPECT(count_data_rows(slurp("cli_model.ckpt.loss.csv")) == 30, "loss curve rows");

  write_text("cli_noiters.cfg", kBaseConfig);
  EXPECT(run("train --config cli_noiters.cfg --out cli_x.ckpt") == 2,
         "missing train.iters is a config error");
  EXPECT(slurp("cli_stderr.txt").find("train.iters") != std::string::npos,
         "the offending key is named");

  write_text("cli_zero.cfg", std::string(kBaseConfig) + "train.iters = 0\n");
  EXPECT(run("train --config cli_zero.cfg --out cli_init.ckpt") == 0, "zero iterations is legal");
  EXPECT(slurp("cli_init.ckpt").size() > 64, "init checkpoint written");

  EXPECT(run("train --config cli_missing.cfg --out cli_x.ckpt") == 2, "unreadable config");

  // ---- sample -----------------------------------------------------------
  write_text("cli_sources.csv", "dim0,dim1\n0.0,0.0\n0.5,-0.5\n1.0,0.25\n");
  EXPECT(run("sample --ckpt cli_model.ckpt --in cli_sources.csv --out cli_fwd.csv "
             "--direction forward --nfe 16 --eta 0 --seed 11") == 0,
         "forward sampling");
  EXPECT(run("sample --ckpt cli_model.ckpt --in cli_sources.csv --out cli_bwd.csv "
             "--direction backward --nfe 16 --eta 0 --seed 11") == 0,
         "backward sampling from the same checkpoint");
  std::string fwd = slurp("cli_fwd.csv");
  EXPECT(count_data_rows(fwd) == 3, "one output row per source row");
  EXPECT(fwd.find("# direction = forward") != std::string::npos, "direction recorded");
  EXPECT(fwd.find("# seed = 11") != std::string::npos, "seed recorded");
  EXPECT(fwd.find("# nfe = 16") != std::string::npos, "nfe recorded");
  EXPECT(fwd.find("# checkpoint_digest = ") != std::string::npos, "digest recorded");

  EXPECT(run("sample --ckpt cli_model.ckpt --in cli_sources.csv --out cli_fwd2.csv "
             "--direction forward --nfe 16 --eta 0 --seed 11") == 0,
         "repeat run");
  EXPECT(slurp("cli_fwd2.csv") == fwd, "eta=0 same seed: byte-identical output");

  EXPECT(run("sample --ckpt cli_model.ckpt --in cli_sources.csv --out cli_x.csv "
             "--direction sideways --nfe 16") == 2,
         "bad direction");
  write_text("cli_bad_dim.csv", "dim0\n0.5\n");
  EXPECT(run("sample --ckpt cli_model.ckpt --in cli_bad_dim.csv --out cli_x.csv "
             "--direction forward --nfe 16") == 2,
         "dimension mismatch");
  EXPECT(run("sample --ckpt cli_missing.ckpt --in cli_sources.csv --out cli_x.csv "
             "--direction forward --nfe 16") == 2,
         "missing checkpoint");

  // grid rule on a discrete-time checkpoint
  write_text("cli_disc.cfg",
             std::string(kBaseConfig) + "train.iters = 5\nschedule.steps = 1000\n");
  EXPECT(run("train --config cli_disc.cfg --out cli_disc.ckpt") == 0, "discrete-time train");
  EXPECT(run("sample --ckpt cli_disc.ckpt --in cli_sources.csv --out cli_x.csv "
             "--direction forward --nfe 3") == 2,
         "nfe must divide the step count");
  EXPECT(run("sample --ckpt cli_disc.ckpt --in cli_sources.csv --out cli_disc_out.csv "
             "--direction forward --nfe 200 --eta 1 --seed 1") == 0,
         "divisor nfe works");

  // ---- verify -----------------------------------------------------------
  EXPECT(run("verify --suite kernels --seed 1234") == 0, "kernel suite passes");
  {
    std::string report = slurp("cli_stdout.txt");
    EXPECT(report.find("check,value,threshold,pass") != std::string::npos, "csv report header");
    EXPECT(report.find("cke_composition") != std::string::npos, "composition row present");
  }
  EXPECT(run("verify --suite doob --seed 9") == 0, "doob suite passes");
  EXPECT(run("verify --suite kernels --seed 1234 --mutate backward-variance") == 1,
         "mis-scaled backward variance fails verification");
  EXPECT(run("verify --suite kernels --seed 1234 --mutate delta-variant") == 1,
         "wrong variance variant fails verification");
  EXPECT(run("verify --suite grad --seed 7 --mutate drop-mask") == 1,
         "dropped mask channel fails verification");
  EXPECT(run("verify --suite nonsense --seed 1") == 2, "unknown suite is a usage error");
  EXPECT(run("verify --suite kernels --mutate gremlins") == 2, "unknown mutation");

  // ---- eval ---------------------------------------------------------------
  write_text("cli_eval.cfg", std::string(kBaseConfig) +
                                 "train.iters = 1\neval.n = 48\neval.generations = 2\n"
                                 "eval.sources = 4\neval.nfe = 16\n");
  EXPECT(run("eval --ckpt cli_model.ckpt --config cli_eval.cfg --out cli_metrics.csv") == 0,
         "eval happy path");
  {
    std::string metrics = slurp("cli_metrics.csv");
    EXPECT(metrics.find("direction,metric,value") != std::string::npos, "metrics header");
    EXPECT(metrics.find("forward,energy") != std::string::npos, "forward energy row");
    EXPECT(metrics.find("backward,energy") != std::string::npos, "backward energy row");
    EXPECT(metrics.find("mse") != std::string::npos, "mse rows");
    EXPECT(metrics.find("diversity") != std::string::npos, "diversity rows");
  }
  EXPECT(run("eval --ckpt cli_model.ckpt --config cli_eval.cfg --out cli_x.csv --metrics ''") == 2,
         "empty metrics list");
  EXPECT(run("eval --ckpt cli_model.ckpt --config cli_eval.cfg --out cli_x.csv "
             "--metrics entropy") == 2,
         "unknown metric");

  // ---- plot ---------------------------------------------------------------
  EXPECT(run("plot --in cli_fwd.csv --out cli_plot.svg") == 0, "plot happy path");
  std::string svg = slurp("cli_plot.svg");
  EXPECT(count_substr(svg, "<circle") == 3, "one circle per sample row");
  EXPECT(run("plot --in cli_fwd.csv --out cli_plot2.svg") == 0, "plot again");
  EXPECT(slurp("cli_plot2.svg") == svg, "plots are byte-deterministic");
  write_text("cli_empty.csv", "dim0,dim1\n");
  EXPECT(run("plot --in cli_empty.csv --out cli_x.svg") == 2, "empty input");
  write_text("cli_1d.csv", "dim0\n1.0\n");
  EXPECT(run("plot --in cli_1d.csv --out cli_x.svg") == 2, "plot needs d=2");

  for (const char* f :
       {"cli_train.cfg", "cli_noiters.cfg", "cli_zero.cfg", "cli_disc.cfg", "cli_eval.cfg",
        "cli_model.ckpt", "cli_model.ckpt.loss.csv", "cli_init.ckpt", "cli_init.ckpt.loss.csv",
        "cli_disc.ckpt", "cli_disc.ckpt.loss.csv", "cli_sources.csv", "cli_bad_dim.csv",
        "cli_fwd.csv", "cli_fwd2.csv", "cli_bwd.csv", "cli_disc_out.csv", "cli_metrics.csv",
        "cli_plot.svg", "cli_plot2.svg", "cli_empty.csv", "cli_1d.csv", "cli_stdout.txt",
        "cli_stderr.txt"})
    std::remove(f);

  if (g_failures == 0) {
    std::cout << "cli pipeline: all checks passed\n";
    return 0;
  }
  std::cerr << "cli pipeline: " << g_failures << " check(s) failed\n";
  return 1;
}
