#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "core/checks.hpp"

namespace bdbm {

// Command bodies shared by the C API and the CLI.  They throw; the callers
// translate exception kinds into exit codes / status codes.

// Trains per config, writes the checkpoint to out_path and the loss curve to
// out_path + ".loss.csv"; prints the final loss and the checkpoint digest.
void cmd_train(const std::string& config_path, const std::string& out_path, std::ostream& out);

// One generated row per input row; metadata comments record the replay recipe.
void cmd_sample(const std::string& ckpt_path, const std::string& direction, uint32_t nfe,
                double eta, uint64_t seed, const std::string& in_csv, const std::string& out_csv,
                std::ostream& out);

// Prints the check,value,threshold,pass report; returns true iff all passed.
bool cmd_verify(const std::string& suite, uint64_t seed, const MutationFlags& mutation,
                std::ostream& out);

// Samples both directions from the coupling in the config and reports the
// requested metrics (energy, mse, diversity) as direction,metric,value rows.
void cmd_eval(const std::string& ckpt_path, const std::string& coupling_config,
              const std::vector<std::string>& metrics, const std::string& out_csv,
              std::ostream& out);

void cmd_plot(const std::string& in_csv, const std::string& out_svg, std::ostream& out);

}  // namespace bdbm
