#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gcs/recovery.hpp"

namespace gcs {

// Axes of a phase-transition sweep: sampling schemes x measurement grid x
// repeated trials, with a fixed master seed.
struct ExperimentConfig {
  std::string net_file;                   // net.file
  std::vector<Eigen::Index> net_widths;   // net.widths (used when net.file empty)
  std::uint64_t net_seed = 1;             // net.seed
  std::string transform = "dft1d";        // transform
  std::vector<std::string> schemes = {"uniform", "adapted"};
  std::vector<Eigen::Index> m_grid;       // m.grid, ascending
  std::int64_t trials = 64;               // trials
  double noise_level = 0.0;               // noise.level (per-entry RMS)
  bool in_range = true;                   // signal.in_range
  std::string signal_file;                // signal.file (out-of-range signal)
  std::uint64_t seed = 1234;              // seed
  std::string coherence_method = "heuristic";  // coherence.method
  std::string coherence_file;             // coherence.file
  std::int64_t coherence_batch = 500;     // coherence.batch
  Eigen::Index sampling_blocks = 1;       // sampling.blocks (outside theory)
  RecoveryConfig recovery;                // recover.*
  std::string out_dir = ".";              // out.dir
};

// Line-oriented `key = value` format; '#' starts a comment, keys are
// dot-paths, values are scalars or comma lists. A list may contain one "..."
// which continues the geometric progression of the two preceding entries.
// Unknown and duplicate keys are errors carrying the line number.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig parse_config_file(const std::string& path);

struct ExperimentRow {
  std::string scheme;
  Eigen::Index m = 0;
  std::int64_t trial = 0;
  double rre = 0.0;
  double objective = 0.0;
  double eps_hat = 0.0;
  bool success = false;  // rre < 3e-3
};

struct ExperimentSummaryRow {
  std::string scheme;
  Eigen::Index m = 0;
  std::int64_t trials = 0;
  double success_rate = 0.0;
  double median_rre = 0.0;
  double mean_rre = 0.0;
};

struct ExperimentResults {
  std::vector<ExperimentRow> rows;        // sorted by (scheme, m, trial)
  std::vector<ExperimentSummaryRow> summary;
  Eigen::VectorXd alpha;                  // coherences used by "adapted", if any
};

// Runs the sweep and writes results.csv and summary.csv into config.out_dir.
// Byte-identical outputs for identical (config, seed).
ExperimentResults run_phase_transition(const ExperimentConfig& config);

void write_results_csv(const ExperimentResults& results, const std::string& path);
void write_summary_csv(const ExperimentResults& results, const std::string& path);
ExperimentResults load_results_csv(const std::string& path);

// Writes success_vs_m.svg and rre_vs_m.svg (plus coherence_spectrum.svg when
// coherences are present) into out_dir.
std::vector<std::string> emit_plots(const ExperimentResults& results,
                                    const std::string& out_dir);

}  // namespace gcs
