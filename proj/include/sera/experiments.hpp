#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sera/bundle.hpp"
#include "sera/config.hpp"

namespace sera {

// One CSV row = one replicate of one grid cell. Optional fields print as NA.
struct SweepRow {
  std::string gen;
  uint32_t n = 0;
  std::optional<uint32_t> k;
  std::optional<double> p, q;
  uint32_t d = 0, depth = 0;
  std::string arch, init, scheme, sim, target;
  double sigma = 0.0;
  bool trained = false;
  uint32_t seed = 0;  // replicate index within the cell

  std::optional<double> auroc, best_err, fpr, fnr;
  std::optional<double> acc_noisy, acc_clean;
  std::optional<double> bound, opnorm_sq;
  std::optional<double> h_label, h_feature, fs_auroc;
  double ms_elapsed = 0.0;
  std::string status = "ok";
};

// Column order is part of the output contract; downstream parsing pins it.
extern const char* const kSweepCsvHeader;

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string summary;  // per-cell mean +/- sd digest, one line per cell
};

// Runs the full grid (n x d x L x arch x sigma, replicates innermost) in a
// fixed order. Every replicate draws all randomness from streams keyed by
// (master_seed, canonical cell description, replicate), so adding or removing
// grid points never changes any other row. A failing replicate becomes a
// status = error:... row instead of aborting the sweep.
SweepResult run_sweep(const ExperimentConfig& cfg, const DatasetBundle* bundle = nullptr);

std::string format_csv(const std::vector<SweepRow>& rows);

// Everything except ms_elapsed, byte-stable across reruns of the same config.
std::string format_csv_stable(const std::vector<SweepRow>& rows);

}  // namespace sera
