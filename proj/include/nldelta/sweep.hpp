#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nldelta/config.hpp"
#include "nldelta/numerics.hpp"

namespace nldelta {

struct SweepSpec {
  double k_min = 0.1;
  double k_max = 6.0;
  int n_points = 200;
  bool log_spacing = false;
  ScatterConfig problem;  // k is filled per point
  std::optional<RootScanConfig> scan;

  /// Throws ValidationError unless 0 < k_min < k_max and n_points >= 2.
  void validate() const;
};

/// One (k, branch) row.
struct SweepRecord {
  double k = 0.0;
  int branch_index = 0;
  double t_intensity = 0.0;
  double r_intensity = 0.0;
  double psi_cn_modulus = 0.0;
  double residual = 0.0;
  Complex reflection;
  Complex transmission;
};

struct SweepResult {
  std::vector<SweepRecord> records;  // ascending k, then branch
  std::vector<double> skipped_k;     // points where no branch was found
};

std::vector<double> sweep_grid(const SweepSpec& spec);

/// Solves every k point (in parallel over `threads` workers, 0 = hardware
/// concurrency) and collects the rows in grid order. Points without a branch
/// are listed in skipped_k rather than aborting the sweep.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0);

/// Header k,branch,T2,R2,psi_cN,residual then one row per record, %.17g, LF.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRecord>& records);

/// {"records": [...]} with the CSV columns plus R and T as [re, im].
std::string sweep_json(const std::vector<SweepRecord>& records);

// ---------------------------------------------------------------------------
// Figure parameter sets
// ---------------------------------------------------------------------------

struct Preset {
  std::string name;
  std::string description;
  ScatterConfig config;
  double k_min = 0.1;  // axis ranges are not recoverable; [0.1, 6] is a choice
  double k_max = 6.0;
};

const std::vector<Preset>& presets();

/// Throws ValidationError("preset", ...) listing the known names.
const Preset& find_preset(const std::string& name);

}  // namespace nldelta
