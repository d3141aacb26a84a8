#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tc/dynamics.hpp"
#include "tc/model.hpp"
#include "tc/uncertainty.hpp"

namespace tc::config {

enum class Experiment {
  ground_scan,   // adiabatic ground-state observables over a ratio grid
  mean_field,    // variational large-N limit on the same grid
  sweep,         // time-resolved Lindblad sweep of the coupling ratio
  spectrum,      // sweep plus instantaneous low-lying eigenstate tracking
  uncertainty,   // Monte-Carlo spread under per-qubit detuning disorder
  calibrate,     // drive-strength calibration loop on the bare resonator
  parity_check,  // excitation-parity commutator norms with and without drive
};

const char* experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);  // throws on unknown

enum class UncertaintyTarget { sweep, ground_scan };

// Everything a run needs, defaults matching the device parameters baked
// into SystemParams and SweepSchedule.  Populated by parse_config and then
// possibly overridden by command-line flags before validate().
struct ExperimentConfig {
  Experiment experiment = Experiment::sweep;
  model::SystemParams system;
  dynamics::SweepSchedule schedule;

  // [scan] coupling-ratio grid for the scan-style experiments.
  double ratio_min = 0.5;
  double ratio_max = 2.5;
  double ratio_step = 0.05;
  std::vector<std::size_t> qubit_counts;  // empty = just system.n_qubits
  std::size_t track_lowest = 3;           // eigenstates followed by `spectrum`

  // [scan] Monte-Carlo disorder settings for `uncertainty`.
  double sigma_mhz = 1.0;
  std::size_t n_runs = 50;
  measurement::OffsetDistribution distribution =
      measurement::OffsetDistribution::uniform;
  UncertaintyTarget target = UncertaintyTarget::sweep;

  // [scan] calibration loop settings.
  std::vector<double> omega_list_mhz = {2.0, 4.0, 6.0};
  double drive_time_ns = 50.0;
  double probe_g_mhz = 0.0;  // 0 = default to lambda/sqrt(N)

  std::string output_dir = ".";
  std::optional<std::uint64_t> seed;
  bool emit_plot = false;
  std::size_t threads = 1;  // command-line only; not a config-file key

  // The inclusive ratio grid [ratio_min, ratio_max] in ratio_step strides.
  std::vector<double> scan_ratios() const;

  // Cross-field checks: grid sanity, per-experiment requirements, and the
  // seed rule (mandatory for uncertainty, forbidden everywhere else).
  // Throws std::invalid_argument.
  void validate() const;
};

// Strict INI-style parser: sections [system], [schedule], [scan], [output]
// plus the top-level keys `experiment`, `seed` and `emit_plot`.  Unknown
// sections or keys, duplicate keys, and malformed values are errors that
// name the offending key path.
ExperimentConfig parse_config(const std::string& text);

}  // namespace tc::config
