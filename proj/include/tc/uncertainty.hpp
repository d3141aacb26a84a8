#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tc/dynamics.hpp"
#include "tc/ground_state.hpp"
#include "tc/model.hpp"

namespace tc::measurement {

enum class OffsetDistribution { uniform, gaussian };

// Sample statistics of jz_scaled across frequency-disorder runs.  Each run
// draws one constant offset per qubit (uniform on [-sigma, +sigma] MHz, or
// gaussian with standard deviation sigma) added to delta_q for the whole
// run; child seeds derive deterministically from (seed, run index).
struct UncertaintyResult {
  std::vector<double> grid;  // time samples in ns (sweeps) or coupling ratios (scans)
  std::vector<double> mean;  // mean jz_scaled per grid point
  std::vector<double> sd;    // sample standard deviation (n-1 normalization)
  std::vector<std::vector<double>> offsets_mhz;  // drawn offsets, one row per run
};

// Disorder statistics of the swept Lindblad evolution.
UncertaintyResult monte_carlo_uncertainty(
    const model::SystemParams& params, const dynamics::SweepSchedule& schedule,
    double sigma_mhz, std::size_t n_runs, std::uint64_t seed,
    OffsetDistribution distribution = OffsetDistribution::uniform);

// Disorder statistics of ground-state scans: the
// offsets enter each scan through ground_state_scan_with_offsets.
UncertaintyResult monte_carlo_scan_uncertainty(
    const model::SystemParams& params, const std::vector<double>& ratios,
    double sigma_mhz, std::size_t n_runs, std::uint64_t seed,
    OffsetDistribution distribution = OffsetDistribution::uniform);

}  // namespace tc::measurement
