#include "tc/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace tc::measurement {

namespace {

std::vector<double> draw_offsets(std::size_t n_qubits, double sigma_mhz,
                                 std::uint64_t seed, std::size_t run,
                                 OffsetDistribution distribution) {
  std::vector<double> offs(n_qubits, 0.0);
  if (sigma_mhz == 0.0) return offs;
  std::seed_seq sequence{std::uint32_t(seed), std::uint32_t(seed >> 32),
                         std::uint32_t(run), std::uint32_t(std::uint64_t(run) >> 32)};
  std::mt19937_64 rng(sequence);
  if (distribution == OffsetDistribution::uniform) {
    std::uniform_real_distribution<double> d(-sigma_mhz, sigma_mhz);
    for (double& o : offs) o = d(rng);
  } else {
    std::normal_distribution<double> d(0.0, sigma_mhz);
    for (double& o : offs) o = d(rng);
  }
  return offs;
}

void check_preconditions(double sigma_mhz, std::size_t n_runs) {
  if (n_runs < 2)
    throw std::invalid_argument("monte_carlo: need at least 2 runs");
  if (!(sigma_mhz >= 0.0))
    throw std::invalid_argument("monte_carlo: sigma must be >= 0");
}

// Column-wise mean and sample SD of the run-by-sample matrix.  Welford's
// update keeps identical inputs (the sigma=0 case) at exactly zero spread.
void accumulate(const std::vector<std::vector<double>>& runs,
                UncertaintyResult* out) {
  const std::size_t n = runs.size();
  const std::size_t cols = runs.front().size();
  out->mean.assign(cols, 0.0);
  out->sd.assign(cols, 0.0);
  for (std::size_t j = 0; j < cols; ++j) {
    double mean = 0.0, m2 = 0.0;
    std::size_t k = 0;
    for (const auto& row : runs) {
      ++k;
      const double d = row[j] - mean;
      mean += d / double(k);
      m2 += d * (row[j] - mean);
    }
    out->mean[j] = mean;
    out->sd[j] = std::sqrt(std::max(m2, 0.0) / double(n - 1));
  }
}

}  // namespace

UncertaintyResult monte_carlo_uncertainty(const model::SystemParams& params,
                                          const dynamics::SweepSchedule& schedule,
                                          double sigma_mhz, std::size_t n_runs,
                                          std::uint64_t seed,
                                          OffsetDistribution distribution) {
  check_preconditions(sigma_mhz, n_runs);
  params.validate();
  schedule.validate();

  UncertaintyResult out;
  std::vector<std::vector<double>> runs;
  runs.reserve(n_runs);
  for (std::size_t run = 0; run < n_runs; ++run) {
    dynamics::SweepOptions options;
    options.detuning_offsets_mhz =
        draw_offsets(params.n_qubits, sigma_mhz, seed, run, distribution);
    const auto traj = dynamics::evolve_sweep(params, schedule, options);
    if (run == 0) out.grid = traj.times_ns;
    runs.push_back(traj.jz_scaled);
    out.offsets_mhz.push_back(std::move(options.detuning_offsets_mhz));
  }
  accumulate(runs, &out);
  return out;
}

UncertaintyResult monte_carlo_scan_uncertainty(const model::SystemParams& params,
                                               const std::vector<double>& ratios,
                                               double sigma_mhz,
                                               std::size_t n_runs,
                                               std::uint64_t seed,
                                               OffsetDistribution distribution) {
  check_preconditions(sigma_mhz, n_runs);
  params.validate();

  UncertaintyResult out;
  out.grid = ratios;
  std::vector<std::vector<double>> runs;
  runs.reserve(n_runs);
  for (std::size_t run = 0; run < n_runs; ++run) {
    const auto offs =
        draw_offsets(params.n_qubits, sigma_mhz, seed, run, distribution);
    const auto scan =
        tc::ground_state::ground_state_scan_with_offsets(params, ratios, offs);
    std::vector<double> jz(scan.size());
    for (std::size_t i = 0; i < scan.size(); ++i) jz[i] = scan[i].jz_scaled;
    runs.push_back(std::move(jz));
    out.offsets_mhz.push_back(offs);
  }
  accumulate(runs, &out);
  return out;
}

}  // namespace tc::measurement
