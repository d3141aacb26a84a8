#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "tc/linalg.hpp"
#include "tc/measurement.hpp"
#include "tc/model.hpp"

namespace tc::dynamics {

// Linear ramp of the coupling ratio lambda/lambda_c over a total time tau.
struct SweepSchedule {
  double ratio_start = 0.5;
  double ratio_end = 2.5;
  double tau_ns = 600.0;
  bool drive_on = true;  // resonator drive Omega applied for the full window
  double dt_ns = 0.02;   // integrator step

  void validate() const;  // throws std::invalid_argument
};

struct EigenTrack {
  std::size_t k = 0;
  // per sample: k energies (relative to the bare all-ground configuration,
  // i.e. eigenvalues of H(t) + N*delta_q(t)/2) and populations <psi_n|rho|psi_n>
  std::vector<std::vector<double>> energies;
  std::vector<std::vector<double>> populations;
  bool ambiguous = false;  // overlap matching hit a near-degenerate pair
};

struct TrajectoryRecord {
  std::vector<double> times_ns;
  std::vector<double> ratios;
  std::vector<double> jz_scaled;
  std::vector<double> photons;  // <a†a>
  std::vector<measurement::ProbabilityTable> probability_tables;
  std::vector<double> trace_drift;  // tr(rho) - 1, signed
  std::vector<double> purity;       // tr(rho^2)
  std::optional<EigenTrack> eigen_track;
};

struct SweepOptions {
  std::size_t sample_stride = 0;  // steps between samples; 0 = about one per ns
  std::size_t track_lowest = 0;   // >0: record the eigen track of that many states
  // Constant per-qubit additions to delta_q(t), in MHz (frequency-disorder runs).
  std::vector<double> detuning_offsets_mhz;
};

// Detuning schedule: lambda_c = sqrt(delta_q*delta_r) = lambda/ratio, so
// delta_q = lambda^2/(ratio^2*delta_r), carrying the sign of delta_r.
double ratio_to_detuning(double ratio, double lambda_mhz, double delta_r_mhz);

// ratio(t), linear from ratio_start at t=0 to ratio_end at t=tau.
double schedule_ratio(double t_ns, const SweepSchedule& schedule);

// Reference Lindblad right-hand side (dense arithmetic):
//   drho/dt = -i[H,rho] + k1 D[a] + 2 k2 D[a†a] + sum_k G1 D[s-] + (G2/2) D[sz]
// with D[c]r = c r c† - {c†c, r}/2 and rates converted MHz -> 1/ns.
linalg::ComplexMatrix lindblad_rhs(const linalg::ComplexMatrix& rho,
                                   const linalg::ComplexMatrix& h,
                                   const model::SystemParams& params,
                                   const model::OperatorSet& ops);

// Integrate the swept master equation from |g...g,0> with fixed-step RK4.
TrajectoryRecord evolve_sweep(const model::SystemParams& params,
                              const SweepSchedule& schedule,
                              const SweepOptions& options = {});

// Same integrator at a frozen detuning; the observer (if any) sees rho every
// observe_stride steps, including the initial and final states.
struct StaticRun {
  linalg::ComplexMatrix rho;
  double trace_drift = 0.0;
};
StaticRun evolve_static(
    const model::SystemParams& params, double delta_q_mhz,
    const linalg::ComplexMatrix& rho0, double duration_ns, double dt_ns,
    const std::function<void(double, const linalg::ComplexMatrix&)>& observer = {},
    std::size_t observe_stride = 50);

// Lowest-k eigenpairs of h with populations from rho.  When `previous`
// holds the k columns of an earlier call, eigenstates are reordered by
// maximal overlap with it so tracks stay continuous through avoided
// crossings; `ambiguous` reports a near-degenerate match (within 1e-6),
// resolved by ascending-energy order.
struct SpectrumSample {
  std::vector<double> energies;
  std::vector<double> populations;
  linalg::ComplexMatrix vectors;  // dim x k, column n matches energies[n]
  bool ambiguous = false;
};
SpectrumSample instantaneous_spectrum(const linalg::ComplexMatrix& rho,
                                      const linalg::ComplexMatrix& h,
                                      std::size_t k,
                                      const linalg::ComplexMatrix* previous = nullptr);

// Earliest ratio r* from which jz_scaled stays flat: every least-squares
// slope over [r, r+window] with r >= r* is below slope_tol in magnitude.
std::optional<double> quasi_steady_onset(const TrajectoryRecord& traj,
                                         double window, double slope_tol);

}  // namespace tc::dynamics
