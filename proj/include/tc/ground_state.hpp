#pragma once

#include <cstddef>
#include <vector>

#include "tc/linalg.hpp"
#include "tc/model.hpp"

namespace tc::ground_state {

// One point of a coupling-ratio scan.  Moments are the scaled intensive
// values ⟨Jz⟩/(N/2), ⟨Jx⟩/(N/2) and ⟨a†a⟩/N; ground_energy is in rad/ns and
// holds the lowest eigenvalue for finite-N scans or the per-qubit
// variational energy for the mean-field solution.
struct ScanPoint {
  double ratio = 0.0;
  double jz_scaled = 0.0;
  double jx_scaled = 0.0;
  double photons_scaled = 0.0;
  double ground_energy = 0.0;
  bool degenerate = false;  // gap to the next state below 1e-10 rad/ns
};

// Eq.-1 Hamiltonian restricted to the permutation-symmetric sector
// |j=N/2, m⟩⊗|n⟩ (spin index most significant), dimension (N+1)(ncut+1).
// Collective ladder elements are √(j(j+1)−m(m±1)); the qubit drive requires
// a homogeneous Ω' (every entry equal, or the list empty).
linalg::ComplexMatrix build_symmetric_hamiltonian(const model::SystemParams& params,
                                                  double delta_q_mhz);

// Ground-state moments across coupling ratios in the symmetric sector.
// delta_q follows from each ratio via dynamics::ratio_to_detuning and the
// photon cutoff is escalated (doubling from params.fock_cutoff) until
// jz_scaled moves by less than 1e-6 between successive cutoffs; escalation
// past linalg::max_dimension() throws, naming the offending ratio.
// Negative detunings are solved as the equivalent positive-detuning problem
// (a → −a), which leaves every reported moment invariant.
std::vector<ScanPoint> ground_state_scan(const model::SystemParams& params,
                                         const std::vector<double>& ratios);

// Same scan with constant per-qubit additions to delta_q (MHz, one entry per
// qubit; empty = all zero).  Offsets break permutation symmetry, so this
// works in the full 2^N tensor space; beyond small dimensions the lowest
// state comes from a Lanczos solver and the degenerate flag is based on the
// Ritz gap estimate.
std::vector<ScanPoint> ground_state_scan_with_offsets(
    const model::SystemParams& params, const std::vector<double>& ratios,
    const std::vector<double>& offsets_mhz);

// Thermodynamic-limit ground state over product trial states: spin coherent
// state ⊗ field coherent state with amplitude √N·b.  The field amplitude is
// eliminated in closed form and the remaining tilt angle minimized
// numerically.  The resonator drive enters at the finite N of `params`
// ((2Ω/√N)·b per qubit) and so fades from the curves as N grows, matching
// the finite-size rounding of the cusp.
ScanPoint mean_field_ground_state(double ratio, double omega_drive_mhz,
                                  const model::SystemParams& params);

enum class ScanObservable { jx, jz, photons };

// Least-squares slope of log(observable) against log(ratio−1): the critical
// exponent above the transition.  jz enters as 1+jz_scaled so every
// observable vanishes at the critical point; all ratios must exceed 1 and
// all observable values must be positive.
double fit_critical_exponent(const std::vector<ScanPoint>& scan,
                             ScanObservable observable);

}  // namespace tc::ground_state
