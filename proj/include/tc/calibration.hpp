#pragma once

#include <cstddef>
#include <vector>

#include "tc/linalg.hpp"

namespace tc::calibration {

// Resonator energy-level populations P_n for photon numbers n = 0..ncut.
// Entries are nonnegative; the sum may fall short of 1 when a coherent
// state's Poisson tail is clipped by the cutoff.
struct PhotonPopulations {
  std::vector<double> pn;
  bool tail_clipped = false;  // more than 1e-6 of probability lost at ncut

  double sum() const;
  double mean_photons() const;  // sum_n n*P_n
};

// Poisson weights of the coherent state |alpha>: P_n = e^{-a^2} a^{2n}/n!.
// Sets tail_clipped when the mass beyond ncut exceeds 1e-6.
PhotonPopulations coherent_populations(double alpha, std::size_t ncut);

// Coherent amplitude from populations, alpha = sqrt(sum_n n*P_n).  The
// table must be normalized within 1e-3 and free of negative entries.
double infer_alpha(const PhotonPopulations& pops);

// Multi-tone vacuum-Rabi trace of a probe qubit exchanging with the
// resonator at coupling g (MHz, converted to angular internally):
//   Pe(t) = sum_n P_n * sin^2(sqrt(n)*g_ang*t).
// Each |g,n> <-> |e,n-1> pair contributes its own sqrt(n)-scaled tone, so
// the signal is a population-weighted comb; n = 0 contributes nothing.
std::vector<double> rabi_probe_signal(const PhotonPopulations& pops,
                                      double g_mhz,
                                      const std::vector<double>& times_ns);

// The inverse problem: populations from a measured Rabi trace, fitted by
// nonnegative least squares over the sin^2(sqrt(n)*g_ang*t) tone basis.
// P_0 produces no signal, so it is recovered from the normalization
// deficit, clamped at zero.
PhotonPopulations infer_populations(const std::vector<double>& signal,
                                    const std::vector<double>& times_ns,
                                    double g_mhz,
                                    std::size_t ncut);

// Drive strength Omega = gamma*A/t in MHz, where gamma*A is the
// dimensionless coherent amplitude a calibration run reached after driving
// for t ns.  Follows from |alpha| = Omega_ang*t for a resonant drive of an
// undamped cavity.
double recover_drive_strength(double gamma_ratio, double amplitude, double t_ns);

// Steady coherent amplitude of a damped cavity under an off-resonant drive,
//   |alpha| = Omega_ang / sqrt(delta_r_ang^2 + (kappa1/2)^2),
// used to check that on-resonance drive calibrations carry over to small
// detunings.
double detuned_steady_amplitude(double omega_mhz, double delta_r_mhz,
                                double kappa1_mhz);

// Resonator populations of a composite qubits+resonator density matrix:
// P_n = sum over qubit configurations of rho[(q,n),(q,n)].
PhotonPopulations photon_populations_from_density(const linalg::ComplexMatrix& rho,
                                                  std::size_t n_qubits,
                                                  std::size_t fock_cutoff);

}  // namespace tc::calibration
