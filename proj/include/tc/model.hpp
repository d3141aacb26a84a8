#pragma once

#include <cstddef>
#include <vector>

#include "tc/linalg.hpp"

namespace tc::model {

// Physical parameters of the driven Tavis-Cummings system.  All frequencies
// and rates are linear-frequency values in MHz; builders convert to angular
// rad/ns internally.
struct SystemParams {
  std::size_t n_qubits = 4;
  std::size_t fock_cutoff = 12;           // resonator levels 0..fock_cutoff
  double lambda_mhz = 30.0;               // collective coupling, enters as lambda/sqrt(N)
  double delta_r_mhz = -30.0;             // resonator-drive detuning, signed
  double omega_drive_mhz = 4.0;           // resonator drive Omega
  std::vector<double> omega_qubit_drive_mhz;  // per-qubit Omega'_k; empty = all zero
  double a2_shift_mhz = 0.0;              // A^2-induced shift folded into delta_r
  double kappa1_mhz = 0.4;                // resonator energy decay
  double kappa2_mhz = 0.0;                // resonator pure dephasing
  double gamma1_mhz = 2.0;                // qubit energy decay
  double gamma2_mhz = 4.0;                // qubit pure dephasing

  std::size_t composite_dim() const {
    return (std::size_t{1} << n_qubits) * (fock_cutoff + 1);
  }

  // Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

// All operators on the composite space, qubits Q1..QN (Q1 the most
// significant tensor factor) followed by the resonator.  Basis index is
// qubit_bits*(fock_cutoff+1) + photon_number with bit 1 = excited.
struct OperatorSet {
  std::size_t n_qubits = 0;
  std::size_t fock_cutoff = 0;

  linalg::ComplexMatrix a, a_dag;
  std::vector<linalg::ComplexMatrix> sigma_plus, sigma_minus, sigma_z;
  linalg::ComplexMatrix jz, jx, jplus, jminus;  // Jz = sum_k sigma_z^k / 2
  linalg::ComplexMatrix number_op;              // a†a
  linalg::ComplexMatrix excitations;            // L = Jz + a†a + N/2
  linalg::ComplexMatrix parity;                 // P = exp(i*pi*L)

  std::size_t dim() const {
    return (std::size_t{1} << n_qubits) * (fock_cutoff + 1);
  }
};

OperatorSet build_operator_set(const SystemParams& params);

// Rotating-frame Hamiltonian
//   H = (Δq/2)Σk σz_k + (Δr+a2_shift) a†a + (λ/√N)(a J+ + a† J−)
//       + Ω(a+a†) + Σk (Ω'k/√N)(σ+_k + σ−_k)
// in angular units (rad/ns).  delta_q is the qubit-drive detuning in MHz.
linalg::ComplexMatrix build_driven_tc_hamiltonian(const OperatorSet& ops,
                                                  const SystemParams& params,
                                                  double delta_q_mhz);
linalg::ComplexMatrix build_driven_tc_hamiltonian(const SystemParams& params,
                                                  double delta_q_mhz);

// Undriven lab-frame Tavis-Cummings Hamiltonian
//   H_tc = ωq Jz + ωr a†a + (λ/2)(a J+ + a† J−)
// in angular units (rad/ns); frequencies in MHz.
linalg::ComplexMatrix build_undriven_tc_hamiltonian(double omega_q_mhz,
                                                    double omega_r_mhz,
                                                    double lambda_mhz,
                                                    std::size_t n_qubits,
                                                    std::size_t fock_cutoff);

// ‖HP − PH‖_F, zero iff parity is conserved.
double parity_commutator_norm(const linalg::ComplexMatrix& h,
                              const linalg::ComplexMatrix& p);

}  // namespace tc::model
