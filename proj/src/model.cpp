#include "tc/model.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "tc/units.hpp"

namespace tc::model {

using linalg::Complex;
using linalg::ComplexMatrix;

void SystemParams::validate() const {
  if (n_qubits < 1) throw std::invalid_argument("SystemParams: n_qubits must be >= 1");
  if (fock_cutoff < 2) throw std::invalid_argument("SystemParams: fock_cutoff must be >= 2");
  if (!(lambda_mhz > 0.0)) throw std::invalid_argument("SystemParams: lambda must be > 0");
  if (!omega_qubit_drive_mhz.empty() && omega_qubit_drive_mhz.size() != n_qubits)
    throw std::invalid_argument(
        "SystemParams: omega_qubit_drive must be empty or have one entry per qubit");
  auto check_rate = [](double r, const char* name) {
    if (r < 0.0 || !std::isfinite(r))
      throw std::invalid_argument(std::string("SystemParams: ") + name +
                                  " must be a finite rate >= 0");
  };
  check_rate(kappa1_mhz, "kappa1");
  check_rate(kappa2_mhz, "kappa2");
  check_rate(gamma1_mhz, "gamma1");
  check_rate(gamma2_mhz, "gamma2");
  if (!std::isfinite(delta_r_mhz) || !std::isfinite(omega_drive_mhz) ||
      !std::isfinite(a2_shift_mhz) || !std::isfinite(lambda_mhz))
    throw std::invalid_argument("SystemParams: frequencies must be finite");
}

OperatorSet build_operator_set(const SystemParams& params) {
  params.validate();
  const std::size_t dim = params.composite_dim();
  if (dim > linalg::max_dimension())
    throw std::invalid_argument("build_operator_set: composite dimension " +
                                std::to_string(dim) + " exceeds max_dimension() = " +
                                std::to_string(linalg::max_dimension()));

  const std::size_t nq = params.n_qubits;
  const std::size_t nlev = params.fock_cutoff + 1;
  const std::size_t nbits = std::size_t{1} << nq;

  OperatorSet ops;
  ops.n_qubits = nq;
  ops.fock_cutoff = params.fock_cutoff;

  ops.a = ComplexMatrix(dim, dim);
  ops.a_dag = ComplexMatrix(dim, dim);
  for (std::size_t q = 0; q < nbits; ++q)
    for (std::size_t n = 1; n < nlev; ++n) {
      const double amp = std::sqrt(double(n));
      ops.a(q * nlev + n - 1, q * nlev + n) = amp;
      ops.a_dag(q * nlev + n, q * nlev + n - 1) = amp;
    }

  ops.sigma_plus.assign(nq, ComplexMatrix(dim, dim));
  ops.sigma_minus.assign(nq, ComplexMatrix(dim, dim));
  ops.sigma_z.assign(nq, ComplexMatrix(dim, dim));
  for (std::size_t k = 0; k < nq; ++k) {
    const std::size_t bit = std::size_t{1} << (nq - 1 - k);  // Q1 most significant
    for (std::size_t q = 0; q < nbits; ++q)
      for (std::size_t n = 0; n < nlev; ++n) {
        const std::size_t idx = q * nlev + n;
        if (q & bit) {
          ops.sigma_z[k](idx, idx) = 1.0;
          ops.sigma_minus[k]((q ^ bit) * nlev + n, idx) = 1.0;
        } else {
          ops.sigma_z[k](idx, idx) = -1.0;
          ops.sigma_plus[k]((q | bit) * nlev + n, idx) = 1.0;
        }
      }
  }

  ops.jz = ComplexMatrix(dim, dim);
  ops.jplus = ComplexMatrix(dim, dim);
  ops.jminus = ComplexMatrix(dim, dim);
  for (std::size_t k = 0; k < nq; ++k) {
    ops.jplus += ops.sigma_plus[k];
    ops.jminus += ops.sigma_minus[k];
    ops.jz += ops.sigma_z[k];
  }
  ops.jz *= Complex(0.5, 0.0);
  ops.jx = ops.jplus + ops.jminus;
  ops.jx *= Complex(0.5, 0.0);

  ops.number_op = ComplexMatrix(dim, dim);
  ops.excitations = ComplexMatrix(dim, dim);
  ops.parity = ComplexMatrix(dim, dim);
  for (std::size_t q = 0; q < nbits; ++q)
    for (std::size_t n = 0; n < nlev; ++n) {
      const std::size_t idx = q * nlev + n;
      const std::size_t total = std::size_t(std::popcount(q)) + n;
      ops.number_op(idx, idx) = double(n);
      ops.excitations(idx, idx) = double(total);
      ops.parity(idx, idx) = (total % 2 == 0) ? 1.0 : -1.0;
    }
  return ops;
}

ComplexMatrix build_driven_tc_hamiltonian(const OperatorSet& ops,
                                          const SystemParams& params,
                                          double delta_q_mhz) {
  if (!std::isfinite(delta_q_mhz))
    throw std::invalid_argument("build_driven_tc_hamiltonian: delta_q must be finite");
  const double sqrt_n = std::sqrt(double(params.n_qubits));
  const double dq = units::angular_from_mhz(delta_q_mhz);
  const double dr = units::angular_from_mhz(params.delta_r_mhz + params.a2_shift_mhz);
  const double lam = units::angular_from_mhz(params.lambda_mhz) / sqrt_n;
  const double drive = units::angular_from_mhz(params.omega_drive_mhz);

  ComplexMatrix h = ops.a * ops.jplus + ops.a_dag * ops.jminus;
  h *= Complex(lam, 0.0);
  ComplexMatrix term = ops.jz;
  term *= Complex(dq, 0.0);
  h += term;
  term = ops.number_op;
  term *= Complex(dr, 0.0);
  h += term;
  if (drive != 0.0) {
    term = ops.a + ops.a_dag;
    term *= Complex(drive, 0.0);
    h += term;
  }
  for (std::size_t k = 0; k < params.omega_qubit_drive_mhz.size(); ++k) {
    const double wk = units::angular_from_mhz(params.omega_qubit_drive_mhz[k]) / sqrt_n;
    if (wk == 0.0) continue;
    term = ops.sigma_plus[k] + ops.sigma_minus[k];
    term *= Complex(wk, 0.0);
    h += term;
  }
  return h;
}

ComplexMatrix build_driven_tc_hamiltonian(const SystemParams& params,
                                          double delta_q_mhz) {
  return build_driven_tc_hamiltonian(build_operator_set(params), params, delta_q_mhz);
}

ComplexMatrix build_undriven_tc_hamiltonian(double omega_q_mhz, double omega_r_mhz,
                                            double lambda_mhz, std::size_t n_qubits,
                                            std::size_t fock_cutoff) {
  if (!(omega_q_mhz > 0.0) || !(omega_r_mhz > 0.0))
    throw std::invalid_argument("build_undriven_tc_hamiltonian: frequencies must be positive");
  SystemParams p;
  p.n_qubits = n_qubits;
  p.fock_cutoff = fock_cutoff;
  p.lambda_mhz = lambda_mhz;
  const OperatorSet ops = build_operator_set(p);

  const double wq = units::angular_from_mhz(omega_q_mhz);
  const double wr = units::angular_from_mhz(omega_r_mhz);
  const double lam = units::angular_from_mhz(lambda_mhz);

  ComplexMatrix h = ops.a * ops.jplus + ops.a_dag * ops.jminus;
  h *= Complex(0.5 * lam, 0.0);
  ComplexMatrix term = ops.jz;
  term *= Complex(wq, 0.0);
  h += term;
  term = ops.number_op;
  term *= Complex(wr, 0.0);
  h += term;
  return h;
}

double parity_commutator_norm(const ComplexMatrix& h, const ComplexMatrix& p) {
  if (h.rows() != p.rows() || h.cols() != p.cols() || h.rows() != h.cols())
    throw std::invalid_argument("parity_commutator_norm: dimension mismatch");
  return (h * p - p * h).frobenius_norm();
}

}  // namespace tc::model
