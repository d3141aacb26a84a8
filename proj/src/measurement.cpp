#include "tc/measurement.hpp"

#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tc::measurement {

double ProbabilityTable::sum() const {
  return std::accumulate(probs.begin(), probs.end(), 0.0);
}

ReadoutModel ReadoutModel::ideal(std::size_t n_qubits) {
  ReadoutModel m;
  m.f_ground.assign(n_qubits, 1.0);
  m.f_excited.assign(n_qubits, 1.0);
  return m;
}

void ReadoutModel::validate() const {
  if (f_ground.size() != f_excited.size())
    throw std::invalid_argument("ReadoutModel: fidelity lists differ in length");
  auto check = [](double f, std::size_t k) {
    if (!(f > 0.5) || !(f <= 1.0))
      throw std::invalid_argument("ReadoutModel: fidelity for qubit " +
                                  std::to_string(k + 1) +
                                  " outside (0.5, 1], response matrix near-singular");
  };
  for (std::size_t k = 0; k < f_ground.size(); ++k) {
    check(f_ground[k], k);
    check(f_excited[k], k);
  }
}

ProbabilityTable joint_probabilities(const linalg::ComplexMatrix& rho,
                                     std::size_t n_qubits,
                                     std::size_t fock_cutoff) {
  const std::size_t nstates = std::size_t{1} << n_qubits;
  const std::size_t dim = nstates * (fock_cutoff + 1);
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("joint_probabilities: density matrix dimension " +
                                std::to_string(rho.rows()) + " does not match " +
                                std::to_string(dim));
  std::vector<std::size_t> dims(n_qubits, 2);
  dims.push_back(fock_cutoff + 1);
  std::vector<std::size_t> keep(n_qubits);
  std::iota(keep.begin(), keep.end(), 0);
  const linalg::ComplexMatrix qubits = linalg::partial_trace(rho, dims, keep);

  ProbabilityTable table;
  table.n_qubits = n_qubits;
  table.probs.resize(nstates);
  for (std::size_t q = 0; q < nstates; ++q) table.probs[q] = qubits(q, q).real();
  return table;
}

CorrectedTable apply_readout_correction(const ProbabilityTable& raw,
                                        const ReadoutModel& model,
                                        CorrectionDirection direction) {
  model.validate();
  if (model.f_ground.size() != raw.n_qubits)
    throw std::invalid_argument("apply_readout_correction: model qubit count mismatch");
  const std::size_t nstates = std::size_t{1} << raw.n_qubits;
  if (raw.probs.size() != nstates)
    throw std::invalid_argument("apply_readout_correction: table size mismatch");

  CorrectedTable out;
  out.table = raw;
  auto& p = out.table.probs;

  for (std::size_t k = 0; k < raw.n_qubits; ++k) {
    const double fg = model.f_ground[k];
    const double fe = model.f_excited[k];
    // Per-qubit response [[fg, 1-fe], [1-fg, fe]] or its inverse.
    double m00, m01, m10, m11;
    if (direction == CorrectionDirection::forward) {
      m00 = fg;
      m01 = 1.0 - fe;
      m10 = 1.0 - fg;
      m11 = fe;
    } else {
      const double det = fg + fe - 1.0;  // > 0 since both fidelities > 0.5
      m00 = fe / det;
      m01 = (fe - 1.0) / det;
      m10 = (fg - 1.0) / det;
      m11 = fg / det;
    }
    const std::size_t bit = nstates >> (k + 1);  // qubit 1 is the MSB
    for (std::size_t idx = 0; idx < nstates; ++idx) {
      if (idx & bit) continue;
      const double p0 = p[idx];
      const double p1 = p[idx | bit];
      p[idx] = m00 * p0 + m01 * p1;
      p[idx | bit] = m10 * p0 + m11 * p1;
    }
  }

  constexpr double kClampFloor = -0.05;
  for (double& v : p)
    if (v < kClampFloor) {
      v = kClampFloor;
      out.clamped = true;
    }
  const double total = out.table.sum();
  if (total <= 0.0)
    throw std::runtime_error("apply_readout_correction: corrected table sums to <= 0");
  for (double& v : p) v /= total;
  return out;
}

double jz_from_probabilities(const ProbabilityTable& table) {
  const std::size_t nstates = std::size_t{1} << table.n_qubits;
  if (table.probs.size() != nstates)
    throw std::invalid_argument("jz_from_probabilities: table size mismatch");
  double jz = 0.0;
  for (std::size_t idx = 0; idx < nstates; ++idx) {
    const double filling = double(std::popcount(idx)) * 2.0 / double(table.n_qubits);
    jz += (filling - 1.0) * table.probs[idx];
  }
  return jz;
}

std::vector<double> group_by_excitation(const ProbabilityTable& table) {
  const std::size_t nstates = std::size_t{1} << table.n_qubits;
  if (table.probs.size() != nstates)
    throw std::invalid_argument("group_by_excitation: table size mismatch");
  std::vector<double> groups(table.n_qubits + 1, 0.0);
  for (std::size_t idx = 0; idx < nstates; ++idx)
    groups[std::popcount(idx)] += table.probs[idx];
  return groups;
}

}  // namespace tc::measurement
