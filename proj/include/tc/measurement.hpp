#pragma once

#include <cstddef>
#include <vector>

#include "tc/linalg.hpp"

namespace tc::measurement {

// Joint occupation probabilities P_{i1...iN} over the 2^N computational
// basis states; bit i1 (the first qubit) is the most significant index bit,
// 0 = ground, 1 = excited.
struct ProbabilityTable {
  std::size_t n_qubits = 0;
  std::vector<double> probs;

  double sum() const;
};

// Per-qubit readout fidelities: F_ground is the probability of reading g
// when the qubit is in g, F_excited likewise for e.  The per-qubit response
// matrix is [[Fg, 1-Fe], [1-Fg, Fe]] (columns are true states).
struct ReadoutModel {
  std::vector<double> f_ground;
  std::vector<double> f_excited;

  static ReadoutModel ideal(std::size_t n_qubits);
  void validate() const;  // fidelities must lie in (0.5, 1]
};

enum class CorrectionDirection { forward, inverse };

struct CorrectedTable {
  ProbabilityTable table;
  bool clamped = false;  // set when inverse correction produced entries < -0.05
};

// Trace out the resonator and read the computational-basis diagonal.
ProbabilityTable joint_probabilities(const linalg::ComplexMatrix& rho,
                                     std::size_t n_qubits,
                                     std::size_t fock_cutoff);

// Apply the tensor-product readout response (forward) or its inverse to a
// table.  Inverse-corrected entries are clamped at -0.05 and the table is
// renormalized to unit sum; the flag reports whether clamping fired.
CorrectedTable apply_readout_correction(const ProbabilityTable& raw,
                                        const ReadoutModel& model,
                                        CorrectionDirection direction);

// <Jz>/(N/2) = sum over bitstrings of (popcount * 2/N - 1) * P.
double jz_from_probabilities(const ProbabilityTable& table);

// Sums of probabilities grouped by excitation quanta (popcount); N+1 groups
// with sizes binomial(N, k).
std::vector<double> group_by_excitation(const ProbabilityTable& table);

}  // namespace tc::measurement
