#include "tc/ground_state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>

#include "tc/dynamics.hpp"
#include "tc/units.hpp"

namespace tc::ground_state {

using linalg::Complex;
using linalg::ComplexMatrix;
using model::SystemParams;

namespace {

// The symmetric sector only exists for identical qubits, so the per-qubit
// drive list must be homogeneous (or empty, meaning zero).
double homogeneous_qubit_drive(const SystemParams& params) {
  if (params.omega_qubit_drive_mhz.empty()) return 0.0;
  const double w = params.omega_qubit_drive_mhz.front();
  for (const double v : params.omega_qubit_drive_mhz)
    if (v != w)
      throw std::invalid_argument(
          "build_symmetric_hamiltonian: the symmetric sector needs a "
          "homogeneous qubit drive");
  return w;
}

}  // namespace

ComplexMatrix build_symmetric_hamiltonian(const SystemParams& params,
                                          double delta_q_mhz) {
  params.validate();
  const std::size_t nq = params.n_qubits;
  const std::size_t nlev = params.fock_cutoff + 1;
  const std::size_t dim = (nq + 1) * nlev;
  if (dim > linalg::max_dimension())
    throw std::invalid_argument("build_symmetric_hamiltonian: dimension " +
                                std::to_string(dim) + " exceeds max_dimension()");

  const double j = double(nq) / 2.0;
  const double dq = units::angular_from_mhz(delta_q_mhz);
  const double dr =
      units::angular_from_mhz(params.delta_r_mhz + params.a2_shift_mhz);
  const double lam =
      units::angular_from_mhz(params.lambda_mhz) / std::sqrt(double(nq));
  const double drv = units::angular_from_mhz(params.omega_drive_mhz);
  const double wq = units::angular_from_mhz(homogeneous_qubit_drive(params)) /
                    std::sqrt(double(nq));

  // |mu, n> with m = mu - j; J+|j,m> = sqrt(j(j+1) - m(m+1)) |j,m+1>.
  auto jplus = [j](std::size_t mu) {
    const double m = double(mu) - j;
    return std::sqrt(j * (j + 1.0) - m * (m + 1.0));
  };

  ComplexMatrix h(dim, dim);
  for (std::size_t mu = 0; mu <= nq; ++mu)
    for (std::size_t n = 0; n < nlev; ++n) {
      const std::size_t r = mu * nlev + n;
      h(r, r) = dq * (double(mu) - j) + dr * double(n);
      if (mu < nq && n >= 1)  // a J+
        h((mu + 1) * nlev + n - 1, r) += lam * jplus(mu) * std::sqrt(double(n));
      if (mu >= 1 && n + 1 < nlev)  // a† J-
        h((mu - 1) * nlev + n + 1, r) +=
            lam * jplus(mu - 1) * std::sqrt(double(n + 1));
      if (drv != 0.0) {
        if (n >= 1) h(r - 1, r) += drv * std::sqrt(double(n));
        if (n + 1 < nlev) h(r + 1, r) += drv * std::sqrt(double(n + 1));
      }
      if (wq != 0.0) {
        if (mu < nq) h((mu + 1) * nlev + n, r) += wq * jplus(mu);
        if (mu >= 1) h((mu - 1) * nlev + n, r) += wq * jplus(mu - 1);
      }
    }
  return h;
}

namespace {

// Scaled moments of a symmetric-sector state (column `c` of `vecs`).
void symmetric_moments(const ComplexMatrix& vecs, std::size_t c, std::size_t nq,
                       std::size_t nlev, ScanPoint* pt) {
  const double j = double(nq) / 2.0;
  double jz = 0.0, nbar = 0.0, jx = 0.0;
  for (std::size_t mu = 0; mu <= nq; ++mu) {
    const double m = double(mu) - j;
    const double amp = std::sqrt(j * (j + 1.0) - m * (m + 1.0));
    for (std::size_t n = 0; n < nlev; ++n) {
      const std::size_t r = mu * nlev + n;
      const double p = std::norm(vecs(r, c));
      jz += m * p;
      nbar += double(n) * p;
      if (mu < nq)  // <J+> contribution; <Jx> = Re<J+>
        jx += amp * std::real(std::conj(vecs((mu + 1) * nlev + n, c)) * vecs(r, c));
    }
  }
  pt->jz_scaled = jz / j;
  pt->jx_scaled = jx / j;
  pt->photons_scaled = nbar / double(nq);
}

constexpr double kCutoffTol = 1e-6;    // jz convergence between cutoffs
constexpr double kDegenerateGap = 1e-10;  // rad/ns

ScanPoint solve_symmetric_point(const SystemParams& params, double ratio,
                                double delta_q_mhz) {
  SystemParams p = params;
  if (p.delta_r_mhz < 0.0) {  // a -> -a mirror, moments invariant
    p.delta_r_mhz = -p.delta_r_mhz;
    p.a2_shift_mhz = -p.a2_shift_mhz;
    delta_q_mhz = -delta_q_mhz;
  }
  double prev_jz = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t cut = params.fock_cutoff;; cut *= 2) {
    if ((p.n_qubits + 1) * (cut + 1) > linalg::max_dimension())
      throw std::invalid_argument(
          "ground_state_scan: cutoff escalation passed max_dimension() at "
          "ratio = " +
          std::to_string(ratio));
    p.fock_cutoff = cut;
    const auto eig = linalg::hermitian_eig(build_symmetric_hamiltonian(p, delta_q_mhz));
    ScanPoint pt;
    pt.ratio = ratio;
    pt.ground_energy = eig.eigenvalues[0];
    pt.degenerate = eig.eigenvalues.size() > 1 &&
                    eig.eigenvalues[1] - eig.eigenvalues[0] < kDegenerateGap;
    symmetric_moments(eig.eigenvectors, 0, p.n_qubits, cut + 1, &pt);
    if (!std::isnan(prev_jz) && std::abs(pt.jz_scaled - prev_jz) < kCutoffTol)
      return pt;
    prev_jz = pt.jz_scaled;
  }
}

}  // namespace

std::vector<ScanPoint> ground_state_scan(const SystemParams& params,
                                         const std::vector<double>& ratios) {
  params.validate();
  homogeneous_qubit_drive(params);
  std::vector<ScanPoint> out;
  out.reserve(ratios.size());
  for (const double r : ratios) {
    const double dq =
        dynamics::ratio_to_detuning(r, params.lambda_mhz, params.delta_r_mhz);
    out.push_back(solve_symmetric_point(params, r, dq));
  }
  return out;
}

namespace {

// Real symmetric Hamiltonian of the full 2^N tensor space in CSR form, with
// constant per-qubit detuning offsets folded into the diagonal.  Basis index
// is qubit_bits*(fock_cutoff+1) + photon_number, bit set = excited, qubit 1
// the most significant bit (same convention as the operator set).
struct SparseH {
  std::size_t nq = 0, nlev = 0, dim = 0;
  std::vector<std::size_t> row_ptr, diag_slot;
  std::vector<std::uint32_t> col;
  std::vector<double> val, static_diag, jz_diag, n_diag;

  SparseH(const SystemParams& params, const std::vector<double>& offsets_mhz)
      : nq(params.n_qubits),
        nlev(params.fock_cutoff + 1),
        dim(params.composite_dim()) {
    const double lam =
        units::angular_from_mhz(params.lambda_mhz) / std::sqrt(double(nq));
    const double dr =
        units::angular_from_mhz(params.delta_r_mhz + params.a2_shift_mhz);
    const double drv = units::angular_from_mhz(params.omega_drive_mhz);

    static_diag.resize(dim);
    jz_diag.resize(dim);
    n_diag.resize(dim);
    const std::size_t nbits = std::size_t{1} << nq;
    for (std::size_t q = 0; q < nbits; ++q)
      for (std::size_t n = 0; n < nlev; ++n) {
        const std::size_t i = q * nlev + n;
        n_diag[i] = double(n);
        jz_diag[i] = double(std::popcount(q)) - double(nq) / 2.0;
        static_diag[i] = dr * double(n);
        for (std::size_t k = 0; k < nq && !offsets_mhz.empty(); ++k) {
          const std::size_t bit = std::size_t{1} << (nq - 1 - k);
          const double off = units::angular_from_mhz(offsets_mhz[k]) / 2.0;
          static_diag[i] += (q & bit) ? off : -off;
        }
      }

    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(dim);
    auto add = [&rows](std::size_t r, std::size_t c, double v) {
      rows[r].emplace_back(std::uint32_t(c), v);
    };
    for (std::size_t q = 0; q < nbits; ++q)
      for (std::size_t n = 0; n < nlev; ++n) {
        const std::size_t r = q * nlev + n;
        add(r, r, 0.0);  // diagonal slot, value set by set_delta_q
        for (std::size_t k = 0; k < nq; ++k) {
          const std::size_t bit = std::size_t{1} << (nq - 1 - k);
          if ((q & bit) && n + 1 < nlev)  // a sigma+ : from (q\bit, n+1)
            add(r, (q ^ bit) * nlev + n + 1, lam * std::sqrt(double(n + 1)));
          if (!(q & bit) && n >= 1)  // a† sigma- : from (q|bit, n-1)
            add(r, (q | bit) * nlev + n - 1, lam * std::sqrt(double(n)));
        }
        if (drv != 0.0) {
          if (n >= 1) add(r, r - 1, drv * std::sqrt(double(n)));
          if (n + 1 < nlev) add(r, r + 1, drv * std::sqrt(double(n + 1)));
        }
        for (std::size_t k = 0; k < params.omega_qubit_drive_mhz.size(); ++k) {
          const double wk =
              units::angular_from_mhz(params.omega_qubit_drive_mhz[k]) /
              std::sqrt(double(nq));
          if (wk == 0.0) continue;
          const std::size_t bit = std::size_t{1} << (nq - 1 - k);
          add(r, (q ^ bit) * nlev + n, wk);
        }
      }
    row_ptr.assign(dim + 1, 0);
    diag_slot.resize(dim);
    for (std::size_t r = 0; r < dim; ++r) {
      std::sort(rows[r].begin(), rows[r].end());
      row_ptr[r + 1] = row_ptr[r] + rows[r].size();
      for (const auto& [c, v] : rows[r]) {
        if (c == r) diag_slot[r] = col.size();
        col.push_back(c);
        val.push_back(v);
      }
    }
  }

  void set_delta_q(double dq_ang) {
    for (std::size_t i = 0; i < dim; ++i)
      val[diag_slot[i]] = static_diag[i] + dq_ang * jz_diag[i];
  }

  void matvec(const double* x, double* y) const {
    for (std::size_t r = 0; r < dim; ++r) {
      double acc = 0.0;
      for (std::size_t s = row_ptr[r]; s < row_ptr[r + 1]; ++s)
        acc += val[s] * x[col[s]];
      y[r] = acc;
    }
  }

  ComplexMatrix dense() const {
    ComplexMatrix h(dim, dim);
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t s = row_ptr[r]; s < row_ptr[r + 1]; ++s)
        h(r, col[s]) += val[s];
    return h;
  }
};

struct GroundSolve {
  double energy = 0.0;
  double gap = std::numeric_limits<double>::infinity();
  std::vector<double> vec;  // real ground eigenvector
};

// Lanczos with full reorthogonalization for the lowest eigenpair of a real
// symmetric operator.  The tridiagonal Ritz problem is solved densely each
// iteration (it stays tiny); convergence is the usual beta * |last Ritz
// component| residual bound.
GroundSolve lanczos_ground(const SparseH& h, std::vector<double> start) {
  const std::size_t dim = h.dim;
  const std::size_t max_m = std::min(dim, std::size_t{240});

  auto dot = [dim](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) s += a[i] * b[i];
    return s;
  };

  if (start.size() != dim) {
    start.assign(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      start[i] = 1.0 + 0.3 * std::sin(1.7 * double(i));
  }
  double nrm = std::sqrt(dot(start, start));
  if (!(nrm > 1e-300)) {
    start.assign(dim, 1.0);
    nrm = std::sqrt(double(dim));
  }
  for (double& x : start) x /= nrm;

  std::vector<std::vector<double>> basis;
  basis.push_back(std::move(start));
  std::vector<double> alpha, beta, w(dim);
  double scale = 1.0;

  for (std::size_t m = 1; m <= max_m; ++m) {
    const std::vector<double>& vj = basis.back();
    h.matvec(vj.data(), w.data());
    if (m > 1)
      for (std::size_t i = 0; i < dim; ++i) w[i] -= beta[m - 2] * basis[m - 2][i];
    const double a = dot(vj, w);
    alpha.push_back(a);
    for (std::size_t i = 0; i < dim; ++i) w[i] -= a * vj[i];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& vi : basis) {
        const double c = dot(vi, w);
        for (std::size_t i = 0; i < dim; ++i) w[i] -= c * vi[i];
      }
    const double b = std::sqrt(dot(w, w));
    scale = std::max({scale, std::abs(a), b});

    // Ritz pair of the current tridiagonal.
    ComplexMatrix t(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) {
        t(i, i + 1) = beta[i];
        t(i + 1, i) = beta[i];
      }
    }
    const auto ritz = linalg::hermitian_eig(t);
    const double tail = std::abs(ritz.eigenvectors(m - 1, 0));
    if (b * tail <= 1e-11 * scale || b <= 1e-13 * scale || m == dim) {
      GroundSolve out;
      out.energy = ritz.eigenvalues[0];
      if (m > 1) out.gap = ritz.eigenvalues[1] - ritz.eigenvalues[0];
      out.vec.assign(dim, 0.0);
      for (std::size_t i = 0; i < m; ++i) {
        const double c = std::real(ritz.eigenvectors(i, 0));
        for (std::size_t k = 0; k < dim; ++k) out.vec[k] += c * basis[i][k];
      }
      const double vn = std::sqrt(dot(out.vec, out.vec));
      for (double& x : out.vec) x /= vn;
      return out;
    }
    beta.push_back(b);
    std::vector<double> next(dim);
    for (std::size_t i = 0; i < dim; ++i) next[i] = w[i] / b;
    basis.push_back(std::move(next));
  }
  throw std::runtime_error(
      "ground_state_scan_with_offsets: Lanczos did not converge within 240 "
      "iterations");
}

// Moments of a real full-space state.
void full_space_moments(const SparseH& h, const std::vector<double>& x,
                        ScanPoint* pt) {
  double jz = 0.0, nbar = 0.0, jx = 0.0;
  for (std::size_t i = 0; i < h.dim; ++i) {
    const double p = x[i] * x[i];
    jz += h.jz_diag[i] * p;
    nbar += h.n_diag[i] * p;
  }
  const std::size_t nbits = std::size_t{1} << h.nq;
  for (std::size_t k = 0; k < h.nq; ++k) {
    const std::size_t bit = std::size_t{1} << (h.nq - 1 - k);
    for (std::size_t q = 0; q < nbits; ++q) {
      if (q & bit) continue;
      for (std::size_t n = 0; n < h.nlev; ++n)
        jx += x[q * h.nlev + n] * x[(q | bit) * h.nlev + n];
    }
  }
  const double half_n = double(h.nq) / 2.0;
  pt->jz_scaled = jz / half_n;
  pt->jx_scaled = jx / half_n;
  pt->photons_scaled = nbar / double(h.nq);
}

// Dense solves stay exact (including the gap) up to this dimension; larger
// problems go through Lanczos.
constexpr std::size_t kDenseLimit = 128;

GroundSolve solve_full_space(const SparseH& h, const std::vector<double>& start) {
  if (h.dim > kDenseLimit) return lanczos_ground(h, start);
  const auto eig = linalg::hermitian_eig(h.dense());
  GroundSolve out;
  out.energy = eig.eigenvalues[0];
  if (h.dim > 1) out.gap = eig.eigenvalues[1] - eig.eigenvalues[0];
  out.vec.resize(h.dim);
  for (std::size_t i = 0; i < h.dim; ++i)
    out.vec[i] = std::real(eig.eigenvectors(i, 0));
  double nrm = 0.0;
  for (const double x : out.vec) nrm += x * x;
  nrm = std::sqrt(nrm);
  for (double& x : out.vec) x /= nrm;
  return out;
}

// Re-index a full-space vector onto a larger photon cutoff (zero padding).
std::vector<double> pad_cutoff(const std::vector<double>& x, std::size_t nq,
                               std::size_t nlev_old, std::size_t nlev_new) {
  std::vector<double> out((std::size_t{1} << nq) * nlev_new, 0.0);
  for (std::size_t q = 0; q < (std::size_t{1} << nq); ++q)
    for (std::size_t n = 0; n < nlev_old; ++n)
      out[q * nlev_new + n] = x[q * nlev_old + n];
  return out;
}

}  // namespace

std::vector<ScanPoint> ground_state_scan_with_offsets(
    const SystemParams& params, const std::vector<double>& ratios,
    const std::vector<double>& offsets_mhz) {
  params.validate();
  if (!offsets_mhz.empty() && offsets_mhz.size() != params.n_qubits)
    throw std::invalid_argument(
        "ground_state_scan_with_offsets: need one offset per qubit");

  SystemParams p = params;
  std::vector<double> offs = offsets_mhz;
  const bool mirror = p.delta_r_mhz < 0.0;
  if (mirror) {  // a -> -a equivalence, same as the symmetric scan
    p.delta_r_mhz = -p.delta_r_mhz;
    p.a2_shift_mhz = -p.a2_shift_mhz;
    for (double& o : offs) o = -o;
  }

  std::map<std::size_t, SparseH> built;       // cutoff -> Hamiltonian
  std::map<std::size_t, std::vector<double>> warm;  // cutoff -> last ground vec

  std::vector<ScanPoint> out;
  out.reserve(ratios.size());
  for (const double r : ratios) {
    double dq =
        dynamics::ratio_to_detuning(r, params.lambda_mhz, params.delta_r_mhz);
    if (mirror) dq = -dq;

    double prev_jz = std::numeric_limits<double>::quiet_NaN();
    std::size_t prev_cut = 0;
    for (std::size_t cut = params.fock_cutoff;; cut *= 2) {
      if ((std::size_t{1} << p.n_qubits) * (cut + 1) > linalg::max_dimension())
        throw std::invalid_argument(
            "ground_state_scan_with_offsets: cutoff escalation passed "
            "max_dimension() at ratio = " +
            std::to_string(r));
      p.fock_cutoff = cut;
      auto it = built.find(cut);
      if (it == built.end()) it = built.emplace(cut, SparseH(p, offs)).first;
      SparseH& h = it->second;
      h.set_delta_q(units::angular_from_mhz(dq));

      std::vector<double> start;
      if (auto w = warm.find(cut); w != warm.end())
        start = w->second;
      else if (auto w2 = warm.find(prev_cut); prev_cut && w2 != warm.end())
        start = pad_cutoff(w2->second, p.n_qubits, prev_cut + 1, cut + 1);
      GroundSolve g = solve_full_space(h, start);

      ScanPoint pt;
      pt.ratio = r;
      pt.ground_energy = g.energy;
      pt.degenerate = g.gap < kDegenerateGap;
      full_space_moments(h, g.vec, &pt);
      warm[cut] = std::move(g.vec);

      if (!std::isnan(prev_jz) && std::abs(pt.jz_scaled - prev_jz) < kCutoffTol) {
        out.push_back(pt);
        break;
      }
      prev_jz = pt.jz_scaled;
      prev_cut = cut;
    }
  }
  return out;
}

ScanPoint mean_field_ground_state(double ratio, double omega_drive_mhz,
                                  const SystemParams& params) {
  if (!(ratio > 0.0))
    throw std::invalid_argument("mean_field_ground_state: ratio must be > 0");
  params.validate();
  const double dq = std::abs(units::angular_from_mhz(
      dynamics::ratio_to_detuning(ratio, params.lambda_mhz, params.delta_r_mhz)));
  const double dr = std::abs(
      units::angular_from_mhz(params.delta_r_mhz + params.a2_shift_mhz));
  if (!(dr > 0.0))
    throw std::invalid_argument(
        "mean_field_ground_state: resonator detuning must be nonzero");
  const double lam = units::angular_from_mhz(params.lambda_mhz);
  const double drv = 2.0 * units::angular_from_mhz(omega_drive_mhz) /
                     std::sqrt(double(params.n_qubits));

  // Per-qubit energy over |theta> ⊗ |sqrt(N) b> with the field amplitude b
  // eliminated at its stationary value b = -(lambda sin(theta) + drv)/(2 dr):
  //   g(theta) = -(dq/2) cos(theta) - (lambda sin(theta) + drv)^2 / (4 dr).
  auto energy = [&](double th) {
    const double f = lam * std::sin(th) + drv;
    return -0.5 * dq * std::cos(th) - f * f / (4.0 * dr);
  };

  constexpr std::size_t kGrid = 1024;
  const double pi = std::acos(-1.0);
  double best_th = 0.0, best_g = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i <= kGrid; ++i) {
    const double th = pi * double(i) / double(kGrid);
    const double g = energy(th);
    if (!std::isfinite(g))
      throw std::runtime_error(
          "mean_field_ground_state: variational energy not finite at ratio = " +
          std::to_string(ratio));
    if (g < best_g) {
      best_g = g;
      best_th = th;
    }
  }

  const double step = pi / double(kGrid);
  double lo = std::max(0.0, best_th - step);
  double hi = std::min(pi, best_th + step);
  const double gold = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gold * (hi - lo), x2 = lo + gold * (hi - lo);
  double f1 = energy(x1), f2 = energy(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gold * (hi - lo);
      f1 = energy(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gold * (hi - lo);
      f2 = energy(x2);
    }
  }
  double th = 0.5 * (lo + hi);

  // Newton polish on g'(theta) to machine precision, kept inside the bracket.
  for (int it = 0; it < 6; ++it) {
    const double s = std::sin(th), c = std::cos(th);
    const double f = lam * s + drv, fp = lam * c, fpp = -lam * s;
    const double g1 = 0.5 * dq * s - f * fp / (2.0 * dr);
    const double g2 = 0.5 * dq * c - (fp * fp + f * fpp) / (2.0 * dr);
    if (!(g2 > 0.0)) break;
    const double next = th - g1 / g2;
    if (next < best_th - 2.0 * step || next > best_th + 2.0 * step) break;
    th = std::clamp(next, 0.0, pi);
  }
  if (!std::isfinite(th) || energy(th) > best_g + 1e-9 * (1.0 + std::abs(best_g)))
    throw std::runtime_error(
        "mean_field_ground_state: minimizer failed to refine the grid "
        "optimum at ratio = " +
        std::to_string(ratio));

  const double b = -(lam * std::sin(th) + drv) / (2.0 * dr);
  ScanPoint pt;
  pt.ratio = ratio;
  pt.jz_scaled = -std::cos(th);
  pt.jx_scaled = std::sin(th);
  pt.photons_scaled = b * b;
  pt.ground_energy = energy(th);
  return pt;
}

double fit_critical_exponent(const std::vector<ScanPoint>& scan,
                             ScanObservable observable) {
  if (scan.size() < 2)
    throw std::invalid_argument(
        "fit_critical_exponent: need at least two scan points");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const ScanPoint& pt : scan) {
    if (!(pt.ratio > 1.0))
      throw std::invalid_argument(
          "fit_critical_exponent: every ratio must exceed 1 (got " +
          std::to_string(pt.ratio) + ")");
    double v = 0.0;
    switch (observable) {
      case ScanObservable::jx: v = pt.jx_scaled; break;
      case ScanObservable::jz: v = 1.0 + pt.jz_scaled; break;
      case ScanObservable::photons: v = pt.photons_scaled; break;
    }
    if (!(v > 0.0))
      throw std::invalid_argument(
          "fit_critical_exponent: observable is not positive at ratio = " +
          std::to_string(pt.ratio));
    const double x = std::log(pt.ratio - 1.0);
    const double y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = double(scan.size());
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0))
    throw std::invalid_argument(
        "fit_critical_exponent: ratios are degenerate, slope is undefined");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace tc::ground_state
