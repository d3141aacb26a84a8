#include "tc/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "tc/units.hpp"

namespace tc::dynamics {

using linalg::Complex;
using linalg::ComplexMatrix;
using model::OperatorSet;
using model::SystemParams;

void SweepSchedule::validate() const {
  if (!(ratio_start > 0.0) || !(ratio_start < ratio_end))
    throw std::invalid_argument("SweepSchedule: need 0 < ratio_start < ratio_end");
  if (!(tau_ns > 0.0)) throw std::invalid_argument("SweepSchedule: tau must be positive");
  if (!(dt_ns > 0.0) || dt_ns > tau_ns / 100.0)
    throw std::invalid_argument("SweepSchedule: need 0 < dt <= tau/100");
}

double ratio_to_detuning(double ratio, double lambda_mhz, double delta_r_mhz) {
  if (!(ratio > 0.0)) throw std::invalid_argument("ratio_to_detuning: ratio must be > 0");
  if (delta_r_mhz == 0.0)
    throw std::invalid_argument("ratio_to_detuning: delta_r must be nonzero");
  return lambda_mhz * lambda_mhz / (ratio * ratio * delta_r_mhz);
}

double schedule_ratio(double t_ns, const SweepSchedule& schedule) {
  if (t_ns < -1e-9 || t_ns > schedule.tau_ns + 1e-9)
    throw std::invalid_argument("schedule_ratio: t outside the sweep window");
  const double frac = std::clamp(t_ns / schedule.tau_ns, 0.0, 1.0);
  return schedule.ratio_start + (schedule.ratio_end - schedule.ratio_start) * frac;
}

namespace {

// Matrix-free Lindblad generator.  H(t) is a real symmetric CSR matrix whose
// diagonal is rewritten when delta_q changes; the dissipator splits into a
// precomputed per-(i,j) damping coefficient plus the two jump terms that
// shift indices (qubit decay reads rho at raised-bit positions, photon decay
// at raised photon number).
class Engine {
 public:
  Engine(const SystemParams& params, bool drive_on,
         const std::vector<double>& offsets_mhz)
      : nq_(params.n_qubits),
        nlev_(params.fock_cutoff + 1),
        dim_(params.composite_dim()),
        gamma1_(units::rate_from_mhz(params.gamma1_mhz)),
        kappa1_(units::rate_from_mhz(params.kappa1_mhz)) {
    params.validate();
    if (dim_ > linalg::max_dimension())
      throw std::invalid_argument("evolve: composite dimension " +
                                  std::to_string(dim_) + " exceeds max_dimension()");
    if (!offsets_mhz.empty() && offsets_mhz.size() != nq_)
      throw std::invalid_argument("evolve: need one detuning offset per qubit");

    const double lam = units::angular_from_mhz(params.lambda_mhz) / std::sqrt(double(nq_));
    const double dr = units::angular_from_mhz(params.delta_r_mhz + params.a2_shift_mhz);
    const double drive =
        drive_on ? units::angular_from_mhz(params.omega_drive_mhz) : 0.0;
    const double gamma2 = units::rate_from_mhz(params.gamma2_mhz);
    const double kappa2 = units::rate_from_mhz(params.kappa2_mhz);

    static_diag_.resize(dim_);
    jz_diag_.resize(dim_);
    n_diag_.resize(dim_);
    photon_amp_.assign(dim_, 0.0);
    const std::size_t nbits = std::size_t{1} << nq_;
    for (std::size_t q = 0; q < nbits; ++q)
      for (std::size_t n = 0; n < nlev_; ++n) {
        const std::size_t i = q * nlev_ + n;
        n_diag_[i] = double(n);
        jz_diag_[i] = double(std::popcount(q)) - double(nq_) / 2.0;
        static_diag_[i] = dr * double(n);
        if (n + 1 < nlev_) photon_amp_[i] = std::sqrt(double(n + 1));
        for (std::size_t k = 0; k < nq_ && !offsets_mhz.empty(); ++k) {
          const std::size_t bit = std::size_t{1} << (nq_ - 1 - k);
          const double off = units::angular_from_mhz(offsets_mhz[k]) / 2.0;
          static_diag_[i] += (q & bit) ? off : -off;
        }
      }

    // Assemble the sparse Hamiltonian rows.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(dim_);
    auto add = [&rows](std::size_t r, std::size_t c, double v) {
      rows[r].emplace_back(std::uint32_t(c), v);
    };
    for (std::size_t q = 0; q < nbits; ++q)
      for (std::size_t n = 0; n < nlev_; ++n) {
        const std::size_t r = q * nlev_ + n;
        add(r, r, 0.0);  // diagonal slot, value set by set_delta_q
        for (std::size_t k = 0; k < nq_; ++k) {
          const std::size_t bit = std::size_t{1} << (nq_ - 1 - k);
          if ((q & bit) && n + 1 < nlev_)  // a sigma+ : from (q\bit, n+1)
            add(r, (q ^ bit) * nlev_ + n + 1, lam * std::sqrt(double(n + 1)));
          if (!(q & bit) && n >= 1)  // a† sigma- : from (q|bit, n-1)
            add(r, (q | bit) * nlev_ + n - 1, lam * std::sqrt(double(n)));
        }
        if (drive != 0.0) {
          if (n >= 1) add(r, r - 1, drive * std::sqrt(double(n)));
          if (n + 1 < nlev_) add(r, r + 1, drive * std::sqrt(double(n + 1)));
        }
        for (std::size_t k = 0; k < params.omega_qubit_drive_mhz.size(); ++k) {
          const double wk = units::angular_from_mhz(params.omega_qubit_drive_mhz[k]) /
                            std::sqrt(double(nq_));
          if (wk == 0.0) continue;
          const std::size_t bit = std::size_t{1} << (nq_ - 1 - k);
          add(r, (q ^ bit) * nlev_ + n, wk);
        }
      }
    row_ptr_.assign(dim_ + 1, 0);
    diag_slot_.resize(dim_);
    for (std::size_t r = 0; r < dim_; ++r) {
      std::sort(rows[r].begin(), rows[r].end());
      row_ptr_[r + 1] = row_ptr_[r] + rows[r].size();
      for (const auto& [c, v] : rows[r]) {
        if (c == r) diag_slot_[r] = col_.size();
        col_.push_back(c);
        val_.push_back(v);
      }
    }

    any_damping_ = gamma1_ > 0.0 || kappa1_ > 0.0 || gamma2 > 0.0 || kappa2 > 0.0;
    if (any_damping_) {
      damp_.resize(dim_ * dim_);
      for (std::size_t i = 0; i < dim_; ++i) {
        const std::size_t qi = i / nlev_;
        for (std::size_t j = 0; j < dim_; ++j) {
          const std::size_t qj = j / nlev_;
          const double ne = double(std::popcount(qi) + std::popcount(qj));
          const double dn = n_diag_[i] - n_diag_[j];
          damp_[i * dim_ + j] = -0.5 * gamma1_ * ne -
                                0.5 * kappa1_ * (n_diag_[i] + n_diag_[j]) -
                                gamma2 * units::kDephasingHalf * 2.0 *
                                    double(std::popcount(qi ^ qj)) -
                                kappa2 * dn * dn;
        }
      }
    }
    if (gamma1_ > 0.0) {
      bit_clear_.resize(nq_);
      bit_offset_.resize(nq_);
      for (std::size_t k = 0; k < nq_; ++k) {
        const std::size_t bit = std::size_t{1} << (nq_ - 1 - k);
        bit_offset_[k] = bit * nlev_;
        for (std::size_t q = 0; q < nbits; ++q) {
          if (q & bit) continue;
          for (std::size_t n = 0; n < nlev_; ++n)
            bit_clear_[k].push_back(std::uint32_t(q * nlev_ + n));
        }
      }
    }
    if (kappa1_ > 0.0) {
      for (std::size_t i = 0; i < dim_; ++i)
        if (photon_amp_[i] != 0.0) photon_ok_.push_back(std::uint32_t(i));
    }
    m_.resize(dim_ * dim_);
  }

  std::size_t dim() const { return dim_; }
  const std::vector<double>& jz_diag() const { return jz_diag_; }
  const std::vector<double>& n_diag() const { return n_diag_; }

  void set_delta_q(double dq_ang) {
    for (std::size_t i = 0; i < dim_; ++i)
      val_[diag_slot_[i]] = static_diag_[i] + dq_ang * jz_diag_[i];
  }

  // Dense copy of H at the currently set delta_q.
  ComplexMatrix dense_h() const {
    ComplexMatrix h(dim_, dim_);
    for (std::size_t r = 0; r < dim_; ++r)
      for (std::size_t s = row_ptr_[r]; s < row_ptr_[r + 1]; ++s)
        h(r, col_[s]) += val_[s];
    return h;
  }

  void rhs(const Complex* rho, Complex* out) {
    // m = H rho (H real symmetric, rho Hermitian)
    std::fill(m_.begin(), m_.end(), Complex{});
    for (std::size_t r = 0; r < dim_; ++r) {
      Complex* mrow = m_.data() + r * dim_;
      for (std::size_t s = row_ptr_[r]; s < row_ptr_[r + 1]; ++s) {
        const double v = val_[s];
        const Complex* src = rho + std::size_t(col_[s]) * dim_;
        for (std::size_t j = 0; j < dim_; ++j) mrow[j] += v * src[j];
      }
    }
    // out = -i(m - m†) [+ damping coefficient * rho]
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) {
        const Complex z = m_[i * dim_ + j] - std::conj(m_[j * dim_ + i]);
        Complex o(z.imag(), -z.real());
        if (any_damping_) o += damp_[i * dim_ + j] * rho[i * dim_ + j];
        out[i * dim_ + j] = o;
      }
    if (gamma1_ > 0.0) {
      for (std::size_t k = 0; k < nq_; ++k) {
        const std::size_t off = bit_offset_[k];
        const auto& idx = bit_clear_[k];
        for (const std::uint32_t i : idx) {
          Complex* orow = out + std::size_t(i) * dim_;
          const Complex* src = rho + (std::size_t(i) + off) * dim_ + off;
          for (const std::uint32_t j : idx) orow[j] += gamma1_ * src[j];
        }
      }
    }
    if (kappa1_ > 0.0) {
      for (const std::uint32_t i : photon_ok_) {
        Complex* orow = out + std::size_t(i) * dim_;
        const Complex* src = rho + (std::size_t(i) + 1) * dim_ + 1;
        const double ai = kappa1_ * photon_amp_[i];
        for (const std::uint32_t j : photon_ok_)
          orow[j] += ai * photon_amp_[j] * src[j];
      }
    }
  }

 private:
  std::size_t nq_, nlev_, dim_;
  double gamma1_, kappa1_;
  std::vector<std::size_t> row_ptr_, diag_slot_, bit_offset_;
  std::vector<std::uint32_t> col_;
  std::vector<double> val_, static_diag_, jz_diag_, n_diag_, photon_amp_, damp_;
  std::vector<std::vector<std::uint32_t>> bit_clear_;
  std::vector<std::uint32_t> photon_ok_;
  std::vector<Complex> m_;
  bool any_damping_ = false;
};

// One RK4 step with the piecewise-in-time delta_q provided per stage, then
// exact re-Hermitization (rho <- (rho+rho†)/2).
class Stepper {
 public:
  Stepper(Engine& eng) : eng_(eng), dim_(eng.dim()) {
    const std::size_t sz = dim_ * dim_;
    k1_.resize(sz);
    k2_.resize(sz);
    k3_.resize(sz);
    k4_.resize(sz);
    tmp_.resize(sz);
  }

  template <typename DeltaQ>
  void step(std::vector<Complex>& rho, double t, double dt, DeltaQ&& dq_ang_at) {
    const std::size_t sz = dim_ * dim_;
    eng_.set_delta_q(dq_ang_at(t));
    eng_.rhs(rho.data(), k1_.data());
    for (std::size_t i = 0; i < sz; ++i) tmp_[i] = rho[i] + 0.5 * dt * k1_[i];
    eng_.set_delta_q(dq_ang_at(t + 0.5 * dt));
    eng_.rhs(tmp_.data(), k2_.data());
    for (std::size_t i = 0; i < sz; ++i) tmp_[i] = rho[i] + 0.5 * dt * k2_[i];
    eng_.rhs(tmp_.data(), k3_.data());
    for (std::size_t i = 0; i < sz; ++i) tmp_[i] = rho[i] + dt * k3_[i];
    eng_.set_delta_q(dq_ang_at(t + dt));
    eng_.rhs(tmp_.data(), k4_.data());
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < sz; ++i)
      rho[i] += w * (k1_[i] + 2.0 * (k2_[i] + k3_[i]) + k4_[i]);
    for (std::size_t i = 0; i < dim_; ++i) {
      rho[i * dim_ + i] = Complex(rho[i * dim_ + i].real(), 0.0);
      for (std::size_t j = i + 1; j < dim_; ++j) {
        const Complex avg =
            0.5 * (rho[i * dim_ + j] + std::conj(rho[j * dim_ + i]));
        rho[i * dim_ + j] = avg;
        rho[j * dim_ + i] = std::conj(avg);
      }
    }
  }

 private:
  Engine& eng_;
  std::size_t dim_;
  std::vector<Complex> k1_, k2_, k3_, k4_, tmp_;
};

ComplexMatrix to_matrix(const std::vector<Complex>& flat, std::size_t dim) {
  ComplexMatrix m(dim, dim);
  std::copy(flat.begin(), flat.end(), m.data());
  return m;
}

double min_eigenvalue(const ComplexMatrix& rho) {
  return linalg::hermitian_eigenvalues(rho).front();
}

}  // namespace

ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, const ComplexMatrix& h,
                           const SystemParams& params, const OperatorSet& ops) {
  const std::size_t dim = rho.rows();
  if (rho.cols() != dim || h.rows() != dim || h.cols() != dim || dim != ops.dim())
    throw std::invalid_argument("lindblad_rhs: dimension mismatch");

  ComplexMatrix out = h * rho - rho * h;
  out *= Complex(0.0, -1.0);

  auto dissipator = [&rho](const ComplexMatrix& c, double rate) {
    const ComplexMatrix cdag = c.adjoint();
    const ComplexMatrix cc = cdag * c;
    ComplexMatrix term = c * rho * cdag;
    ComplexMatrix anti = cc * rho + rho * cc;
    anti *= Complex(0.5, 0.0);
    term -= anti;
    term *= Complex(rate, 0.0);
    return term;
  };

  const double kappa1 = units::rate_from_mhz(params.kappa1_mhz);
  const double kappa2 = units::rate_from_mhz(params.kappa2_mhz);
  const double gamma1 = units::rate_from_mhz(params.gamma1_mhz);
  const double gamma2 = units::rate_from_mhz(params.gamma2_mhz);
  if (kappa1 > 0.0) out += dissipator(ops.a, kappa1);
  if (kappa2 > 0.0) out += dissipator(ops.number_op, 2.0 * kappa2);
  for (std::size_t k = 0; k < params.n_qubits; ++k) {
    if (gamma1 > 0.0) out += dissipator(ops.sigma_minus[k], gamma1);
    if (gamma2 > 0.0)
      out += dissipator(ops.sigma_z[k], gamma2 * units::kDephasingHalf);
  }
  return out;
}

TrajectoryRecord evolve_sweep(const SystemParams& params,
                              const SweepSchedule& schedule,
                              const SweepOptions& options) {
  params.validate();
  schedule.validate();

  Engine eng(params, schedule.drive_on, options.detuning_offsets_mhz);
  Stepper stepper(eng);
  const std::size_t dim = eng.dim();
  const std::size_t steps = std::size_t(std::llround(schedule.tau_ns / schedule.dt_ns));
  const double dt = schedule.tau_ns / double(steps);
  const std::size_t stride = options.sample_stride
                                 ? options.sample_stride
                                 : std::max<std::size_t>(1, std::size_t(std::llround(1.0 / dt)));

  auto dq_ang_at = [&](double t) {
    return units::angular_from_mhz(ratio_to_detuning(
        schedule_ratio(t, schedule), params.lambda_mhz, params.delta_r_mhz));
  };

  std::vector<Complex> rho(dim * dim, Complex{});
  rho[0] = 1.0;  // |g...g> x |0>

  TrajectoryRecord traj;
  if (options.track_lowest > 0) {
    traj.eigen_track.emplace();
    traj.eigen_track->k = options.track_lowest;
  }
  ComplexMatrix prev_vectors;

  auto record = [&](std::size_t step) {
    const double t = double(step) * dt;
    const double ratio = schedule_ratio(t, schedule);
    const ComplexMatrix rho_m = to_matrix(rho, dim);

    double trace = 0.0, jz = 0.0, photons = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      const double p = rho_m(i, i).real();
      trace += p;
      jz += eng.jz_diag()[i] * p;
      photons += eng.n_diag()[i] * p;
    }
    const double drift = trace - 1.0;
    if (std::abs(drift) > 1e-6)
      throw std::runtime_error(
          "evolve_sweep: trace drift " + std::to_string(drift) + " at t = " +
          std::to_string(t) + " ns exceeds 1e-6; reduce the schedule dt");
    const double lowest = min_eigenvalue(rho_m);
    if (lowest < -1e-6)
      throw std::runtime_error(
          "evolve_sweep: density matrix eigenvalue " + std::to_string(lowest) +
          " at t = " + std::to_string(t) + " ns below -1e-6; reduce the schedule dt");

    double purity = 0.0;
    for (std::size_t i = 0; i < dim * dim; ++i) purity += std::norm(rho[i]);

    traj.times_ns.push_back(t);
    traj.ratios.push_back(ratio);
    traj.jz_scaled.push_back(jz / (double(params.n_qubits) / 2.0));
    traj.photons.push_back(photons);
    traj.trace_drift.push_back(drift);
    traj.purity.push_back(purity);
    traj.probability_tables.push_back(measurement::joint_probabilities(
        rho_m, params.n_qubits, params.fock_cutoff));

    if (options.track_lowest > 0) {
      // Energies relative to the bare all-ground configuration: shift the
      // spectrum copy of H by +N*delta_q/2 so the undisplaced vacuum reads 0.
      const double dq = dq_ang_at(t);
      eng.set_delta_q(dq);
      ComplexMatrix h = eng.dense_h();
      const double offset = 0.5 * double(params.n_qubits) * dq;
      for (std::size_t i = 0; i < dim; ++i) h(i, i) += offset;
      const SpectrumSample s = instantaneous_spectrum(
          rho_m, h, options.track_lowest,
          prev_vectors.rows() == dim ? &prev_vectors : nullptr);
      traj.eigen_track->energies.push_back(s.energies);
      traj.eigen_track->populations.push_back(s.populations);
      traj.eigen_track->ambiguous |= s.ambiguous;
      prev_vectors = s.vectors;
    }
  };

  record(0);
  for (std::size_t s = 0; s < steps; ++s) {
    stepper.step(rho, double(s) * dt, dt, dq_ang_at);
    if ((s + 1) % stride == 0 || s + 1 == steps) record(s + 1);
  }
  return traj;
}

StaticRun evolve_static(
    const SystemParams& params, double delta_q_mhz, const ComplexMatrix& rho0,
    double duration_ns, double dt_ns,
    const std::function<void(double, const ComplexMatrix&)>& observer,
    std::size_t observe_stride) {
  params.validate();
  if (!(duration_ns > 0.0) || !(dt_ns > 0.0))
    throw std::invalid_argument("evolve_static: need positive duration and dt");

  Engine eng(params, /*drive_on=*/true, {});
  Stepper stepper(eng);
  const std::size_t dim = eng.dim();
  if (rho0.rows() != dim || rho0.cols() != dim)
    throw std::invalid_argument("evolve_static: initial state dimension mismatch");
  const std::size_t steps =
      std::max<std::size_t>(1, std::size_t(std::llround(duration_ns / dt_ns)));
  const double dt = duration_ns / double(steps);
  const double dq_ang = units::angular_from_mhz(delta_q_mhz);
  auto frozen = [dq_ang](double) { return dq_ang; };

  std::vector<Complex> rho(rho0.data(), rho0.data() + dim * dim);
  if (observer) observer(0.0, rho0);
  for (std::size_t s = 0; s < steps; ++s) {
    stepper.step(rho, double(s) * dt, dt, frozen);
    if (observer && ((s + 1) % observe_stride == 0 || s + 1 == steps))
      observer(double(s + 1) * dt, to_matrix(rho, dim));
  }

  StaticRun run;
  run.rho = to_matrix(rho, dim);
  run.trace_drift = run.rho.trace().real() - rho0.trace().real();
  if (std::abs(run.trace_drift) > 1e-6)
    throw std::runtime_error("evolve_static: trace drift exceeds 1e-6; reduce dt");
  return run;
}

SpectrumSample instantaneous_spectrum(const ComplexMatrix& rho,
                                      const ComplexMatrix& h, std::size_t k,
                                      const ComplexMatrix* previous) {
  const std::size_t dim = h.rows();
  if (rho.rows() != dim || rho.cols() != dim || h.cols() != dim)
    throw std::invalid_argument("instantaneous_spectrum: dimension mismatch");
  if (k < 1 || k > dim)
    throw std::invalid_argument("instantaneous_spectrum: need 1 <= k <= dim");
  if (previous && (previous->rows() != dim || previous->cols() != k))
    throw std::invalid_argument("instantaneous_spectrum: previous-vectors shape mismatch");

  const linalg::EigenDecomposition eig = linalg::hermitian_eig(h);

  // Match the lowest-k set against the previous call by maximal overlap.
  std::vector<std::size_t> order(k);
  SpectrumSample out;
  if (previous) {
    std::vector<bool> used(k, false);
    for (std::size_t a = 0; a < k; ++a) {
      double best = -1.0, second = -1.0;
      std::size_t pick = 0;
      for (std::size_t b = 0; b < k; ++b) {
        if (used[b]) continue;
        Complex ov = 0.0;
        for (std::size_t i = 0; i < dim; ++i)
          ov += std::conj((*previous)(i, a)) * eig.eigenvectors(i, b);
        const double mag = std::abs(ov);
        if (mag > best) {
          second = best;
          best = mag;
          pick = b;
        } else if (mag > second) {
          second = mag;
        }
      }
      if (second >= 0.0 && best - second < 1e-6) out.ambiguous = true;
      used[pick] = true;
      order[a] = pick;
    }
    if (out.ambiguous)  // deterministic fallback: ascending energy order
      for (std::size_t a = 0; a < k; ++a) order[a] = a;
  } else {
    for (std::size_t a = 0; a < k; ++a) order[a] = a;
  }

  out.energies.resize(k);
  out.populations.resize(k);
  out.vectors = ComplexMatrix(dim, k);
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t src = order[a];
    out.energies[a] = eig.eigenvalues[src];
    Complex pop = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
      Complex row = 0.0;
      for (std::size_t j = 0; j < dim; ++j)
        row += rho(i, j) * eig.eigenvectors(j, src);
      pop += std::conj(eig.eigenvectors(i, src)) * row;
      out.vectors(i, a) = eig.eigenvectors(i, src);
    }
    out.populations[a] = pop.real();
  }
  return out;
}

std::optional<double> quasi_steady_onset(const TrajectoryRecord& traj,
                                         double window, double slope_tol) {
  const auto& r = traj.ratios;
  const auto& jz = traj.jz_scaled;
  if (r.size() < 2 || r.size() != jz.size())
    throw std::invalid_argument("quasi_steady_onset: malformed trajectory");
  if (r.back() <= 1.5)
    throw std::invalid_argument("quasi_steady_onset: trajectory must cover ratios past 1.5");
  if (!(window > 0.0) || window > r.back() - r.front() + 1e-12)
    throw std::invalid_argument("quasi_steady_onset: window exceeds the trajectory span");

  // Least-squares slope of jz vs ratio over [r[i], r[i]+window] for every
  // admissible start.
  std::vector<std::size_t> starts;
  std::vector<double> slopes;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] + window > r.back() + 1e-9) break;
    std::size_t end = i;
    while (end + 1 < r.size() && r[end + 1] <= r[i] + window + 1e-12) ++end;
    if (end == i) continue;
    double sr = 0, sj = 0, srr = 0, srj = 0;
    const double n = double(end - i + 1);
    for (std::size_t m = i; m <= end; ++m) {
      sr += r[m];
      sj += jz[m];
      srr += r[m] * r[m];
      srj += r[m] * jz[m];
    }
    const double denom = n * srr - sr * sr;
    starts.push_back(i);
    slopes.push_back(denom > 0.0 ? (n * srj - sr * sj) / denom : 0.0);
  }
  if (starts.empty())
    throw std::invalid_argument("quasi_steady_onset: window exceeds the trajectory span");

  // The quasi-steady state is what the trajectory settles into after the
  // critical rise, so the flat stretch before the transition does not count:
  // the onset must follow a loud window. A single quiet window is not enough
  // either — the overshoot ring after a fast sweep passes through slope
  // reversals whose windows average to zero — so the quiet has to persist
  // for a window-length of successive starts. A trajectory that never gets
  // loud is steady from the start; one that never settles has no onset.
  std::size_t first_loud = starts.size();
  for (std::size_t w = 0; w < starts.size(); ++w)
    if (std::abs(slopes[w]) >= slope_tol) {
      first_loud = w;
      break;
    }
  if (first_loud == starts.size()) return r.front();
  for (std::size_t w = first_loud + 1; w < starts.size(); ++w) {
    if (std::abs(slopes[w]) >= slope_tol) continue;
    const double r0 = r[starts[w]];
    bool sustained = true;
    for (std::size_t u = w; u < starts.size() && r[starts[u]] <= r0 + window + 1e-12; ++u)
      if (std::abs(slopes[u]) >= slope_tol) {
        sustained = false;
        break;
      }
    if (sustained) return r0;
  }
  return std::nullopt;
}

}  // namespace tc::dynamics
