#include "tc/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "tc/units.hpp"

namespace tc::calibration {
namespace {

constexpr double kTailTol = 1e-6;   // lost Poisson mass worth flagging
constexpr double kNormTol = 1e-3;   // acceptable deviation of sum(P) from 1

// Solve the square system g*x = rhs by Gaussian elimination with partial
// pivoting; g and rhs are consumed.  The NNLS normal equations stay tiny
// (one row per active tone), so a dense direct solve is plenty.
std::vector<double> solve_dense(std::vector<std::vector<double>> g,
                                std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(g[r][col]) > std::abs(g[pivot][col])) pivot = r;
    if (g[pivot][col] == 0.0)
      throw std::runtime_error("infer_populations: singular tone basis");
    std::swap(g[col], g[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = g[r][col] / g[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) g[r][c] -= f * g[col][c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= g[i][c] * x[c];
    x[i] = s / g[i][i];
  }
  return x;
}

// Lawson-Hanson active-set nonnegative least squares: minimize |A x - b|
// subject to x >= 0, with A given as m rows of k columns.
std::vector<double> nnls(const std::vector<std::vector<double>>& a,
                         const std::vector<double>& b) {
  const std::size_t m = b.size();
  const std::size_t k = m == 0 ? 0 : a[0].size();
  std::vector<double> x(k, 0.0);
  std::vector<char> passive(k, 0);

  // Gradient of the residual norm at x, w = A^T (b - A x).
  auto gradient = [&](const std::vector<double>& xs) {
    std::vector<double> r(b);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < k; ++j) r[i] -= a[i][j] * xs[j];
    std::vector<double> w(k, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < k; ++j) w[j] += a[i][j] * r[i];
    return w;
  };

  double scale = 1.0;
  for (double wj : gradient(std::vector<double>(k, 0.0)))
    scale = std::max(scale, std::abs(wj));
  const double tol = 1e-10 * scale;

  const std::size_t max_outer = 50 + 10 * k;
  for (std::size_t outer = 0; outer < max_outer; ++outer) {
    const std::vector<double> w = gradient(x);
    std::size_t enter = k;
    double best = tol;
    for (std::size_t j = 0; j < k; ++j)
      if (!passive[j] && w[j] > best) {
        best = w[j];
        enter = j;
      }
    if (enter == k) return x;  // Kuhn-Tucker: no constrained direction improves
    passive[enter] = 1;

    for (std::size_t inner = 0; inner <= k; ++inner) {
      std::vector<std::size_t> act;
      for (std::size_t j = 0; j < k; ++j)
        if (passive[j]) act.push_back(j);

      // Unconstrained least squares on the active tones (normal equations).
      const std::size_t p = act.size();
      std::vector<std::vector<double>> gram(p, std::vector<double>(p, 0.0));
      std::vector<double> rhs(p, 0.0);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t u = 0; u < p; ++u) {
          const double aiu = a[i][act[u]];
          rhs[u] += aiu * b[i];
          for (std::size_t v = u; v < p; ++v) gram[u][v] += aiu * a[i][act[v]];
        }
      for (std::size_t u = 0; u < p; ++u)
        for (std::size_t v = 0; v < u; ++v) gram[u][v] = gram[v][u];
      const std::vector<double> z = solve_dense(std::move(gram), std::move(rhs));

      if (std::all_of(z.begin(), z.end(), [](double v) { return v > 0.0; })) {
        std::fill(x.begin(), x.end(), 0.0);
        for (std::size_t u = 0; u < p; ++u) x[act[u]] = z[u];
        break;
      }

      // Back off along x -> z until the first active tone hits zero.
      double step = 1.0;
      for (std::size_t u = 0; u < p; ++u)
        if (z[u] <= 0.0) step = std::min(step, x[act[u]] / (x[act[u]] - z[u]));
      for (std::size_t u = 0; u < p; ++u) {
        x[act[u]] += step * (z[u] - x[act[u]]);
        if (x[act[u]] <= 1e-14) {
          x[act[u]] = 0.0;
          passive[act[u]] = 0;
        }
      }
    }
  }
  throw std::runtime_error("infer_populations: active-set iteration stalled");
}

void check_nonnegative(const PhotonPopulations& pops, const char* who) {
  for (std::size_t n = 0; n < pops.pn.size(); ++n)
    if (pops.pn[n] < 0.0)
      throw std::invalid_argument(std::string(who) + ": negative population at n = " +
                                  std::to_string(n));
}

}  // namespace

double PhotonPopulations::sum() const {
  return std::accumulate(pn.begin(), pn.end(), 0.0);
}

double PhotonPopulations::mean_photons() const {
  double mean = 0.0;
  for (std::size_t n = 1; n < pn.size(); ++n) mean += static_cast<double>(n) * pn[n];
  return mean;
}

PhotonPopulations coherent_populations(double alpha, std::size_t ncut) {
  if (alpha < 0.0)
    throw std::invalid_argument("coherent_populations: alpha must be >= 0");
  PhotonPopulations pops;
  pops.pn.resize(ncut + 1);
  const double nbar = alpha * alpha;
  double p = std::exp(-nbar);  // P_0, then the Poisson recurrence upward
  for (std::size_t n = 0; n <= ncut; ++n) {
    pops.pn[n] = p;
    p *= nbar / static_cast<double>(n + 1);
  }
  pops.tail_clipped = 1.0 - pops.sum() > kTailTol;
  return pops;
}

double infer_alpha(const PhotonPopulations& pops) {
  check_nonnegative(pops, "infer_alpha");
  const double total = pops.sum();
  if (std::abs(total - 1.0) > kNormTol)
    throw std::invalid_argument("infer_alpha: populations sum to " +
                                std::to_string(total) + ", not normalized");
  return std::sqrt(pops.mean_photons());
}

std::vector<double> rabi_probe_signal(const PhotonPopulations& pops,
                                      double g_mhz,
                                      const std::vector<double>& times_ns) {
  if (!(g_mhz > 0.0))
    throw std::invalid_argument("rabi_probe_signal: coupling g must be positive");
  check_nonnegative(pops, "rabi_probe_signal");
  const double g_ang = units::angular_from_mhz(g_mhz);
  std::vector<double> pe(times_ns.size(), 0.0);
  for (std::size_t i = 0; i < times_ns.size(); ++i) {
    double s = 0.0;
    for (std::size_t n = 1; n < pops.pn.size(); ++n) {
      const double osc = std::sin(std::sqrt(static_cast<double>(n)) * g_ang * times_ns[i]);
      s += pops.pn[n] * osc * osc;
    }
    pe[i] = s;
  }
  return pe;
}

PhotonPopulations infer_populations(const std::vector<double>& signal,
                                    const std::vector<double>& times_ns,
                                    double g_mhz,
                                    std::size_t ncut) {
  if (!(g_mhz > 0.0))
    throw std::invalid_argument("infer_populations: coupling g must be positive");
  if (ncut == 0)
    throw std::invalid_argument("infer_populations: need at least one photon level");
  if (signal.empty() || signal.size() != times_ns.size())
    throw std::invalid_argument("infer_populations: signal and time lists must match");

  // One tone column per photon number n >= 1; n = 0 is silent and comes
  // back from the normalization deficit below.
  std::vector<std::vector<double>> basis(signal.size(), std::vector<double>(ncut));
  const double g_ang = units::angular_from_mhz(g_mhz);
  for (std::size_t i = 0; i < times_ns.size(); ++i)
    for (std::size_t n = 1; n <= ncut; ++n) {
      const double osc = std::sin(std::sqrt(static_cast<double>(n)) * g_ang * times_ns[i]);
      basis[i][n - 1] = osc * osc;
    }

  const std::vector<double> weights = nnls(basis, signal);
  PhotonPopulations pops;
  pops.pn.resize(ncut + 1, 0.0);
  for (std::size_t n = 1; n <= ncut; ++n) pops.pn[n] = weights[n - 1];
  pops.pn[0] = std::max(0.0, 1.0 - pops.sum());
  return pops;
}

double recover_drive_strength(double gamma_ratio, double amplitude, double t_ns) {
  if (!(t_ns > 0.0))
    throw std::invalid_argument("recover_drive_strength: drive time must be positive");
  return units::mhz_from_angular(gamma_ratio * amplitude / t_ns);
}

double detuned_steady_amplitude(double omega_mhz, double delta_r_mhz,
                                double kappa1_mhz) {
  const double half_kappa = 0.5 * units::rate_from_mhz(kappa1_mhz);
  const double denom = std::hypot(units::angular_from_mhz(delta_r_mhz), half_kappa);
  if (denom == 0.0)
    throw std::invalid_argument(
        "detuned_steady_amplitude: resonant undamped drive has no steady state");
  return std::abs(units::angular_from_mhz(omega_mhz)) / denom;
}

PhotonPopulations photon_populations_from_density(const linalg::ComplexMatrix& rho,
                                                  std::size_t n_qubits,
                                                  std::size_t fock_cutoff) {
  const std::size_t nlev = fock_cutoff + 1;
  const std::size_t dim = (std::size_t{1} << n_qubits) * nlev;
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("photon_populations_from_density: dimension " +
                                std::to_string(rho.rows()) + " does not match " +
                                std::to_string(dim));
  PhotonPopulations pops;
  pops.pn.assign(nlev, 0.0);
  for (std::size_t q = 0; q < (std::size_t{1} << n_qubits); ++q)
    for (std::size_t n = 0; n < nlev; ++n)
      pops.pn[n] += rho(q * nlev + n, q * nlev + n).real();
  // Round integrator noise at the floor up to exact zero so downstream
  // nonnegativity checks see clean tables.
  for (double& p : pops.pn)
    if (p < 0.0 && p > -1e-10) p = 0.0;
  return pops;
}

}  // namespace tc::calibration
