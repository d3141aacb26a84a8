#include "tc/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tc::linalg {

namespace {

std::atomic<std::size_t> g_max_dimension{4096};

void check_same_shape(const ComplexMatrix& a, const ComplexMatrix& b,
                      const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                                std::to_string(a.rows()) + "x" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + "x" +
                                std::to_string(b.cols()) + ")");
  }
}

}  // namespace

std::size_t max_dimension() { return g_max_dimension.load(); }

void set_max_dimension(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("set_max_dimension: dim must be positive");
  g_max_dimension.store(dim);
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& other) {
  check_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& other) {
  check_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex scale) {
  for (auto& v : data_) v *= scale;
  return *this;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
  return out;
}

Complex ComplexMatrix::trace() const {
  if (rows_ != cols_) throw std::invalid_argument("trace: matrix not square");
  Complex t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

bool ComplexMatrix::is_finite() const {
  for (const auto& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

double ComplexMatrix::hermiticity_defect() const {
  if (rows_ != cols_) throw std::invalid_argument("hermiticity_defect: matrix not square");
  double num = 0.0;
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j)
      num += std::norm((*this)(i, j) - std::conj((*this)(j, i)));
  double den = frobenius_norm();
  if (den == 0.0) return 0.0;
  return std::sqrt(num) / den;
}

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = a;
  out += b;
  return out;
}

ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out = a;
  out -= b;
  return out;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("operator*: inner dimension mismatch (" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.rows()) + ")");
  }
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      if (aik == Complex{}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

ComplexMatrix operator*(Complex scale, const ComplexMatrix& a) {
  ComplexMatrix out = a;
  out *= scale;
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  const std::size_t rows = a.rows() * b.rows();
  const std::size_t cols = a.cols() * b.cols();
  const std::size_t cap = max_dimension();
  if (rows > cap || cols > cap) {
    throw std::invalid_argument("kron: result dimension " + std::to_string(rows) +
                                "x" + std::to_string(cols) + " exceeds max_dimension() = " +
                                std::to_string(cap));
  }
  ComplexMatrix out(rows, cols);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const Complex aij = a(i, j);
      if (aij == Complex{}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

namespace {

// Householder reduction of a Hermitian matrix to tridiagonal form.  On exit
// `diag`/`subdiag` hold the real symmetric tridiagonal matrix (the complex
// subdiagonal phases are folded into `q`), and if `want_q` is set, `q` holds
// the unitary with A = q T q†.
void tridiagonalize(ComplexMatrix a, bool want_q, std::vector<double>& diag,
                    std::vector<double>& subdiag, ComplexMatrix& q) {
  const std::size_t n = a.rows();
  diag.assign(n, 0.0);
  subdiag.assign(n, 0.0);  // subdiag[i] couples i and i+1; last slot is scratch

  // Work on the exactly Hermitian average so round-off in the input cannot
  // leak into complex eigenvalues.
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = Complex(a(i, i).real(), 0.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex avg = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = avg;
      a(j, i) = std::conj(avg);
    }
  }

  std::vector<std::vector<Complex>> reflectors;  // unit vectors on rows k+1..n-1
  if (want_q) reflectors.reserve(n > 2 ? n - 2 : 0);
  std::vector<Complex> u, w, z;
  std::vector<Complex> alpha(n > 1 ? n - 1 : 0);  // complex subdiagonal of T

  for (std::size_t k = 0; k + 2 < n; ++k) {
    const std::size_t m = n - k - 1;  // length of the column below the diagonal
    u.assign(m, Complex{});
    double norm_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      u[i] = a(k + 1 + i, k);
      norm_sq += std::norm(u[i]);
    }
    const double norm = std::sqrt(norm_sq);
    const double off = std::sqrt(norm_sq - std::norm(u[0]));
    if (off <= norm * 1e-300 || norm == 0.0) {
      // Column already tridiagonal here; keep it as-is.
      alpha[k] = u[0];
      if (want_q) reflectors.emplace_back();  // identity placeholder
      continue;
    }
    // Reflect x onto -phase(x0) * norm * e1; v = x + phase(x0) * norm * e1
    // gives |v|^2 = 2 norm (norm + |x0|) with no cancellation.
    const double ax0 = std::abs(u[0]);
    const Complex phase = (ax0 == 0.0) ? Complex(1.0, 0.0) : u[0] / ax0;
    alpha[k] = -phase * norm;
    u[0] += phase * norm;
    const double vnorm = std::sqrt(2.0 * norm * (norm + ax0));
    for (auto& c : u) c /= vnorm;

    // Apply H = I - 2uu† to the trailing block: B <- B - 2uz† - 2zu† with
    // w = Bu, c = u†w (real), z = w - cu.
    w.assign(m, Complex{});
    for (std::size_t i = 0; i < m; ++i) {
      Complex acc = 0.0;
      const Complex* row = &a(k + 1 + i, k + 1);
      for (std::size_t j = 0; j < m; ++j) acc += row[j] * u[j];
      w[i] = acc;
    }
    Complex c = 0.0;
    for (std::size_t i = 0; i < m; ++i) c += std::conj(u[i]) * w[i];
    z = w;
    for (std::size_t i = 0; i < m; ++i) z[i] -= c * u[i];
    for (std::size_t i = 0; i < m; ++i) {
      Complex* row = &a(k + 1 + i, k + 1);
      const Complex ui = u[i], zi = z[i];
      for (std::size_t j = 0; j < m; ++j)
        row[j] -= 2.0 * (ui * std::conj(z[j]) + zi * std::conj(u[j]));
    }
    if (want_q) reflectors.push_back(u);
  }
  if (n >= 2) alpha[n - 2] = a(n - 1, n - 2);
  for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i).real();

  // Phase out the complex subdiagonal: with D = diag(d_i), T' = D† T D is
  // real with T'_{i+1,i} = |alpha_i| when d_{i+1} = alpha_i d_i / |alpha_i|.
  std::vector<Complex> d(n, Complex(1.0, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double mag = std::abs(alpha[i]);
    subdiag[i] = mag;
    d[i + 1] = (mag == 0.0) ? d[i] : alpha[i] * d[i] / mag;
  }

  if (!want_q) return;
  q = ComplexMatrix::identity(n);
  // Q = H_0 H_1 ... H_{n-3}, applied right to left onto the identity; each
  // reflector only touches rows k+1..n-1.
  for (std::size_t kk = reflectors.size(); kk-- > 0;) {
    const auto& v = reflectors[kk];
    if (v.empty()) continue;
    const std::size_t m = v.size();
    const std::size_t base = n - m;
    for (std::size_t col = 0; col < n; ++col) {
      Complex acc = 0.0;
      for (std::size_t i = 0; i < m; ++i) acc += std::conj(v[i]) * q(base + i, col);
      acc *= 2.0;
      for (std::size_t i = 0; i < m; ++i) q(base + i, col) -= v[i] * acc;
    }
  }
  for (std::size_t col = 0; col < n; ++col) {
    const Complex dc = d[col];
    if (dc == Complex(1.0, 0.0)) continue;
    for (std::size_t row = 0; row < n; ++row) q(row, col) *= dc;
  }
}

// Implicit-shift QL sweeps on a real symmetric tridiagonal matrix, rotations
// optionally accumulated into the complex columns of q.
void tqli(std::vector<double>& d, std::vector<double>& e, ComplexMatrix* q) {
  const std::size_t n = d.size();
  if (n == 0) return;
  e[n - 1] = 0.0;
  const double eps = std::numeric_limits<double>::epsilon();
  // Off-diagonals below eps * ||T|| count as converged even when the
  // neighbouring diagonals vanish (density matrices produce long runs of
  // near-zero d with straggler denormal e that never pass a purely
  // relative test).
  double anorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(d[i]);
    if (i > 0) row += std::abs(e[i - 1]);
    if (i + 1 < n) row += std::abs(e[i]);
    anorm = std::max(anorm, row);
  }
  const double tiny = eps * anorm;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd || std::abs(e[m]) <= tiny) break;
      }
      if (m != l) {
        if (iter++ == 50)
          throw std::runtime_error("hermitian_eig: QL iteration failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::size_t i = m;
        bool underflow = false;
        while (i-- > l) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          if (q) {
            for (std::size_t k = 0; k < n; ++k) {
              const Complex fk = (*q)(k, i + 1);
              (*q)(k, i + 1) = s * (*q)(k, i) + c * fk;
              (*q)(k, i) = c * (*q)(k, i) - s * fk;
            }
          }
        }
        if (underflow && i + 1 > l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

void check_square_hermitian(const ComplexMatrix& h, const char* who) {
  if (h.rows() != h.cols())
    throw std::invalid_argument(std::string(who) + ": matrix not square");
  if (!h.is_finite())
    throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
  const double defect = h.hermiticity_defect();
  if (defect > 1e-10)
    throw std::invalid_argument(std::string(who) + ": matrix not Hermitian (defect " +
                                std::to_string(defect) + ")");
}

}  // namespace

EigenDecomposition hermitian_eig(const ComplexMatrix& h) {
  check_square_hermitian(h, "hermitian_eig");
  const std::size_t n = h.rows();
  EigenDecomposition out;
  if (n == 0) {
    out.eigenvectors = ComplexMatrix(0, 0);
    return out;
  }

  std::vector<double> d, e;
  ComplexMatrix q;
  tridiagonalize(h, /*want_q=*/true, d, e, q);
  tqli(d, e, &q);

  // Ascending eigenvalue order with a stable permutation.
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&d](std::size_t a, std::size_t b) { return d[a] < d[b]; });

  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    const std::size_t src = perm[col];
    out.eigenvalues[col] = d[src];
    // Fix the global phase: make the largest-magnitude component real
    // positive (first such component on ties).
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t row = 0; row < n; ++row) {
      const double mag = std::abs(q(row, src));
      if (mag > best) {
        best = mag;
        imax = row;
      }
    }
    Complex phase(1.0, 0.0);
    if (best > 0.0) phase = std::conj(q(imax, src)) / best;
    for (std::size_t row = 0; row < n; ++row)
      out.eigenvectors(row, col) = q(row, src) * phase;
  }
  return out;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
  check_square_hermitian(h, "hermitian_eigenvalues");
  if (h.rows() == 0) return {};
  std::vector<double> d, e;
  ComplexMatrix q;
  tridiagonalize(h, /*want_q=*/false, d, e, q);
  tqli(d, e, nullptr);
  std::sort(d.begin(), d.end());
  return d;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho,
                            const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep) {
  if (rho.rows() != rho.cols())
    throw std::invalid_argument("partial_trace: density matrix not square");
  std::size_t total = 1;
  for (std::size_t dsub : dims) {
    if (dsub == 0) throw std::invalid_argument("partial_trace: zero subsystem dimension");
    total *= dsub;
  }
  if (total != rho.rows())
    throw std::invalid_argument("partial_trace: dims product " + std::to_string(total) +
                                " does not match matrix dimension " +
                                std::to_string(rho.rows()));
  if (keep.empty()) throw std::invalid_argument("partial_trace: keep set is empty");
  for (std::size_t idx = 0; idx < keep.size(); ++idx) {
    if (keep[idx] >= dims.size())
      throw std::invalid_argument("partial_trace: keep index out of range");
    if (idx > 0 && keep[idx] <= keep[idx - 1])
      throw std::invalid_argument("partial_trace: keep indices must be strictly increasing");
  }

  // Strides with the leftmost factor most significant, matching kron().
  std::vector<std::size_t> stride(dims.size(), 1);
  for (std::size_t f = dims.size(); f-- > 1;) stride[f - 1] = stride[f] * dims[f];

  std::vector<std::size_t> traced;
  for (std::size_t f = 0; f < dims.size(); ++f)
    if (std::find(keep.begin(), keep.end(), f) == keep.end()) traced.push_back(f);

  std::size_t keep_dim = 1, trace_dim = 1;
  for (std::size_t f : keep) keep_dim *= dims[f];
  for (std::size_t f : traced) trace_dim *= dims[f];

  // Flatten each composite index into an offset into the full matrix.
  auto offsets = [&](const std::vector<std::size_t>& factors, std::size_t count) {
    std::vector<std::size_t> out(count, 0);
    for (std::size_t v = 0; v < count; ++v) {
      std::size_t rem = v;
      for (std::size_t f = factors.size(); f-- > 0;) {
        const std::size_t dsub = dims[factors[f]];
        out[v] += (rem % dsub) * stride[factors[f]];
        rem /= dsub;
      }
    }
    return out;
  };
  const std::vector<std::size_t> keep_off = offsets(keep, keep_dim);
  const std::vector<std::size_t> trace_off = offsets(traced, trace_dim);

  ComplexMatrix out(keep_dim, keep_dim);
  for (std::size_t i = 0; i < keep_dim; ++i)
    for (std::size_t j = 0; j < keep_dim; ++j) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < trace_dim; ++t)
        acc += rho(keep_off[i] + trace_off[t], keep_off[j] + trace_off[t]);
      out(i, j) = acc;
    }
  return out;
}

}  // namespace tc::linalg
