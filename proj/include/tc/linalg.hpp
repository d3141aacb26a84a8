#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace tc::linalg {

using Complex = std::complex<double>;

// Global cap on the dimension (rows or columns) any construction routine may
// produce.  Guards against runaway Kronecker growth from bad configs.
std::size_t max_dimension();
void set_max_dimension(std::size_t dim);

// Dense complex matrix, row-major storage.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  static ComplexMatrix identity(std::size_t n);
  static ComplexMatrix zero(std::size_t rows, std::size_t cols) {
    return ComplexMatrix(rows, cols);
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  Complex& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const Complex& operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  Complex* data() { return data_.data(); }
  const Complex* data() const { return data_.data(); }

  ComplexMatrix& operator+=(const ComplexMatrix& other);
  ComplexMatrix& operator-=(const ComplexMatrix& other);
  ComplexMatrix& operator*=(Complex scale);

  ComplexMatrix adjoint() const;
  Complex trace() const;
  double frobenius_norm() const;
  bool is_finite() const;

  // ||A - A†||_F relative to ||A||_F; 0 for the zero matrix.
  double hermiticity_defect() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix operator*(Complex scale, const ComplexMatrix& a);

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // column n pairs with eigenvalues[n]
};

// Kronecker product; the left factor is the most significant index block:
// result((i*rB + k), (j*cB + l)) = A(i,j) * B(k,l).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Full eigendecomposition of a Hermitian matrix by Householder
// tridiagonalization followed by implicit-shift QL.  Eigenvalues ascending;
// each eigenvector's largest-magnitude component is made real positive so
// results are reproducible run to run.
EigenDecomposition hermitian_eig(const ComplexMatrix& h);

// Eigenvalues only (ascending), same reduction without accumulating vectors.
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);

// Trace out the subsystems not listed in `keep` from a density matrix on a
// tensor-product space.  `dims` lists subsystem dimensions with the leftmost
// factor most significant (matching kron above); `keep` holds positions into
// `dims`, and the kept factors retain their relative order.
ComplexMatrix partial_trace(const ComplexMatrix& rho,
                            const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep);

}  // namespace tc::linalg
