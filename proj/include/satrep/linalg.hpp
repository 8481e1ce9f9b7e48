#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "satrep/config.hpp"

namespace satrep {

using Complex = std::complex<double>;

/// Dense square complex matrix, row-major.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  explicit ComplexMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  ComplexMatrix(std::size_t dim, std::vector<Complex> row_major);
  ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows);

  static ComplexMatrix identity(std::size_t dim);
  static ComplexMatrix zero(std::size_t dim) { return ComplexMatrix(dim); }
  static ComplexMatrix diagonal(std::span<const double> diag);
  static ComplexMatrix diagonal(std::initializer_list<double> diag);
  /// |a⟩⟨b|
  static ComplexMatrix outer(std::span<const Complex> a, std::span<const Complex> b);

  std::size_t dim() const noexcept { return dim_; }
  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
  std::span<const Complex> data() const noexcept { return data_; }

  ComplexMatrix adjoint() const;
  Complex trace() const;
  /// max_{ij} |M_ij|
  double max_abs() const;
  bool all_finite() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(Complex s);

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
  friend ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
  friend ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }
  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);
  friend std::vector<Complex> operator*(const ComplexMatrix& a, std::span<const Complex> v);
  bool operator==(const ComplexMatrix&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Complex> data_;
};

/// ‖A − B‖_max; dimensions must agree.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

/// Hermitian matrix. Construction through `HermitianOperator(m, tol)` checks
/// the symmetry residual and throws NonHermitian; the stored matrix is then
/// exactly symmetrized.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  explicit HermitianOperator(const ComplexMatrix& m,
                             const Tolerances& tol = default_tolerances());

  static HermitianOperator identity(std::size_t dim);
  static HermitianOperator zero(std::size_t dim);
  static HermitianOperator diagonal(std::span<const double> diag);
  static HermitianOperator diagonal(std::initializer_list<double> diag);
  /// (M + M†)/2 with no check.
  static HermitianOperator symmetrized(const ComplexMatrix& m);

  const ComplexMatrix& matrix() const noexcept { return m_; }
  std::size_t dim() const noexcept { return m_.dim(); }
  double real_trace() const { return m_.trace().real(); }
  Complex operator()(std::size_t r, std::size_t c) const { return m_(r, c); }

  friend HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b);
  friend HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b);
  friend HermitianOperator operator*(double s, const HermitianOperator& a);
  bool operator==(const HermitianOperator&) const = default;

 private:
  ComplexMatrix m_;
};

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  ComplexMatrix eigenvectors;       // columns

  std::vector<Complex> vector(std::size_t k) const;
};

/// Cyclic complex Jacobi. Throws NoConvergence after `max_jacobi_sweeps`.
EigenDecomposition eigh(const HermitianOperator& m, const Tolerances& tol = default_tolerances());

/// V diag(λ) V†.
ComplexMatrix reconstruct(const EigenDecomposition& e);

/// Applies f to the spectrum: V diag(f(λ)) V†.
template <class F>
HermitianOperator spectral_apply(const EigenDecomposition& e, F&& f) {
  std::vector<double> mapped(e.eigenvalues.size());
  for (std::size_t i = 0; i < mapped.size(); ++i) mapped[i] = f(e.eigenvalues[i]);
  return HermitianOperator::symmetrized(reconstruct({std::move(mapped), e.eigenvectors}));
}

/// Principal square root of a PSD operator. Eigenvalues in (−psd_tol, psd_tol]
/// are treated as zero; anything below −psd_tol throws NotPSD.
HermitianOperator sqrt_psd(const HermitianOperator& m, const Tolerances& tol = default_tolerances());

/// min eigenvalue ≥ −tol.
bool is_psd(const HermitianOperator& m, double tol);

/// 0 ≤ m ≤ 1 within psd_tol.
bool is_effect(const HermitianOperator& m, const Tolerances& tol = default_tolerances());

/// ⟨a|b⟩
Complex inner(std::span<const Complex> a, std::span<const Complex> b);

}  // namespace satrep
