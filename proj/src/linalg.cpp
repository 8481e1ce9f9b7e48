#include "satrep/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "satrep/error.hpp"

namespace satrep {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::NotEffect: return "NotEffect";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::PartialMap: return "PartialMap";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::NotStochastic: return "NotStochastic";
    case ErrorCode::UnknownOutcome: return "UnknownOutcome";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::BadDimension: return "BadDimension";
    case ErrorCode::ObservableMismatch: return "ObservableMismatch";
    case ErrorCode::InvalidPovm: return "InvalidPovm";
    case ErrorCode::InvalidInstrument: return "InvalidInstrument";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::LPNumericalFailure: return "LPNumericalFailure";
    case ErrorCode::NotNormalized: return "NotNormalized";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NonBinaryLabels: return "NonBinaryLabels";
    case ErrorCode::AtomsTooClose: return "AtomsTooClose";
    case ErrorCode::NumericalUnderflow: return "NumericalUnderflow";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

// ---------------------------------------------------------------------------
// ComplexMatrix

ComplexMatrix::ComplexMatrix(std::size_t dim, std::vector<Complex> row_major)
    : dim_(dim), data_(std::move(row_major)) {
  if (data_.size() != dim_ * dim_)
    throw Error(ErrorCode::DimMismatch, "row-major data does not match dim×dim");
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<Complex>> rows)
    : dim_(rows.size()) {
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) throw Error(ErrorCode::DimMismatch, "matrix is not square");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t dim) {
  ComplexMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const double> diag) {
  ComplexMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

ComplexMatrix ComplexMatrix::outer(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "outer product of unequal vectors");
  ComplexMatrix m(a.size());
  for (std::size_t r = 0; r < a.size(); ++r)
    for (std::size_t c = 0; c < b.size(); ++c) m(r, c) = a[r] * std::conj(b[c]);
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(dim_);
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double ComplexMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& z : data_) m = std::max(m, std::abs(z));
  return m;
}

bool ComplexMatrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw Error(ErrorCode::DimMismatch, "matrix sum");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  if (o.dim_ != dim_) throw Error(ErrorCode::DimMismatch, "matrix difference");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& z : data_) z *= s;
  return *this;
}

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim_ != b.dim_) throw Error(ErrorCode::DimMismatch, "matrix product");
  const std::size_t n = a.dim_;
  ComplexMatrix out(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = 0; k < n; ++k) {
      const Complex ark = a(r, k);
      if (ark == Complex{}) continue;
      for (std::size_t c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
    }
  return out;
}

std::vector<Complex> operator*(const ComplexMatrix& a, std::span<const Complex> v) {
  if (a.dim() != v.size()) throw Error(ErrorCode::DimMismatch, "matrix-vector product");
  std::vector<Complex> out(v.size());
  for (std::size_t r = 0; r < v.size(); ++r)
    for (std::size_t c = 0; c < v.size(); ++c) out[r] += a(r, c) * v[c];
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimMismatch, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw Error(ErrorCode::DimMismatch, "inner product");
  Complex s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

// ---------------------------------------------------------------------------
// HermitianOperator

HermitianOperator::HermitianOperator(const ComplexMatrix& m, const Tolerances& tol) {
  if (m.dim() == 0) throw Error(ErrorCode::BadDimension, "empty operator");
  if (!m.all_finite()) throw Error(ErrorCode::NonHermitian, "non-finite entries");
  const double asym = max_abs_diff(m, m.adjoint());
  if (asym > tol.herm_tol)
    throw Error(ErrorCode::NonHermitian, "‖M − M†‖_max = " + std::to_string(asym));
  *this = symmetrized(m);
}

HermitianOperator HermitianOperator::symmetrized(const ComplexMatrix& m) {
  HermitianOperator h;
  h.m_ = m + m.adjoint();
  h.m_ *= 0.5;
  return h;
}

HermitianOperator HermitianOperator::identity(std::size_t dim) {
  HermitianOperator h;
  h.m_ = ComplexMatrix::identity(dim);
  return h;
}

HermitianOperator HermitianOperator::zero(std::size_t dim) {
  HermitianOperator h;
  h.m_ = ComplexMatrix::zero(dim);
  return h;
}

HermitianOperator HermitianOperator::diagonal(std::span<const double> diag) {
  HermitianOperator h;
  h.m_ = ComplexMatrix::diagonal(diag);
  return h;
}

HermitianOperator HermitianOperator::diagonal(std::initializer_list<double> diag) {
  return diagonal(std::span<const double>(diag.begin(), diag.size()));
}

HermitianOperator operator+(const HermitianOperator& a, const HermitianOperator& b) {
  HermitianOperator h;
  h.m_ = a.m_ + b.m_;
  return h;
}

HermitianOperator operator-(const HermitianOperator& a, const HermitianOperator& b) {
  HermitianOperator h;
  h.m_ = a.m_ - b.m_;
  return h;
}

HermitianOperator operator*(double s, const HermitianOperator& a) {
  HermitianOperator h;
  h.m_ = a.m_ * Complex(s);
  return h;
}

// ---------------------------------------------------------------------------
// Jacobi eigensolver
//
// Each rotation first removes the phase of a_pq with a diagonal unitary on
// index q, then applies the real symmetric Jacobi rotation that annihilates
// the (now real) off-diagonal pair.

namespace {

double off_diagonal_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c)
      if (r != c) s += std::norm(a(r, c));
  return std::sqrt(s);
}

double frobenius_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.data()) s += std::norm(z);
  return std::sqrt(s);
}

void rotate(ComplexMatrix& a, ComplexMatrix& v, std::size_t p, std::size_t q) {
  const std::size_t n = a.dim();
  const double r = std::abs(a(p, q));
  if (r == 0.0) return;

  // Phase step: column q *= e^{-iφ}, row q *= e^{iφ}, so a_pq becomes r.
  const Complex phase = std::conj(a(p, q)) / r;  // e^{-iφ}
  for (std::size_t k = 0; k < n; ++k) {
    a(k, q) *= phase;
    v(k, q) *= phase;
  }
  for (std::size_t k = 0; k < n; ++k) a(q, k) *= std::conj(phase);
  a(p, q) = r;
  a(q, p) = r;
  a(q, q) = a(q, q).real();

  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double theta = (aqq - app) / (2.0 * r);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  for (std::size_t k = 0; k < n; ++k) {
    const Complex akp = a(k, p);
    const Complex akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const Complex apk = a(p, k);
    const Complex aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = app - t * r;
  a(q, q) = aqq + t * r;

  for (std::size_t k = 0; k < n; ++k) {
    const Complex vkp = v(k, p);
    const Complex vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

}  // namespace

std::vector<Complex> EigenDecomposition::vector(std::size_t k) const {
  std::vector<Complex> out(eigenvectors.dim());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = eigenvectors(r, k);
  return out;
}

EigenDecomposition eigh(const HermitianOperator& m, const Tolerances& tol) {
  const std::size_t n = m.dim();
  ComplexMatrix a = m.matrix();
  if (!a.all_finite()) throw Error(ErrorCode::NoConvergence, "eigh: matrix has non-finite entries");
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = frobenius_norm(a);
  const double target = 1e-15 * std::max(scale, 1e-300);
  int sweep = 0;
  while (off_diagonal_norm(a) > target) {
    if (sweep++ >= tol.max_jacobi_sweeps)
      throw Error(ErrorCode::NoConvergence,
                  "Jacobi did not converge in " + std::to_string(tol.max_jacobi_sweeps) + " sweeps");
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) rotate(a, v, p, q);
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

  EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]).real();
    for (std::size_t r = 0; r < n; ++r) out.eigenvectors(r, k) = v(r, order[k]);
  }
  return out;
}

ComplexMatrix reconstruct(const EigenDecomposition& e) {
  const std::size_t n = e.eigenvectors.dim();
  ComplexMatrix out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = e.eigenvalues[k];
    if (lambda == 0.0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      const Complex vr = lambda * e.eigenvectors(r, k);
      for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(e.eigenvectors(c, k));
    }
  }
  return out;
}

HermitianOperator sqrt_psd(const HermitianOperator& m, const Tolerances& tol) {
  const auto e = eigh(m, tol);
  if (e.eigenvalues.front() < -tol.psd_tol)
    throw Error(ErrorCode::NotPSD, "min eigenvalue " + std::to_string(e.eigenvalues.front()));
  return spectral_apply(e, [&](double l) { return l <= tol.psd_tol ? 0.0 : std::sqrt(l); });
}

bool is_psd(const HermitianOperator& m, double tol) {
  return eigh(m).eigenvalues.front() >= -tol;
}

bool is_effect(const HermitianOperator& m, const Tolerances& tol) {
  const auto e = eigh(m, tol);
  return e.eigenvalues.front() >= -tol.psd_tol && e.eigenvalues.back() <= 1.0 + tol.psd_tol;
}

}  // namespace satrep
