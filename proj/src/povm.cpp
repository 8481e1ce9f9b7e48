#include "satrep/povm.hpp"

#include <algorithm>
#include <cmath>

#include "satrep/error.hpp"

namespace satrep {

Povm::Povm(std::size_t dim, std::vector<Outcome> outcomes) : dim_(dim), outcomes_(std::move(outcomes)) {
  if (dim_ == 0) throw Error(ErrorCode::BadDimension, "POVM dimension must be positive");
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    if (outcomes_[i].effect.dim() != dim_)
      throw Error(ErrorCode::DimMismatch, "effect for " + outcomes_[i].label.to_string() +
                                              " has dim " + std::to_string(outcomes_[i].effect.dim()));
    for (std::size_t j = 0; j < i; ++j)
      if (outcomes_[i].label == outcomes_[j].label)
        throw Error(ErrorCode::InvalidPovm, "duplicate label " + outcomes_[i].label.to_string());
  }
}

Povm Povm::checked(std::size_t dim, std::vector<Outcome> outcomes, const Tolerances& tol) {
  Povm p(dim, std::move(outcomes));
  const auto report = validate(p, tol);
  if (!report.ok()) throw Error(ErrorCode::InvalidPovm, report.violations.front().message);
  return p;
}

std::vector<Label> Povm::labels() const {
  std::vector<Label> out;
  out.reserve(outcomes_.size());
  for (const auto& o : outcomes_) out.push_back(o.label);
  return out;
}

const HermitianOperator& Povm::effect(const Label& l) const {
  for (const auto& o : outcomes_)
    if (o.label == l) return o.effect;
  throw Error(ErrorCode::UnknownOutcome, "no outcome " + l.to_string());
}

// ---------------------------------------------------------------------------
// States

StateVector::StateVector(std::vector<Complex> amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.empty()) throw Error(ErrorCode::InvalidState, "empty state vector");
  const double norm = std::sqrt(inner(amps_, amps_).real());
  if (!(std::abs(norm - 1.0) <= 1e-10))
    throw Error(ErrorCode::InvalidState, "state norm " + std::to_string(norm));
}

StateVector StateVector::normalized(std::vector<Complex> amplitudes) {
  const double norm = std::sqrt(inner(amplitudes, amplitudes).real());
  if (!(norm > 0.0)) throw Error(ErrorCode::InvalidState, "zero state vector");
  for (auto& a : amplitudes) a /= norm;
  return StateVector(std::move(amplitudes));
}

StateVector StateVector::basis(std::size_t dim, std::size_t k) {
  if (k >= dim) throw Error(ErrorCode::OutOfRange, "basis index out of range");
  std::vector<Complex> v(dim);
  v[k] = 1.0;
  return StateVector(std::move(v));
}

DensityMatrix::DensityMatrix(HermitianOperator rho, const Tolerances& tol) : rho_(std::move(rho)) {
  const double tr = rho_.real_trace();
  if (!(std::abs(tr - 1.0) <= 1e-10))
    throw Error(ErrorCode::InvalidState, "density matrix trace " + std::to_string(tr));
  if (!is_psd(rho_, tol.psd_tol)) throw Error(ErrorCode::InvalidState, "density matrix not PSD");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  DensityMatrix d;
  d.rho_ = HermitianOperator::symmetrized(ComplexMatrix::outer(psi.amplitudes(), psi.amplitudes()));
  return d;
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  DensityMatrix d;
  d.rho_ = (1.0 / static_cast<double>(dim)) * HermitianOperator::identity(dim);
  return d;
}

double expectation(const DensityMatrix& rho, const HermitianOperator& t) {
  if (rho.dim() != t.dim()) throw Error(ErrorCode::DimMismatch, "state and operator dims differ");
  const auto& r = rho.op().matrix();
  const auto& m = t.matrix();
  double s = 0.0;
  for (std::size_t i = 0; i < r.dim(); ++i)
    for (std::size_t j = 0; j < r.dim(); ++j) s += (r(i, j) * m(j, i)).real();
  return s;
}

double expectation(const StateVector& psi, const HermitianOperator& t) {
  if (psi.dim() != t.dim()) throw Error(ErrorCode::DimMismatch, "state and operator dims differ");
  return inner(psi.amplitudes(), t.matrix() * psi.amplitudes()).real();
}

// ---------------------------------------------------------------------------
// Operations

ValidationReport validate(const Povm& p, const Tolerances& tol) {
  ValidationReport report;
  if (p.size() == 0) {
    report.violations.push_back({Violation::Kind::Empty, std::nullopt, 0.0, "POVM has no outcomes"});
    return report;
  }
  ComplexMatrix total(p.dim());
  for (const auto& o : p.outcomes()) {
    if (o.effect.dim() != p.dim()) {
      report.violations.push_back({Violation::Kind::DimMismatch, o.label, 0.0,
                                   "effect " + o.label.to_string() + " has wrong dimension"});
      continue;
    }
    const double min_eig = eigh(o.effect, tol).eigenvalues.front();
    if (min_eig < -tol.psd_tol)
      report.violations.push_back({Violation::Kind::NotPsd, o.label, -min_eig,
                                   "effect not PSD: " + o.label.to_string() + " has eigenvalue " +
                                       std::to_string(min_eig)});
    total += o.effect.matrix();
  }
  const double residual = max_abs_diff(total, ComplexMatrix::identity(p.dim()));
  if (residual > tol.sum_tol)
    report.violations.push_back({Violation::Kind::Completeness, std::nullopt, residual,
                                 "completeness residual " + std::to_string(residual)});
  return report;
}

Povm relabel(const Povm& p, const LabelMap& f) {
  const auto k = MarkovKernel::relabeling(p.labels(), f);
  std::vector<Outcome> out;
  for (std::size_t a = 0; a < k.rows(); ++a) {
    HermitianOperator sum = HermitianOperator::zero(p.dim());
    for (std::size_t j = 0; j < k.cols(); ++j)
      if (k(a, j) == 1.0) sum = sum + p[j].effect;
    out.push_back({k.targets()[a], std::move(sum)});
  }
  return Povm(p.dim(), std::move(out));
}

Povm apply_kernel(const MarkovKernel& k, const Povm& b, const Tolerances& tol) {
  if (k.cols() != b.size())
    throw Error(ErrorCode::LabelMismatch, "kernel has " + std::to_string(k.cols()) +
                                              " sources, POVM has " + std::to_string(b.size()) + " outcomes");
  for (std::size_t j = 0; j < b.size(); ++j)
    if (!(k.sources()[j] == b[j].label))
      throw Error(ErrorCode::LabelMismatch, "kernel source " + k.sources()[j].to_string() +
                                                " vs outcome " + b[j].label.to_string());
  k.check_stochastic(tol);
  std::vector<Outcome> out;
  out.reserve(k.rows());
  for (std::size_t a = 0; a < k.rows(); ++a) {
    ComplexMatrix sum(b.dim());
    for (std::size_t j = 0; j < b.size(); ++j)
      if (k(a, j) != 0.0) sum += b[j].effect.matrix() * Complex(k(a, j));
    out.push_back({k.targets()[a], HermitianOperator::symmetrized(sum)});
  }
  return Povm(b.dim(), std::move(out));
}

CanonicalForm canonical_form(const Povm& p, const Tolerances& tol) {
  struct Group {
    Label label;
    ComplexMatrix direction;  // effect / tr(effect) of the first member
    ComplexMatrix sum;
  };
  std::vector<Group> groups;
  std::vector<std::optional<std::size_t>> membership(p.size());
  std::vector<double> traces(p.size(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& e = p[i].effect.matrix();
    if (e.max_abs() <= tol.zero_tol) continue;
    traces[i] = p[i].effect.real_trace();
    ComplexMatrix direction = e * Complex(1.0 / traces[i]);
    auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& g) {
      return max_abs_diff(g.direction, direction) <= tol.prop_tol;
    });
    if (it == groups.end()) {
      membership[i] = groups.size();
      groups.push_back({p[i].label, std::move(direction), e});
    } else {
      membership[i] = static_cast<std::size_t>(it - groups.begin());
      it->sum += e;
    }
  }
  std::vector<Outcome> out;
  out.reserve(groups.size());
  for (auto& g : groups) out.push_back({std::move(g.label), HermitianOperator::symmetrized(g.sum)});
  CanonicalForm form{Povm(p.dim(), std::move(out)), std::move(membership), std::vector<double>(p.size(), 0.0)};
  for (std::size_t i = 0; i < p.size(); ++i)
    if (form.group[i]) form.weight[i] = traces[i] / form.povm[*form.group[i]].effect.real_trace();
  return form;
}

Povm canonicalize(const Povm& p, const Tolerances& tol) { return canonical_form(p, tol).povm; }

Povm spectral_measure_of_effect(const HermitianOperator& a, const Tolerances& tol) {
  const auto e = eigh(a, tol);
  if (e.eigenvalues.front() < -tol.psd_tol || e.eigenvalues.back() > 1.0 + tol.psd_tol)
    throw Error(ErrorCode::NotEffect, "spectrum outside [0, 1]");

  const std::size_t n = a.dim();
  std::vector<Outcome> out;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + 1;
    while (end < n && e.eigenvalues[end] - e.eigenvalues[start] <= tol.cluster_tol) ++end;
    double mean = 0.0;
    ComplexMatrix proj(n);
    for (std::size_t k = start; k < end; ++k) {
      mean += e.eigenvalues[k];
      const auto v = e.vector(k);
      proj += ComplexMatrix::outer(v, v);
    }
    mean /= static_cast<double>(end - start);
    out.push_back({Label::real(std::clamp(mean, 0.0, 1.0)), HermitianOperator::symmetrized(proj)});
    start = end;
  }
  return Povm(n, std::move(out));
}

Povm binary_povm(const HermitianOperator& a, const Tolerances& tol) {
  if (!is_effect(a, tol)) throw Error(ErrorCode::NotEffect, "operator is not an effect");
  return Povm(a.dim(), {{Label(0), HermitianOperator::identity(a.dim()) - a}, {Label(1), a}});
}

namespace {

double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

Distribution outcome_distribution(const Povm& p, const StateVector& psi) {
  if (psi.dim() != p.dim()) throw Error(ErrorCode::DimMismatch, "state and POVM dims differ");
  Distribution out;
  out.reserve(p.size());
  for (const auto& o : p.outcomes()) out.emplace_back(o.label, clamp_probability(expectation(psi, o.effect)));
  return out;
}

Distribution outcome_distribution(const Povm& p, const DensityMatrix& rho) {
  if (rho.dim() != p.dim()) throw Error(ErrorCode::DimMismatch, "state and POVM dims differ");
  Distribution out;
  out.reserve(p.size());
  for (const auto& o : p.outcomes()) out.emplace_back(o.label, clamp_probability(expectation(rho, o.effect)));
  return out;
}

bool is_sharp(const Povm& p, const Tolerances& tol) {
  return std::all_of(p.outcomes().begin(), p.outcomes().end(), [&](const Outcome& o) {
    const auto& e = o.effect.matrix();
    return max_abs_diff(e * e, e) <= tol.proj_tol;
  });
}

}  // namespace satrep
