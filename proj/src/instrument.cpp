#include "satrep/instrument.hpp"

#include <cmath>

#include "satrep/error.hpp"

namespace satrep {

Instrument::Instrument(std::size_t dim, std::vector<KrausOutcome> outcomes)
    : dim_(dim), outcomes_(std::move(outcomes)) {
  if (dim_ == 0) throw Error(ErrorCode::BadDimension, "instrument dimension must be positive");
  for (std::size_t i = 0; i < outcomes_.size(); ++i) {
    const auto& o = outcomes_[i];
    if (o.kraus.empty())
      throw Error(ErrorCode::InvalidInstrument, "outcome " + o.label.to_string() + " has no Kraus operators");
    for (const auto& k : o.kraus)
      if (k.dim() != dim_)
        throw Error(ErrorCode::DimMismatch, "Kraus operator of " + o.label.to_string() + " has wrong dim");
    for (std::size_t j = 0; j < i; ++j)
      if (outcomes_[j].label == o.label)
        throw Error(ErrorCode::InvalidInstrument, "duplicate label " + o.label.to_string());
  }
}

Instrument Instrument::checked(std::size_t dim, std::vector<KrausOutcome> outcomes, const Tolerances& tol) {
  Instrument ins(dim, std::move(outcomes));
  const double res = ins.normalization_residual();
  if (!(res <= tol.sum_tol))
    throw Error(ErrorCode::InvalidInstrument, "normalization residual " + std::to_string(res));
  return ins;
}

std::vector<Label> Instrument::labels() const {
  std::vector<Label> out;
  for (const auto& o : outcomes_) out.push_back(o.label);
  return out;
}

std::size_t Instrument::index_of(const Label& l) const {
  for (std::size_t i = 0; i < outcomes_.size(); ++i)
    if (outcomes_[i].label == l) return i;
  throw Error(ErrorCode::UnknownOutcome, "no outcome " + l.to_string());
}

double Instrument::normalization_residual() const {
  ComplexMatrix total(dim_);
  for (const auto& o : outcomes_)
    for (const auto& k : o.kraus) total += k.adjoint() * k;
  return max_abs_diff(total, ComplexMatrix::identity(dim_));
}

HermitianOperator apply_at(const Instrument& ins, std::size_t index, const HermitianOperator& t) {
  if (t.dim() != ins.dim()) throw Error(ErrorCode::DimMismatch, "operator and instrument dims differ");
  ComplexMatrix out(ins.dim());
  for (const auto& k : ins[index].kraus) out += k.adjoint() * (t.matrix() * k);
  return HermitianOperator::symmetrized(out);
}

HermitianOperator apply(const Instrument& ins, const Label& outcome, const HermitianOperator& t) {
  return apply_at(ins, ins.index_of(outcome), t);
}

HermitianOperator update_state_at(const Instrument& ins, std::size_t index, const HermitianOperator& rho) {
  if (rho.dim() != ins.dim()) throw Error(ErrorCode::DimMismatch, "state and instrument dims differ");
  ComplexMatrix out(ins.dim());
  for (const auto& k : ins[index].kraus) out += k * (rho.matrix() * k.adjoint());
  return HermitianOperator::symmetrized(out);
}

Povm derived_observable(const Instrument& ins) {
  const auto one = HermitianOperator::identity(ins.dim());
  std::vector<Outcome> out;
  out.reserve(ins.size());
  for (std::size_t i = 0; i < ins.size(); ++i) out.push_back({ins[i].label, apply_at(ins, i, one)});
  return Povm(ins.dim(), std::move(out));
}

Instrument compose(const Instrument& first, const Instrument& second) {
  if (first.dim() != second.dim()) throw Error(ErrorCode::DimMismatch, "composing instruments of unequal dim");
  std::vector<KrausOutcome> out;
  out.reserve(first.size() * second.size());
  for (const auto& a : first.outcomes())
    for (const auto& b : second.outcomes()) {
      KrausOutcome o{Label::sequence({a.label, b.label}), {}};
      for (const auto& kb : b.kraus)
        for (const auto& ka : a.kraus) o.kraus.push_back(kb * ka);
      out.push_back(std::move(o));
    }
  return Instrument(first.dim(), std::move(out));
}

Povm prepend_step(const Instrument& ins, const Povm& tail) {
  std::vector<Outcome> out;
  out.reserve(ins.size() * tail.size());
  for (std::size_t i = 0; i < ins.size(); ++i)
    for (const auto& o : tail.outcomes())
      out.push_back({o.label.prepended(ins[i].label), apply_at(ins, i, o.effect)});
  return Povm(ins.dim(), std::move(out));
}

Povm repeated_observable(const Instrument& ins, int n, const Tolerances& tol) {
  if (n < 1) throw Error(ErrorCode::OutOfRange, "repetition count must be ≥ 1");
  std::size_t count = 1;
  for (int i = 0; i < n; ++i) {
    count *= ins.size();
    if (count > tol.enumeration_cap) {
      // Report the full requirement, saturating on overflow.
      double full = std::pow(static_cast<double>(ins.size()), n);
      throw CapExceededError(full > 1e18 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(full),
                             tol.enumeration_cap);
    }
  }
  // A_1 with one-element sequence labels, then prepend outcomes on the left.
  const auto one = HermitianOperator::identity(ins.dim());
  std::vector<Outcome> level;
  for (std::size_t i = 0; i < ins.size(); ++i)
    level.push_back({Label::sequence({ins[i].label}), apply_at(ins, i, one)});
  Povm current(ins.dim(), std::move(level));
  for (int k = 1; k < n; ++k) current = prepend_step(ins, current);
  return current;
}

Instrument luders_binary(const HermitianOperator& a, const Tolerances& tol) {
  if (!is_effect(a, tol)) throw Error(ErrorCode::NotEffect, "Lüders instrument needs 0 ≤ A ≤ 1");
  const auto complement = HermitianOperator::identity(a.dim()) - a;
  return Instrument(a.dim(), {{Label(0), {sqrt_psd(complement, tol).matrix()}},
                              {Label(1), {sqrt_psd(a, tol).matrix()}}});
}

Instrument ladder(int d) {
  if (d < 2) throw Error(ErrorCode::BadDimension, "ladder instrument needs d ≥ 2");
  const auto n = static_cast<std::size_t>(d);
  ComplexMatrix l0(n), l1(n);
  l0(n - 1, n - 1) = 1.0;
  for (std::size_t k = 0; k + 1 < n; ++k) l1(k + 1, k) = 1.0;
  return Instrument(n, {{Label(0), {l0}}, {Label(1), {l1}}});
}

Instrument preparative(const Povm& a, const std::vector<DensityMatrix>& states, const Tolerances& tol) {
  if (states.size() != a.size())
    throw Error(ErrorCode::LabelMismatch, "need one prepared state per outcome");
  const auto report = validate(a, tol);
  if (!report.ok()) throw Error(ErrorCode::InvalidPovm, report.violations.front().message);

  std::vector<KrausOutcome> out;
  for (std::size_t w = 0; w < a.size(); ++w) {
    if (states[w].dim() != a.dim()) throw Error(ErrorCode::DimMismatch, "prepared state has wrong dim");
    const auto eff = eigh(a[w].effect, tol);
    const auto eta = eigh(states[w].op(), tol);
    KrausOutcome o{a[w].label, {}};
    for (std::size_t i = 0; i < a.dim(); ++i) {
      if (eff.eigenvalues[i] <= tol.psd_tol) continue;
      const auto f = eff.vector(i);
      for (std::size_t j = 0; j < a.dim(); ++j) {
        if (eta.eigenvalues[j] <= tol.psd_tol) continue;
        const auto e = eta.vector(j);
        o.kraus.push_back(ComplexMatrix::outer(e, f) * Complex(std::sqrt(eff.eigenvalues[i] * eta.eigenvalues[j])));
      }
    }
    if (o.kraus.empty()) o.kraus.push_back(ComplexMatrix::zero(a.dim()));
    out.push_back(std::move(o));
  }
  return Instrument(a.dim(), std::move(out));
}

Instrument mixture(const Instrument& first, const Instrument& second, double t, const Tolerances& tol) {
  if (!(t >= 0.0 && t <= 1.0)) throw Error(ErrorCode::OutOfRange, "mixture weight outside [0, 1]");
  if (first.dim() != second.dim()) throw Error(ErrorCode::DimMismatch, "mixing instruments of unequal dim");
  if (first.size() != second.size())
    throw Error(ErrorCode::ObservableMismatch, "instruments have different outcome sets");
  const auto obs_first = derived_observable(first);
  const auto obs_second = derived_observable(second);

  std::vector<KrausOutcome> out;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const std::size_t j = second.index_of(first[i].label);
    if (max_abs_diff(obs_first[i].effect.matrix(), obs_second[j].effect.matrix()) > tol.sum_tol)
      throw Error(ErrorCode::ObservableMismatch, "derived effects differ at " + first[i].label.to_string());
    KrausOutcome o{first[i].label, {}};
    for (const auto& k : first[i].kraus) o.kraus.push_back(k * Complex(std::sqrt(t)));
    for (const auto& k : second[j].kraus) o.kraus.push_back(k * Complex(std::sqrt(1.0 - t)));
    out.push_back(std::move(o));
  }
  return Instrument(first.dim(), std::move(out));
}

bool is_repeatable(const Instrument& ins, const Tolerances& tol) {
  const auto obs = derived_observable(ins);
  for (std::size_t a = 0; a < ins.size(); ++a)
    for (std::size_t b = 0; b < ins.size(); ++b) {
      const auto two = apply_at(ins, a, obs[b].effect);
      const auto expected = a == b ? obs[a].effect.matrix() : ComplexMatrix::zero(ins.dim());
      if (max_abs_diff(two.matrix(), expected) > tol.proj_tol) return false;
    }
  return true;
}

Instrument trivial_instrument(std::size_t dim) {
  return Instrument(dim, {{Label(0), {ComplexMatrix::identity(dim)}}});
}

}  // namespace satrep
