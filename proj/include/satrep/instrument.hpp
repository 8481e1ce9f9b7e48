#pragma once

#include <vector>

#include "satrep/config.hpp"
#include "satrep/label.hpp"
#include "satrep/linalg.hpp"
#include "satrep/povm.hpp"

namespace satrep {

struct KrausOutcome {
  Label label;
  std::vector<ComplexMatrix> kraus;
};

/// Instrument in Kraus form. The Heisenberg action of outcome ω is
/// I_ω(T) = Σ_k K_k† T K_k, and Σ_ω I_ω(1) = 1.
class Instrument {
 public:
  Instrument() = default;
  /// Checks shapes and label uniqueness only.
  Instrument(std::size_t dim, std::vector<KrausOutcome> outcomes);
  /// Also checks normalization; throws InvalidInstrument.
  static Instrument checked(std::size_t dim, std::vector<KrausOutcome> outcomes,
                            const Tolerances& tol = default_tolerances());

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return outcomes_.size(); }
  const std::vector<KrausOutcome>& outcomes() const noexcept { return outcomes_; }
  const KrausOutcome& operator[](std::size_t i) const { return outcomes_[i]; }
  std::vector<Label> labels() const;
  std::size_t index_of(const Label& l) const;  // throws UnknownOutcome

  /// ‖Σ_ω Σ_k K†K − 1‖_max
  double normalization_residual() const;

 private:
  std::size_t dim_ = 0;
  std::vector<KrausOutcome> outcomes_;
};

/// Σ_k K_k† T K_k over the Kraus list of outcome `index`.
HermitianOperator apply_at(const Instrument& ins, std::size_t index, const HermitianOperator& t);
HermitianOperator apply(const Instrument& ins, const Label& outcome, const HermitianOperator& t);

/// Unnormalized Schrödinger update Σ_k K_k ρ K_k†.
HermitianOperator update_state_at(const Instrument& ins, std::size_t index, const HermitianOperator& rho);

/// ω ↦ I_ω(1)
Povm derived_observable(const Instrument& ins);

/// Sequential composition, `first` applied to the input state first. Outcome
/// (ω, ω′) has Kraus products K^second_{ω′} K^first_{ω}, so its Heisenberg
/// action is first_ω ∘ second_ω′. Zero products are kept.
Instrument compose(const Instrument& first, const Instrument& second);

/// A_n(ω_1..ω_n) = I_{ω_1} ∘ ⋯ ∘ I_{ω_n}(1) over all |Ω|^n sequences,
/// lexicographic in the instrument's outcome order. Not canonicalized.
/// Throws CapExceededError when |Ω|^n > enumeration_cap.
Povm repeated_observable(const Instrument& ins, int n, const Tolerances& tol = default_tolerances());

/// One step of the recursion: A_{n+1}(ω, rest) = I_ω(A_n(rest)). Works on any
/// POVM `tail` (its labels become the sequence tails).
Povm prepend_step(const Instrument& ins, const Povm& tail);

/// Kraus {0: √(1−A), 1: √A}. Throws NotEffect.
Instrument luders_binary(const HermitianOperator& a, const Tolerances& tol = default_tolerances());

/// L_0 = |φ_d⟩⟨φ_d|, L_1 = Σ_{k<d} |φ_{k+1}⟩⟨φ_k|. Throws BadDimension for d < 2.
Instrument ladder(int d);

/// I_ω(T) = tr[η_ω T] A(ω): measure `a`, then prepare `states[i]` on outcome i.
/// With η = Σ_j μ_j |e_j⟩⟨e_j| and A(ω) = Σ_i α_i |f_i⟩⟨f_i| the Kraus list is
/// {√(μ_j α_i) |e_j⟩⟨f_i|}.
Instrument preparative(const Povm& a, const std::vector<DensityMatrix>& states,
                       const Tolerances& tol = default_tolerances());

/// t·I + (1−t)·J. Throws ObservableMismatch if the derived observables differ.
Instrument mixture(const Instrument& first, const Instrument& second, double t,
                   const Tolerances& tol = default_tolerances());

/// I_{ω1} ∘ I_{ω2}(1) = δ_{ω1ω2} I_{ω1}(1) for all pairs.
bool is_repeatable(const Instrument& ins, const Tolerances& tol = default_tolerances());

/// The single-outcome instrument with Kraus {1}.
Instrument trivial_instrument(std::size_t dim);

}  // namespace satrep
