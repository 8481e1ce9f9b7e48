#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "satrep/config.hpp"
#include "satrep/label.hpp"
#include "satrep/linalg.hpp"
#include "satrep/markov_kernel.hpp"

namespace satrep {

struct Outcome {
  Label label;
  HermitianOperator effect;
};

/// Finite-outcome observable. Construction checks only shapes and label
/// uniqueness; use `validate` or `Povm::checked` for the operator conditions.
class Povm {
 public:
  Povm() = default;
  Povm(std::size_t dim, std::vector<Outcome> outcomes);
  /// Validates and throws InvalidPovm with the first violation.
  static Povm checked(std::size_t dim, std::vector<Outcome> outcomes,
                      const Tolerances& tol = default_tolerances());

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return outcomes_.size(); }
  const std::vector<Outcome>& outcomes() const noexcept { return outcomes_; }
  const Outcome& operator[](std::size_t i) const { return outcomes_[i]; }
  std::vector<Label> labels() const;
  /// Effect for `l`; throws UnknownOutcome.
  const HermitianOperator& effect(const Label& l) const;

 private:
  std::size_t dim_ = 0;
  std::vector<Outcome> outcomes_;
};

class StateVector {
 public:
  /// Throws InvalidState unless ‖ψ‖ = 1 within 1e-10.
  explicit StateVector(std::vector<Complex> amplitudes);
  /// Scales to unit norm; throws InvalidState on a zero vector.
  static StateVector normalized(std::vector<Complex> amplitudes);
  static StateVector basis(std::size_t dim, std::size_t k);

  std::size_t dim() const noexcept { return amps_.size(); }
  std::span<const Complex> amplitudes() const noexcept { return amps_; }

 private:
  std::vector<Complex> amps_;
};

class DensityMatrix {
 public:
  /// Throws InvalidState unless PSD with unit trace (1e-10).
  explicit DensityMatrix(HermitianOperator rho, const Tolerances& tol = default_tolerances());
  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const noexcept { return rho_.dim(); }
  const HermitianOperator& op() const noexcept { return rho_; }

 private:
  DensityMatrix() = default;
  HermitianOperator rho_;
};

/// tr[ρ T], real part.
double expectation(const DensityMatrix& rho, const HermitianOperator& t);
/// ⟨ψ|T|ψ⟩, real part.
double expectation(const StateVector& psi, const HermitianOperator& t);

struct Violation {
  enum class Kind { DimMismatch, NotPsd, Completeness, Empty };
  Kind kind;
  std::optional<Label> label;  // the failing outcome, when there is one
  double magnitude;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate(const Povm& p, const Tolerances& tol = default_tolerances());

using LabelMap = std::function<std::optional<Label>(const Label&)>;

/// Output effect at a is Σ_{f(ω)=a} P(ω). Throws PartialMap.
Povm relabel(const Povm& p, const LabelMap& f);

/// ω ↦ Σ_{ω′} K(ω|ω′) B(ω′). Throws LabelMismatch / NotStochastic.
Povm apply_kernel(const MarkovKernel& k, const Povm& b, const Tolerances& tol = default_tolerances());

/// Canonical representative of the post-processing equivalence class:
/// zero effects dropped, positively proportional effects summed under the
/// first label of each group.
Povm canonicalize(const Povm& p, const Tolerances& tol = default_tolerances());

/// `canonicalize` plus the bookkeeping to map back: original outcome i is
/// weight[i] · povm[group[i]] (group is empty for dropped zero effects).
struct CanonicalForm {
  Povm povm;
  std::vector<std::optional<std::size_t>> group;
  std::vector<double> weight;
};
CanonicalForm canonical_form(const Povm& p, const Tolerances& tol = default_tolerances());

/// Projection-valued measure of an effect, one outcome per eigenvalue cluster,
/// labeled by the cluster mean. Throws NotEffect.
Povm spectral_measure_of_effect(const HermitianOperator& a, const Tolerances& tol = default_tolerances());

/// {0: 1 − A, 1: A}
Povm binary_povm(const HermitianOperator& a, const Tolerances& tol = default_tolerances());

using Distribution = std::vector<std::pair<Label, double>>;

/// ⟨ψ|P(ω)|ψ⟩ per outcome, clamped to [0, 1]. Throws DimMismatch.
Distribution outcome_distribution(const Povm& p, const StateVector& psi);
Distribution outcome_distribution(const Povm& p, const DensityMatrix& rho);

bool is_sharp(const Povm& p, const Tolerances& tol = default_tolerances());

}  // namespace satrep
