#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "satrep/config.hpp"
#include "satrep/label.hpp"

namespace satrep {

/// Column-stochastic matrix κ(ω|ω′): rows are target labels ω, columns are
/// source labels ω′.
class MarkovKernel {
 public:
  MarkovKernel() = default;
  MarkovKernel(std::vector<Label> targets, std::vector<Label> sources, std::vector<double> entries);

  static MarkovKernel identity(const std::vector<Label>& labels);
  /// Deterministic kernel κ_f(ω|ω′) = δ_{ω, f(ω′)}. Targets are the images of
  /// `sources` in order of first appearance. Throws PartialMap if f returns
  /// nullopt for any source.
  static MarkovKernel relabeling(const std::vector<Label>& sources,
                                 const std::function<std::optional<Label>(const Label&)>& f);

  const std::vector<Label>& targets() const noexcept { return targets_; }
  const std::vector<Label>& sources() const noexcept { return sources_; }
  std::size_t rows() const noexcept { return targets_.size(); }
  std::size_t cols() const noexcept { return sources_.size(); }

  double& operator()(std::size_t target, std::size_t source) { return entries_[target * cols() + source]; }
  double operator()(std::size_t target, std::size_t source) const {
    return entries_[target * cols() + source];
  }

  /// Largest |Σ_ω κ(ω|ω′) − 1| over columns, or +inf if an entry is below −1e-12.
  double stochasticity_residual() const;
  /// Throws NotStochastic.
  void check_stochastic(const Tolerances& tol = default_tolerances()) const;

 private:
  std::vector<Label> targets_;
  std::vector<Label> sources_;
  std::vector<double> entries_;
};

/// (outer ∘ inner)(a|c) = Σ_b outer(a|b) inner(b|c). Requires outer's sources to
/// match inner's targets by position.
MarkovKernel compose(const MarkovKernel& outer, const MarkovKernel& inner);

}  // namespace satrep
