#pragma once

#include <optional>
#include <vector>

#include "satrep/config.hpp"
#include "satrep/instrument.hpp"
#include "satrep/markov_kernel.hpp"
#include "satrep/povm.hpp"
#include "satrep/simplex.hpp"

namespace satrep {

/// Outcome of deciding A ≼ B.
///
/// When `holds`, `kernel` maps B's outcomes onto A's (original labels, not the
/// canonical ones used by the LP) and `residual` is
/// max_ω ‖A(ω) − Σ κ(ω|ω′)B(ω′)‖ measured as the largest real or imaginary
/// part of any entry. When it fails, `gap` is the optimal value of that same
/// residual over all Markov kernels.
struct PreorderCertificate {
  bool holds = false;
  std::optional<MarkovKernel> kernel;
  double residual = 0.0;
  double gap = 0.0;
  std::size_t lp_iterations = 0;
  std::size_t canonical_target_size = 0;
  std::size_t canonical_source_size = 0;
};

/// Largest real or imaginary part of any entry of A(ω) − Σ κ(ω|ω′)B(ω′).
double kernel_residual(const Povm& a, const MarkovKernel& k, const Povm& b);

/// Decides A ≼ B by minimizing the L∞ residual of A = κ∘B over Markov kernels.
/// Both POVMs are canonicalized first. Throws DimMismatch, LPNumericalFailure.
PreorderCertificate preceq(const Povm& a, const Povm& b, const Tolerances& tol = default_tolerances());

struct EquivalenceResult {
  bool equivalent = false;
  PreorderCertificate forward;   // A ≼ B
  PreorderCertificate backward;  // B ≼ A
};

EquivalenceResult equivalent(const Povm& a, const Povm& b, const Tolerances& tol = default_tolerances());

struct HellingerWitness {
  double h2_a = 0.0;  // H²(Π^A_ψ1, Π^A_ψ2)
  double h2_b = 0.0;
  double gap = 0.0;
};

/// Returns a witness when the Hellinger distances of the two states' outcome
/// laws differ by more than witness_tol under A and B. This certifies A ≄ B;
/// absence of a witness says nothing.
std::optional<HellingerWitness> hellinger_witness(const Povm& a, const Povm& b, const StateVector& psi1,
                                                  const StateVector& psi2,
                                                  const Tolerances& tol = default_tolerances());

struct SaturationLevel {
  int n = 0;  // tests A_{n+1} ≼ A_n
  PreorderCertificate certificate;
  std::size_t raw_outcomes = 0;  // |Ω|^(n+1)
};

struct SaturationReport {
  enum class Verdict { Finite, ExceededCap };
  Verdict verdict = Verdict::ExceededCap;
  int step = 0;  // sat(I) when Finite, n_max otherwise
  std::vector<SaturationLevel> chain;
};

/// Smallest n ≤ n_max with A_{n+1} ≼ A_n (the converse always holds), else
/// ExceededCap(n_max). Throws CapExceededError if |Ω|^(n+1) outgrows the
/// enumeration cap before a verdict.
SaturationReport saturation_step(const Instrument& ins, int n_max, const Tolerances& tol = default_tolerances());

/// The LP used by `preceq`, exposed for inspection. Variables are κ(a|b) at
/// index a·|B| + b followed by the residual bound t.
lp::Problem preorder_lp(const Povm& a, const Povm& b);

}  // namespace satrep
