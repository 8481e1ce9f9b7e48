#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "satrep/config.hpp"
#include "satrep/instrument.hpp"
#include "satrep/povm.hpp"

namespace satrep {

/// Outcomes of independent repeated-measurement runs.
///
/// Trajectory i draws from its own std::mt19937_64 seeded by
/// std::seed_seq{seed_lo, seed_hi, i_lo, i_hi} (32-bit halves), and uniforms are
/// the top 53 bits of each draw scaled by 2⁻⁵³. The batch is therefore a pure
/// function of (instrument, state, n_steps, n_traj, seed) regardless of how
/// many threads produced it.
struct TrajectoryBatch {
  std::vector<Label> labels;  // instrument outcome labels; outcomes index into this
  std::size_t n_steps = 0;
  std::size_t n_traj = 0;
  std::uint64_t seed = 0;
  std::vector<std::uint32_t> outcomes;  // n_traj × n_steps, row-major
  /// X_n = (1/n) Σ ω_i per trajectory; filled only for {0, 1}-labeled
  /// instruments with n_steps > 0.
  std::vector<double> frequencies;
  /// Steps where the post-measurement state had trace below 1e-12 and was
  /// renormalized anyway.
  std::size_t underflow_events = 0;

  std::uint32_t outcome(std::size_t traj, std::size_t step) const { return outcomes[traj * n_steps + step]; }
  bool binary() const;
};

TrajectoryBatch sample_trajectories(const Instrument& ins, const DensityMatrix& rho, std::size_t n_steps,
                                    std::size_t n_traj, std::uint64_t seed, unsigned threads = 1);

struct Histogram {
  std::vector<double> edges;   // ascending, bins are [e_i, e_{i+1}) with the last one closed
  std::vector<double> masses;  // sums to 1 when the batch is nonempty
};

/// `bins` equal-width bins on [0, 1].
std::vector<double> uniform_edges(std::size_t bins = 50);

/// Histogram of X_{n_steps}. Throws NonBinaryLabels.
Histogram frequency_histogram(const TrajectoryBatch& batch, std::span<const double> edges);

struct SpectralMass {
  double eigenvalue;
  double mass;
};

/// Assigns each trajectory's final frequency to the nearest eigenvalue atom of
/// A. Throws AtomsTooClose when two atoms are within 2/√n_steps.
std::vector<SpectralMass> estimate_spectral_masses(const TrajectoryBatch& batch, const HermitianOperator& a,
                                                   const Tolerances& tol = default_tolerances());

/// H²(p, q) = 1 − Σ √(p q) over the union of labels, clamped to [0, 1].
/// Throws NotNormalized if either sums away from 1 by more than 1e-9.
double hellinger_sq(const Distribution& p, const Distribution& q);

/// 1 − [√(λ₁λ₂) + √((1−λ₁)(1−λ₂))]ⁿ: H² between the n-step Lüders outcome laws
/// of eigenvectors with eigenvalues λ₁ and λ₂. Throws OutOfRange.
double luders_hellinger_closed_form(double lambda1, double lambda2, int n);

}  // namespace satrep
