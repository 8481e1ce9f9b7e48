#pragma once

#include <cstddef>

namespace satrep {

/// Every numeric threshold used by the library, in one place.
///
/// Functions take a `const Tolerances&` defaulted to the stock values so a
/// run can be reproduced from the echoed record alone.
struct Tolerances {
  double herm_tol = 1e-12;     // ‖M − M†‖_max for Hermitian checks
  double psd_tol = 1e-10;      // eigenvalues above −psd_tol count as nonnegative
  double eig_tol = 1e-10;      // eigendecomposition residuals
  double cluster_tol = 1e-8;   // eigenvalues closer than this share a spectral atom
  double sum_tol = 1e-9;       // POVM completeness / instrument normalization
  double zero_tol = 1e-12;     // effects with max-norm below this are dropped
  double prop_tol = 1e-9;      // trace-normalized effects closer than this are merged
  double proj_tol = 1e-9;      // ‖E² − E‖_max for sharpness
  double stoch_tol = 1e-10;    // Markov kernel column sums
  double feas_tol = 1e-7;      // LP optimum at or below this means the preorder holds
  double witness_tol = 1e-6;   // Hellinger gap certifying non-equivalence
  int max_jacobi_sweeps = 100;
  std::size_t enumeration_cap = 4096;  // |Ω|^n before any pruning
};

inline const Tolerances& default_tolerances() {
  static const Tolerances t{};
  return t;
}

}  // namespace satrep
