#include "satrep/preorder.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "satrep/asymptotics.hpp"
#include "satrep/error.hpp"

namespace satrep {

namespace {

// Real and imaginary parts of the upper triangle, the coordinates of a
// Hermitian matrix that the LP constrains.
std::vector<double> hermitian_coordinates(const HermitianOperator& h) {
  const std::size_t d = h.dim();
  std::vector<double> out;
  out.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      out.push_back(h(i, j).real());
      if (i != j) out.push_back(h(i, j).imag());
    }
  return out;
}

double linf(const ComplexMatrix& m) {
  double out = 0.0;
  for (const auto& z : m.data()) out = std::max({out, std::abs(z.real()), std::abs(z.imag())});
  return out;
}

// Kernel between canonical forms → kernel between the original POVMs.
// Original target a is weight_a · canonA[x(a)], original source b contributes
// to canonB[g(b)], so κ(a|b) = weight_a · κ_c(x(a)|g(b)).
MarkovKernel lift_kernel(const MarkovKernel& canonical, const Povm& a, const CanonicalForm& ca, const Povm& b,
                         const CanonicalForm& cb) {
  MarkovKernel out(a.labels(), b.labels(), std::vector<double>(a.size() * b.size(), 0.0));
  const auto first_kept = std::find_if(ca.group.begin(), ca.group.end(), [](const auto& g) { return g.has_value(); });
  const std::size_t fallback_row = static_cast<std::size_t>(first_kept - ca.group.begin());
  for (std::size_t j = 0; j < b.size(); ++j) {
    if (!cb.group[j]) {
      // Zero source effect: any column works.
      out(fallback_row, j) = 1.0;
      continue;
    }
    for (std::size_t i = 0; i < a.size(); ++i)
      if (ca.group[i]) out(i, j) = ca.weight[i] * canonical(*ca.group[i], *cb.group[j]);
  }
  return out;
}

// Column sums of an LP kernel are 1 up to roundoff; clip and renormalize.
void clean_kernel(MarkovKernel& k) {
  for (std::size_t c = 0; c < k.cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < k.rows(); ++r) {
      k(r, c) = std::max(k(r, c), 0.0);
      s += k(r, c);
    }
    if (s > 0.0)
      for (std::size_t r = 0; r < k.rows(); ++r) k(r, c) /= s;
  }
}

// A's canonical effects each equal (within feas_tol) a distinct canonical
// effect of B: the kernel is a partial permutation, no LP needed.
std::optional<MarkovKernel> matching_kernel(const Povm& a, const Povm& b, double tol) {
  if (a.size() != b.size()) return std::nullopt;
  MarkovKernel k(a.labels(), b.labels(), std::vector<double>(a.size() * b.size(), 0.0));
  std::vector<bool> used(b.size(), false);
  for (std::size_t i = 0; i < a.size(); ++i) {
    bool found = false;
    for (std::size_t j = 0; j < b.size() && !found; ++j) {
      if (used[j] || linf(a[i].effect.matrix() - b[j].effect.matrix()) > tol) continue;
      used[j] = true;
      k(i, j) = 1.0;
      found = true;
    }
    if (!found) return std::nullopt;
  }
  return k;
}

}  // namespace

double kernel_residual(const Povm& a, const MarkovKernel& k, const Povm& b) {
  if (k.rows() != a.size() || k.cols() != b.size())
    throw Error(ErrorCode::LabelMismatch, "kernel shape does not match the POVMs");
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ComplexMatrix diff = a[i].effect.matrix();
    for (std::size_t j = 0; j < b.size(); ++j)
      if (k(i, j) != 0.0) diff -= b[j].effect.matrix() * Complex(k(i, j));
    worst = std::max(worst, linf(diff));
  }
  return worst;
}

lp::Problem preorder_lp(const Povm& a, const Povm& b) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  const std::size_t t_index = na * nb;

  lp::Problem problem;
  problem.num_vars = na * nb + 1;
  problem.objective.assign(problem.num_vars, 0.0);
  problem.objective[t_index] = 1.0;

  for (std::size_t j = 0; j < nb; ++j) {
    lp::Constraint row{std::vector<double>(problem.num_vars, 0.0), lp::Sense::Equal, 1.0};
    for (std::size_t i = 0; i < na; ++i) row.coefficients[i * nb + j] = 1.0;
    problem.constraints.push_back(std::move(row));
  }

  std::vector<std::vector<double>> source_coords;
  for (const auto& o : b.outcomes()) source_coords.push_back(hermitian_coordinates(o.effect));

  for (std::size_t i = 0; i < na; ++i) {
    const auto target = hermitian_coordinates(a[i].effect);
    for (std::size_t c = 0; c < target.size(); ++c) {
      bool trivial = std::abs(target[c]) <= 1e-15;
      for (std::size_t j = 0; j < nb && trivial; ++j) trivial = std::abs(source_coords[j][c]) <= 1e-15;
      if (trivial) continue;
      // Σ_b κ(a|b) B_b[c] − t ≤ A_a[c]  and  −Σ_b κ(a|b) B_b[c] − t ≤ −A_a[c]
      lp::Constraint upper{std::vector<double>(problem.num_vars, 0.0), lp::Sense::LessEq, target[c]};
      lp::Constraint lower{std::vector<double>(problem.num_vars, 0.0), lp::Sense::LessEq, -target[c]};
      for (std::size_t j = 0; j < nb; ++j) {
        upper.coefficients[i * nb + j] = source_coords[j][c];
        lower.coefficients[i * nb + j] = -source_coords[j][c];
      }
      upper.coefficients[t_index] = -1.0;
      lower.coefficients[t_index] = -1.0;
      problem.constraints.push_back(std::move(upper));
      problem.constraints.push_back(std::move(lower));
    }
  }
  return problem;
}

PreorderCertificate preceq(const Povm& a, const Povm& b, const Tolerances& tol) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimMismatch, "comparing POVMs of unequal dimension");
  if (auto direct = matching_kernel(a, b, tol.feas_tol)) {
    PreorderCertificate cert;
    cert.residual = kernel_residual(a, *direct, b);
    cert.gap = cert.residual;
    cert.holds = true;
    cert.kernel = std::move(direct);
    cert.canonical_target_size = canonical_form(a, tol).povm.size();
    cert.canonical_source_size = canonical_form(b, tol).povm.size();
    return cert;
  }
  const auto ca = canonical_form(a, tol);
  const auto cb = canonical_form(b, tol);

  PreorderCertificate cert;
  cert.canonical_target_size = ca.povm.size();
  cert.canonical_source_size = cb.povm.size();

  std::optional<MarkovKernel> canonical_kernel = matching_kernel(ca.povm, cb.povm, tol.feas_tol);
  if (!canonical_kernel) {
    const auto problem = preorder_lp(ca.povm, cb.povm);
    const auto sol = lp::solve(problem);
    cert.lp_iterations = sol.iterations;
    if (sol.status != lp::Status::Optimal)
      throw Error(ErrorCode::LPNumericalFailure, "preorder LP did not reach an optimum");
    cert.gap = std::max(sol.objective, 0.0);
    if (cert.gap > tol.feas_tol) return cert;
    MarkovKernel k(ca.povm.labels(), cb.povm.labels(),
                   std::vector<double>(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(problem.num_vars - 1)));
    clean_kernel(k);
    canonical_kernel = std::move(k);
  }

  auto kernel = lift_kernel(*canonical_kernel, a, ca, b, cb);
  cert.residual = kernel_residual(a, kernel, b);
  cert.gap = std::min(cert.gap, cert.residual);
  cert.holds = cert.residual <= tol.feas_tol;
  if (cert.holds) cert.kernel = std::move(kernel);
  return cert;
}

EquivalenceResult equivalent(const Povm& a, const Povm& b, const Tolerances& tol) {
  EquivalenceResult r;
  r.forward = preceq(a, b, tol);
  r.backward = preceq(b, a, tol);
  r.equivalent = r.forward.holds && r.backward.holds;
  return r;
}

std::optional<HellingerWitness> hellinger_witness(const Povm& a, const Povm& b, const StateVector& psi1,
                                                  const StateVector& psi2, const Tolerances& tol) {
  HellingerWitness w;
  w.h2_a = hellinger_sq(outcome_distribution(a, psi1), outcome_distribution(a, psi2));
  w.h2_b = hellinger_sq(outcome_distribution(b, psi1), outcome_distribution(b, psi2));
  w.gap = std::abs(w.h2_a - w.h2_b);
  if (w.gap > tol.witness_tol) return w;
  return std::nullopt;
}

SaturationReport saturation_step(const Instrument& ins, int n_max, const Tolerances& tol) {
  if (n_max < 1) throw Error(ErrorCode::OutOfRange, "n_max must be ≥ 1");
  SaturationReport report;
  Povm current = repeated_observable(ins, 1, tol);
  std::size_t raw = ins.size();
  for (int n = 1; n <= n_max; ++n) {
    raw *= ins.size();
    if (raw > tol.enumeration_cap) throw CapExceededError(raw, tol.enumeration_cap);
    Povm next = prepend_step(ins, current);
    SaturationLevel level{n, preceq(next, current, tol), raw};
    const bool holds = level.certificate.holds;
    report.chain.push_back(std::move(level));
    if (holds) {
      report.verdict = SaturationReport::Verdict::Finite;
      report.step = n;
      return report;
    }
    current = std::move(next);
  }
  report.verdict = SaturationReport::Verdict::ExceededCap;
  report.step = n_max;
  return report;
}

}  // namespace satrep
