// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "satrep/asymptotics.hpp"
#include "satrep/io.hpp"
#include "satrep/preorder.hpp"

using namespace satrep;

namespace {

struct Check {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const HermitianOperator kA = HermitianOperator::diagonal({0.3, 0.7});

Povm basis_measurement(std::size_t d) {
  std::vector<satrep::Outcome> outs;
  for (std::size_t k = 0; k < d; ++k) {
    ComplexMatrix p(d);
    p(k, k) = 1.0;
    outs.push_back({Label(static_cast<int>(k)), HermitianOperator::symmetrized(p)});
  }
  return Povm(d, std::move(outs));
}

void ladder_saturation(Check& o) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int d = 3; d <= 5; ++d) {
    const auto r = saturation_step(ladder(d), 8);
    const bool finite = r.verdict == SaturationReport::Verdict::Finite && r.step == d - 1;
    o.require(finite, "ladder d=" + std::to_string(d) + " saturation");
    const auto a = repeated_observable(ladder(d), d - 1);
    o.require(is_sharp(a), "A_{d-1} sharp, d=" + std::to_string(d));
    const auto eq = equivalent(a, basis_measurement(static_cast<std::size_t>(d)));
    o.require(eq.forward.holds && eq.backward.holds, "A_{d-1} equivalent to basis measurement, d=" + std::to_string(d));
    o.detail << " d=" << d << ":" << (finite ? "Finite(" + std::to_string(r.step) + ")" : "?");
  }
  const double s = seconds_since(t0);
  o.require(s < 10.0, "runtime < 10 s");
  o.detail << " time=" << s << "s";
}

void sat_one_families(Check& o) {
  int passed = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::mt19937_64 g(seed);
    const std::size_t d = 2 + seed % 2;
    const auto u = oracle::random_unitary(g, d);
    const auto proj = HermitianOperator::symmetrized(oracle::projector(oracle::column(u, 0)));
    const auto repeatable = luders_binary(proj);

    const auto qubit_povm = oracle::random_povm(g, 2, 3);
    std::vector<DensityMatrix> states;
    for (int k = 0; k < 3; ++k) states.push_back(DensityMatrix::pure(StateVector(oracle::random_unit_vector(g, 2))));
    const auto prep = preparative(qubit_povm, states);

    std::vector<DensityMatrix> sharp_states;
    for (int k = 0; k < 2; ++k) sharp_states.push_back(DensityMatrix::pure(StateVector(oracle::random_unit_vector(g, d))));
    const auto prep_same = preparative(binary_povm(proj), sharp_states);
    const auto mix = mixture(repeatable, prep_same, 0.5);

    bool ok = true;
    for (const auto* ins : {&repeatable, &prep, &mix}) {
      const auto r = saturation_step(*ins, 4);
      ok = ok && r.verdict == SaturationReport::Verdict::Finite && r.step == 1;
    }
    o.require(ok, "seed " + std::to_string(seed));
    passed += ok;
  }
  o.detail << " " << passed << "/20 seeds give Finite(1) for repeatable, preparative and 0.5 mixture";
}

void luders_insaturability(Check& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = saturation_step(luders_binary(kA), 6);
  o.require(r.verdict == SaturationReport::Verdict::ExceededCap && r.step == 6, "ExceededCap(6)");
  o.require(r.chain.size() == 6, "six levels tested");
  double min_gap = 1.0;
  for (const auto& level : r.chain) {
    o.require(!level.certificate.holds, "level " + std::to_string(level.n) + " strict");
    min_gap = std::min(min_gap, level.certificate.gap);
  }
  o.require(min_gap > 1e-3, "gap > 1e-3");
  const double s = seconds_since(t0);
  o.require(s < 60.0, "runtime < 60 s");
  o.detail << " gaps=";
  for (const auto& level : r.chain) o.detail << level.certificate.gap << (level.n < 6 ? "," : "");
  o.detail << " min=" << min_gap << " time=" << s << "s";
}

void hellinger_strictness(Check& o) {
  const auto ins = luders_binary(kA);
  const auto e1 = StateVector::basis(2, 0), e2 = StateVector::basis(2, 1);
  double previous = -1.0, worst = 0.0;
  for (int n = 1; n <= 8; ++n) {
    const auto an = repeated_observable(ins, n);
    const double h = hellinger_sq(outcome_distribution(an, e1), outcome_distribution(an, e2));
    const double expected = 1.0 - std::pow(2.0 * std::sqrt(0.21), n);
    worst = std::max(worst, std::abs(h - expected));
    o.require(h > previous, "strict increase at n=" + std::to_string(n));
    o.require(h < 1.0, "below one at n=" + std::to_string(n));
    if (n == 2) {
      o.require(std::abs(h - 0.16) <= 1e-12, "n=2 equals 0.16");
      o.detail << " H2(n=2)=" << h;
    }
    previous = h;
  }
  o.require(worst <= 1e-9, "closed form within 1e-9");
  o.detail << " max|enumerated-closed|=" << worst;
}

void noise_correction(Check& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto ins = luders_binary(kA);
  const std::uint64_t seed = 20260101;
  auto masses = [&](const StateVector& psi) {
    const auto batch = sample_trajectories(ins, DensityMatrix::pure(psi), 200, 10000, seed);
    return estimate_spectral_masses(batch, kA);
  };
  auto mass_at = [](const std::vector<SpectralMass>& ms, double lambda) {
    for (const auto& m : ms)
      if (std::abs(m.eigenvalue - lambda) < 1e-9) return m.mass;
    return -1.0;
  };
  const auto sup = masses(StateVector::normalized({1.0, 1.0}));
  o.require(std::abs(mass_at(sup, 0.3) - 0.5) <= 0.02, "superposition mass at 0.3");
  o.require(std::abs(mass_at(sup, 0.7) - 0.5) <= 0.02, "superposition mass at 0.7");
  const auto low = masses(StateVector::basis(2, 0));
  const auto high = masses(StateVector::basis(2, 1));
  o.require(std::abs(mass_at(low, 0.3) - 1.0) <= 0.01, "eigenstate e1 mass at 0.3");
  o.require(std::abs(mass_at(high, 0.7) - 1.0) <= 0.01, "eigenstate e2 mass at 0.7");
  const double s = seconds_since(t0);
  o.require(s < 30.0, "runtime < 30 s");
  o.detail << " superposition {0.3: " << mass_at(sup, 0.3) << ", 0.7: " << mass_at(sup, 0.7) << "}"
           << " e1->0.3: " << mass_at(low, 0.3) << " e2->0.7: " << mass_at(high, 0.7) << " time=" << s << "s";
}

void preorder_soundness(Check& o) {
  std::mt19937_64 g(6);
  const Tolerances tol;
  int sound = 0, reflexive = 0, transitive = 0;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t d = 2 + i % 2;
    const auto b = oracle::random_povm(g, d, 1 + i % 4);
    std::vector<Label> targets;
    for (std::size_t t = 0; t < 1 + (i / 4) % 4; ++t) targets.emplace_back("a" + std::to_string(t));
    const auto a = apply_kernel(oracle::random_kernel(g, targets, b.labels()), b);

    const auto ab = preceq(a, b);
    const double residual = ab.holds ? oracle::post_processing_residual(a, *ab.kernel, b) : 1.0;
    worst = std::max(worst, residual);
    sound += ab.holds && residual <= 1e-7;

    const auto aa = preceq(a, a), bb = preceq(b, b);
    reflexive += aa.holds && bb.holds;

    // A' := K'∘A sits below A, hence below B through the composed kernel.
    const auto c = apply_kernel(oracle::random_kernel(g, {"c0", "c1"}, a.labels()), a);
    const auto ca = preceq(c, a);
    bool composed = false;
    if (ca.holds && ab.holds) {
      const auto& k1 = *ca.kernel;
      const auto& k2 = *ab.kernel;
      std::vector<double> product(k1.rows() * k2.cols(), 0.0);
      for (std::size_t x = 0; x < k1.rows(); ++x)
        for (std::size_t z = 0; z < k2.cols(); ++z)
          for (std::size_t y = 0; y < k1.cols(); ++y) product[x * k2.cols() + z] += k1(x, y) * k2(y, z);
      const MarkovKernel k(c.labels(), b.labels(), product);
      composed = oracle::post_processing_residual(c, k, b) <= 2 * tol.feas_tol && preceq(c, b).holds;
    }
    transitive += composed;
  }
  o.require(sound == 200, "soundness");
  o.require(reflexive == 200, "reflexivity");
  o.require(transitive == 200, "transitivity");
  o.detail << " sound=" << sound << "/200 reflexive=" << reflexive << "/200 transitive=" << transitive
           << "/200 max residual=" << worst;
}

void structural_invariants(Check& o) {
  std::mt19937_64 g(7);
  const auto qubit_povm = oracle::random_povm(g, 2, 3);
  const auto sharp = HermitianOperator::diagonal({0.0, 1.0});
  std::vector<std::pair<std::string, Instrument>> suite{
      {"luders", luders_binary(kA)},
      {"ladder3", ladder(3)},
      {"ladder4", ladder(4)},
      {"preparative", preparative(qubit_povm, {DensityMatrix::maximally_mixed(2), DensityMatrix::pure(StateVector::basis(2, 0)),
                                              DensityMatrix::pure(StateVector(oracle::random_unit_vector(g, 2)))})},
      {"mixture", mixture(luders_binary(sharp),
                          preparative(binary_povm(sharp), {DensityMatrix::maximally_mixed(2),
                                                           DensityMatrix::pure(StateVector::basis(2, 0))}),
                          0.5)},
      {"compose", compose(luders_binary(kA), ladder(2))},
  };
  double worst_marginal = 0.0, worst_norm = 0.0;
  for (const auto& [name, ins] : suite) {
    worst_norm = std::max(worst_norm, ins.normalization_residual());
    for (int n = 1; n <= 4; ++n) {
      const auto an = repeated_observable(ins, n);
      const auto next = repeated_observable(ins, n + 1);
      for (const auto& out : an.outcomes()) {
        ComplexMatrix sum(ins.dim());
        for (const auto& p : next.outcomes())
          if (p.label.without_last() == out.label) sum += p.effect.matrix();
        worst_marginal = std::max(worst_marginal, max_abs_diff(sum, out.effect.matrix()));
      }
    }
  }
  o.require(worst_marginal <= 1e-9, "marginal consistency");
  o.require(worst_norm <= 1e-9, "normalization");

  int checked = 0, equivalent_count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(SATREP_FIXTURES)) {
    if (entry.path().extension() != ".json") continue;
    const auto problem = io::load_problem(entry.path().string());
    std::vector<Povm> povms{problem.povm()};
    if (problem.yields_instrument())
      for (int n = 2; n <= 3; ++n) povms.push_back(repeated_observable(problem.instrument(), n));
    for (const auto& p : povms) {
      if (p.size() > 8) continue;
      ++checked;
      equivalent_count += equivalent(p, canonicalize(p)).equivalent;
    }
  }
  o.require(checked > 0 && equivalent_count == checked, "canonicalize equivalent on fixtures");
  o.detail << " marginal=" << worst_marginal << " normalization=" << worst_norm << " canonical-equivalent "
           << equivalent_count << "/" << checked << " fixture POVMs";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria{
      {"1 ladder saturation", ladder_saturation},
      {"2 sat=1 families", sat_one_families},
      {"3 Lüders insaturability", luders_insaturability},
      {"4 Hellinger strictness", hellinger_strictness},
      {"5 noise correction", noise_correction},
      {"6 preorder soundness", preorder_soundness},
      {"7 structural invariants", structural_invariants},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Check o;
    try {
      check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += !o.pass;
    std::printf("%s criterion %s:%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
