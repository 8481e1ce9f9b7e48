#include "satrep/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>

#include "satrep/asymptotics.hpp"
#include "satrep/error.hpp"
#include "satrep/preorder.hpp"

namespace satrep::cli {

using nlohmann::json;

namespace {

class Stopwatch {
 public:
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

json certificate_json(const PreorderCertificate& c) {
  json j{{"holds", c.holds},
         {"gap", c.gap},
         {"residual", c.residual},
         {"lp_iterations", c.lp_iterations},
         {"canonical_target_outcomes", c.canonical_target_size},
         {"canonical_source_outcomes", c.canonical_source_size}};
  j["kernel"] = c.kernel ? io::to_json(*c.kernel) : json(nullptr);
  return j;
}

CommandResult finish(const char* command, const RunConfig& config, const Tolerances& tol, json result,
                     const Stopwatch& clock) {
  RunConfig echoed = config;
  echoed.tol = tol;
  CommandResult r;
  r.report = {{"version", io::kFormatVersion},
              {"command", command},
              {"config", to_json(echoed)},
              {"result", std::move(result)},
              {"timing_ms", clock.elapsed_ms()}};
  return r;
}

std::vector<Complex> as_vector(const io::StateSpec& s, const char* what) {
  if (!s.vector) throw Error(ErrorCode::InvalidState, std::string(what) + " must be given as a state vector");
  return {s.vector->amplitudes().begin(), s.vector->amplitudes().end()};
}

}  // namespace

json to_json(const RunConfig& c) {
  json j{{"tolerances", io::to_json(c.tol)}, {"n_max", c.n_max},   {"n_steps", c.n_steps},
         {"n_traj", c.n_traj},               {"bins", c.bins},     {"n_list", c.n_list},
         {"threads", c.threads}};
  j["seed"] = c.seed ? json(*c.seed) : json(nullptr);
  return j;
}

CommandResult cmd_saturation(const io::Problem& problem, const RunConfig& config) {
  Stopwatch clock;
  const auto tol = io::effective_tolerances(problem, config.tol);
  const auto ins = problem.instrument(tol);
  const auto report = saturation_step(ins, config.n_max, tol);

  json chain = json::array();
  for (const auto& level : report.chain)
    chain.push_back({{"n", level.n}, {"raw_outcomes", level.raw_outcomes}, {"certificate", certificate_json(level.certificate)}});
  const bool finite = report.verdict == SaturationReport::Verdict::Finite;
  json result{{"verdict", finite ? "Finite" : "ExceededCap"}, {"step", report.step}, {"chain", chain}};
  auto r = finish("saturation", config, tol, std::move(result), clock);
  r.exit_code = finite ? kExitOk : kExitNegative;
  return r;
}

CommandResult cmd_preorder(const io::Problem& a, const io::Problem& b, const RunConfig& config) {
  Stopwatch clock;
  const auto tol = io::effective_tolerances(b, io::effective_tolerances(a, config.tol));
  const auto pa = a.povm(tol);
  const auto pb = b.povm(tol);
  const auto cert = preceq(pa, pb, tol);
  json result{{"relation", "A ≼ B"},
              {"a_outcomes", pa.size()},
              {"b_outcomes", pb.size()},
              {"certificate", certificate_json(cert)}};
  auto r = finish("preorder", config, tol, std::move(result), clock);
  r.exit_code = cert.holds ? kExitOk : kExitNegative;
  return r;
}

CommandResult cmd_simulate(const io::Problem& problem, const RunConfig& config) {
  Stopwatch clock;
  if (!config.seed) throw Error(ErrorCode::ParseError, "simulate requires --seed");
  if (!problem.state) throw Error(ErrorCode::ParseError, "simulate requires a \"state\" in the problem file");
  const auto tol = io::effective_tolerances(problem, config.tol);
  const auto ins = problem.instrument(tol);
  const auto batch = sample_trajectories(ins, problem.state->density, config.n_steps, config.n_traj, *config.seed,
                                         config.threads);
  if (!batch.binary()) throw Error(ErrorCode::NonBinaryLabels, "simulate needs an instrument with outcomes {0, 1}");

  const auto edges = uniform_edges(config.bins);
  const auto hist = frequency_histogram(batch, edges);
  json result{{"n_steps", batch.n_steps},
              {"n_traj", batch.n_traj},
              {"underflow_events", batch.underflow_events},
              {"histogram", {{"edges", hist.edges}, {"masses", hist.masses}}}};
  if (!batch.frequencies.empty()) {
    const double mean = std::accumulate(batch.frequencies.begin(), batch.frequencies.end(), 0.0) /
                        static_cast<double>(batch.frequencies.size());
    result["mean_frequency"] = mean;
    const auto mode = std::max_element(hist.masses.begin(), hist.masses.end()) - hist.masses.begin();
    result["mode_bin"] = {hist.edges[static_cast<std::size_t>(mode)], hist.edges[static_cast<std::size_t>(mode) + 1]};
  } else {
    result["mean_frequency"] = nullptr;
    result["mode_bin"] = nullptr;
  }
  result["spectral_masses"] = nullptr;
  if (const auto effect = problem.luders_effect(); effect && batch.n_traj > 0 && batch.n_steps > 0) {
    try {
      json masses = json::array();
      for (const auto& m : estimate_spectral_masses(batch, *effect, tol))
        masses.push_back({{"eigenvalue", m.eigenvalue}, {"mass", m.mass}});
      result["spectral_masses"] = masses;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AtomsTooClose) throw;
      result["spectral_masses_error"] = e.what();
    }
  }

  std::string csv = "trajectory,frequency\n";
  char line[64];
  for (std::size_t i = 0; i < batch.frequencies.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu,%.17g\n", i, batch.frequencies[i]);
    csv += line;
  }
  auto r = finish("simulate", config, tol, std::move(result), clock);
  r.csv = std::move(csv);
  return r;
}

CommandResult cmd_hellinger(const io::Problem& problem, const RunConfig& config) {
  Stopwatch clock;
  const auto tol = io::effective_tolerances(problem, config.tol);
  const auto ins = problem.instrument(tol);
  const auto effect = problem.luders_effect();

  std::vector<Complex> psi1, psi2;
  if (problem.witness_states.size() == 2) {
    psi1 = as_vector(problem.witness_states[0], "states[0]");
    psi2 = as_vector(problem.witness_states[1], "states[1]");
  } else if (!problem.witness_states.empty()) {
    throw Error(ErrorCode::ParseError, "\"states\" must hold exactly two state vectors");
  } else if (effect) {
    // Extreme eigenvectors of A.
    const auto e = eigh(*effect, tol);
    psi1 = e.vector(0);
    psi2 = e.vector(e.eigenvalues.size() - 1);
  } else {
    throw Error(ErrorCode::ParseError, "hellinger needs \"states\" or a Lüders-type problem");
  }
  const StateVector s1(psi1), s2(psi2);

  // Closed form applies when both states are eigenvectors of the Lüders effect.
  std::optional<std::pair<double, double>> lambdas;
  if (effect) {
    auto eigenvalue_of = [&](const StateVector& s) -> std::optional<double> {
      const double l = expectation(s, *effect);
      const auto image = effect->matrix() * s.amplitudes();
      for (std::size_t i = 0; i < image.size(); ++i)
        if (std::abs(image[i] - l * s.amplitudes()[i]) > 1e-9) return std::nullopt;
      return std::clamp(l, 0.0, 1.0);
    };
    const auto l1 = eigenvalue_of(s1), l2 = eigenvalue_of(s2);
    if (l1 && l2) lambdas = std::make_pair(*l1, *l2);
  }

  std::vector<int> ns = config.n_list;
  if (ns.empty())
    for (int n = 1; n <= config.n_max; ++n) ns.push_back(n);

  json rows = json::array();
  bool increasing = true, below_one = true;
  double previous = -1.0;
  for (int n : ns) {
    const auto an = repeated_observable(ins, n, tol);
    const double h2 = hellinger_sq(outcome_distribution(an, s1), outcome_distribution(an, s2));
    json row{{"n", n}, {"h2_enumerated", h2}};
    row["h2_closed_form"] = lambdas ? json(luders_hellinger_closed_form(lambdas->first, lambdas->second, n)) : json(nullptr);
    rows.push_back(std::move(row));
    if (!(h2 > previous)) increasing = false;
    if (!(h2 < 1.0)) below_one = false;
    previous = h2;
  }

  json result{{"rows", rows}, {"strictly_increasing", increasing}, {"all_below_one", below_one}};
  if (lambdas) result["eigenvalues"] = {lambdas->first, lambdas->second};
  if (effect) {
    const auto pa = spectral_measure_of_effect(*effect, tol);
    result["h2_spectral"] = hellinger_sq(outcome_distribution(pa, s1), outcome_distribution(pa, s2));
  }
  return finish("hellinger", config, tol, std::move(result), clock);
}

}  // namespace satrep::cli
