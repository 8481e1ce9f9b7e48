#include "satrep/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "satrep/error.hpp"

namespace satrep {

bool TrajectoryBatch::binary() const {
  return labels.size() == 2 && labels[0] == Label(0) && labels[1] == Label(1);
}

namespace {

std::mt19937_64 trajectory_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

struct TrajectoryContext {
  const Instrument& ins;
  const DensityMatrix& rho0;
  std::vector<HermitianOperator> effects;
  std::size_t n_steps;
  std::uint64_t seed;
};

std::size_t run_trajectory(const TrajectoryContext& ctx, std::size_t index, std::uint32_t* row) {
  auto engine = trajectory_engine(ctx.seed, index);
  HermitianOperator rho = ctx.rho0.op();
  const auto& ins = ctx.ins;
  std::vector<double> probs(ins.size());
  std::size_t underflows = 0;

  for (std::size_t step = 0; step < ctx.n_steps; ++step) {
    double total = 0.0;
    for (std::size_t w = 0; w < ins.size(); ++w) {
      const auto& m = ctx.effects[w].matrix();
      const auto& r = rho.matrix();
      double p = 0.0;
      for (std::size_t i = 0; i < r.dim(); ++i)
        for (std::size_t j = 0; j < r.dim(); ++j) p += (r(i, j) * m(j, i)).real();
      probs[w] = std::max(p, 0.0);
      total += probs[w];
    }
    const double u = uniform01(engine) * total;
    std::size_t pick = ins.size();
    double acc = 0.0;
    for (std::size_t w = 0; w < ins.size(); ++w) {
      if (probs[w] <= 0.0) continue;
      acc += probs[w];
      pick = w;
      if (u < acc) break;
    }
    row[step] = static_cast<std::uint32_t>(pick);

    auto next = update_state_at(ins, pick, rho);
    const double tr = next.real_trace();
    if (tr < 1e-12) ++underflows;
    if (tr > 0.0) rho = (1.0 / tr) * next;
  }
  return underflows;
}

}  // namespace

TrajectoryBatch sample_trajectories(const Instrument& ins, const DensityMatrix& rho, std::size_t n_steps,
                                    std::size_t n_traj, std::uint64_t seed, unsigned threads) {
  if (rho.dim() != ins.dim()) throw Error(ErrorCode::DimMismatch, "state and instrument dims differ");
  TrajectoryBatch batch;
  batch.labels = ins.labels();
  batch.n_steps = n_steps;
  batch.n_traj = n_traj;
  batch.seed = seed;
  batch.outcomes.assign(n_steps * n_traj, 0);

  TrajectoryContext ctx{ins, rho, {}, n_steps, seed};
  const auto obs = derived_observable(ins);
  for (const auto& o : obs.outcomes()) ctx.effects.push_back(o.effect);

  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n_traj, 1))));
  std::vector<std::size_t> underflows(threads, 0);
  auto worker = [&](unsigned w) {
    for (std::size_t i = w; i < n_traj; i += threads)
      underflows[w] += run_trajectory(ctx, i, batch.outcomes.data() + i * n_steps);
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  }
  for (auto u : underflows) batch.underflow_events += u;

  if (batch.binary() && n_steps > 0) {
    batch.frequencies.resize(n_traj);
    for (std::size_t i = 0; i < n_traj; ++i) {
      std::size_t ones = 0;
      for (std::size_t s = 0; s < n_steps; ++s) ones += batch.outcome(i, s);
      batch.frequencies[i] = static_cast<double>(ones) / static_cast<double>(n_steps);
    }
  }
  return batch;
}

std::vector<double> uniform_edges(std::size_t bins) {
  if (bins == 0) throw Error(ErrorCode::OutOfRange, "histogram needs at least one bin");
  std::vector<double> edges(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i) edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  return edges;
}

Histogram frequency_histogram(const TrajectoryBatch& batch, std::span<const double> edges) {
  if (!batch.binary()) throw Error(ErrorCode::NonBinaryLabels, "frequencies need outcome labels {0, 1}");
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()))
    throw Error(ErrorCode::OutOfRange, "histogram edges must be ascending with at least two entries");
  Histogram h{{edges.begin(), edges.end()}, std::vector<double>(edges.size() - 1, 0.0)};
  if (batch.frequencies.empty()) return h;
  const double w = 1.0 / static_cast<double>(batch.frequencies.size());
  for (double x : batch.frequencies) {
    if (x < edges.front() || x > edges.back()) continue;
    auto it = std::upper_bound(edges.begin(), edges.end(), x);
    std::size_t bin = static_cast<std::size_t>(it - edges.begin());
    bin = bin == 0 ? 0 : bin - 1;
    if (bin >= h.masses.size()) bin = h.masses.size() - 1;
    h.masses[bin] += w;
  }
  return h;
}

std::vector<SpectralMass> estimate_spectral_masses(const TrajectoryBatch& batch, const HermitianOperator& a,
                                                   const Tolerances& tol) {
  if (!batch.binary()) throw Error(ErrorCode::NonBinaryLabels, "frequencies need outcome labels {0, 1}");
  const auto pvm = spectral_measure_of_effect(a, tol);
  std::vector<SpectralMass> out;
  for (const auto& o : pvm.outcomes()) out.push_back({o.label.as_real(), 0.0});
  if (out.size() > 1 && batch.n_steps > 0) {
    const double min_sep = 2.0 / std::sqrt(static_cast<double>(batch.n_steps));
    for (std::size_t i = 1; i < out.size(); ++i)
      if (out[i].eigenvalue - out[i - 1].eigenvalue <= min_sep)
        throw Error(ErrorCode::AtomsTooClose, "eigenvalues " + std::to_string(out[i - 1].eigenvalue) + " and " +
                                                  std::to_string(out[i].eigenvalue) + " closer than 2/√n");
  }
  if (batch.frequencies.empty()) return out;
  const double w = 1.0 / static_cast<double>(batch.frequencies.size());
  for (double x : batch.frequencies) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < out.size(); ++i)
      if (std::abs(x - out[i].eigenvalue) < std::abs(x - out[best].eigenvalue)) best = i;
    out[best].mass += w;
  }
  return out;
}

double hellinger_sq(const Distribution& p, const Distribution& q) {
  auto total = [](const Distribution& d) {
    double s = 0.0;
    for (const auto& [l, v] : d) s += v;
    return s;
  };
  for (const auto* d : {&p, &q}) {
    const double s = total(*d);
    if (!(std::abs(s - 1.0) <= 1e-9))
      throw Error(ErrorCode::NotNormalized, "distribution sums to " + std::to_string(s));
  }
  double bc = 0.0;
  for (const auto& [label, pv] : p) {
    for (const auto& [other, qv] : q)
      if (label == other) {
        bc += std::sqrt(std::max(pv, 0.0) * std::max(qv, 0.0));
        break;
      }
  }
  return std::clamp(1.0 - bc, 0.0, 1.0);
}

double luders_hellinger_closed_form(double lambda1, double lambda2, int n) {
  if (!(lambda1 >= 0.0 && lambda1 <= 1.0 && lambda2 >= 0.0 && lambda2 <= 1.0) || n < 0)
    throw Error(ErrorCode::OutOfRange, "eigenvalues must lie in [0, 1] and n ≥ 0");
  const double bc = std::sqrt(lambda1 * lambda2) + std::sqrt((1.0 - lambda1) * (1.0 - lambda2));
  return std::clamp(1.0 - std::pow(bc, n), 0.0, 1.0);
}

}  // namespace satrep
