#include "satrep/markov_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "satrep/error.hpp"

namespace satrep {

MarkovKernel::MarkovKernel(std::vector<Label> targets, std::vector<Label> sources,
                           std::vector<double> entries)
    : targets_(std::move(targets)), sources_(std::move(sources)), entries_(std::move(entries)) {
  if (entries_.size() != targets_.size() * sources_.size())
    throw Error(ErrorCode::DimMismatch, "kernel entries do not match label counts");
}

MarkovKernel MarkovKernel::identity(const std::vector<Label>& labels) {
  MarkovKernel k(labels, labels, std::vector<double>(labels.size() * labels.size(), 0.0));
  for (std::size_t i = 0; i < labels.size(); ++i) k(i, i) = 1.0;
  return k;
}

MarkovKernel MarkovKernel::relabeling(const std::vector<Label>& sources,
                                      const std::function<std::optional<Label>(const Label&)>& f) {
  std::vector<Label> targets;
  std::vector<std::size_t> image(sources.size());
  for (std::size_t j = 0; j < sources.size(); ++j) {
    auto mapped = f(sources[j]);
    if (!mapped) throw Error(ErrorCode::PartialMap, "no image for label " + sources[j].to_string());
    std::size_t idx = find_label(targets, *mapped);
    if (idx == targets.size()) targets.push_back(*mapped);
    image[j] = idx;
  }
  MarkovKernel k(targets, sources, std::vector<double>(targets.size() * sources.size(), 0.0));
  for (std::size_t j = 0; j < sources.size(); ++j) k(image[j], j) = 1.0;
  return k;
}

double MarkovKernel::stochasticity_residual() const {
  double worst = 0.0;
  for (std::size_t c = 0; c < cols(); ++c) {
    double s = 0.0;
    for (std::size_t r = 0; r < rows(); ++r) {
      const double v = (*this)(r, c);
      if (!(v >= -1e-12)) return std::numeric_limits<double>::infinity();
      s += v;
    }
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

void MarkovKernel::check_stochastic(const Tolerances& tol) const {
  const double res = stochasticity_residual();
  if (res > tol.stoch_tol)
    throw Error(ErrorCode::NotStochastic, "column-sum residual " + std::to_string(res));
}

MarkovKernel compose(const MarkovKernel& outer, const MarkovKernel& inner) {
  if (outer.cols() != inner.rows())
    throw Error(ErrorCode::LabelMismatch, "kernel composition: inner targets differ from outer sources");
  for (std::size_t b = 0; b < outer.cols(); ++b)
    if (!(outer.sources()[b] == inner.targets()[b]))
      throw Error(ErrorCode::LabelMismatch, "kernel composition: label order differs");
  MarkovKernel out(outer.targets(), inner.sources(),
                   std::vector<double>(outer.rows() * inner.cols(), 0.0));
  for (std::size_t a = 0; a < outer.rows(); ++a)
    for (std::size_t b = 0; b < outer.cols(); ++b)
      for (std::size_t c = 0; c < inner.cols(); ++c) out(a, c) += outer(a, b) * inner(b, c);
  return out;
}

}  // namespace satrep
