#include "foam/energy.hpp"

#include <cmath>

#include "foam/errors.hpp"
#include "foam/par.hpp"

namespace foam {

namespace {

double energy_scale(const Grid& g, double tau) {
  return 0.5 * std::sqrt(M_PI / tau) * g.cell_volume();
}

}  // namespace

double pair_energy(const LabelField& labels, const GaussianKernel& kernel,
                   int i, int j) {
  if (i == j) throw ParamError("pair_energy requires distinct phases");
  if (!(kernel.grid() == labels.geom))
    throw ConfigError("pair_energy: kernel grid does not match labels");
  auto uj = phase_indicator(labels, j);
  auto phi = kernel.convolve(uj);
  auto sums = par::sum_by_label(phi, labels.labels, labels.n_phases);
  return energy_scale(labels.geom, kernel.tau()) * sums[size_t(i)];
}

ScoreField linearized_scores(const LabelField& labels,
                             const GaussianKernel& kernel) {
  ScoreField scores = MultiField::zeros(labels.geom, labels.n_phases);
  linearized_scores_into(labels, kernel, scores);
  return scores;
}

void linearized_scores_into(const LabelField& labels,
                            const GaussianKernel& kernel, ScoreField& scores) {
  if (!(kernel.grid() == labels.geom))
    throw ConfigError("linearized_scores: kernel grid does not match labels");
  if (scores.n_phases != labels.n_phases || !(scores.geom == labels.geom))
    scores = MultiField::zeros(labels.geom, labels.n_phases);
  const int np = labels.n_phases;
#pragma omp parallel for schedule(dynamic) num_threads(par::thread_count())
  for (int p = 0; p < np; ++p) {
    auto out = scores.phase(p);
    par::fill_indicator_serial(labels.labels, std::uint16_t(p), out);
    kernel.convolve(out, out);
  }
}

EnergyReport energy_from_scores(const LabelField& labels,
                                const ScoreField& scores, double tau) {
  const int np = labels.n_phases;
  const double c = energy_scale(labels.geom, tau);
  EnergyReport rep;
  rep.n_phases = np;
  rep.pairwise.assign(size_t(np) * np, 0.0);
  for (int j = 0; j < np; ++j) {
    auto sums = par::sum_by_label(scores.phase(j), labels.labels, np);
    for (int i = 0; i < np; ++i)
      if (i != j) rep.pairwise[size_t(i) * np + j] = c * sums[size_t(i)];
  }
  double total = 0.0;
  for (double v : rep.pairwise) total += v;
  rep.total = total;
  rep.perimeter_estimate = total;
  return rep;
}

EnergyReport total_energy(const LabelField& labels,
                          const GaussianKernel& kernel) {
  auto scores = linearized_scores(labels, kernel);
  return energy_from_scores(labels, scores, kernel.tau());
}

double total_from_scores(const LabelField& labels, const ScoreField& scores,
                         double tau) {
  const std::int64_t n = labels.geom.cell_count();
  // sum_x (1 - Phi_label(x)) accumulated in fixed blocks, serial fold.
  constexpr std::int64_t kBlock = 4096;
  const std::int64_t nb = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(size_t(nb), 0.0);
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (std::int64_t b = 0; b < nb; ++b) {
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min(lo + kBlock, n);
    double s = 0.0;
    for (std::int64_t x = lo; x < hi; ++x)
      s += 1.0 - scores.data[size_t(labels.labels[size_t(x)]) * n + x];
    partial[size_t(b)] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return energy_scale(labels.geom, tau) * s;
}

}  // namespace foam
