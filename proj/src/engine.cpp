#include "foam/engine.hpp"

#include <cmath>
#include <sstream>

#include "foam/errors.hpp"
#include "foam/par.hpp"

namespace foam {

void SimParams::validate() const {
  if (!(tau > 0.0)) throw ParamError("tau must be > 0");
  if (max_iters < 1) throw ParamError("max_iters must be >= 1");
  if (stationary_window < 1) throw ParamError("stationary_window must be >= 1");
  auction.validate();
}

namespace {

void check_targets(const LabelField& labels, const VolumeTargets& targets) {
  auto counts = labels.phase_counts();
  for (int p = 0; p < labels.n_phases; ++p)
    if (counts[size_t(p)] != targets.counts[size_t(p)])
      throw ParamError("labels do not meet the volume targets");
}

void warn_small_bubbles(const LabelField& labels, const VolumeTargets& targets,
                        double tau, std::vector<std::string>& warnings) {
  const double hv = labels.geom.cell_volume();
  const double d = double(labels.geom.rank);
  for (int p = 0; p + 1 < labels.n_phases; ++p) {
    double vol = double(targets.counts[size_t(p)]) * hv;
    if (vol <= 0.0) continue;
    if (std::pow(vol, 1.0 / d) < 2.0 * std::sqrt(tau)) {
      std::ostringstream os;
      os << "bubble " << p << " is small for tau: V^(1/d)="
         << std::pow(vol, 1.0 / d) << " < 2*sqrt(tau)=" << 2.0 * std::sqrt(tau)
         << "; interface measures in this regime are inaccurate";
      warnings.push_back(os.str());
    }
  }
}

}  // namespace

StepResult mbo_step(const LabelField& labels, const GaussianKernel& kernel,
                    const VolumeTargets& targets, const SimParams& params) {
  params.validate();
  labels.validate();
  targets.validate(labels.cell_count());
  if (targets.n_phases() != labels.n_phases)
    throw ParamError("targets and labels disagree on phase count");
  if (params.require_initial_feasible) check_targets(labels, targets);

  auto scores = linearized_scores(labels, kernel);
  auto auction = assign(scores, targets, params.auction);
  StepResult res;
  res.cells_changed = par::count_diff(labels.labels, auction.labels.labels);
  res.labels = std::move(auction.labels);
  res.lambda = std::move(auction.lambda);
  return res;
}

EvolveResult evolve(LabelField labels, const GaussianKernel& kernel,
                    const VolumeTargets& targets, const SimParams& params) {
  params.validate();
  labels.validate();
  targets.validate(labels.cell_count());
  if (targets.n_phases() != labels.n_phases)
    throw ParamError("targets and labels disagree on phase count");
  if (params.require_initial_feasible) check_targets(labels, targets);

  EvolveResult res;
  res.trace.initial_feasible = params.require_initial_feasible;
  warn_small_bubbles(labels, targets, params.tau, res.trace.warnings);

  ScoreField scores = MultiField::zeros(labels.geom, labels.n_phases);
  // at the comparison point of step s this holds state s-2 (cycle check)
  std::vector<std::uint16_t> previous_state;
  std::int64_t prev_changed = 0;
  int zero_streak = 0;

  auto volumes_of = [&](const LabelField& f) { return f.phase_counts(); };

  for (int iter = 1; iter <= params.max_iters; ++iter) {
    linearized_scores_into(labels, kernel, scores);
    const double energy = total_from_scores(labels, scores, params.tau);
    res.trace.records.push_back(
        {iter - 1, energy, prev_changed, volumes_of(labels)});

    auto auction = assign(scores, targets, params.auction);
    const std::int64_t changed =
        par::count_diff(labels.labels, auction.labels.labels);
    res.iterations = iter;

    if (changed == 0) {
      ++zero_streak;
      res.trace.records.push_back(
          {iter, energy, 0, volumes_of(auction.labels)});
      if (zero_streak >= params.stationary_window) {
        res.labels = std::move(auction.labels);
        res.converged = true;
        return res;
      }
      prev_changed = 0;
      labels = std::move(auction.labels);
      res.trace.records.pop_back();  // the loop re-records this state
      continue;
    }
    zero_streak = 0;

    if (!previous_state.empty() && auction.labels.labels == previous_state) {
      res.trace.records.push_back(
          {iter, total_energy(auction.labels, kernel).total, changed,
           volumes_of(auction.labels)});
      res.trace.warnings.push_back(
          "period-2 cycle detected; reporting non-convergence");
      res.labels = std::move(auction.labels);
      res.converged = false;
      return res;
    }

    previous_state = std::move(labels.labels);
    labels = std::move(auction.labels);
    prev_changed = changed;
  }

  res.trace.records.push_back({params.max_iters,
                               total_energy(labels, kernel).total,
                               prev_changed, volumes_of(labels)});
  res.labels = std::move(labels);
  res.converged = false;
  return res;
}

}  // namespace foam
