#pragma once

#include <vector>

#include "foam/convolution.hpp"
#include "foam/fields.hpp"

namespace foam {

/// Interfacial energy of a partition. `total` sums the pairwise table over
/// ordered pairs i != j and approximates the single-counted H^{d-1} measure
/// of the interface set.
struct EnergyReport {
  int n_phases = 0;
  double total = 0.0;
  double perimeter_estimate = 0.0;
  std::vector<double> pairwise;  // (n_phases)^2 row-major, zero diagonal

  double at(int i, int j) const { return pairwise[size_t(i) * n_phases + j]; }
};

/// Kernel energy of the ordered pair (i, j):
///   (1/2) sqrt(pi/tau) h^d sum_x u_i(x) (G_tau * u_j)(x)
/// which tends to half the (i,j) interface measure, so that summing both
/// orders counts each interface once. Throws ParamError when i == j.
double pair_energy(const LabelField& labels, const GaussianKernel& kernel,
                   int i, int j);

/// Full report from n_phases convolutions (one per phase).
EnergyReport total_energy(const LabelField& labels,
                          const GaussianKernel& kernel);

/// Diffusion coefficients Phi_i = G_tau * u_i for every phase; values lie in
/// [0,1] and sum to 1 at every cell. The auction maximizes Phi_i - lambda_i,
/// equivalent to minimizing (1 - Phi_i) + lambda_i.
ScoreField linearized_scores(const LabelField& labels,
                             const GaussianKernel& kernel);
void linearized_scores_into(const LabelField& labels,
                            const GaussianKernel& kernel, ScoreField& scores);

/// Energy report computed from already-available scores of the same labels.
EnergyReport energy_from_scores(const LabelField& labels,
                                const ScoreField& scores, double tau);

/// Total only (cheap single pass): (1/2) c sum_x (1 - Phi_{label(x)}(x)).
double total_from_scores(const LabelField& labels, const ScoreField& scores,
                         double tau);

}  // namespace foam
