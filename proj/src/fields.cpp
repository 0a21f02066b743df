#include "foam/fields.hpp"

#include <cmath>

#include "foam/errors.hpp"
#include "foam/par.hpp"

namespace foam {

LabelField LabelField::uniform(const Grid& g, int n_phases,
                               std::uint16_t fill) {
  g.validate();
  if (n_phases < 1) throw ParamError("n_phases must be >= 1");
  LabelField f;
  f.geom = g;
  f.n_phases = n_phases;
  f.labels.assign(size_t(g.cell_count()), fill);
  f.validate();
  return f;
}

std::vector<std::int64_t> LabelField::phase_counts() const {
  std::vector<std::int64_t> counts(size_t(n_phases), 0);
  for (auto l : labels) ++counts[l];
  return counts;
}

void LabelField::validate() const {
  geom.validate();
  if (std::int64_t(labels.size()) != geom.cell_count())
    throw ConfigError("label array size does not match grid");
  if (n_phases < 1) throw ConfigError("label field needs at least one phase");
  for (auto l : labels)
    if (l >= n_phases) throw ConfigError("label out of range");
}

MultiField MultiField::zeros(const Grid& g, int n_phases) {
  MultiField f;
  f.geom = g;
  f.n_phases = n_phases;
  f.data.assign(size_t(g.cell_count() * n_phases), 0.0);
  return f;
}

std::vector<double> phase_indicator(const LabelField& f, int phase) {
  if (phase < 0 || phase >= f.n_phases)
    throw ParamError("phase index out of range");
  std::vector<double> out(f.labels.size());
  par::fill_indicator(f.labels, std::uint16_t(phase), out);
  return out;
}

double partition_defect(const MultiField& f) {
  const std::int64_t n = f.geom.cell_count();
  double worst = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int p = 0; p < f.n_phases; ++p) s += f.data[size_t(p * n + i)];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

}  // namespace foam
