#include "foam/grid.hpp"

#include "foam/errors.hpp"

namespace foam {

Grid Grid::square(int n, double length) {
  Grid g;
  g.rank = 2;
  g.dims = {n, n, 1};
  double h = length / n;
  g.spacing = {h, h, 1.0};
  g.origin = {h / 2, h / 2, 0.0};
  g.validate();
  return g;
}

Grid Grid::cube(int n, double length) {
  Grid g;
  g.rank = 3;
  g.dims = {n, n, n};
  double h = length / n;
  g.spacing = {h, h, h};
  g.origin = {h / 2, h / 2, h / 2};
  g.validate();
  return g;
}

void Grid::validate() const {
  if (rank != 2 && rank != 3) throw ParamError("grid rank must be 2 or 3");
  for (int a = 0; a < rank; ++a) {
    if (dims[a] < 4) throw ParamError("grid extents must be >= 4");
    if (!(spacing[a] > 0.0)) throw ParamError("grid spacing must be > 0");
  }
  for (int a = rank; a < 3; ++a) {
    if (dims[a] != 1) throw ParamError("inactive grid axes must have extent 1");
  }
}

}  // namespace foam
