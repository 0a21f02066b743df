#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "foam/errors.hpp"
#include "foam/fields.hpp"
#include "helpers.hpp"

using namespace foam;

TEST_CASE("grid geometry and indexing") {
  Grid g = Grid::square(8, 4.0);
  CHECK(g.cell_count() == 64);
  CHECK(g.cell_volume() == doctest::Approx(0.25));
  CHECK(g.domain_volume() == doctest::Approx(16.0));
  auto c = g.coords(g.index(3, 5));
  CHECK(c[0] == 3);
  CHECK(c[1] == 5);

  Grid c3 = Grid::cube(4, 1.0);
  CHECK(c3.cell_count() == 64);
  auto q = c3.coords(c3.index(1, 2, 3));
  CHECK(q == std::array<int, 3>{1, 2, 3});
}

TEST_CASE("grid invariants rejected") {
  Grid g = Grid::square(8, 4.0);
  g.dims[0] = 3;
  CHECK_THROWS_AS(g.validate(), ParamError);
  g = Grid::square(8, 4.0);
  g.spacing[1] = 0.0;
  CHECK_THROWS_AS(g.validate(), ParamError);
  g = Grid::square(8, 4.0);
  g.rank = 4;
  CHECK_THROWS_AS(g.validate(), ParamError);
}

TEST_CASE("phase indicator basics") {
  Grid g = Grid::square(8, 1.0);
  LabelField f = LabelField::uniform(g, 2, 0);

  auto ones = phase_indicator(f, 0);
  auto zeros = phase_indicator(f, 1);
  for (auto v : ones) CHECK(v == 1.0);
  for (auto v : zeros) CHECK(v == 0.0);
  CHECK_THROWS_AS(phase_indicator(f, 2), ParamError);
  CHECK_THROWS_AS(phase_indicator(f, -1), ParamError);
}

TEST_CASE("checkerboard indicator splits cells evenly") {
  Grid g = Grid::square(8, 1.0);
  LabelField f = LabelField::uniform(g, 2, 0);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      f.labels[size_t(g.index(r, c))] = std::uint16_t((r + c) % 2);
  auto ind = phase_indicator(f, 0);
  double sum = 0;
  for (auto v : ind) sum += v;
  CHECK(sum == 32.0);
}

TEST_CASE("partition property: indicators sum to one exactly") {
  Grid g = Grid::square(16, 2.0);
  std::mt19937_64 rng(11);
  LabelField f = LabelField::uniform(g, 5, 0);
  for (auto& l : f.labels) l = std::uint16_t(rng() % 5);

  std::vector<double> sum(size_t(g.cell_count()), 0.0);
  for (int p = 0; p < 5; ++p) {
    auto ind = phase_indicator(f, p);
    for (size_t i = 0; i < sum.size(); ++i) sum[i] += ind[i];
  }
  for (auto v : sum) CHECK(v == 1.0);
}

TEST_CASE("phase counts are exact integer tallies") {
  Grid g = Grid::square(8, 1.0);
  auto f = foamtest::half_split(g);
  auto counts = f.phase_counts();
  CHECK(counts[0] == 32);
  CHECK(counts[1] == 32);
}

TEST_CASE("label validation") {
  Grid g = Grid::square(8, 1.0);
  LabelField f = LabelField::uniform(g, 2, 0);
  f.labels[3] = 7;
  CHECK_THROWS_AS(f.validate(), ConfigError);
  f = LabelField::uniform(g, 2, 0);
  f.labels.pop_back();
  CHECK_THROWS_AS(f.validate(), ConfigError);
}
