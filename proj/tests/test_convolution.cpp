#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "foam/convolution.hpp"
#include "foam/errors.hpp"
#include "helpers.hpp"

using namespace foam;
using namespace foamtest;

TEST_CASE("constant fields are fixed points (mass preservation)") {
  for (auto g : {Grid::square(32, 2.0), Grid::cube(16, 2.0)}) {
    GaussianKernel k(g, 0.01);
    std::vector<double> c(size_t(g.cell_count()), 0.7);
    auto out = k.convolve(c);
    for (auto v : out) CHECK(v == doctest::Approx(0.7).epsilon(1e-10));

    std::vector<double> ones(size_t(g.cell_count()), 1.0);
    out = k.convolve(ones);
    for (auto v : out) CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("spectral multiplier is real positive and at most one") {
  Grid g = Grid::square(16, 1.0);
  GaussianKernel k(g, 0.003);
  auto m = k.spectral_multiplier();
  CHECK(m[0] == doctest::Approx(1.0));  // zero frequency
  for (auto v : m) {
    CHECK(v > 0.0);
    CHECK(v <= 1.0 + 1e-15);
  }
}

TEST_CASE("half-plane smoothing follows the erf profile") {
  // 256^2 grid; interface between columns cut-1 and cut sits at y = 2.0
  Grid g = Grid::square(256, 4.0);
  const double tau = 0.01;
  GaussianKernel k(g, tau);
  auto f = half_split(g);  // phase 0 on the left half
  auto phi = k.convolve(phase_indicator(f, 0));

  const int r = 77;
  const double y_if = 2.0;
  // the two cells straddling the line average to 1/2 exactly
  const int cut = g.dims[1] / 2;
  double left = phi[size_t(g.index(r, cut - 1))];
  double right = phi[size_t(g.index(r, cut))];
  CHECK(0.5 * (left + right) == doctest::Approx(0.5).epsilon(1e-3));

  // profile matches erfc at a range of offsets
  for (int off : {-20, -8, -3, -1, 0, 1, 2, 7, 19}) {
    const int c = cut + off;
    const double y = g.origin[1] + c * g.spacing[1];
    const double oracle = erf_profile(y - y_if, tau);
    CHECK(phi[size_t(g.index(r, c))] == doctest::Approx(oracle).epsilon(1e-3));
  }
}

TEST_CASE("output range stays within the input range") {
  Grid g = Grid::square(64, 1.0);
  GaussianKernel k(g, 0.002);
  std::mt19937_64 rng(5);
  std::vector<double> f(size_t(g.cell_count()));
  for (auto& v : f) v = double(rng() >> 11) * 0x1.0p-53;
  auto out = k.convolve(f);
  const double lo = *std::min_element(f.begin(), f.end());
  const double hi = *std::max_element(f.begin(), f.end());
  for (auto v : out) {
    CHECK(v >= lo - 1e-10);
    CHECK(v <= hi + 1e-10);
  }
}

TEST_CASE("convolution is self-adjoint") {
  Grid g = Grid::square(48, 3.0);
  GaussianKernel k(g, 0.01);
  std::mt19937_64 rng(7);
  std::vector<double> f(size_t(g.cell_count())), h(size_t(g.cell_count()));
  for (auto& v : f) v = double(rng() >> 11) * 0x1.0p-53;
  for (auto& v : h) v = double(rng() >> 11) * 0x1.0p-53;
  auto gf = k.convolve(f);
  auto gh = k.convolve(h);
  double a = 0, b = 0;
  for (size_t i = 0; i < f.size(); ++i) {
    a += f[i] * gh[i];
    b += gf[i] * h[i];
  }
  CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("semigroup: two tau/2 passes equal one tau pass") {
  for (auto g : {Grid::square(32, 2.0), Grid::cube(12, 1.5)}) {
    const double tau = 0.02;
    GaussianKernel k_full(g, tau), k_half(g, tau / 2);
    std::mt19937_64 rng(9);
    std::vector<double> f(size_t(g.cell_count()));
    for (auto& v : f) v = double(rng() >> 11) * 0x1.0p-53;
    auto once = k_full.convolve(f);
    auto twice = k_half.convolve(k_half.convolve(f));
    for (size_t i = 0; i < f.size(); ++i)
      CHECK(twice[i] == doctest::Approx(once[i]).epsilon(1e-9));
  }
}

TEST_CASE("monotonicity: f <= g implies smoothed f <= smoothed g") {
  Grid g = Grid::square(40, 2.0);
  GaussianKernel k(g, 0.008);
  std::mt19937_64 rng(13);
  std::vector<double> lo(size_t(g.cell_count())), hi(lo.size());
  for (size_t i = 0; i < lo.size(); ++i) {
    lo[i] = double(rng() >> 11) * 0x1.0p-53;
    hi[i] = lo[i] + double(rng() >> 11) * 0x1.0p-53;
  }
  auto slo = k.convolve(lo);
  auto shi = k.convolve(hi);
  for (size_t i = 0; i < lo.size(); ++i) CHECK(slo[i] <= shi[i] + 1e-12);
}

TEST_CASE("convolution is linear in its input") {
  Grid g = Grid::square(32, 2.0);
  GaussianKernel k(g, 0.01);
  std::mt19937_64 rng(17);
  std::vector<double> f(size_t(g.cell_count())), h(size_t(g.cell_count()));
  for (auto& v : f) v = double(rng() >> 11) * 0x1.0p-53;
  for (auto& v : h) v = double(rng() >> 11) * 0x1.0p-53;
  std::vector<double> combo(f.size());
  for (size_t i = 0; i < f.size(); ++i) combo[i] = 2.5 * f[i] - 0.75 * h[i];
  auto gf = k.convolve(f);
  auto gh = k.convolve(h);
  auto gc = k.convolve(combo);
  for (size_t i = 0; i < f.size(); ++i)
    CHECK(gc[i] == doctest::Approx(2.5 * gf[i] - 0.75 * gh[i]).epsilon(1e-10));
}

TEST_CASE("errors: size mismatch and bad tau") {
  Grid g = Grid::square(16, 1.0);
  CHECK_THROWS_AS(GaussianKernel(g, 0.0), ParamError);
  CHECK_THROWS_AS(GaussianKernel(g, -1.0), ParamError);
  GaussianKernel k(g, 0.01);
  std::vector<double> wrong(7, 0.0);
  std::vector<double> out(7, 0.0);
  CHECK_THROWS_AS(k.convolve(wrong, out), ConfigError);
}

TEST_CASE("parallel per-phase convolution equals the scalar path") {
  Grid g = Grid::square(32, 2.0);
  GaussianKernel k(g, 0.01);
  auto f = half_split(g);
  MultiField u = MultiField::zeros(g, 2);
  for (int p = 0; p < 2; ++p) {
    auto ind = phase_indicator(f, p);
    std::copy(ind.begin(), ind.end(), u.phase(p).begin());
  }
  MultiField out = MultiField::zeros(g, 2);
  convolve_phases(k, u, out);
  for (int p = 0; p < 2; ++p) {
    auto direct = k.convolve(phase_indicator(f, p));
    for (std::int64_t i = 0; i < g.cell_count(); ++i)
      CHECK(out.phase(p)[size_t(i)] == direct[size_t(i)]);
  }
}
