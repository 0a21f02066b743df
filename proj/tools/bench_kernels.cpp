// Timings of the serial reference kernels against the OpenMP variants,
// plus a full convolution and one MBO step at production sizes.

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "foam/convolution.hpp"
#include "foam/engine.hpp"
#include "foam/par.hpp"

using namespace foam;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(
             clock::now().time_since_epoch())
      .count();
}

template <typename F>
double time_ms(int reps, F&& f) {
  f();  // warm-up
  double t0 = now_ms();
  for (int r = 0; r < reps; ++r) f();
  return (now_ms() - t0) / reps;
}

void row(const char* name, double serial_ms, double omp_ms) {
  std::printf("%-28s %10.3f ms %10.3f ms %8.2fx\n", name, serial_ms, omp_ms,
              omp_ms > 0 ? serial_ms / omp_ms : 0.0);
}

void bench_grid(const Grid& g, const char* tag) {
  const std::int64_t n = g.cell_count();
  std::mt19937_64 rng(7);
  std::vector<double> a(static_cast<size_t>(n)), b(static_cast<size_t>(n));
  std::vector<std::uint16_t> lab(static_cast<size_t>(n), 0);
  for (std::int64_t i = 0; i < n; ++i) {
    a[size_t(i)] = double(rng() >> 11) * 0x1.0p-53;
    b[size_t(i)] = double(rng() >> 11) * 0x1.0p-53;
    lab[size_t(i)] = std::uint16_t(rng() % 8);
  }
  std::printf("== %s (%lld cells, %d threads)\n", tag, (long long)n,
              par::thread_count());
  std::printf("%-28s %13s %13s %9s\n", "kernel", "serial", "omp", "speedup");

  row("block_sum", time_ms(5, [&] { par::block_sum_serial(a); }),
      time_ms(5, [&] { par::block_sum_omp(a); }));
  row("block_dot", time_ms(5, [&] { par::block_dot_serial(a, b); }),
      time_ms(5, [&] { par::block_dot_omp(a, b); }));
  row("sum_by_label",
      time_ms(5, [&] { par::sum_by_label_serial(a, lab, 8); }),
      time_ms(5, [&] { par::sum_by_label_omp(a, lab, 8); }));
  std::vector<double> out(static_cast<size_t>(n), 0.0);
  row("fill_indicator",
      time_ms(5, [&] { par::fill_indicator_serial(lab, 3, out); }),
      time_ms(5, [&] { par::fill_indicator_omp(lab, 3, out); }));

  GaussianKernel k(g, 0.0625);
  double conv = time_ms(3, [&] { k.convolve(a, out); });
  std::printf("%-28s %10.3f ms\n", "convolve (fft)", conv);

  LabelField f = LabelField::uniform(g, 4, 3);
  auto counts = f.phase_counts();
  // three quarter-domain slabs plus complement
  for (std::int64_t i = 0; i < n; ++i)
    f.labels[size_t(i)] = std::uint16_t((4 * i) / n);
  VolumeTargets t{f.phase_counts()};
  SimParams p;
  p.tau = 0.0625;
  double step = time_ms(1, [&] { (void)mbo_step(f, k, t, p); });
  std::printf("%-28s %10.3f ms\n", "mbo_step (4 phases)", step);
}

}  // namespace

int main() {
  bench_grid(Grid::square(256, 4.0), "2D 256^2");
  bench_grid(Grid::cube(96, 4.0), "3D 96^3");
  return 0;
}
