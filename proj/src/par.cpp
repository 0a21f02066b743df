#include "foam/par.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace foam::par {

namespace {

constexpr std::int64_t kBlock = 4096;

std::atomic<int> g_override{0};

int resolve_threads() {
#ifdef _OPENMP
  int n = omp_get_max_threads();
  if (const char* env = std::getenv("FOAMLAB_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return std::max(1, n);
#else
  return 1;
#endif
}

}  // namespace

int thread_count() {
  int o = g_override.load(std::memory_order_relaxed);
  if (o >= 1) return o;
  static const int resolved = resolve_threads();
  return resolved;
}

void set_thread_count(int n) { g_override.store(n, std::memory_order_relaxed); }

void scale_serial(std::span<double> v, double c) {
  for (auto& x : v) x *= c;
}

void scale_omp(std::span<double> v, double c) {
  const std::int64_t n = std::int64_t(v.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::int64_t i = 0; i < n; ++i) v[i] *= c;
}

void scale(std::span<double> v, double c) {
  if (thread_count() > 1)
    scale_omp(v, c);
  else
    scale_serial(v, c);
}

void complex_scale_serial(std::span<double> a, std::span<const double> m) {
  const std::int64_t n = std::int64_t(m.size());
  for (std::int64_t i = 0; i < n; ++i) {
    a[2 * i] *= m[i];
    a[2 * i + 1] *= m[i];
  }
}

void complex_scale_omp(std::span<double> a, std::span<const double> m) {
  const std::int64_t n = std::int64_t(m.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::int64_t i = 0; i < n; ++i) {
    a[2 * i] *= m[i];
    a[2 * i + 1] *= m[i];
  }
}

void complex_scale(std::span<double> a, std::span<const double> m) {
  if (thread_count() > 1)
    complex_scale_omp(a, m);
  else
    complex_scale_serial(a, m);
}

void fill_indicator_serial(std::span<const std::uint16_t> labels,
                           std::uint16_t phase, std::span<double> out) {
  const std::int64_t n = std::int64_t(labels.size());
  for (std::int64_t i = 0; i < n; ++i) out[i] = labels[i] == phase ? 1.0 : 0.0;
}

void fill_indicator_omp(std::span<const std::uint16_t> labels,
                        std::uint16_t phase, std::span<double> out) {
  const std::int64_t n = std::int64_t(labels.size());
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::int64_t i = 0; i < n; ++i) out[i] = labels[i] == phase ? 1.0 : 0.0;
}

void fill_indicator(std::span<const std::uint16_t> labels, std::uint16_t phase,
                    std::span<double> out) {
  if (thread_count() > 1)
    fill_indicator_omp(labels, phase, out);
  else
    fill_indicator_serial(labels, phase, out);
}

namespace {

std::int64_t block_count(std::int64_t n) { return (n + kBlock - 1) / kBlock; }

double sum_block(std::span<const double> v, std::int64_t b) {
  const std::int64_t lo = b * kBlock;
  const std::int64_t hi = std::min<std::int64_t>(lo + kBlock, v.size());
  double s = 0.0;
  for (std::int64_t i = lo; i < hi; ++i) s += v[i];
  return s;
}

double dot_block(std::span<const double> a, std::span<const double> b,
                 std::int64_t blk) {
  const std::int64_t lo = blk * kBlock;
  const std::int64_t hi = std::min<std::int64_t>(lo + kBlock, a.size());
  double s = 0.0;
  for (std::int64_t i = lo; i < hi; ++i) s += a[i] * b[i];
  return s;
}

double fold(const std::vector<double>& partial) {
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace

double block_sum_serial(std::span<const double> v) {
  const std::int64_t nb = block_count(std::int64_t(v.size()));
  std::vector<double> partial(size_t(nb), 0.0);
  for (std::int64_t b = 0; b < nb; ++b) partial[size_t(b)] = sum_block(v, b);
  return fold(partial);
}

double block_sum_omp(std::span<const double> v) {
  const std::int64_t nb = block_count(std::int64_t(v.size()));
  std::vector<double> partial(size_t(nb), 0.0);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::int64_t b = 0; b < nb; ++b) partial[size_t(b)] = sum_block(v, b);
  return fold(partial);
}

double block_sum(std::span<const double> v) {
  if (thread_count() > 1 && std::int64_t(v.size()) > 4 * kBlock)
    return block_sum_omp(v);
  return block_sum_serial(v);
}

double block_dot_serial(std::span<const double> a, std::span<const double> b) {
  const std::int64_t nb = block_count(std::int64_t(a.size()));
  std::vector<double> partial(size_t(nb), 0.0);
  for (std::int64_t blk = 0; blk < nb; ++blk)
    partial[size_t(blk)] = dot_block(a, b, blk);
  return fold(partial);
}

double block_dot_omp(std::span<const double> a, std::span<const double> b) {
  const std::int64_t nb = block_count(std::int64_t(a.size()));
  std::vector<double> partial(size_t(nb), 0.0);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::int64_t blk = 0; blk < nb; ++blk)
    partial[size_t(blk)] = dot_block(a, b, blk);
  return fold(partial);
}

double block_dot(std::span<const double> a, std::span<const double> b) {
  if (thread_count() > 1 && std::int64_t(a.size()) > 4 * kBlock)
    return block_dot_omp(a, b);
  return block_dot_serial(a, b);
}

namespace {

void sum_by_label_block(std::span<const double> values,
                        std::span<const std::uint16_t> labels, int n_phases,
                        std::int64_t b, double* acc) {
  const std::int64_t lo = b * kBlock;
  const std::int64_t hi = std::min<std::int64_t>(lo + kBlock, values.size());
  std::fill(acc, acc + n_phases, 0.0);
  for (std::int64_t i = lo; i < hi; ++i) acc[labels[i]] += values[i];
}

std::vector<double> fold_by_label(const std::vector<double>& partial,
                                  std::int64_t nb, int n_phases) {
  std::vector<double> out(size_t(n_phases), 0.0);
  for (std::int64_t b = 0; b < nb; ++b)
    for (int p = 0; p < n_phases; ++p)
      out[size_t(p)] += partial[size_t(b * n_phases + p)];
  return out;
}

}  // namespace

std::vector<double> sum_by_label_serial(std::span<const double> values,
                                        std::span<const std::uint16_t> labels,
                                        int n_phases) {
  const std::int64_t nb = block_count(std::int64_t(values.size()));
  std::vector<double> partial(size_t(nb * n_phases), 0.0);
  for (std::int64_t b = 0; b < nb; ++b)
    sum_by_label_block(values, labels, n_phases, b,
                       partial.data() + b * n_phases);
  return fold_by_label(partial, nb, n_phases);
}

std::vector<double> sum_by_label_omp(std::span<const double> values,
                                     std::span<const std::uint16_t> labels,
                                     int n_phases) {
  const std::int64_t nb = block_count(std::int64_t(values.size()));
  std::vector<double> partial(size_t(nb * n_phases), 0.0);
#pragma omp parallel for schedule(static) num_threads(thread_count())
  for (std::int64_t b = 0; b < nb; ++b)
    sum_by_label_block(values, labels, n_phases, b,
                       partial.data() + b * n_phases);
  return fold_by_label(partial, nb, n_phases);
}

std::vector<double> sum_by_label(std::span<const double> values,
                                 std::span<const std::uint16_t> labels,
                                 int n_phases) {
  if (thread_count() > 1 && std::int64_t(values.size()) > 4 * kBlock)
    return sum_by_label_omp(values, labels, n_phases);
  return sum_by_label_serial(values, labels, n_phases);
}

std::int64_t count_diff_serial(std::span<const std::uint16_t> a,
                               std::span<const std::uint16_t> b) {
  std::int64_t c = 0;
  for (size_t i = 0; i < a.size(); ++i) c += a[i] != b[i];
  return c;
}

std::int64_t count_diff_omp(std::span<const std::uint16_t> a,
                            std::span<const std::uint16_t> b) {
  const std::int64_t n = std::int64_t(a.size());
  std::int64_t c = 0;
#pragma omp parallel for schedule(static) reduction(+ : c) \
    num_threads(thread_count())
  for (std::int64_t i = 0; i < n; ++i) c += a[i] != b[i];
  return c;
}

std::int64_t count_diff(std::span<const std::uint16_t> a,
                        std::span<const std::uint16_t> b) {
  if (thread_count() > 1 && std::int64_t(a.size()) > 4 * kBlock)
    return count_diff_omp(a, b);
  return count_diff_serial(a, b);
}

}  // namespace foam::par
