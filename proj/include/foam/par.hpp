#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace foam::par {

/// Resolved worker count: min(omp_get_max_threads(), FOAMLAB_THREADS).
/// 1 when built without OpenMP.
int thread_count();

/// Override the FOAMLAB_THREADS/OpenMP resolution (0 restores it).
void set_thread_count(int n);

// Data-parallel kernels. Every kernel ships a serial reference and an
// OpenMP variant; the undecorated name dispatches on thread_count().
// Reductions accumulate fixed 4096-cell blocks serially and fold the
// block sums in index order, so serial and parallel results are
// bit-identical for any thread count.

void scale_serial(std::span<double> v, double c);
void scale_omp(std::span<double> v, double c);
void scale(std::span<double> v, double c);

/// out[i] = a[i] * m[i] for interleaved complex a (2n doubles), real m (n).
void complex_scale_serial(std::span<double> a, std::span<const double> m);
void complex_scale_omp(std::span<double> a, std::span<const double> m);
void complex_scale(std::span<double> a, std::span<const double> m);

void fill_indicator_serial(std::span<const std::uint16_t> labels,
                           std::uint16_t phase, std::span<double> out);
void fill_indicator_omp(std::span<const std::uint16_t> labels,
                        std::uint16_t phase, std::span<double> out);
void fill_indicator(std::span<const std::uint16_t> labels, std::uint16_t phase,
                    std::span<double> out);

double block_sum_serial(std::span<const double> v);
double block_sum_omp(std::span<const double> v);
double block_sum(std::span<const double> v);

double block_dot_serial(std::span<const double> a, std::span<const double> b);
double block_dot_omp(std::span<const double> a, std::span<const double> b);
double block_dot(std::span<const double> a, std::span<const double> b);

/// out[p] = sum of values[i] over cells with labels[i] == p.
std::vector<double> sum_by_label_serial(std::span<const double> values,
                                        std::span<const std::uint16_t> labels,
                                        int n_phases);
std::vector<double> sum_by_label_omp(std::span<const double> values,
                                     std::span<const std::uint16_t> labels,
                                     int n_phases);
std::vector<double> sum_by_label(std::span<const double> values,
                                 std::span<const std::uint16_t> labels,
                                 int n_phases);

std::int64_t count_diff_serial(std::span<const std::uint16_t> a,
                               std::span<const std::uint16_t> b);
std::int64_t count_diff_omp(std::span<const std::uint16_t> a,
                            std::span<const std::uint16_t> b);
std::int64_t count_diff(std::span<const std::uint16_t> a,
                        std::span<const std::uint16_t> b);

}  // namespace foam::par
