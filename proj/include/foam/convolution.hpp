#pragma once

#include <memory>
#include <span>
#include <vector>

#include "foam/fields.hpp"
#include "foam/grid.hpp"

namespace foam {

/// Periodic Gaussian convolution G_tau * f realized in frequency space with
/// the exact heat-kernel symbol exp(-tau |k|^2) at the grid frequencies
/// k_a = 2 pi m_a / L_a. The symbol is real, positive and <= 1, so mass
/// preservation, the semigroup property and monotonicity hold to rounding.
///
/// A kernel is immutable after construction and safe to share across
/// threads; each convolve call uses its own scratch buffers.
class GaussianKernel {
 public:
  GaussianKernel(const Grid& g, double tau);
  ~GaussianKernel();

  GaussianKernel(const GaussianKernel&) = delete;
  GaussianKernel& operator=(const GaussianKernel&) = delete;
  GaussianKernel(GaussianKernel&&) noexcept;
  GaussianKernel& operator=(GaussianKernel&&) noexcept;

  double tau() const;
  const Grid& grid() const;

  /// out = G_tau * in (periodic). Throws ConfigError on size mismatch.
  void convolve(std::span<const double> in, std::span<double> out) const;
  std::vector<double> convolve(std::span<const double> in) const;

  /// The symbol exp(-tau |k|^2) in the r2c half-spectrum layout.
  std::vector<double> spectral_multiplier() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Per-phase convolution of a multi-phase field; phases run in parallel.
void convolve_phases(const GaussianKernel& kernel, const MultiField& in,
                     MultiField& out);

}  // namespace foam
