#include "foam/convolution.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>

#include "foam/errors.hpp"
#include "foam/par.hpp"

namespace foam {

namespace {

// FFTW's planner is not thread-safe; executing plans on fresh arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwRealDeleter {
  void operator()(double* p) const { fftw_free(p); }
};
struct FftwComplexDeleter {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double[], FftwRealDeleter>;
using ComplexBuf = std::unique_ptr<fftw_complex[], FftwComplexDeleter>;

RealBuf alloc_real(std::int64_t n) {
  return RealBuf(fftw_alloc_real(size_t(n)));
}
ComplexBuf alloc_complex(std::int64_t n) {
  return ComplexBuf(fftw_alloc_complex(size_t(n)));
}

}  // namespace

struct GaussianKernel::Impl {
  Grid grid;
  double tau = 0.0;
  std::int64_t n_real = 0;
  std::int64_t n_complex = 0;
  // Symbol scaled by 1/N to fold in the FFTW round-trip normalization.
  std::vector<double> scaled_symbol;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;

  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
  }
};

GaussianKernel::GaussianKernel(const Grid& g, double tau)
    : impl_(std::make_unique<Impl>()) {
  g.validate();
  if (!(tau > 0.0)) throw ParamError("kernel tau must be > 0");
  impl_->grid = g;
  impl_->tau = tau;
  impl_->n_real = g.cell_count();

  const int r = g.rank;
  std::array<int, 3> n{g.dims[0], g.dims[1], g.dims[2]};
  const int last = n[r - 1];
  const int last_c = last / 2 + 1;
  std::int64_t nc = last_c;
  for (int a = 0; a < r - 1; ++a) nc *= n[a];
  impl_->n_complex = nc;

  // Signed frequency k = 2 pi m / L per axis, m in [-n/2, n/2].
  auto freq = [&](int a, int idx) {
    int m = idx <= n[a] / 2 ? idx : idx - n[a];
    double L = n[a] * g.spacing[a];
    return 2.0 * M_PI * m / L;
  };

  impl_->scaled_symbol.resize(size_t(nc));
  const double inv_n = 1.0 / double(impl_->n_real);
  std::int64_t w = 0;
  if (r == 2) {
    for (int i0 = 0; i0 < n[0]; ++i0) {
      double k0 = freq(0, i0);
      for (int i1 = 0; i1 < last_c; ++i1) {
        double k1 = freq(1, i1);
        impl_->scaled_symbol[size_t(w++)] =
            std::exp(-tau * (k0 * k0 + k1 * k1)) * inv_n;
      }
    }
  } else {
    for (int i0 = 0; i0 < n[0]; ++i0) {
      double k0 = freq(0, i0);
      for (int i1 = 0; i1 < n[1]; ++i1) {
        double k1 = freq(1, i1);
        for (int i2 = 0; i2 < last_c; ++i2) {
          double k2 = freq(2, i2);
          impl_->scaled_symbol[size_t(w++)] =
              std::exp(-tau * (k0 * k0 + k1 * k1 + k2 * k2)) * inv_n;
        }
      }
    }
  }

  auto in = alloc_real(impl_->n_real);
  auto spec = alloc_complex(impl_->n_complex);
  std::lock_guard lock(planner_mutex());
  impl_->fwd = fftw_plan_dft_r2c(r, n.data(), in.get(), spec.get(),
                                 FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  impl_->bwd = fftw_plan_dft_c2r(r, n.data(), spec.get(), in.get(),
                                 FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
  if (!impl_->fwd || !impl_->bwd) throw Error("fftw plan creation failed");
}

GaussianKernel::~GaussianKernel() = default;
GaussianKernel::GaussianKernel(GaussianKernel&&) noexcept = default;
GaussianKernel& GaussianKernel::operator=(GaussianKernel&&) noexcept = default;

double GaussianKernel::tau() const { return impl_->tau; }
const Grid& GaussianKernel::grid() const { return impl_->grid; }

std::vector<double> GaussianKernel::spectral_multiplier() const {
  std::vector<double> m(impl_->scaled_symbol);
  const double n = double(impl_->n_real);
  for (auto& x : m) x *= n;
  return m;
}

void GaussianKernel::convolve(std::span<const double> in,
                              std::span<double> out) const {
  if (std::int64_t(in.size()) != impl_->n_real ||
      std::int64_t(out.size()) != impl_->n_real)
    throw ConfigError("convolve: field size does not match kernel grid");

  auto real = alloc_real(impl_->n_real);
  auto spec = alloc_complex(impl_->n_complex);
  std::copy(in.begin(), in.end(), real.get());
  fftw_execute_dft_r2c(impl_->fwd, real.get(), spec.get());
  par::complex_scale({&spec[0][0], size_t(2 * impl_->n_complex)},
                     impl_->scaled_symbol);
  fftw_execute_dft_c2r(impl_->bwd, spec.get(), real.get());
  std::copy(real.get(), real.get() + impl_->n_real, out.begin());
}

std::vector<double> GaussianKernel::convolve(std::span<const double> in) const {
  std::vector<double> out(in.size());
  convolve(in, out);
  return out;
}

void convolve_phases(const GaussianKernel& kernel, const MultiField& in,
                     MultiField& out) {
  if (out.n_phases != in.n_phases || !(out.geom == in.geom))
    throw ConfigError("convolve_phases: field shapes disagree");
  const int np = in.n_phases;
#pragma omp parallel for schedule(dynamic) num_threads(par::thread_count())
  for (int p = 0; p < np; ++p) kernel.convolve(in.phase(p), out.phase(p));
}

}  // namespace foam
