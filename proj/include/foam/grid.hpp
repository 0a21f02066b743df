#pragma once

#include <array>
#include <cstdint>

namespace foam {

/// Uniform Cartesian grid with cell-centered samples. Storage order is
/// row-major: axis 0 slowest, last axis fastest. The domain is periodic;
/// cell (0,...,0) is centered at `origin` and the box spans
/// [origin - h/2, origin - h/2 + dims*h) along each axis.
struct Grid {
  int rank = 2;  // 2 or 3
  std::array<int, 3> dims{1, 1, 1};
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  std::array<double, 3> origin{0.0, 0.0, 0.0};

  /// 2D square grid of n x n cells over [0, length]^2.
  static Grid square(int n, double length);
  /// 3D cubic grid of n^3 cells over [0, length]^3.
  static Grid cube(int n, double length);

  std::int64_t cell_count() const {
    return std::int64_t(dims[0]) * dims[1] * dims[2];
  }
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < rank; ++a) v *= spacing[a];
    return v;
  }
  double domain_volume() const { return cell_volume() * double(cell_count()); }
  std::array<double, 3> lengths() const {
    return {dims[0] * spacing[0], dims[1] * spacing[1], dims[2] * spacing[2]};
  }

  std::int64_t index(int i0, int i1, int i2 = 0) const {
    return (std::int64_t(i0) * dims[1] + i1) * dims[2] + i2;
  }
  std::array<int, 3> coords(std::int64_t idx) const {
    int i2 = int(idx % dims[2]);
    std::int64_t r = idx / dims[2];
    return {int(r / dims[1]), int(r % dims[1]), i2};
  }
  std::array<double, 3> cell_center(std::int64_t idx) const {
    auto c = coords(idx);
    return {origin[0] + c[0] * spacing[0], origin[1] + c[1] * spacing[1],
            origin[2] + c[2] * spacing[2]};
  }

  bool operator==(const Grid&) const = default;

  /// Throws ParamError unless extents >= 4 on active axes, spacing > 0,
  /// rank in {2,3}, and trailing axes are degenerate (dims = 1).
  void validate() const;
};

}  // namespace foam
