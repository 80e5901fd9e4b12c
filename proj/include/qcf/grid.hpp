#pragma once

#include <array>
#include <cstddef>
#include <string>

namespace qcf {

/// Uniform periodic box in two or three dimensions.
///
/// Cells are indexed with x fastest: `idx = i + nx * (j + ny * k)`. Planar
/// grids carry `n[2] == 1` and `h[2] == 1` so that volumes and loops work
/// unchanged. Cell centers sit at `(i + 1/2) h`.
class Grid {
 public:
  static constexpr int min_cells = 8;

  Grid() = default;
  /// Throws shape-error unless dim is 2 or 3, every active axis has at least
  /// `min_cells` cells and every length is positive.
  Grid(int dim, std::array<int, 3> cells, std::array<double, 3> lengths);

  static Grid planar(int nx, int ny, double lx, double ly) { return Grid(2, {nx, ny, 1}, {lx, ly, 1.0}); }
  static Grid cube(int n, double l) { return Grid(3, {n, n, n}, {l, l, l}); }

  int dim() const noexcept { return dim_; }
  int n(int axis) const noexcept { return n_[axis]; }
  double h(int axis) const noexcept { return h_[axis]; }
  double length(int axis) const noexcept { return h_[axis] * n_[axis]; }
  std::size_t size() const noexcept { return size_; }
  double cell_volume() const noexcept;
  double volume() const noexcept { return cell_volume() * static_cast<double>(size_); }
  double min_spacing() const noexcept;

  std::size_t index(int i, int j, int k = 0) const noexcept {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(n_[0]) *
                                             (static_cast<std::size_t>(j) + static_cast<std::size_t>(n_[1]) * k);
  }
  std::array<int, 3> coords(std::size_t idx) const noexcept;
  /// Cell-center position of cell `idx` (z = 0 on planar grids).
  std::array<double, 3> center(std::size_t idx) const noexcept;

  /// Index of the neighbour `offset` cells away along `axis`, with wraparound.
  std::size_t shifted(std::size_t idx, int axis, int offset) const noexcept;

  std::string describe() const;

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.h_ == b.h_;
  }
  friend bool operator!=(const Grid& a, const Grid& b) noexcept { return !(a == b); }

 private:
  int dim_ = 0;
  std::array<int, 3> n_{1, 1, 1};
  std::array<double, 3> h_{1.0, 1.0, 1.0};
  std::size_t size_ = 0;
};

/// Throws shape-error naming `what` when the grids differ.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace qcf
