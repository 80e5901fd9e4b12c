#include "qcf/grid.hpp"

#include <algorithm>
#include <sstream>

#include "qcf/error.hpp"

namespace qcf {

Grid::Grid(int dim, std::array<int, 3> cells, std::array<double, 3> lengths) : dim_(dim) {
  if (dim != 2 && dim != 3) fail(ErrorKind::shape_error, "grid dimension must be 2 or 3, got " + std::to_string(dim));
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      n_[a] = 1;
      h_[a] = 1.0;
      continue;
    }
    if (cells[a] < min_cells)
      fail(ErrorKind::shape_error, "axis " + std::to_string(a) + " needs at least " + std::to_string(min_cells) +
                                       " cells, got " + std::to_string(cells[a]));
    if (!(lengths[a] > 0.0)) fail(ErrorKind::shape_error, "axis " + std::to_string(a) + " length must be positive");
    n_[a] = cells[a];
    h_[a] = lengths[a] / cells[a];
  }
  size_ = static_cast<std::size_t>(n_[0]) * n_[1] * n_[2];
}

double Grid::cell_volume() const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= h_[a];
  return v;
}

double Grid::min_spacing() const noexcept {
  double m = h_[0];
  for (int a = 1; a < dim_; ++a) m = std::min(m, h_[a]);
  return m;
}

std::array<int, 3> Grid::coords(std::size_t idx) const noexcept {
  const int i = static_cast<int>(idx % n_[0]);
  const std::size_t r = idx / n_[0];
  const int j = static_cast<int>(r % n_[1]);
  const int k = static_cast<int>(r / n_[1]);
  return {i, j, k};
}

std::array<double, 3> Grid::center(std::size_t idx) const noexcept {
  const auto c = coords(idx);
  std::array<double, 3> x{};
  for (int a = 0; a < dim_; ++a) x[a] = (c[a] + 0.5) * h_[a];
  return x;
}

std::size_t Grid::shifted(std::size_t idx, int axis, int offset) const noexcept {
  auto c = coords(idx);
  const int n = n_[axis];
  c[axis] = ((c[axis] + offset) % n + n) % n;
  return index(c[0], c[1], c[2]);
}

std::string Grid::describe() const {
  std::ostringstream os;
  os << dim_ << "D " << n_[0] << "x" << n_[1];
  if (dim_ == 3) os << "x" << n_[2];
  return os.str();
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) fail(ErrorKind::shape_error, std::string(what) + ": fields live on different grids (" + a.describe() +
                                               " vs " + b.describe() + ")");
}

}  // namespace qcf
