#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace bvtk {

/// Strictly increasing points 0 = t_0 < t_1 < ... < t_m = 1, m >= 1.
class Grid {
 public:
  explicit Grid(std::vector<double> points);

  /// `cells` equal cells on [0, 1].
  static Grid uniform(std::size_t cells);
  /// Union of the points of both grids.
  static Grid merge(const Grid& a, const Grid& b);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t cells() const noexcept { return points_.size() - 1; }
  double operator[](std::size_t i) const { return points_[i]; }
  std::span<const double> points() const noexcept { return points_; }

  /// Index of the grid point within `tol` of t, if any.
  std::optional<std::size_t> find(double t, double tol = 1e-12) const;
  /// Index of the grid point nearest to t.
  std::size_t nearest(double t) const;
  /// Index i of the cell [t_i, t_{i+1}) containing t (the last cell is closed).
  std::size_t cell_of(double t) const;

  /// Inserts 2^levels - 1 equally spaced points into every cell.
  Grid refined(unsigned levels) const;

  bool operator==(const Grid& other) const = default;

 private:
  std::vector<double> points_;
};

/// How a sampled function is read between its grid points.
enum class Extension {
  linear,       ///< piecewise-linear interpolant
  left_value,   ///< x(s) = x(t_{j-1}) on [t_{j-1}, t_j): right-continuous step
  right_value,  ///< x(s) = x(t_j) on (t_{j-1}, t_j]: left-continuous step
};

/// Grid values x(t_0), ..., x(t_m).
class SampledFunction {
 public:
  SampledFunction(Grid grid, std::vector<double> values);

  static SampledFunction sample(Grid grid, const std::function<double(double)>& f);
  static SampledFunction constant(Grid grid, double c);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }

  double eval(double t, Extension ext = Extension::linear) const;
  SampledFunction resample(const Grid& target, Extension ext = Extension::linear) const;

  SampledFunction scaled(double factor) const;
  SampledFunction abs() const;
  double max_abs() const;
  /// max_i x_i - min_i x_i: the largest increment over any grid interval.
  double spread() const;

  friend SampledFunction operator+(const SampledFunction& a, const SampledFunction& b);
  friend SampledFunction operator-(const SampledFunction& a, const SampledFunction& b);

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Piecewise-constant function: one value per grid cell [t_{j-1}, t_j).
class StepFunction {
 public:
  StepFunction(Grid grid, std::vector<double> cell_values);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> cells() const noexcept { return cells_; }
  double eval(double t) const;

 private:
  Grid grid_;
  std::vector<double> cells_;
};

/// Closed interval [t_lo, t_hi] between grid indices, lo < hi.
struct GridInterval {
  std::size_t lo = 0;
  std::size_t hi = 0;

  bool operator==(const GridInterval&) const = default;
  auto operator<=>(const GridInterval&) const = default;
};

/// Empty intersection or a single shared endpoint.
constexpr bool non_overlapping(const GridInterval& a, const GridInterval& b) noexcept {
  return a.hi <= b.lo || b.hi <= a.lo;
}

/// All m(m+1)/2 non-degenerate intervals of a grid with m cells.
std::vector<GridInterval> all_grid_intervals(std::size_t points);

/// Two-column text: "<t> <x(t)>" per line, '#' comments, first point 0,
/// last point 1, points strictly increasing. Errors carry the line number.
SampledFunction read_sampled_function(std::istream& in);
SampledFunction load_sampled_function(const std::string& path);
void write_sampled_function(std::ostream& out, const SampledFunction& x);

}  // namespace bvtk
