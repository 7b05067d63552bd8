#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bvtk/grid.hpp"

namespace bvtk {

/// k(t, s) = 1 for s <= t, else 0.
struct VolterraKernel {};

/// k(t, s) = c.
struct ConstantKernel {
  double c = 0.0;
};

/// k(t, s) = g(t) h(s); both factors piecewise linear between their samples.
struct SeparableKernel {
  SampledFunction g;
  SampledFunction h;
};

/// Cell values on (t-grid points) x (s-grid cells). Row i is used for
/// t in [t_i, t_{i+1}) and the last row at t = 1; along s each row is constant
/// on the cells of the s-grid.
struct GridMatrixKernel {
  Grid t_grid;
  Grid s_grid;
  std::vector<double> cells;  ///< row-major, t_grid.size() rows of s_grid.cells() values

  double at(std::size_t row, std::size_t cell) const { return cells[row * s_grid.cells() + cell]; }
};

class Kernel {
 public:
  using Form = std::variant<VolterraKernel, ConstantKernel, SeparableKernel, GridMatrixKernel>;

  static Kernel volterra();
  static Kernel constant(double c);
  static Kernel separable(SampledFunction g, SampledFunction h);
  /// Throws KernelError when a cell is not finite (a row fails integrability).
  static Kernel grid_matrix(Grid t_grid, Grid s_grid, std::vector<double> cells);

  const Form& form() const noexcept { return form_; }
  std::string name() const noexcept { return name_; }

  /// int_a^b k(t, s) ds, exact.
  double row_integral(double t, double a, double b) const;
  /// int_a^b s k(t, s) ds, exact.
  double row_first_moment(double t, double a, double b) const;
  /// int_a^b |k(t, s)| ds, exact.
  double abs_row_integral(double t, double a, double b) const;

  /// Grid on which the kernel is natively resolved (grid-matrix t-grid), if any.
  const Grid* native_grid() const noexcept;

 private:
  Kernel(Form f, std::string name) : form_(std::move(f)), name_(std::move(name)) {}
  Form form_;
  std::string name_;
};

/// Text format:
///   t <t_0> <t_1> ... <t_n>
///   s <s_0> <s_1> ... <s_m>
///   followed by n+1 rows of m values (row i is k(t_i, .) on the s-cells).
/// '#' starts a comment. "nan" and "inf" are read, then rejected as H1
/// violations with KernelError.
Kernel read_grid_matrix_kernel(std::istream& in);
Kernel load_grid_matrix_kernel(const std::string& path);

/// `volterra`, `constant:c=<real>`, `separable:g=<file>,h=<file>`, or a path
/// to a grid-matrix file.
Kernel parse_kernel(std::string_view spec);

}  // namespace bvtk
