#include "bvtk/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>

#include "bvtk/error.hpp"
#include "text.hpp"

namespace bvtk {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_row_args(double t, double a, double b) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("kernel row index t must lie in [0, 1]");
  if (a > b) throw DomainError("integration bounds must satisfy a <= b");
  if (a < 0.0 || b > 1.0) throw DomainError("integration bounds must lie in [0, 1]");
}

// Exact integrals of the piecewise-linear interpolant of h over [a, b].
struct LinearPieces {
  double integral = 0.0;
  double moment = 0.0;
  double abs_integral = 0.0;
};

LinearPieces integrate_linear(const SampledFunction& h, double a, double b) {
  LinearPieces out;
  const Grid& g = h.grid();
  for (std::size_t j = 0; j < g.cells(); ++j) {
    const double lo = std::max(a, g[j]);
    const double hi = std::min(b, g[j + 1]);
    if (!(hi > lo)) continue;
    const double hl = h.eval(lo);
    const double hh = h.eval(hi);
    const double len = hi - lo;
    out.integral += 0.5 * (hl + hh) * len;
    out.moment += len * (lo * (2.0 * hl + hh) + hi * (hl + 2.0 * hh)) / 6.0;
    if ((hl >= 0.0) == (hh >= 0.0)) {
      out.abs_integral += 0.5 * std::abs(hl + hh) * len;
    } else {
      out.abs_integral += len * (hl * hl + hh * hh) / (2.0 * (std::abs(hl) + std::abs(hh)));
    }
  }
  return out;
}

std::size_t matrix_row(const GridMatrixKernel& k, double t) {
  if (t >= 1.0) return k.t_grid.size() - 1;
  return k.t_grid.cell_of(t);
}

template <class CellTerm>
double matrix_sum(const GridMatrixKernel& k, double t, double a, double b, CellTerm term) {
  const std::size_t row = matrix_row(k, t);
  const Grid& s = k.s_grid;
  double total = 0.0;
  for (std::size_t j = 0; j < s.cells(); ++j) {
    const double lo = std::max(a, s[j]);
    const double hi = std::min(b, s[j + 1]);
    if (hi > lo) total += term(k.at(row, j), lo, hi);
  }
  return total;
}

}  // namespace

Kernel Kernel::volterra() { return Kernel(VolterraKernel{}, "volterra"); }

Kernel Kernel::constant(double c) {
  if (!std::isfinite(c)) throw KernelError("constant kernel value is not finite");
  return Kernel(ConstantKernel{c}, "constant:c=" + text::fmt_real(c));
}

Kernel Kernel::separable(SampledFunction g, SampledFunction h) {
  return Kernel(SeparableKernel{std::move(g), std::move(h)}, "separable");
}

Kernel Kernel::grid_matrix(Grid t_grid, Grid s_grid, std::vector<double> cells) {
  const std::size_t rows = t_grid.size();
  const std::size_t cols = s_grid.cells();
  if (cells.size() != rows * cols) {
    throw ParameterError("grid-matrix kernel needs " + std::to_string(rows) + " x " + std::to_string(cols) +
                         " cell values, got " + std::to_string(cells.size()));
  }
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (!std::isfinite(cells[r * cols + c])) {
        throw KernelError("kernel row at t=" + text::fmt_real(t_grid[r]) +
                          " is not integrable: non-finite value in s-cell " + std::to_string(c));
      }
    }
  }
  return Kernel(GridMatrixKernel{std::move(t_grid), std::move(s_grid), std::move(cells)}, "grid-matrix");
}

double Kernel::row_integral(double t, double a, double b) const {
  check_row_args(t, a, b);
  return std::visit(overloaded{
                        [&](const VolterraKernel&) { return std::max(0.0, std::min(b, t) - a); },
                        [&](const ConstantKernel& k) { return k.c * (b - a); },
                        [&](const SeparableKernel& k) { return k.g.eval(t) * integrate_linear(k.h, a, b).integral; },
                        [&](const GridMatrixKernel& k) {
                          return matrix_sum(k, t, a, b, [](double v, double lo, double hi) { return v * (hi - lo); });
                        },
                    },
                    form_);
}

double Kernel::row_first_moment(double t, double a, double b) const {
  check_row_args(t, a, b);
  return std::visit(overloaded{
                        [&](const VolterraKernel&) {
                          const double hi = std::min(b, t);
                          return hi > a ? 0.5 * (hi * hi - a * a) : 0.0;
                        },
                        [&](const ConstantKernel& k) { return 0.5 * k.c * (b * b - a * a); },
                        [&](const SeparableKernel& k) { return k.g.eval(t) * integrate_linear(k.h, a, b).moment; },
                        [&](const GridMatrixKernel& k) {
                          return matrix_sum(k, t, a, b,
                                            [](double v, double lo, double hi) { return 0.5 * v * (hi * hi - lo * lo); });
                        },
                    },
                    form_);
}

double Kernel::abs_row_integral(double t, double a, double b) const {
  check_row_args(t, a, b);
  return std::visit(overloaded{
                        [&](const VolterraKernel&) { return std::max(0.0, std::min(b, t) - a); },
                        [&](const ConstantKernel& k) { return std::abs(k.c) * (b - a); },
                        [&](const SeparableKernel& k) {
                          return std::abs(k.g.eval(t)) * integrate_linear(k.h, a, b).abs_integral;
                        },
                        [&](const GridMatrixKernel& k) {
                          return matrix_sum(k, t, a, b,
                                            [](double v, double lo, double hi) { return std::abs(v) * (hi - lo); });
                        },
                    },
                    form_);
}

const Grid* Kernel::native_grid() const noexcept {
  if (const auto* k = std::get_if<GridMatrixKernel>(&form_)) return &k->t_grid;
  return nullptr;
}

// ---------------------------------------------------------------------------

Kernel read_grid_matrix_kernel(std::istream& in) {
  std::vector<double> t_pts;
  std::vector<double> s_pts;
  std::vector<double> cells;
  std::size_t rows_read = 0;
  std::string line;
  std::size_t lineno = 0;

  auto grid_line = [&](const std::vector<std::string>& tok, std::vector<double>& dst) {
    if (!dst.empty()) throw ParseError("grid '" + tok[0] + "' given twice", lineno);
    if (rows_read > 0) throw ParseError("grids must precede the cell rows", lineno);
    for (std::size_t i = 1; i < tok.size(); ++i) {
      try {
        dst.push_back(text::parse_real(tok[i], "grid point"));
      } catch (const ParameterError& e) {
        throw ParseError(e.what(), lineno);
      }
    }
  };

  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = text::tokens(line);
    if (tok.empty()) continue;
    if (tok[0] == "t") {
      grid_line(tok, t_pts);
      continue;
    }
    if (tok[0] == "s") {
      grid_line(tok, s_pts);
      continue;
    }
    if (t_pts.empty() || s_pts.empty()) throw ParseError("expected 't ...' and 's ...' grid lines first", lineno);
    if (tok.size() + 1 != s_pts.size()) {
      throw ParseError("row needs " + std::to_string(s_pts.size() - 1) + " values, got " + std::to_string(tok.size()),
                       lineno);
    }
    if (rows_read == t_pts.size()) throw ParseError("more rows than t-grid points", lineno);
    for (const auto& v : tok) {
      try {
        cells.push_back(text::parse_real_any(v, "cell value"));
      } catch (const ParameterError& e) {
        throw ParseError(e.what(), lineno);
      }
    }
    ++rows_read;
  }
  if (t_pts.empty() || s_pts.empty()) throw ParseError("missing 't' or 's' grid line", lineno);
  if (rows_read != t_pts.size()) {
    throw ParseError("expected " + std::to_string(t_pts.size()) + " rows, got " + std::to_string(rows_read), lineno);
  }
  Grid tg = [&] {
    try {
      return Grid(std::move(t_pts));
    } catch (const ParameterError& e) {
      throw ParseError(std::string("t-grid: ") + e.what(), 0);
    }
  }();
  Grid sg = [&] {
    try {
      return Grid(std::move(s_pts));
    } catch (const ParameterError& e) {
      throw ParseError(std::string("s-grid: ") + e.what(), 0);
    }
  }();
  return Kernel::grid_matrix(std::move(tg), std::move(sg), std::move(cells));
}

Kernel load_grid_matrix_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'", 0);
  try {
    return read_grid_matrix_kernel(in);
  } catch (const ParseError& e) {
    throw ParseError::in_file(path, e);
  }
}

Kernel parse_kernel(std::string_view spec) {
  const std::string s = text::trim(spec);
  if (s == "volterra") return Kernel::volterra();
  if (s.rfind("constant:", 0) == 0) {
    const std::string arg = s.substr(9);
    if (arg.rfind("c=", 0) != 0) throw ParameterError("constant kernel expects 'constant:c=<real>'");
    return Kernel::constant(text::parse_real(arg.substr(2), "constant kernel value"));
  }
  if (s.rfind("separable:", 0) == 0) {
    std::string g_path;
    std::string h_path;
    for (const auto& part : text::split(s.substr(10), ',')) {
      if (part.rfind("g=", 0) == 0) {
        g_path = part.substr(2);
      } else if (part.rfind("h=", 0) == 0) {
        h_path = part.substr(2);
      } else {
        throw ParameterError("separable kernel expects 'separable:g=<file>,h=<file>'");
      }
    }
    if (g_path.empty() || h_path.empty()) throw ParameterError("separable kernel needs both g= and h= files");
    return Kernel::separable(load_sampled_function(g_path), load_sampled_function(h_path));
  }
  if (std::filesystem::is_regular_file(s)) return load_grid_matrix_kernel(s);
  throw ParameterError("unknown kernel '" + s + "' (volterra, constant:c=, separable:g=,h=, or a grid-matrix file)");
}

}  // namespace bvtk
