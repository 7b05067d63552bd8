#include "bvtk/stieltjes.hpp"

#include <algorithm>
#include <cmath>

#include "bvtk/error.hpp"

namespace bvtk {

namespace {

void check_range(double a, double b) {
  if (a > b) throw DomainError("integration bounds must satisfy a <= b");
  if (a < 0.0 || b > 1.0) throw DomainError("integration bounds must lie in [0, 1]");
}

double rs_sum(std::span<const double> f, std::span<const double> g) {
  double total = 0.0;
  for (std::size_t j = 1; j < f.size(); ++j) total += f[j] * (g[j] - g[j - 1]);
  return total;
}

}  // namespace

RSIntegralValue rs_integral(const SampledFunction& f, const SampledFunction& g, Extension ext) {
  Grid u = Grid::merge(f.grid(), g.grid());
  const auto fr = f.resample(u, ext);
  const auto gr = g.resample(u, ext);
  RSIntegralValue out;
  out.value = rs_sum(fr.values(), gr.values());
  out.partition = std::move(u);
  return out;
}

double lebesgue_integral(const StepFunction& f, double a, double b) {
  check_range(a, b);
  const Grid& g = f.grid();
  double total = 0.0;
  for (std::size_t j = 0; j < g.cells(); ++j) {
    const double lo = std::max(a, g[j]);
    const double hi = std::min(b, g[j + 1]);
    if (hi > lo) total += f.cells()[j] * (hi - lo);
  }
  return total;
}

double lebesgue_integral(const SampledFunction& f, double a, double b, Extension ext) {
  check_range(a, b);
  const Grid& g = f.grid();
  double total = 0.0;
  for (std::size_t j = 0; j < g.cells(); ++j) {
    const double lo = std::max(a, g[j]);
    const double hi = std::min(b, g[j + 1]);
    if (!(hi > lo)) continue;
    double v = 0.0;
    switch (ext) {
      case Extension::left_value:
        v = f[j];
        break;
      case Extension::right_value:
        v = f[j + 1];
        break;
      case Extension::linear: {
        const double mid = 0.5 * (lo + hi);
        const double w = (mid - g[j]) / (g[j + 1] - g[j]);
        v = f[j] + w * (f[j + 1] - f[j]);
        break;
      }
    }
    total += v * (hi - lo);
  }
  return total;
}

QuadratureValue lebesgue_integral(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureOptions& opts) {
  check_range(a, b);
  if (!(opts.tol > 0.0)) throw ParameterError("quadrature tolerance must be positive");
  if (opts.min_cells == 0 || opts.max_cells < opts.min_cells) throw ParameterError("bad quadrature cell limits");
  QuadratureValue out;
  if (a == b) return out;

  auto midpoint = [&](std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += f(a + (static_cast<double>(i) + 0.5) * h);
    return s * h;
  };

  std::size_t n = opts.min_cells;
  double prev = midpoint(n);
  while (2 * n <= opts.max_cells) {
    n *= 2;
    const double cur = midpoint(n);
    if (!std::isfinite(cur)) {
      out.value = cur;
      out.cells = n;
      out.converged = false;
      return out;
    }
    if (std::abs(cur - prev) < opts.tol) {
      out.value = cur;
      out.cells = n;
      return out;
    }
    prev = cur;
  }
  out.value = prev;
  out.cells = n;
  out.converged = false;
  return out;
}

SampledFunction primitive_of(const StepFunction& f) {
  const Grid& g = f.grid();
  std::vector<double> v(g.size(), 0.0);
  for (std::size_t j = 0; j < g.cells(); ++j) v[j + 1] = v[j] + f.cells()[j] * (g[j + 1] - g[j]);
  return SampledFunction(g, std::move(v));
}

double check_reduction(const StepFunction& f, const SampledFunction& x) {
  const Grid u = Grid::merge(f.grid(), x.grid());

  // (L) side: on each union cell both f and the left-continuous x are constant.
  double lebesgue = 0.0;
  for (std::size_t j = 0; j < u.cells(); ++j) {
    const double xv = x.eval(u[j + 1], Extension::right_value);
    lebesgue += lebesgue_integral(f, u[j], u[j + 1]) * xv;
  }

  // (RS) side: F is piecewise linear, so sampling it on the union grid is exact.
  const auto F = primitive_of(f).resample(u, Extension::linear);
  const auto xr = x.resample(u, Extension::right_value);
  const double stieltjes = rs_sum(xr.values(), F.values());
  return std::abs(lebesgue - stieltjes);
}

double check_parts(const SampledFunction& f, const SampledFunction& g) {
  const Grid u = Grid::merge(f.grid(), g.grid());
  const auto fr = f.resample(u);
  const auto gr = g.resample(u);
  const std::size_t m = u.size() - 1;
  const double boundary = fr[m] * gr[m] - fr[0] * gr[0];
  return std::abs(rs_sum(fr.values(), gr.values()) + rs_sum(gr.values(), fr.values()) - boundary);
}

double check_jensen(const YoungFunction& phi, const SampledFunction& f, const SampledFunction& g) {
  for (double v : f.values()) {
    if (v < 0.0) throw DomainError("jensen: f must be non-negative");
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] < 0.0 || g[i] > 1.0) throw DomainError("jensen: g must take values in [0, 1]");
    if (i > 0 && g[i] < g[i - 1]) throw DomainError("jensen: g must be non-decreasing");
  }
  // phi is applied after resampling so that both sides use the same tags.
  const Grid u = Grid::merge(f.grid(), g.grid());
  const auto fr = f.resample(u);
  const auto gr = g.resample(u);
  std::vector<double> pf(fr.size());
  for (std::size_t i = 0; i < fr.size(); ++i) pf[i] = phi(fr[i]);
  return rs_sum(pf, gr.values()) - phi(rs_sum(fr.values(), gr.values()));
}

}  // namespace bvtk
