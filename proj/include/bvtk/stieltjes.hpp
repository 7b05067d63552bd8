#pragma once

#include <cstddef>
#include <functional>

#include "bvtk/grid.hpp"
#include "bvtk/young.hpp"

namespace bvtk {

enum class RSScheme { right_endpoint };

struct RSIntegralValue {
  double value = 0.0;
  Grid partition = Grid::uniform(1);  ///< common refinement of both grids
  RSScheme scheme = RSScheme::right_endpoint;
};

/// sum_j f(t_j) [g(t_j) - g(t_{j-1})] over the union of the two grids. Each
/// function is carried onto the union by `ext`. Exact for f a left-continuous
/// step (ext = right_value); a fixed-grid approximation otherwise.
RSIntegralValue rs_integral(const SampledFunction& f, const SampledFunction& g, Extension ext = Extension::linear);

struct QuadratureOptions {
  double tol = 1e-9;            ///< absolute, on successive dyadic estimates
  std::size_t max_cells = std::size_t{1} << 20;
  std::size_t min_cells = 16;
};

struct QuadratureValue {
  double value = 0.0;
  std::size_t cells = 0;
  bool converged = true;
};

/// Integral over [a, b] of a step function (exact cell sums).
double lebesgue_integral(const StepFunction& f, double a, double b);
/// Integral over [a, b] of the extension of sampled values (exact for each
/// convention: trapezoids for linear, cell sums for the step conventions).
double lebesgue_integral(const SampledFunction& f, double a, double b, Extension ext = Extension::linear);
/// Composite midpoint rule, doubling the cell count until two successive
/// estimates differ by less than tol.
QuadratureValue lebesgue_integral(const std::function<double(double)>& f, double a, double b,
                                  const QuadratureOptions& opts = {});

/// Running primitive F(t_i) = integral of f over [0, t_i], sampled on f's grid.
SampledFunction primitive_of(const StepFunction& f);

/// |(L) int f x - (RS) int x dF| with F the running primitive of f and x read
/// as a left-continuous step (x = x(t_j) on (t_{j-1}, t_j]). The left side is
/// integrated cell by cell over the union grid, the right side is a
/// right-endpoint Stieltjes sum; both are exact, so the residual is rounding.
double check_reduction(const StepFunction& f, const SampledFunction& x);

/// |(RS) int f dg + (RS) int g df - (f(1)g(1) - f(0)g(0))|. Callers assert
/// that f and g have no common discontinuity; samples cannot show it.
double check_parts(const SampledFunction& f, const SampledFunction& g);

/// (RS) int phi(f) dg - phi((RS) int f dg). Requires f >= 0 and g
/// non-decreasing with values in [0, 1]; throws DomainError otherwise.
double check_jensen(const YoungFunction& phi, const SampledFunction& f, const SampledFunction& g);

}  // namespace bvtk
