#pragma once

#include <cstddef>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bvtk/grid.hpp"
#include "bvtk/kernel.hpp"
#include "bvtk/sweep.hpp"
#include "bvtk/variation.hpp"
#include "bvtk/young.hpp"

namespace bvtk {

/// t -> int_0^xi k(t, s) ds on t_grid.
SampledFunction primitive(const Kernel& k, double xi, const Grid& t_grid);

/// t -> int_a^b k(t, s) ds on t_grid.
SampledFunction window_integral(const Kernel& k, double a, double b, const Grid& t_grid);

/// (Kx)(t) = int_0^1 k(t, s) x(s) ds for t on t_grid, with x extended between
/// its samples by `ext` (default: x(s) = x(t_{j-1}) on [t_{j-1}, t_j)).
/// Exact for every kernel form.
SampledFunction apply_K(const Kernel& k, const SampledFunction& x, const Grid& t_grid,
                        Extension ext = Extension::left_value, Execution exec = Execution::serial);

/// (Kx)(t) = x(1) int_0^1 k(t, s) ds - (RS) int_0^1 F_xi(t) dx(xi), with the
/// Stieltjes sum over x's grid refined `refine_levels` times (x carried over
/// by `ext`). Exact for left_value on any refinement; for the other
/// conventions the gap to apply_K shrinks like the refined spacing.
SampledFunction apply_K_via_representation(const Kernel& k, const SampledFunction& x, const Grid& t_grid,
                                           Extension ext = Extension::left_value, unsigned refine_levels = 0,
                                           Execution exec = Execution::serial);

struct DiagnosticOptions {
  double tol = 1e-9;  ///< bisection tolerance (mu and the Luxemburg norms)
  Execution exec = Execution::parallel;
  SearchOptions search{};
};

struct MuStar {
  bool unbounded = false;  ///< every F_xi has zero Phi-variation
  double value = std::numeric_limits<double>::infinity();
  double argmax_xi = 0.0;       ///< xi where var_Phi(mu F_xi) is largest at `value`
  double max_variation = 0.0;   ///< that largest value (<= 1)
};

/// Largest mu (within tol, certified from below) with
/// max_xi var_Phi(mu F_xi) <= 1, by bisection in mu.
MuStar mu_star(const Kernel& k, const YoungSequence& seq, const Grid& t_grid, const Grid& xi_grid,
               const DiagnosticOptions& opts = {});

struct H3Table {
  std::vector<double> ladder;                     ///< distinct window lengths, increasing
  std::vector<double> omega;                      ///< omega(ladder[i])
  std::vector<double> eps;                        ///< requested epsilons, as given
  std::vector<double> delta;                      ///< delta(eps[i]); 0 when no ladder value qualifies
  std::vector<GridInterval> argmax_window;        ///< xi-grid window attaining omega(ladder[i])

  /// delta(1) computed from the table (not necessarily in eps).
  double delta_at(double e) const;
};

/// omega(delta) = max over xi-grid windows [a, b] with b - a <= delta of the
/// Luxemburg norm of t -> int_a^b k(t, s) ds; delta(eps) = largest ladder
/// length with omega <= eps.
H3Table h3_modulus(const Kernel& k, const YoungSequence& seq, const Grid& t_grid, const Grid& xi_grid,
                   std::span<const double> eps, const DiagnosticOptions& opts = {});

/// int_0^1 |k(0, s)| ds + 2 / mu. mu may be +infinity.
double operator_bound_M(const Kernel& k, double mu);

struct H2FromH3 {
  bool applicable = false;  ///< delta(1) > 0
  std::size_t n = 0;        ///< ceil(1 / delta(1))
  double mu = 0.0;          ///< 1 / n
  double worst_variation = 0.0;
  double worst_xi = 0.0;
  bool pass = false;
};

/// Checks var_Phi(F_xi / n) <= 1 + slack at every xi-grid point, n = ceil(1 / delta1).
H2FromH3 h3_implies_h2_check(const Kernel& k, const YoungSequence& seq, const Grid& t_grid, const Grid& xi_grid,
                             double delta1, double slack = 1e-9, const DiagnosticOptions& opts = {});

struct LevelDiagnostics {
  std::size_t level = 0;
  std::size_t points = 0;  ///< size of the t-grid (= xi-grid)
  MuStar mu;
  double M = 0.0;
  H3Table h3;
  H2FromH3 h2_check;
};

struct KernelDiagnostics {
  std::vector<LevelDiagnostics> levels;
  std::string h2_verdict;
  std::string h3_verdict;
};

struct DiagnoseConfig {
  std::size_t base_cells = 8;  ///< builtin kernels start on a uniform grid with this many cells
  std::size_t depth = 2;       ///< dyadic refinements after the base level
  std::vector<double> eps{0.05, 0.1, 0.25, 0.5, 1.0};
  DiagnosticOptions options{};
};

/// Grid used at refinement level `level`: the kernel's native t-grid refined,
/// or a uniform grid for builtin kernels.
Grid diagnostic_grid(const Kernel& k, const DiagnoseConfig& cfg, std::size_t level);

/// Runs mu_star, M, h3_modulus and the H3 => H2 check at each level and reads
/// off refinement trends. A finite grid always "passes"; only the trend says
/// anything about the continuum kernel.
KernelDiagnostics diagnose_kernel(const Kernel& k, const YoungSequence& seq, const DiagnoseConfig& cfg = {});

void write_kernel_report(std::ostream& out, const KernelDiagnostics& d);

}  // namespace bvtk
