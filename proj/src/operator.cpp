#include "bvtk/operator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <ostream>

#include "bvtk/error.hpp"
#include "bvtk/stieltjes.hpp"
#include "text.hpp"

namespace bvtk {

namespace {

void check_xi(double xi) {
  if (!(xi >= 0.0 && xi <= 1.0)) throw DomainError("xi must lie in [0, 1]");
}

// Per-probe evaluators for xi -> var_Phi(mu F_xi), reused across the bisection.
class PrimitiveFamily {
 public:
  PrimitiveFamily(const Kernel& k, const YoungSequence& seq, const Grid& t_grid, const Grid& xi_grid,
                  const DiagnosticOptions& opts)
      : xi_grid_(xi_grid), exec_(opts.exec), probes_(xi_grid.size()) {
    sweep(exec_, xi_grid.size(), [&](std::size_t i) {
      probes_[i] = std::make_unique<ScaledVariation>(primitive(k, xi_grid[i], t_grid), seq, IntervalFamily::all(),
                                                     opts.search);
    });
    for (const auto& p : probes_) {
      if (!p->trivial()) trivial_ = false;
    }
  }

  bool trivial() const { return trivial_; }

  // max over xi of var_Phi(mu F_xi); ties keep the smallest xi
  std::pair<double, std::size_t> max_at(double mu) {
    std::vector<double> v(probes_.size(), 0.0);
    sweep(exec_, probes_.size(), [&](std::size_t i) {
      if (!probes_[i]->trivial()) v[i] = probes_[i]->at(mu).value;
    });
    std::size_t arg = 0;
    for (std::size_t i = 1; i < v.size(); ++i) {
      if (v[i] > v[arg]) arg = i;
    }
    return {v[arg], arg};
  }

  double xi(std::size_t i) const { return xi_grid_[i]; }

 private:
  const Grid& xi_grid_;
  Execution exec_;
  std::vector<std::unique_ptr<ScaledVariation>> probes_;
  bool trivial_ = true;
};

std::size_t pieces_for(double delta1) {
  // a relative nudge keeps 1 / (1/3 rounded) from counting a fourth piece
  return static_cast<std::size_t>(std::ceil(1.0 / delta1 * (1.0 - 1e-12)));
}

}  // namespace

SampledFunction primitive(const Kernel& k, double xi, const Grid& t_grid) {
  check_xi(xi);
  return window_integral(k, 0.0, xi, t_grid);
}

SampledFunction window_integral(const Kernel& k, double a, double b, const Grid& t_grid) {
  std::vector<double> v(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) v[i] = k.row_integral(t_grid[i], a, b);
  return SampledFunction(t_grid, std::move(v));
}

SampledFunction apply_K(const Kernel& k, const SampledFunction& x, const Grid& t_grid, Extension ext,
                        Execution exec) {
  const Grid& s = x.grid();
  std::vector<double> out(t_grid.size(), 0.0);
  sweep(exec, t_grid.size(), [&](std::size_t i) {
    const double t = t_grid[i];
    double total = 0.0;
    for (std::size_t j = 0; j < s.cells(); ++j) {
      const double r = k.row_integral(t, s[j], s[j + 1]);
      switch (ext) {
        case Extension::left_value:
          total += x[j] * r;
          break;
        case Extension::right_value:
          total += x[j + 1] * r;
          break;
        case Extension::linear: {
          const double slope = (x[j + 1] - x[j]) / (s[j + 1] - s[j]);
          const double m = k.row_first_moment(t, s[j], s[j + 1]);
          total += x[j] * r + slope * (m - s[j] * r);
          break;
        }
      }
    }
    if (!std::isfinite(total)) throw KernelError("(Kx)(t) is not finite at t=" + text::fmt_real(t));
    out[i] = total;
  });
  return SampledFunction(t_grid, std::move(out));
}

SampledFunction apply_K_via_representation(const Kernel& k, const SampledFunction& x, const Grid& t_grid,
                                           Extension ext, unsigned refine_levels, Execution exec) {
  const Grid p = x.grid().refined(refine_levels);
  const auto xr = x.resample(p, ext);
  const double x1 = xr[xr.size() - 1];
  std::vector<double> out(t_grid.size(), 0.0);
  sweep(exec, t_grid.size(), [&](std::size_t i) {
    const double t = t_grid[i];
    std::vector<double> F(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) F[j] = k.row_integral(t, 0.0, p[j]);
    const SampledFunction Ft(p, std::move(F));
    out[i] = x1 * Ft[Ft.size() - 1] - rs_integral(Ft, xr).value;
  });
  return SampledFunction(t_grid, std::move(out));
}

MuStar mu_star(const Kernel& k, const YoungSequence& seq, const Grid& t_grid, const Grid& xi_grid,
               const DiagnosticOptions& opts) {
  if (!(opts.tol > 0.0)) throw ParameterError("mu_star tolerance must be positive");
  PrimitiveFamily fam(k, seq, t_grid, xi_grid, opts);
  MuStar out;
  if (fam.trivial()) {
    out.unbounded = true;
    return out;
  }

  double spread = 0.0;
  for (std::size_t i = 0; i < xi_grid.size(); ++i) spread = std::max(spread, primitive(k, xi_grid[i], t_grid).spread());
  auto feasible = [&](double mu) { return fam.max_at(mu).first <= 1.0; };

  double lo = 0.0;
  double hi = 0.0;
  const double start = 1.0 / spread;
  if (feasible(start)) {
    lo = start;
    hi = 2 * start;
    while (feasible(hi)) {
      lo = hi;
      hi *= 2;
      if (!std::isfinite(hi)) throw BudgetError("mu_star bracket diverged");
    }
  } else {
    hi = start;
    lo = start / 2;
    while (!feasible(lo)) {
      hi = lo;
      lo /= 2;
      if (lo == 0.0) throw BudgetError("mu_star bracket collapsed to 0");
    }
  }
  while (hi - lo > opts.tol) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (feasible(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const auto [v, arg] = fam.max_at(lo);
  out.value = lo;
  out.max_variation = v;
  out.argmax_xi = fam.xi(arg);
  return out;
}

double H3Table::delta_at(double e) const {
  double d = 0.0;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (omega[i] <= e) d = ladder[i];
  }
  return d;
}

H3Table h3_modulus(const Kernel& k, const YoungSequence& seq, const Grid& t_grid, const Grid& xi_grid,
                   std::span<const double> eps, const DiagnosticOptions& opts) {
  for (double e : eps) {
    if (!(e > 0.0)) throw ParameterError("epsilon values must be positive");
  }
  const auto windows = all_grid_intervals(xi_grid.size());
  std::vector<double> norm(windows.size(), 0.0);
  sweep(opts.exec, windows.size(), [&](std::size_t w) {
    const auto g = window_integral(k, xi_grid[windows[w].lo], xi_grid[windows[w].hi], t_grid);
    norm[w] = luxemburg(g, seq, IntervalFamily::all(), opts.tol, opts.search);
  });

  // Window lengths that agree to 1e-12 are one ladder rung (uniform grids
  // produce the same length with different roundings).
  std::vector<double> lengths(windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w) lengths[w] = xi_grid[windows[w].hi] - xi_grid[windows[w].lo];
  std::vector<double> sorted = lengths;
  std::sort(sorted.begin(), sorted.end());
  H3Table out;
  for (double l : sorted) {
    if (out.ladder.empty() || l - out.ladder.back() > 1e-12) {
      out.ladder.push_back(l);
    } else {
      out.ladder.back() = l;
    }
  }
  const std::size_t rungs = out.ladder.size();
  std::vector<double> rung_max(rungs, 0.0);
  std::vector<std::size_t> rung_arg(rungs, windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto it = std::lower_bound(out.ladder.begin(), out.ladder.end(), lengths[w] - 1e-12);
    const auto r = static_cast<std::size_t>(it - out.ladder.begin());
    if (rung_arg[r] == windows.size() || norm[w] > rung_max[r]) {
      rung_max[r] = norm[w];
      rung_arg[r] = w;
    }
  }
  out.omega.resize(rungs);
  out.argmax_window.resize(rungs);
  double running = -1.0;
  std::size_t arg = 0;
  for (std::size_t r = 0; r < rungs; ++r) {
    if (rung_max[r] > running) {
      running = rung_max[r];
      arg = rung_arg[r];
    }
    out.omega[r] = running;
    out.argmax_window[r] = windows[arg];
  }
  out.eps.assign(eps.begin(), eps.end());
  for (double e : eps) out.delta.push_back(out.delta_at(e));
  return out;
}

double operator_bound_M(const Kernel& k, double mu) {
  if (!(mu > 0.0)) throw ParameterError("operator bound needs mu > 0");
  return k.abs_row_integral(0.0, 0.0, 1.0) + 2.0 / mu;
}

H2FromH3 h3_implies_h2_check(const Kernel& k, const YoungSequence& seq, const Grid& t_grid, const Grid& xi_grid,
                             double delta1, double slack, const DiagnosticOptions& opts) {
  H2FromH3 out;
  if (!(delta1 > 0.0)) return out;
  out.applicable = true;
  out.n = pieces_for(delta1);
  out.mu = 1.0 / static_cast<double>(out.n);
  PrimitiveFamily fam(k, seq, t_grid, xi_grid, opts);
  const auto [v, arg] = fam.max_at(out.mu);
  out.worst_variation = v;
  out.worst_xi = fam.xi(arg);
  out.pass = v <= 1.0 + slack;
  return out;
}

Grid diagnostic_grid(const Kernel& k, const DiagnoseConfig& cfg, std::size_t level) {
  if (const Grid* g = k.native_grid()) return g->refined(static_cast<unsigned>(level));
  if (cfg.base_cells == 0) throw ParameterError("base_cells must be positive");
  return Grid::uniform(cfg.base_cells << level);
}

KernelDiagnostics diagnose_kernel(const Kernel& k, const YoungSequence& seq, const DiagnoseConfig& cfg) {
  if (cfg.depth > 8) throw ParameterError("refinement depth is capped at 8");
  KernelDiagnostics out;
  for (std::size_t level = 0; level <= cfg.depth; ++level) {
    const Grid g = diagnostic_grid(k, cfg, level);
    LevelDiagnostics d;
    d.level = level;
    d.points = g.size();
    d.mu = mu_star(k, seq, g, g, cfg.options);
    d.M = operator_bound_M(k, d.mu.value);
    d.h3 = h3_modulus(k, seq, g, g, cfg.eps, cfg.options);
    d.h2_check = h3_implies_h2_check(k, seq, g, g, d.h3.delta_at(1.0), 1e-9, cfg.options);
    out.levels.push_back(std::move(d));
  }

  const auto& first = out.levels.front();
  const auto& last = out.levels.back();
  const bool all_unbounded =
      std::all_of(out.levels.begin(), out.levels.end(), [](const LevelDiagnostics& d) { return d.mu.unbounded; });
  if (all_unbounded) {
    out.h2_verdict = "holds: every F_xi has zero variation at every level (mu* unbounded)";
  } else if (out.levels.size() < 2) {
    out.h2_verdict = "no trend: single level";
  } else {
    const auto& prev = out.levels[out.levels.size() - 2];
    const double ratio = last.mu.value / prev.mu.value;
    out.h2_verdict = ratio >= 0.9 ? "stable: mu* settles near " + text::fmt_real(last.mu.value) + ", consistent with H2"
                                  : "decaying: mu* keeps shrinking under refinement, H2 doubtful";
  }

  // omega at one cell: windows shrink to zero length only under refinement
  const double w0 = first.h3.omega.front();
  const double w1 = last.h3.omega.front();
  if (w1 == 0.0) {
    out.h3_verdict = "collapsing: omega vanishes at the finest level, consistent with H3";
  } else if (out.levels.size() < 2) {
    out.h3_verdict = "no trend: single level";
  } else if (w1 <= 0.75 * w0) {
    out.h3_verdict = "collapsing: omega(one cell) falls from " + text::fmt_real(w0) + " to " + text::fmt_real(w1) +
                     ", consistent with H3";
  } else {
    out.h3_verdict = "not collapsing: omega(one cell) stays near " + text::fmt_real(w1) + ", H3 doubtful";
  }
  return out;
}

void write_kernel_report(std::ostream& out, const KernelDiagnostics& d) {
  using text::fmt_real;
  for (const auto& l : d.levels) {
    out << "level " << l.level << " points " << l.points << '\n';
    if (l.mu.unbounded) {
      out << "  mu* unbounded\n";
    } else {
      out << "  mu* " << fmt_real(l.mu.value) << " (max var " << fmt_real(l.mu.max_variation) << " at xi "
          << fmt_real(l.mu.argmax_xi) << ")\n";
    }
    out << "  M " << fmt_real(l.M) << '\n';
    out << "  omega(delta)\n";
    for (std::size_t i = 0; i < l.h3.ladder.size(); ++i) {
      out << "    " << fmt_real(l.h3.ladder[i]) << ' ' << fmt_real(l.h3.omega[i]) << '\n';
    }
    out << "  delta(eps)\n";
    for (std::size_t i = 0; i < l.h3.eps.size(); ++i) {
      out << "    " << fmt_real(l.h3.eps[i]) << ' ' << fmt_real(l.h3.delta[i]) << '\n';
    }
    const auto& c = l.h2_check;
    if (c.applicable) {
      out << "  h3=>h2 n " << c.n << " mu " << fmt_real(c.mu) << " worst var " << fmt_real(c.worst_variation)
          << " at xi " << fmt_real(c.worst_xi) << ' ' << (c.pass ? "PASS" : "FAIL") << '\n';
    } else {
      out << "  h3=>h2 not applicable (delta(1) = 0)\n";
    }
  }
  out << "trend h2: " << d.h2_verdict << '\n';
  out << "trend h3: " << d.h3_verdict << '\n';
}

}  // namespace bvtk
