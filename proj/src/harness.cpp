#include "bvtk/harness.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "bvtk/error.hpp"

namespace bvtk::harness {

Grid random_grid(Random& rng, std::size_t cells) {
  if (cells == 0) throw ParameterError("random grid needs at least one cell");
  std::vector<double> gaps(cells);
  double total = 0.0;
  for (auto& g : gaps) {
    g = rng.uniform(0.2, 1.0);
    total += g;
  }
  std::vector<double> pts(cells + 1, 0.0);
  double run = 0.0;
  for (std::size_t i = 0; i + 1 < cells; ++i) {
    run += gaps[i];
    pts[i + 1] = run / total;
  }
  pts[cells] = 1.0;
  return Grid(std::move(pts));
}

SampledFunction random_function(Random& rng, const Grid& grid, double amplitude) {
  std::vector<double> v(grid.size());
  for (auto& x : v) x = rng.uniform(-amplitude, amplitude);
  return SampledFunction(grid, std::move(v));
}

StepFunction random_step(Random& rng, const Grid& grid, double amplitude) {
  std::vector<double> v(grid.cells());
  for (auto& x : v) x = rng.uniform(-amplitude, amplitude);
  return StepFunction(grid, std::move(v));
}

SampledFunction random_distribution(Random& rng, const Grid& grid) {
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t i = 1; i < v.size(); ++i) v[i] = v[i - 1] + (rng.uniform() < 0.3 ? 0.0 : rng.uniform());
  const double mass = rng.uniform(0.1, 1.0);
  const double top = v.back();
  const double offset = rng.uniform(0.0, 1.0 - mass);
  for (auto& x : v) x = offset + (top > 0.0 ? mass * x / top : 0.0);
  for (auto& x : v) x = std::clamp(x, 0.0, 1.0);
  return SampledFunction(grid, std::move(v));
}

YoungFunction random_young(Random& rng) {
  if (rng.uniform() < 0.3) return YoungFunction::power(rng.uniform(0.2, 3.0), rng.uniform(1.0, 4.0));
  const std::size_t pieces = 1 + rng.index(4);
  std::vector<double> breaks{0.0};
  std::vector<double> slopes;
  double slope = rng.uniform(0.05, 1.0);
  for (std::size_t i = 0; i < pieces; ++i) {
    slopes.push_back(slope);
    slope += rng.uniform(0.0, 2.0);
    if (i + 1 < pieces) breaks.push_back(breaks.back() + rng.uniform(0.1, 1.0));
  }
  return YoungFunction::piecewise(std::move(breaks), std::move(slopes));
}

IdentitySuite run_identity_suite(const IdentityOptions& opts) {
  Random rng(opts.seed);
  IdentitySuite s;
  s.instances = opts.n;
  s.jensen_min = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < opts.n; ++i) {
    const auto fgrid = random_grid(rng, 1 + rng.index(24));
    const auto xgrid = random_grid(rng, 1 + rng.index(24));
    const double r = check_reduction(random_step(rng, fgrid, 3.0), random_function(rng, xgrid, 3.0));
    s.reduction_max = std::max(s.reduction_max, r);
    if (!(r < opts.reduction_tol)) ++s.reduction_fail;

    const auto phi = opts.linear_phi ? YoungFunction::linear(rng.uniform(0.1, 3.0)) : random_young(rng);
    const auto jg = random_grid(rng, 1 + rng.index(40));
    auto f = random_function(rng, jg, 2.0).abs();
    const double m = check_jensen(phi, f, random_distribution(rng, random_grid(rng, 1 + rng.index(40))));
    s.jensen_min = std::min(s.jensen_min, m);
    s.jensen_max = std::max(s.jensen_max, m);
    if (!(m >= -opts.jensen_tol)) ++s.jensen_fail;
  }
  if (opts.n == 0) s.jensen_min = 0.0;

  using Fn = std::function<double(double)>;
  const std::vector<std::pair<Fn, Fn>> pairs{
      {[](double t) { return t; }, [](double t) { return t; }},
      {[](double t) { return std::sin(3 * t); }, [](double t) { return t * t; }},
      {[](double t) { return std::exp(t); }, [](double t) { return std::cos(2 * t); }},
      {[](double t) { return std::sin(7 * t + 1); }, [](double t) { return std::cos(5 * t); }},
      {[](double t) { return t * t * t; }, [](double t) { return std::sqrt(1 + t); }},
  };
  if (opts.parts_max_level <= opts.parts_min_level) throw ParameterError("parts refinement needs two levels");
  for (const auto& [f, g] : pairs) {
    std::vector<double> lh;
    std::vector<double> lr;
    for (unsigned l = opts.parts_min_level; l <= opts.parts_max_level; ++l) {
      const auto grid = Grid::uniform(std::size_t{1} << l);
      lh.push_back(-static_cast<double>(l));
      lr.push_back(std::log2(check_parts(SampledFunction::sample(grid, f), SampledFunction::sample(grid, g))));
    }
    const std::size_t n = lh.size();
    const double finest = lr[n - 2] - lr[n - 1];
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      mx += lh[i] / static_cast<double>(n);
      my += lr[i] / static_cast<double>(n);
    }
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sxy += (lh[i] - mx) * (lr[i] - my);
      sxx += (lh[i] - mx) * (lh[i] - mx);
    }
    s.parts_orders.push_back(finest);
    s.parts_fit.push_back(sxy / sxx);
    if (!(finest >= 1.0 - opts.order_guard)) ++s.parts_fail;
  }
  return s;
}

std::vector<NamedSequence> oracle_sequences() {
  const CoefficientRule lambda_n{1.0, 1.0};
  const CoefficientRule inv_n{1.0, -1.0};
  return {
      {"jordan", YoungSequence::jordan()},
      {"wiener:p=2", YoungSequence::wiener(2.0)},
      {"waterman:lambda=n", YoungSequence::waterman(lambda_n)},
      {"schramm:c=1/n,p=2", YoungSequence::schramm(inv_n, 2.0)},
      {"custom:two-piece", YoungSequence::custom({YoungFunction::piecewise({0.0, 2.0}, {1.0, 10.0}),
                                                  YoungFunction::piecewise({0.0, 1.0, 2.0}, {0.1, 1.5, 1.5})})},
  };
}

OracleSuite run_oracle_suite(const OracleOptions& opts) {
  if (opts.max_points < 2) throw ParameterError("oracle grids need at least two points");
  Random rng(opts.seed);
  const auto seqs = oracle_sequences();
  SearchOptions search;
  if (opts.exact) {
    search.extremal_pruning = false;
    search.tie_tolerance = 0.0;
  }
  OracleSuite s;
  s.trials = opts.n;
  for (std::size_t i = 0; i < opts.n; ++i) {
    const std::size_t cells = 1 + i % (opts.max_points - 1);
    const auto grid = rng.uniform() < 0.5 ? Grid::uniform(cells) : random_grid(rng, cells);
    const auto x = random_function(rng, grid, 2.0);
    for (const auto& [label, seq] : seqs) {
      const double a = phi_var(x, seq, search).value;
      const double b = phi_var_oracle(x, seq, grid.cells(), opts.max_points).value;
      ++s.comparisons;
      const double rel = b != 0.0 ? std::abs(a - b) / std::abs(b) : std::abs(a);
      s.worst_rel = std::max(s.worst_rel, rel);
      const bool ok = opts.exact ? a == b : rel <= opts.rel_tol;
      if (!ok) s.mismatches.push_back({i, label, a, b});
    }
  }
  return s;
}

}  // namespace bvtk::harness
