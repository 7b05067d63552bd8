#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <string>

#include "bvtk/error.hpp"
#include "bvtk/kernel.hpp"
#include "bvtk/operator.hpp"
#include "bvtk/stieltjes.hpp"
#include "bvtk/sweep.hpp"
#include "support.hpp"

using namespace bvtk;

namespace {

std::string data(const std::string& name) {
  const char* dir = std::getenv("BVTK_DATA");
  return std::string(dir ? dir : "tests/data") + "/" + name;
}

Kernel random_grid_kernel(ts::Random& rng, const Grid& t, const Grid& s) {
  std::vector<double> cells(t.size() * s.cells());
  for (auto& c : cells) c = rng.uniform(-2, 2);
  return Kernel::grid_matrix(t, s, std::move(cells));
}

Kernel smooth_separable() {
  const auto grid = Grid::uniform(32);
  return Kernel::separable(SampledFunction::sample(grid, [](double t) { return std::sin(3 * t); }),
                           SampledFunction::sample(grid, [](double s) { return 1 + s * s; }));
}

// Composite midpoint over [a, b] with n cells.
template <class F>
double midpoint(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += f(a + (i + 0.5) * h);
  return sum * h;
}

bool same_bits(const SampledFunction& a, const SampledFunction& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  omp_set_num_threads(4);  // exercise the parallel path even on one core
  doctest::Context ctx(argc, argv);
  return ctx.run();
}

TEST_CASE("row integrals of builtin kernels") {
  const auto v = Kernel::volterra();
  CHECK(v.row_integral(0.6, 0.0, 1.0) == doctest::Approx(0.6));
  CHECK(v.row_integral(0.6, 0.5, 1.0) == doctest::Approx(0.1));
  CHECK(v.row_integral(0.0, 0.0, 1.0) == 0.0);
  CHECK(v.row_first_moment(1.0, 0.0, 1.0) == doctest::Approx(0.5));
  CHECK(Kernel::constant(-3).abs_row_integral(0.2, 0.25, 0.75) == doctest::Approx(1.5));
  CHECK_THROWS_AS(v.row_integral(1.5, 0, 1), DomainError);
  CHECK_THROWS_AS(v.row_integral(0.5, 0.7, 0.2), DomainError);

  const auto k = smooth_separable();
  const auto& sep = std::get<SeparableKernel>(k.form());
  for (double t : {0.0, 0.3, 1.0}) {
    for (auto [a, b] : {std::pair{0.0, 1.0}, std::pair{0.1, 0.45}}) {
      const double g = sep.g.eval(t);
      CHECK(k.row_integral(t, a, b) == doctest::Approx(g * midpoint([&](double s) { return sep.h.eval(s); }, a, b, 1 << 14)).epsilon(1e-8));
      CHECK(k.row_first_moment(t, a, b) ==
            doctest::Approx(g * midpoint([&](double s) { return s * sep.h.eval(s); }, a, b, 1 << 14)).epsilon(1e-8));
    }
  }
}

TEST_CASE("row integrals of grid-matrix kernels") {
  ts::Random rng(40);
  const auto t = harness::random_grid(rng, 5);
  const auto s = harness::random_grid(rng, 7);
  const auto k = random_grid_kernel(rng, t, s);
  const auto& m = std::get<GridMatrixKernel>(k.form());
  for (std::size_t row = 0; row < t.size(); ++row) {
    const double tt = t[row];
    auto f = [&](double x) { return m.at(row, s.cell_of(x)); };
    CHECK(k.row_integral(tt, 0.0, 1.0) == doctest::Approx(midpoint(f, 0, 1, 1 << 16)).epsilon(1e-4));
    CHECK(k.abs_row_integral(tt, 0.2, 0.9) ==
          doctest::Approx(midpoint([&](double x) { return std::abs(f(x)); }, 0.2, 0.9, 1 << 16)).epsilon(1e-4));
  }
  // rows are steps in t: halfway to the next point still uses the row at t_i
  CHECK(k.row_integral(0.5 * (t[1] + t[2]), 0, 1) == k.row_integral(t[1], 0, 1));
  CHECK_THROWS_AS(Kernel::grid_matrix(t, s, std::vector<double>(t.size() * s.cells(), std::nan(""))), KernelError);
  CHECK_THROWS_AS(Kernel::grid_matrix(t, s, std::vector<double>(3, 1.0)), ParameterError);
}

TEST_CASE("kernel parsing and files") {
  CHECK(parse_kernel("volterra").name() == "volterra");
  CHECK(parse_kernel("constant:c=2.5").row_integral(0.3, 0, 1) == 2.5);
  const auto sep = parse_kernel("separable:g=" + data("sep_g.txt") + ",h=" + data("sep_h.txt"));
  // g(1) = 2, int h = 0.125 + 0.5625
  CHECK(sep.row_integral(1.0, 0, 1) == doctest::Approx(2 * 0.6875));
  const auto gm = parse_kernel(data("grid_kernel.txt"));
  REQUIRE(gm.native_grid() != nullptr);
  CHECK(gm.row_integral(1.0, 0, 1) == doctest::Approx(1.0));
  CHECK(gm.row_integral(0.5, 0, 1) == doctest::Approx(0.5));
  CHECK_THROWS_AS(parse_kernel("constant:k=1"), ParameterError);
  CHECK_THROWS_AS(parse_kernel("nosuch"), ParameterError);

  std::istringstream bad("t 0 1\ns 0 0.5 1\n1 2\n3 x\n");
  try {
    read_grid_matrix_kernel(bad);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  std::istringstream inf("t 0 1\ns 0 1\n1\ninf\n");
  CHECK_THROWS_AS(read_grid_matrix_kernel(inf), KernelError);
}

TEST_CASE("primitive examples") {
  const auto grid = Grid::uniform(8);
  const auto F = primitive(Kernel::volterra(), 0.4, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(F[i] == doctest::Approx(std::min(grid[i], 0.4)));
  const auto C = primitive(Kernel::constant(3), 0.25, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(C[i] == doctest::Approx(0.75));
  const auto k = smooth_separable();
  const auto& sep = std::get<SeparableKernel>(k.form());
  const auto S = primitive(k, 0.7, grid);
  const double H = lebesgue_integral(sep.h, 0, 0.7);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(S[i] == doctest::Approx(sep.g.eval(grid[i]) * H));
  const auto W = window_integral(Kernel::volterra(), 0.25, 0.5, grid);
  CHECK(W[1] == 0.0);
  CHECK(W[3] == doctest::Approx(0.125));
  CHECK(W[8] == doctest::Approx(0.25));
}

TEST_CASE("apply_K examples") {
  const auto grid = Grid::uniform(16);
  const auto one = SampledFunction::constant(grid, 1.0);
  const auto Kc = apply_K(Kernel::constant(1), one, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(Kc[i] == doctest::Approx(1.0).epsilon(1e-15));
  const auto Kv = apply_K(Kernel::volterra(), one, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(std::abs(Kv[i] - grid[i]) <= 1e-15);

  ts::Random rng(3);
  const auto k = random_grid_kernel(rng, Grid::uniform(4), harness::random_grid(rng, 5));
  const auto c = SampledFunction::constant(harness::random_grid(rng, 3), -1.25);
  const auto Kk = apply_K(k, c, grid);
  for (std::size_t i = 0; i < grid.size(); ++i) CHECK(Kk[i] == doctest::Approx(-1.25 * k.row_integral(grid[i], 0, 1)));
}

TEST_CASE("apply_K against direct quadrature") {
  ts::Random rng(17);
  const auto grid = Grid::uniform(10);
  const auto k = smooth_separable();
  const auto& sep = std::get<SeparableKernel>(k.form());
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = harness::random_function(rng, harness::random_grid(rng, 1 + rng.index(8)));
    for (const auto ext : {Extension::linear, Extension::left_value, Extension::right_value}) {
      const auto Kv = apply_K(Kernel::volterra(), x, grid, ext);
      const auto Ks = apply_K(k, x, grid, ext);
      const double hx = midpoint([&](double s) { return sep.h.eval(s) * x.eval(s, ext); }, 0, 1, 1 << 16);
      for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(Kv[i] == doctest::Approx(lebesgue_integral(x, 0, grid[i], ext)).epsilon(1e-13));
        CHECK(std::abs(Ks[i] - sep.g.eval(grid[i]) * hx) <= 1e-3);
      }
    }
  }
}

TEST_CASE("representation route") {
  ts::Random rng(23);
  for (int trial = 0; trial < 40; ++trial) {
    const auto sg = harness::random_grid(rng, 1 + rng.index(6));
    const auto k = random_grid_kernel(rng, harness::random_grid(rng, 1 + rng.index(6)), sg);
    // step input on a grid aligned with the kernel cells
    const auto x = harness::random_function(rng, Grid::merge(sg, harness::random_grid(rng, 3)), 2.0);
    const auto t = harness::random_grid(rng, 7);
    const auto a = apply_K(k, x, t);
    const auto b = apply_K_via_representation(k, x, t);
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-12);
  }
  const auto x = SampledFunction::constant(Grid::uniform(3), 2.0);
  const auto a = apply_K(smooth_separable(), x, Grid::uniform(5), Extension::linear);
  const auto b = apply_K_via_representation(smooth_separable(), x, Grid::uniform(5), Extension::linear);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]));

  // linear convention: the gap shrinks with refinement
  const auto xi = SampledFunction::sample(Grid::uniform(8), [](double s) { return s; });
  const auto grid = Grid::uniform(4);
  const auto exact = apply_K(Kernel::volterra(), xi, grid, Extension::linear);
  double prev = 1.0;
  for (unsigned r : {0u, 2u, 4u, 6u}) {
    const auto rep = apply_K_via_representation(Kernel::volterra(), xi, grid, Extension::linear, r);
    double gap = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) gap = std::max(gap, std::abs(rep[i] - exact[i]));
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev <= 1e-3);
}

TEST_CASE("mu_star, M and the modulus for the volterra kernel") {
  const auto J = YoungSequence::jordan();
  const auto g = Grid::uniform(16);
  DiagnosticOptions o;
  o.tol = 1e-10;
  const auto mu = mu_star(Kernel::volterra(), J, g, g, o);
  CHECK_FALSE(mu.unbounded);
  CHECK(std::abs(mu.value - 1.0) <= 1e-6);
  CHECK(mu.value <= 1.0);
  CHECK(operator_bound_M(Kernel::volterra(), mu.value) == doctest::Approx(2.0).epsilon(1e-9));

  const std::vector<double> eps{0.1, 0.3, 0.5, 1.0};
  const auto h3 = h3_modulus(Kernel::volterra(), J, g, g, eps, o);
  for (std::size_t i = 0; i < h3.ladder.size(); ++i) CHECK(std::abs(h3.omega[i] - h3.ladder[i]) <= 1e-9);
  for (std::size_t i = 0; i < eps.size(); ++i) CHECK(std::abs(h3.delta[i] - eps[i]) <= 1.0 / 16);
  CHECK(h3.delta_at(1.0) == 1.0);

  const auto c = h3_implies_h2_check(Kernel::volterra(), J, g, g, 1.0);
  CHECK(c.applicable);
  CHECK(c.n == 1);
  CHECK(c.pass);
}

TEST_CASE("degenerate kernels") {
  const auto J = YoungSequence::jordan();
  const auto g = Grid::uniform(8);
  const auto zero = Kernel::constant(0);
  CHECK(mu_star(zero, J, g, g).unbounded);
  CHECK(mu_star(Kernel::constant(2), J, g, g).unbounded);
  CHECK(operator_bound_M(zero, 0.5) == 4.0);
  CHECK(operator_bound_M(Kernel::constant(-3), 2.0) == doctest::Approx(4.0));
  CHECK(operator_bound_M(zero, std::numeric_limits<double>::infinity()) == 0.0);
  CHECK_THROWS_AS(operator_bound_M(zero, 0.0), ParameterError);
  const std::vector<double> eps{0.1, 1.0};
  const auto h3 = h3_modulus(zero, J, g, g, eps);
  for (double w : h3.omega) CHECK(w == 0.0);
  for (double d : h3.delta) CHECK(d == 1.0);
  CHECK(h3_implies_h2_check(zero, J, g, g, 1.0).pass);
}

TEST_CASE("separable kernel diagnostics") {
  const auto k = smooth_separable();
  const auto seq = YoungSequence::wiener(2);
  DiagnoseConfig cfg;
  cfg.depth = 2;
  const auto d = diagnose_kernel(k, seq, cfg);
  REQUIRE(d.levels.size() == 3);
  for (const auto& l : d.levels) {
    CHECK_FALSE(l.mu.unbounded);
    if (l.h2_check.applicable) CHECK(l.h2_check.pass);
    // omega is non-decreasing in the window length and vanishes with it
    for (std::size_t i = 1; i < l.h3.omega.size(); ++i) CHECK(l.h3.omega[i] >= l.h3.omega[i - 1]);
  }
  CHECK(d.levels.back().h3.omega.front() < d.levels.front().h3.omega.front());
  CHECK(d.h3_verdict.rfind("collapsing", 0) == 0);
}

TEST_CASE("grid-matrix diagnostics refine the native grid") {
  const auto k = parse_kernel(data("grid_kernel.txt"));
  DiagnoseConfig cfg;
  cfg.depth = 1;
  CHECK(diagnostic_grid(k, cfg, 0).size() == 5);
  CHECK(diagnostic_grid(k, cfg, 1).size() == 9);
  const auto d = diagnose_kernel(k, YoungSequence::jordan(), cfg);
  CHECK(d.levels.size() == 2);
  std::ostringstream out;
  write_kernel_report(out, d);
  CHECK(out.str().find("trend h3") != std::string::npos);
}

TEST_CASE("serial and parallel runs agree bit for bit") {
  REQUIRE(sweep_threads() > 1);
  ts::Random rng(8);
  const auto g = Grid::uniform(16);
  const auto k = random_grid_kernel(rng, harness::random_grid(rng, 6), harness::random_grid(rng, 6));
  const auto x = harness::random_function(rng, harness::random_grid(rng, 9));
  CHECK(same_bits(apply_K(k, x, g, Extension::linear, Execution::serial),
                  apply_K(k, x, g, Extension::linear, Execution::parallel)));
  CHECK(same_bits(apply_K_via_representation(k, x, g, Extension::left_value, 2, Execution::serial),
                  apply_K_via_representation(k, x, g, Extension::left_value, 2, Execution::parallel)));

  const auto seq = YoungSequence::schramm({1, -1}, 2);
  DiagnosticOptions s;
  s.exec = Execution::serial;
  DiagnosticOptions p;
  p.exec = Execution::parallel;
  const auto ms = mu_star(k, seq, g, g, s);
  const auto mp = mu_star(k, seq, g, g, p);
  CHECK(ms.value == mp.value);
  CHECK(ms.argmax_xi == mp.argmax_xi);
  const std::vector<double> eps{0.1, 0.5, 1.0};
  const auto hs = h3_modulus(k, seq, g, g, eps, s);
  const auto hp = h3_modulus(k, seq, g, g, eps, p);
  CHECK(hs.omega == hp.omega);
  CHECK(hs.delta == hp.delta);
  CHECK(hs.argmax_window == hp.argmax_window);
}

TEST_CASE("sweep rethrows the lowest failing index") {
  for (const auto exec : {Execution::serial, Execution::parallel}) {
    try {
      sweep(exec, 50, [](std::size_t i) {
        if (i % 7 == 3) throw ParameterError("at " + std::to_string(i));
      });
      FAIL("expected a throw");
    } catch (const ParameterError& e) {
      CHECK(std::string(e.what()) == "at 3");
    }
  }
  CHECK(parse_execution("serial") == Execution::serial);
  CHECK_THROWS(parse_execution("threads"));
}
