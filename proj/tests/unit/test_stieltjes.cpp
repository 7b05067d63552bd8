#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bvtk/error.hpp"
#include "bvtk/stieltjes.hpp"
#include "support.hpp"

using namespace bvtk;

TEST_CASE("rs_integral examples") {
  ts::Random rng(1);
  const auto g = harness::random_function(rng, harness::random_grid(rng, 9));
  const auto c = SampledFunction::constant(harness::random_grid(rng, 5), 2.5);
  CHECK(rs_integral(c, g).value == doctest::Approx(2.5 * (g[g.size() - 1] - g[0])).epsilon(1e-14));
  CHECK(rs_integral(g, SampledFunction::constant(Grid::uniform(3), -1.0)).value == 0.0);

  // right-endpoint sum of t dt on n cells: (n + 1) / (2n)
  const auto grid = Grid::uniform(999);
  const auto t = SampledFunction::sample(grid, [](double s) { return s; });
  const auto r = rs_integral(t, t);
  CHECK(r.value == doctest::Approx(1000.0 / 1998.0).epsilon(1e-13));
  CHECK(std::abs(r.value - 0.5) <= 1e-3);
  CHECK(r.partition.size() == 1000);
}

TEST_CASE("rs_integral is exact for left-continuous steps") {
  // f = 2 on [0, 0.5], 5 on (0.5, 1]; g = t^2 sampled on a finer grid
  const auto f = ts::on_grid({0, 0.5, 1}, {2, 2, 5});
  const auto g = SampledFunction::sample(Grid::uniform(8), [](double s) { return s * s; });
  CHECK(rs_integral(f, g, Extension::right_value).value == doctest::Approx(2 * 0.25 + 5 * 0.75).epsilon(1e-15));
}

TEST_CASE("lebesgue_integral") {
  const auto one = SampledFunction::constant(Grid::uniform(4), 1.0);
  CHECK(lebesgue_integral(one, 0, 1) == 1.0);
  const auto g = Grid::uniform(10);
  const StepFunction ind(g, {1, 1, 1, 1, 0, 0, 0, 0, 0, 0});  // indicator of [0, 0.4)
  CHECK(lebesgue_integral(ind, 0.25, 0.9) == doctest::Approx(0.15));
  CHECK(lebesgue_integral(ind, 0.5, 0.9) == 0.0);
  const auto s = SampledFunction::sample(Grid::uniform(7), [](double t) { return t; });
  CHECK(lebesgue_integral(s, 0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(lebesgue_integral(s, 0, 1, Extension::left_value) == doctest::Approx(3.0 / 7.0));
  CHECK(lebesgue_integral(s, 0, 1, Extension::right_value) == doctest::Approx(4.0 / 7.0));
  const auto q = lebesgue_integral([](double t) { return t; }, 0.0, 1.0);
  CHECK(q.converged);
  CHECK(std::abs(q.value - 0.5) <= 1e-9);
  const auto e = lebesgue_integral([](double t) { return std::exp(t); }, 0.0, 1.0);
  CHECK(std::abs(e.value - (std::exp(1.0) - 1.0)) <= 1e-8);
}

TEST_CASE("lebesgue_integral of samples agrees with a fine midpoint sum") {
  ts::Random rng(14);
  const int n = 1 << 18;
  for (int trial = 0; trial < 40; ++trial) {
    const auto x = harness::random_function(rng, harness::random_grid(rng, 1 + rng.index(6)));
    double a = rng.uniform();
    double b = rng.uniform();
    if (a > b) std::swap(a, b);
    for (const auto ext : {Extension::linear, Extension::left_value, Extension::right_value}) {
      const double h = (b - a) / n;
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += x.eval(a + (i + 0.5) * h, ext);
      // each of at most 7 jumps of size <= 2 costs at most one cell
      CHECK(std::abs(lebesgue_integral(x, a, b, ext) - sum * h) <= 7 * 2 * h + 1e-12);
    }
  }
}

TEST_CASE("primitive_of") {
  const StepFunction f(Grid({0, 0.25, 1}), {4, -1});
  const auto F = primitive_of(f);
  CHECK(F[0] == 0.0);
  CHECK(F[1] == 1.0);
  CHECK(F[2] == doctest::Approx(0.25));
}

TEST_CASE("check_reduction") {
  const StepFunction one(Grid::uniform(1), {1.0});
  CHECK(check_reduction(one, SampledFunction::constant(Grid::uniform(2), 1.0)) <= 1e-15);
  // f and x on interleaved grids, both sides by hand: x read left-continuously
  const StepFunction f(Grid({0, 0.5, 1}), {2, -1});
  const auto x = ts::on_grid({0, 0.3, 0.8, 1}, {7, 1, 3, 4});
  // int f x = 2*(0.3*1 + 0.2*3) + (-1)*(0.3*3 + 0.2*4)
  CHECK(check_reduction(f, x) <= 1e-15);

  ts::Random rng(31);
  for (int trial = 0; trial < 300; ++trial) {
    const auto fs = harness::random_step(rng, harness::random_grid(rng, 1 + rng.index(30)), 5.0);
    const auto xs = harness::random_function(rng, harness::random_grid(rng, 1 + rng.index(30)), 5.0);
    CHECK(check_reduction(fs, xs) < 1e-10);
  }
}

TEST_CASE("check_parts") {
  const auto grid = Grid::uniform(64);
  const auto t = SampledFunction::sample(grid, [](double s) { return s; });
  // right-endpoint sums give 2 (n + 1) / (2n) - 1 = 1/n
  CHECK(check_parts(t, t) == doctest::Approx(1.0 / 64).epsilon(1e-12));
  const auto c = SampledFunction::constant(Grid::uniform(5), 3.0);
  const auto g = SampledFunction::sample(Grid::uniform(9), [](double s) { return std::sin(4 * s); });
  CHECK(check_parts(c, g) <= 1e-14);
  CHECK(check_parts(g, c) <= 1e-14);
}

TEST_CASE("parts residual is first order") {
  const auto f = [](double s) { return std::sin(3 * s); };
  const auto g = [](double s) { return s * s; };
  double prev = 0.0;
  for (unsigned l = 4; l <= 10; ++l) {
    const auto grid = Grid::uniform(std::size_t{1} << l);
    const double r = check_parts(SampledFunction::sample(grid, f), SampledFunction::sample(grid, g));
    if (l > 4) CHECK(std::log2(prev / r) == doctest::Approx(1.0).epsilon(0.01));
    prev = r;
  }
}

TEST_CASE("check_jensen") {
  const auto phi = YoungFunction::power(1, 2);
  const auto unit = SampledFunction::sample(Grid::uniform(6), [](double s) { return s; });
  CHECK(std::abs(check_jensen(phi, SampledFunction::constant(Grid::uniform(3), 1.7), unit)) <= 1e-12);
  const auto f = SampledFunction::sample(Grid::uniform(11), [](double s) { return 1 + std::cos(5 * s); });
  CHECK(std::abs(check_jensen(YoungFunction::linear(2.5), f, unit)) <= 1e-14);
  CHECK(check_jensen(phi, f, unit) > 0.0);

  CHECK_THROWS_AS(check_jensen(phi, ts::on_uniform({1, -1}), unit), DomainError);
  CHECK_THROWS_AS(check_jensen(phi, f, ts::on_uniform({0.5, 0.2})), DomainError);
  CHECK_THROWS_AS(check_jensen(phi, f, ts::on_uniform({0, 1.5})), DomainError);
}

TEST_CASE("identity suite passes on its default seed and on others") {
  for (std::uint64_t seed : {20240611ULL, 1ULL, 99ULL}) {
    harness::IdentityOptions o;
    o.seed = seed;
    o.n = 400;
    const auto s = harness::run_identity_suite(o);
    CHECK(s.pass());
    CHECK(s.jensen_min >= -1e-8);
    CHECK(s.reduction_max < 1e-10);
  }
  harness::IdentityOptions lin;
  lin.linear_phi = true;
  const auto s = harness::run_identity_suite(lin);
  CHECK(s.jensen_max <= 1e-12);
  CHECK(s.jensen_min >= -1e-12);
}
