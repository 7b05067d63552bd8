#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "bvtk/compactness.hpp"
#include "bvtk/error.hpp"
#include "bvtk/operator.hpp"
#include "support.hpp"

using namespace bvtk;

namespace {

constexpr double kTol = 1e-10;

std::vector<GridInterval> random_family(ts::Random& rng, std::size_t points, std::size_t n) {
  const auto every = all_grid_intervals(points);
  std::vector<GridInterval> f;
  for (std::size_t i = 0; i < n; ++i) f.push_back(every[rng.index(every.size())]);
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

std::vector<SampledFunction> jump_family() {
  std::vector<SampledFunction> A;
  const auto g = Grid::uniform(8);
  for (int i = 0; i <= 10; ++i) {
    const double c = i / 10.0;
    A.push_back(SampledFunction::sample(g, [c](double t) { return t >= 0.5 ? c : 0.0; }));
  }
  return A;
}

}  // namespace

TEST_CASE("projection") {
  const auto x = ts::on_uniform({1, 2, 3, 4, 5});
  const auto p = make_projection({{1, 3}, {0, 4}}, YoungSequence::waterman({1, 1}));
  CHECK(p.apply(x) == std::vector<double>{1, 4, 2, 5, 1});
  CHECK(p.sigma == doctest::Approx(1 + 1 + 0.5));
  CHECK(p.bound_factor() == doctest::Approx(6.0));
}

TEST_CASE("seminorm family evaluator") {
  const auto seq = YoungSequence::wiener(2);
  const auto F = SeminormFamily::phi(seq, kTol);
  const auto x = ts::on_uniform({0.5, -1, 0.25});
  CHECK(F(x, IntervalFamily::all()) == norm_phi(x, seq, IntervalFamily::all(), kTol));
  CHECK(F(x, IntervalFamily(std::vector<GridInterval>{})) == 0.5);
  CHECK(F.name() == "phi:wiener:p=2");
}

TEST_CASE("q bound") {
  const auto seq = YoungSequence::schramm({1, -1}, 2);
  const std::vector<GridInterval> J{{0, 2}, {3, 5}};
  CHECK(q_bound_check(SampledFunction::constant(Grid::uniform(5), 0.0), J, seq, kTol) == 0.0);
  CHECK_THROWS_AS(q_bound_check(ts::on_uniform({0, 1}), {}, seq, kTol), ParameterError);

  // large values away from the endpoints of J do not enter either side
  const auto spike = ts::on_uniform({0, 0.01, 50, -0.02, 80, 0.03});
  CHECK(q_bound_check(spike, {{1, 3}, {3, 5}}, seq, kTol) >= -1e-8);

  ts::Random rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto x = harness::random_function(rng, harness::random_grid(rng, 1 + rng.index(10)), 3.0);
    const auto fam = random_family(rng, x.size(), 1 + rng.index(4));
    for (const auto& ns : harness::oracle_sequences()) CHECK(q_bound_check(x, fam, ns.seq, kTol) >= -1e-8);
    CHECK(sup_bound_check(x, YoungSequence::wiener(2), kTol) >= -1e-8);
  }
}

TEST_CASE("Q(x) = 0 forces a zero restricted norm") {
  const auto x = ts::on_uniform({0, 3, 0, -2, 0});
  const std::vector<GridInterval> J{{0, 2}, {2, 4}};
  const auto p = make_projection(J, YoungSequence::jordan());
  for (double v : p.apply(x)) CHECK(v == 0.0);
  CHECK(norm_phi(x, YoungSequence::jordan(), IntervalFamily(J), kTol) == 0.0);
}

TEST_CASE("epsilon net of a bounded sample") {
  const auto seq = YoungSequence::jordan();
  ts::Random rng(50);
  const auto g = Grid::uniform(6);
  std::vector<SampledFunction> ball;
  for (int i = 0; i < 50; ++i) {
    const auto x = harness::random_function(rng, g, 1.0);
    const double n = norm_phi(x, seq, IntervalFamily::all(), kTol);
    ball.push_back(x.scaled(rng.uniform() / n));
  }
  const std::vector<GridInterval> J{{0, 2}, {2, 3}, {4, 6}};
  const double eps = 0.25;
  const auto net = build_epsilon_net(ball, J, seq, eps, kTol);
  const double sigma = 1 + 3.0;
  CHECK(net.cell_side == doctest::Approx(eps / (1 + 2 * sigma)));
  CHECK(net.covers);
  CHECK(net.worst_distance <= eps + kTol);
  const double bound = std::pow(std::ceil(2 * (1 + 2 * sigma) * 2 / eps) + 1, 7);
  CHECK(net.count_bound <= bound);
  CHECK(static_cast<double>(net.members.size()) <= net.count_bound);
  for (std::size_t i = 0; i < ball.size(); ++i) {
    CHECK(norm_phi(ball[i] - ball[net.members[net.nearest[i]]], seq, IntervalFamily(J), kTol) <= eps + kTol);
  }

  const std::vector<SampledFunction> zero{SampledFunction::constant(g, 0.0)};
  const auto z = build_epsilon_net(zero, J, seq, eps, kTol);
  CHECK(z.members == std::vector<std::size_t>{0});
  CHECK(z.worst_distance == 0.0);
}

TEST_CASE("axioms on random samples") {
  ts::Random rng(61);
  const auto g = harness::random_grid(rng, 6);
  std::vector<SampledFunction> samples;
  for (int i = 0; i < 12; ++i) samples.push_back(harness::random_function(rng, g, 1.0));
  for (const auto& ns : harness::oracle_sequences()) {
    AxiomOptions o;
    o.tol = kTol;
    const auto r = check_A1_A2_A5(ns.seq, samples, {{0, 3}, {3, 6}}, 0.5, o);
    CHECK(r.a1_pass);
    CHECK(r.a2_pass);
    CHECK(r.a2_checks == 12 * 2 * o.a2_pairs);
    CHECK(r.a5_pass);
    CHECK(r.pass());
  }
}

TEST_CASE("dyadic pool") {
  const auto g = Grid::uniform(8);
  const auto p0 = dyadic_pool(g, 0);
  REQUIRE(p0.size() == 1);
  CHECK(p0[0] == GridInterval{0, 8});
  const auto p2 = dyadic_pool(g, 2);
  // 1 + 2 + 4 dyadic and 0 + 1 + 3 shifted
  CHECK(p2.size() == 11);
  CHECK(std::find(p2.begin(), p2.end(), GridInterval{2, 6}) != p2.end());
  for (const auto& I : p2) CHECK(I.lo < I.hi);
  CHECK_THROWS_AS(dyadic_pool(g, 21), ParameterError);
}

TEST_CASE("equinormed search: trivial and jump families") {
  const auto seq = YoungSequence::jordan();
  EquinormOptions o;
  o.tol = kTol;
  const std::vector<SampledFunction> single{ts::on_uniform({0, 1, 0})};
  const auto s = equinormed_search(single, seq, 0.1, dyadic_pool(Grid::uniform(2), 2), o);
  REQUIRE(s.certificate);
  CHECK(s.certificate->family.empty());
  CHECK_THROWS_AS(equinormed_search({}, seq, 0.1, {}, o), ParameterError);

  const auto A = jump_family();
  const std::vector<GridInterval> pool{{2, 6}};
  for (double eps : {0.5, 0.1, 0.01}) {
    const auto r = equinormed_search(A, seq, eps, pool, o);
    REQUIRE(r.certificate);
    CHECK(r.certificate->family == pool);
    CHECK(r.certificate->valid());
    const auto chk = verify_certificate(A, seq, *r.certificate, kTol, 2 * kTol);
    CHECK(chk.valid);
    CHECK(chk.max_disagreement <= 2 * kTol);
  }
  // the default pool also certifies, through a coarser interval
  const auto d = equinormed_search(A, YoungSequence::wiener(2), 0.05, dyadic_pool(A.front().grid(), 3), o);
  REQUIRE(d.certificate);
  CHECK(verify_certificate(A, YoungSequence::wiener(2), *d.certificate, kTol, 2 * kTol).valid);
}

TEST_CASE("equinormed search fails on dyadic steps") {
  const auto g = Grid::uniform(32);
  std::vector<SampledFunction> R;
  for (int n = 1; n <= 5; ++n) {
    R.push_back(SampledFunction::sample(g, [n](double t) {
      const auto k = static_cast<long long>(std::min(t * std::ldexp(1.0, n), std::ldexp(1.0, n) - 1));
      return k % 2 == 0 ? 1.0 : -1.0;
    }));
  }
  EquinormOptions o;
  o.tol = kTol;
  o.max_family = 4;
  const auto r = equinormed_search(R, YoungSequence::jordan(), 0.05, dyadic_pool(g, 3), o);
  CHECK_FALSE(r.certificate);
  CHECK(r.margin > 0.0);
  CHECK(r.worst_i != r.worst_j);
  CHECK_FALSE(r.note.empty());
  std::ostringstream out;
  write_certificate(out, r, R);
  CHECK(out.str().find("not proof") != std::string::npos);
}

TEST_CASE("certificate checks catch a forged family") {
  const auto A = jump_family();
  EquinormCertificate forged{0.01, {{0, 2}}, -0.01, 0, 1};
  const auto chk = verify_certificate(A, YoungSequence::jordan(), forged, kTol, 2 * kTol);
  CHECK_FALSE(chk.valid);
  CHECK(chk.margin > 0.5);
}

TEST_CASE("helly selection") {
  const auto g = Grid::uniform(4);
  const auto f = ts::on_uniform({0.2, -0.3, 0.1, 0.4, 0});
  std::vector<SampledFunction> same(5, f);
  auto h = helly_select(same, 2.0, 1e-6);
  CHECK(h.indices.size() == 5);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(h.limit[i] == f[i]);

  std::vector<SampledFunction> shrink;
  for (int n = 1; n <= 40; ++n) shrink.push_back(f.scaled(1.0 / n));
  h = helly_select(shrink, 2.0, 0.05);
  CHECK(std::is_sorted(h.indices.begin(), h.indices.end()));
  CHECK(h.limit.max_abs() <= 0.05);

  const auto other = ts::on_uniform({-0.2, 0.3, 0.5, 0.1, 0.1});
  std::vector<SampledFunction> alt;
  for (int n = 0; n < 10; ++n) alt.push_back(n % 2 == 0 ? f : other);
  h = helly_select(alt, 2.0, 1e-6);
  REQUIRE(h.indices.size() == 5);
  for (std::size_t k = 1; k < h.indices.size(); ++k) CHECK(h.indices[k] - h.indices[k - 1] == 2);
  for (const auto i : h.indices) {
    for (std::size_t p = 0; p < g.size(); ++p) CHECK(alt[i][p] == h.limit[p]);
  }
  CHECK_THROWS_AS(helly_select(alt, 0.1, 1e-6), ParameterError);
}

TEST_CASE("operator demo") {
  const auto seq = YoungSequence::jordan();
  const auto grid = Grid::uniform(256);
  const auto xs = shrinking_support_sequence(grid, 64);
  for (const auto& x : xs) CHECK(bv_norm(x) <= 1.0);
  const auto zero = compactness_equiv_demo(Kernel::constant(0), seq, xs, grid, kTol, 1e-3);
  for (double v : zero.image_norms) CHECK(v == 0.0);
  CHECK(zero.decays);
  CHECK(zero.first_below == 0);

  const auto r = compactness_equiv_demo(Kernel::volterra(), seq, xs, grid, kTol, 0.05);
  for (std::size_t v = 1; v <= xs.size(); ++v) CHECK(r.image_norms[v - 1] <= 2.0 / static_cast<double>(v));
  CHECK(r.decays);

  std::vector<SampledFunction> big{SampledFunction::constant(grid, 2.0)};
  CHECK_THROWS_AS(compactness_equiv_demo(Kernel::volterra(), seq, big, grid, kTol, 0.05), ParameterError);
}

TEST_CASE("equinormed search does not depend on the execution mode") {
  const auto A = jump_family();
  EquinormOptions s;
  s.tol = kTol;
  s.exec = Execution::serial;
  EquinormOptions p = s;
  p.exec = Execution::parallel;
  const auto pool = dyadic_pool(A.front().grid(), 3);
  const auto a = equinormed_search(A, YoungSequence::wiener(2), 0.05, pool, s);
  const auto b = equinormed_search(A, YoungSequence::wiener(2), 0.05, pool, p);
  CHECK(a.family == b.family);
  CHECK(a.margin == b.margin);
  CHECK(a.steps == b.steps);
}
