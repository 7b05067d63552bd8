#include "bvtk/compactness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

#include "bvtk/assignment.hpp"
#include "bvtk/error.hpp"
#include "bvtk/harness.hpp"
#include "bvtk/operator.hpp"
#include "text.hpp"

namespace bvtk {

namespace {

void require_common_grid(const std::vector<SampledFunction>& xs, const char* what) {
  for (const auto& x : xs) {
    if (!(x.grid() == xs.front().grid())) throw ParameterError(std::string(what) + ": functions must share one grid");
  }
}

std::vector<std::pair<std::size_t, std::size_t>> all_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> p;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) p.emplace_back(i, j);
  }
  return p;
}

// V_J(s d) by listing every non-overlapping sub-collection of J.
double enumerated_V(const SampledFunction& d, const std::vector<GridInterval>& family, const YoungSequence& seq,
                    double scale) {
  std::vector<GridInterval> fam = family;
  std::sort(fam.begin(), fam.end());
  fam.erase(std::unique(fam.begin(), fam.end()), fam.end());
  if (fam.size() > 20) throw BudgetError("direct enumeration is limited to 20 intervals");
  double best = 0.0;
  const std::uint64_t subsets = std::uint64_t{1} << fam.size();
  std::vector<double> inc;
  for (std::uint64_t mask = 1; mask < subsets; ++mask) {
    inc.clear();
    std::size_t end = 0;
    bool ok = true;
    for (std::size_t b = 0; b < fam.size() && ok; ++b) {
      if (!(mask >> b & 1U)) continue;
      if (fam[b].lo < end) ok = false;  // sorted by lo: overlap with the previous pick
      end = fam[b].hi;
      const double v = std::abs(d[fam[b].hi] - d[fam[b].lo]) * scale;
      if (v > 0.0) inc.push_back(v);
    }
    if (!ok || inc.empty()) continue;
    best = std::max(best, best_assignment(inc, seq).value);
  }
  return best;
}

}  // namespace

SearchOptions exact_search_options() {
  SearchOptions o;
  o.tie_tolerance = 0.0;
  return o;
}

SeminormFamily SeminormFamily::phi(const YoungSequence& seq, double tol, const SearchOptions& opts) {
  return SeminormFamily("phi:" + seq.name(), [seq, tol, opts](const SampledFunction& x, const IntervalFamily& f) {
    return norm_phi(x, seq, f, tol, opts);
  });
}

std::vector<double> Projection::apply(const SampledFunction& x) const {
  std::vector<double> q;
  q.reserve(2 * family.size() + 1);
  q.push_back(x[0]);
  for (const auto& I : family) {
    q.push_back(x[I.hi]);
    q.push_back(x[I.lo]);
  }
  return q;
}

Projection make_projection(std::vector<GridInterval> family, const YoungSequence& seq) {
  Projection p;
  p.family = std::move(family);
  p.sigma = 1.0;
  for (std::size_t n = 1; n <= p.family.size(); ++n) p.sigma += seq.eval(n, 1.0);
  return p;
}

double q_bound_check(const SampledFunction& x, const std::vector<GridInterval>& family, const YoungSequence& seq,
                     double tol, const SearchOptions& opts) {
  if (family.empty()) throw ParameterError("q_bound_check needs a non-empty family");
  const auto p = make_projection(family, seq);
  double qmax = 0.0;
  for (double v : p.apply(x)) qmax = std::max(qmax, std::abs(v));
  return p.bound_factor() * qmax - norm_phi(x, seq, IntervalFamily(family), tol, opts);
}

double sup_bound_check(const SampledFunction& x, const YoungSequence& seq, double tol, const SearchOptions& opts) {
  const double c = 1.0 + seq.at(1).inverse(1.0);
  return c * norm_phi(x, seq, IntervalFamily::all(), tol, opts) - x.max_abs();
}

EpsilonNet build_epsilon_net(const std::vector<SampledFunction>& samples, const std::vector<GridInterval>& family,
                             const YoungSequence& seq, double eps, double tol, const SearchOptions& opts) {
  if (!(eps > 0.0)) throw ParameterError("net radius must be positive");
  if (samples.empty()) throw ParameterError("net needs at least one sample");
  require_common_grid(samples, "epsilon net");
  const auto p = make_projection(family, seq);
  EpsilonNet net;
  net.cell_side = eps / p.bound_factor();

  std::map<std::vector<long long>, std::size_t> cell_member;
  net.nearest.resize(samples.size());
  double radius = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<long long> key;
    for (double v : p.apply(samples[i])) key.push_back(static_cast<long long>(std::floor(v / net.cell_side)));
    auto [it, fresh] = cell_member.emplace(std::move(key), net.members.size());
    if (fresh) net.members.push_back(i);
    net.nearest[i] = it->second;
    radius = std::max(radius, norm_phi(samples[i], seq, IntervalFamily::all(), tol));
  }

  const IntervalFamily fam(family);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& m = samples[net.members[net.nearest[i]]];
    net.worst_distance = std::max(net.worst_distance, norm_phi(samples[i] - m, seq, fam, tol, opts));
  }
  net.covers = net.worst_distance <= eps + tol;

  const double R = radius * (1.0 + seq.at(1).inverse(1.0));
  const double per_axis = std::ceil(2.0 * R * p.bound_factor() / eps) + 1.0;
  net.count_bound = std::pow(per_axis, static_cast<double>(2 * family.size() + 1));
  return net;
}

AxiomReport check_A1_A2_A5(const YoungSequence& seq, const std::vector<SampledFunction>& samples,
                           const std::vector<GridInterval>& net_family, double eps, const AxiomOptions& opts) {
  if (samples.empty()) throw ParameterError("axiom check needs at least one sample");
  require_common_grid(samples, "axiom check");
  AxiomReport r;
  const std::size_t points = samples.front().size();
  const auto every = all_grid_intervals(points);

  for (const auto& x : samples) {
    const double full = norm_phi(x, seq, IntervalFamily(every), opts.tol, opts.search);
    const double phi = norm_phi(x, seq, IntervalFamily::all(), opts.tol, opts.search);
    r.a1_max_deviation = std::max(r.a1_max_deviation, std::abs(full - phi));
  }
  r.a1_pass = r.a1_max_deviation <= opts.tol;

  harness::Random rng(opts.seed);
  const std::size_t max_size = std::max<std::size_t>(1, opts.max_family_size);
  auto random_family = [&] {
    std::vector<GridInterval> f;
    const std::size_t n = 1 + rng.index(max_size);
    for (std::size_t i = 0; i < n; ++i) f.push_back(every[rng.index(every.size())]);
    std::sort(f.begin(), f.end());
    f.erase(std::unique(f.begin(), f.end()), f.end());
    return IntervalFamily(std::move(f));
  };
  for (const auto& x : samples) {
    for (std::size_t t = 0; t < opts.a2_pairs; ++t) {
      const auto J = random_family();
      const auto K = random_family();
      const auto U = IntervalFamily::join(J, K);
      const double nu = norm_phi(x, seq, U, opts.tol, opts.search);
      r.a2_checks += 2;
      if (norm_phi(x, seq, J, opts.tol, opts.search) > nu) ++r.a2_violations;
      if (norm_phi(x, seq, K, opts.tol, opts.search) > nu) ++r.a2_violations;
    }
  }
  r.a2_pass = r.a2_violations == 0;

  r.a5 = build_epsilon_net(samples, net_family, seq, eps, opts.tol, opts.search);
  r.a5_pass = r.a5.covers && static_cast<double>(r.a5.members.size()) <= r.a5.count_bound;
  return r;
}

std::vector<GridInterval> dyadic_pool(const Grid& grid, std::size_t depth) {
  if (depth > 20) throw ParameterError("dyadic depth is capped at 20");
  std::vector<GridInterval> pool;
  auto add = [&](double a, double b) {
    const GridInterval I{grid.nearest(a), grid.nearest(b)};
    if (I.lo >= I.hi) return;
    if (std::find(pool.begin(), pool.end(), I) == pool.end()) pool.push_back(I);
  };
  for (std::size_t l = 0; l <= depth; ++l) {
    const double h = std::ldexp(1.0, -static_cast<int>(l));
    const std::size_t n = std::size_t{1} << l;
    for (std::size_t k = 0; k < n; ++k) add(static_cast<double>(k) * h, static_cast<double>(k + 1) * h);
    for (std::size_t k = 0; k + 1 < n; ++k) add((static_cast<double>(k) + 0.5) * h, (static_cast<double>(k) + 1.5) * h);
  }
  return pool;
}

EquinormSearchResult equinormed_search(const std::vector<SampledFunction>& A, const YoungSequence& seq, double eps,
                                       const std::vector<GridInterval>& pool, const EquinormOptions& opts) {
  if (A.empty()) throw ParameterError("equinormed_search needs a non-empty set");
  if (!(eps > 0.0)) throw ParameterError("epsilon must be positive");
  require_common_grid(A, "equinormed_search");
  const auto pairs = all_pairs(A.size());
  std::vector<SampledFunction> diff;
  diff.reserve(pairs.size());
  for (const auto& [i, j] : pairs) diff.push_back(A[i] - A[j]);

  std::vector<double> full(pairs.size(), 0.0);
  sweep(opts.exec, pairs.size(), [&](std::size_t p) {
    full[p] = luxemburg(diff[p], seq, IntervalFamily::all(), opts.tol, opts.search);
  });
  std::vector<double> part(pairs.size(), 0.0);

  EquinormSearchResult r;
  while (true) {
    std::size_t worst = 0;
    double margin = -eps;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const double m = full[p] - part[p] - eps;
      if (p == 0 || m > margin) {
        margin = m;
        worst = p;
      }
    }
    r.margin = margin;
    if (!pairs.empty()) std::tie(r.worst_i, r.worst_j) = pairs[worst];
    if (margin <= 0.0) {
      r.certificate = EquinormCertificate{eps, r.family, margin, r.worst_i, r.worst_j};
      return r;
    }
    if (r.family.size() >= opts.max_family) {
      r.note = "family budget of " + std::to_string(opts.max_family) + " intervals exhausted";
      return r;
    }

    std::vector<double> gain(pool.size(), -1.0);
    sweep(opts.exec, pool.size(), [&](std::size_t c) {
      if (std::find(r.family.begin(), r.family.end(), pool[c]) != r.family.end()) return;
      auto trial = r.family;
      trial.push_back(pool[c]);
      gain[c] = luxemburg(diff[worst], seq, IntervalFamily(trial), opts.tol, opts.search);
    });
    std::size_t best = pool.size();
    for (std::size_t c = 0; c < pool.size(); ++c) {
      if (gain[c] > part[worst] && (best == pool.size() || gain[c] > gain[best])) best = c;
    }
    if (best == pool.size()) {
      r.note = "no pool interval raises |x-y|_J for the worst pair";
      return r;
    }
    r.family.push_back(pool[best]);
    ++r.steps;
    const IntervalFamily fam(r.family);
    sweep(opts.exec, pairs.size(), [&](std::size_t p) {
      part[p] = luxemburg(diff[p], seq, fam, opts.tol, opts.search);
    });
  }
}

CertificateCheck verify_certificate(const std::vector<SampledFunction>& A, const YoungSequence& seq,
                                    const EquinormCertificate& cert, double tol, double slack) {
  if (A.empty()) throw ParameterError("certificate check needs a non-empty set");
  require_common_grid(A, "certificate check");
  CertificateCheck c;
  c.margin = -cert.eps;
  const auto every = IntervalFamily(all_grid_intervals(A.front().size()));
  const IntervalFamily fam(cert.family);
  bool first = true;
  for (const auto& [i, j] : all_pairs(A.size())) {
    const auto d = A[i] - A[j];
    const double start = d.spread();
    double full = 0.0;
    double part = 0.0;
    if (start > 0.0) {
      ScaledVariation all_v(d, seq, every);
      full = all_v.trivial() ? 0.0 : bisect_luxemburg([&](double l) { return all_v.at(1.0 / l).value <= 1.0; },
                                                      start, tol);
      bool any = false;
      for (const auto& I : cert.family) any = any || d[I.hi] != d[I.lo];
      part = any ? bisect_luxemburg([&](double l) { return enumerated_V(d, cert.family, seq, 1.0 / l) <= 1.0; },
                                    start, tol)
                 : 0.0;
    }
    const double m = full - part - cert.eps;
    if (first || m > c.margin) {
      c.margin = m;
      c.worst_i = i;
      c.worst_j = j;
      first = false;
    }
    const double full_b = luxemburg(d, seq, IntervalFamily::all(), tol);
    const double part_b = luxemburg(d, seq, fam, tol);
    c.max_disagreement = std::max({c.max_disagreement, std::abs(full - full_b), std::abs(part - part_b)});
  }
  c.valid = c.margin <= slack;
  return c;
}

void write_certificate(std::ostream& out, const EquinormSearchResult& r, const std::vector<SampledFunction>& A) {
  using text::fmt_real;
  const Grid& g = A.front().grid();
  if (r.certificate) {
    out << "certificate eps " << fmt_real(r.certificate->eps) << " margin " << fmt_real(r.certificate->margin) << '\n';
  } else {
    out << "no certificate: " << r.note << " (evidence of non-precompactness at this grid scale, not proof)\n";
    out << "  margin " << fmt_real(r.margin) << '\n';
  }
  out << "  family " << r.family.size() << '\n';
  for (const auto& I : r.family) out << "    [" << fmt_real(g[I.lo]) << ", " << fmt_real(g[I.hi]) << "]\n";
  if (A.size() > 1) out << "  worst pair " << r.worst_i << ' ' << r.worst_j << '\n';
}

double bv_norm(const SampledFunction& x) { return std::abs(x[0]) + jordan_var(x); }

HellySelection helly_select(const std::vector<SampledFunction>& seq, double bound, double tol) {
  if (seq.empty()) throw ParameterError("helly_select needs a non-empty sequence");
  if (!(bound >= 0.0) || !std::isfinite(bound)) throw ParameterError("bound must be finite and non-negative");
  if (!(tol > 0.0)) throw ParameterError("tolerance must be positive");
  require_common_grid(seq, "helly_select");
  for (std::size_t n = 0; n < seq.size(); ++n) {
    if (bv_norm(seq[n]) > bound * (1.0 + 1e-12)) {
      throw ParameterError("member " + std::to_string(n) + " exceeds the BV bound " + text::fmt_real(bound));
    }
  }
  std::vector<std::size_t> keep(seq.size());
  for (std::size_t n = 0; n < keep.size(); ++n) keep[n] = n;

  const std::size_t points = seq.front().size();
  for (std::size_t i = 0; i < points && keep.size() > 1; ++i) {
    double lo = -bound;
    double hi = bound;
    while (hi - lo > tol && keep.size() > 1) {
      const double mid = 0.5 * (lo + hi);
      std::vector<std::size_t> below;
      std::vector<std::size_t> above;
      for (std::size_t n : keep) (seq[n][i] <= mid ? below : above).push_back(n);
      bool take_below = below.size() > above.size();
      if (below.size() == above.size()) take_below = below.back() > above.back();
      if (take_below) {
        keep = std::move(below);
        hi = mid;
      } else {
        keep = std::move(above);
        lo = mid;
      }
    }
  }
  return HellySelection{keep, seq[keep.back()]};
}

DemoReport compactness_equiv_demo(const Kernel& k, const YoungSequence& seq, const std::vector<SampledFunction>& xs,
                                  const Grid& t_grid, double tol, double decay_tol, Extension ext, Execution exec) {
  DemoReport r;
  for (std::size_t v = 0; v < xs.size(); ++v) {
    const double b = bv_norm(xs[v]);
    if (b > 1.0 + 1e-12) {
      throw ParameterError("x_" + std::to_string(v + 1) + " lies outside the unit BV ball (norm " + text::fmt_real(b) +
                           ")");
    }
    r.bv_norms.push_back(b);
  }
  r.image_norms.assign(xs.size(), 0.0);
  sweep(exec, xs.size(), [&](std::size_t v) {
    r.image_norms[v] = norm_phi(apply_K(k, xs[v], t_grid, ext), seq, IntervalFamily::all(), tol);
  });
  for (std::size_t v = 0; v < xs.size(); ++v) {
    if (r.image_norms[v] < decay_tol) {
      r.decays = true;
      r.first_below = v;
      break;
    }
  }
  return r;
}

std::vector<SampledFunction> shrinking_support_sequence(const Grid& grid, std::size_t count) {
  std::vector<SampledFunction> xs;
  for (std::size_t v = 1; v <= count; ++v) {
    const double cut = 1.0 - 1.0 / static_cast<double>(v);
    xs.push_back(SampledFunction::sample(grid, [cut](double t) { return t > cut ? 1.0 : 0.0; }));
  }
  return xs;
}

}  // namespace bvtk
