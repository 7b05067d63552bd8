#include "bvtk/variation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numeric>

#include "bvtk/assignment.hpp"
#include "bvtk/error.hpp"
#include "text.hpp"

namespace bvtk {

IntervalFamily IntervalFamily::join(const IntervalFamily& a, const IntervalFamily& b) {
  if (a.is_all() || b.is_all()) return all();
  std::vector<GridInterval> u(a.intervals_.begin(), a.intervals_.end());
  u.insert(u.end(), b.intervals_.begin(), b.intervals_.end());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  return IntervalFamily(std::move(u));
}

double jordan_var(const SampledFunction& x, std::optional<std::size_t> upto) {
  const std::size_t last = upto.value_or(x.size() - 1);
  if (last >= x.size()) throw ParameterError("jordan_var: index beyond the grid");
  double total = 0.0;
  for (std::size_t i = 1; i <= last; ++i) total += std::abs(x[i] - x[i - 1]);
  return total;
}

SampledFunction variation_function(const SampledFunction& x) {
  std::vector<double> v(x.size(), 0.0);
  for (std::size_t i = 1; i < x.size(); ++i) v[i] = v[i - 1] + std::abs(x[i] - x[i - 1]);
  return SampledFunction(x.grid(), std::move(v));
}

double collection_value(const SampledFunction& x, const IntervalCollection& c, const YoungSequence& seq) {
  std::vector<double> inc(c.size());
  for (std::size_t j = 0; j < c.size(); ++j) inc[j] = std::abs(x[c.intervals[j].hi] - x[c.intervals[j].lo]);
  return assignment_value(inc, c.assignment, seq);
}

namespace detail {

struct Candidate {
  std::size_t lo;
  std::size_t hi;
  double increment;  // |x(hi) - x(lo)| before scaling, > 0
};

IntervalCollection make_witness(const std::vector<const Candidate*>& chosen, double scale, const YoungSequence& seq) {
  IntervalCollection c;
  std::vector<double> inc;
  for (const Candidate* cand : chosen) {
    c.intervals.push_back({cand->lo, cand->hi});
    inc.push_back(cand->increment * scale);
  }
  c.assignment = best_assignment(inc, seq).index;
  return c;
}

// Branch-and-bound over left-to-right collections of candidate intervals.
//
// Dominance sequences (phi_n = c_n psi): with w = psi(|x(I)|) sorted
// decreasingly, Abel summation gives
//   value(C) = sum_n (c_n - c_{n+1}) * top_n(C),
// where top_n is the sum of the n largest weights. If C ends at grid index e
// and top_i(p) is the best psi-sum of at most i intervals starting at >= p,
// any extension R satisfies top_n(C + R) <= max_j top_j(C) + top_{n-j}(e),
// which bounds the whole subtree. The bound is exact for constant c_n.
//
// Other sequences: best_from[p], the optimum over collections starting at
// >= p, is filled right to left and value(C) + best_from[e] bounds every
// extension (dropping intervals and relabelling the remaining indices
// order-preservingly can only raise each phi_n term).
class CollectionSearch {
 public:
  CollectionSearch(std::vector<Candidate> candidates, std::size_t points, const YoungSequence& seq,
                   const SearchOptions& opts)
      : candidates_(std::move(candidates)),
        points_(points),
        seq_(seq),
        node_limit_(opts.node_limit),
        tie_tolerance_(opts.tie_tolerance) {
    if (!(tie_tolerance_ >= 0.0)) throw ParameterError("tie tolerance must be non-negative");
    by_lo_.resize(points_);
    for (const auto& c : candidates_) by_lo_[c.lo].push_back(&c);
    for (auto& bucket : by_lo_) {
      std::stable_sort(bucket.begin(), bucket.end(),
                       [](const Candidate* a, const Candidate* b) { return a->increment > b->increment; });
    }
    dominance_ = seq_.has_dominance_certificate();
    max_k_ = std::min(points_ - 1, candidates_.size());
    if (dominance_ && max_k_ > 0) {
      coeff_.assign(max_k_ + 2, 0.0);
      for (std::size_t n = 1; n <= max_k_; ++n) coeff_[n] = seq_.coefficient(n);
      // c_{K+1} := 0 folds every index beyond K into the last term.
      coeff_drop_.assign(max_k_ + 1, 0.0);
      for (std::size_t n = 1; n <= max_k_; ++n) coeff_drop_[n] = coeff_[n] - coeff_[n + 1];
    }
  }

  bool empty() const noexcept { return candidates_.empty(); }

  VariationValue run(double scale) {
    scale_ = scale;
    nodes_ = 0;
    VariationValue out;
    out.method = VariationMethod::exact_search;
    if (candidates_.empty()) return out;
    if (dominance_) {
      run_dominance();
    } else {
      run_general();
    }
    out.value = best_;
    out.witness = make_witness(best_path_, scale_, seq_);
    return out;
  }

 private:
  std::size_t index_of(const Candidate* c) const { return static_cast<std::size_t>(c - candidates_.data()); }

  // Bounds are inflated by a relative 1e-12 against rounding. With zero tie
  // tolerance a subtree is kept whenever it could win the floating-point
  // comparison; a positive tolerance also drops near-ties, which are common
  // (a monotone run split into pieces has the same value as the whole run).
  bool improves(double bound) const { return bound > best_ * (1.0 + tie_tolerance_); }

  void count_node() {
    if (++nodes_ > node_limit_) throw BudgetError("variation search exceeded its node limit");
  }

  // ---- dominance sequences -------------------------------------------------

  void run_dominance() {
    weight_.resize(candidates_.size());
    for (std::size_t i = 0; i < candidates_.size(); ++i) weight_[i] = seq_.base()(candidates_[i].increment * scale_);

    // top_[i * (points_ + 1) + p]: best psi-sum of <= i intervals starting at >= p
    const std::size_t stride = points_ + 1;
    top_.assign((max_k_ + 1) * stride, 0.0);
    for (std::size_t i = 1; i <= max_k_; ++i) {
      for (std::size_t p = points_; p-- > 0;) {
        double best = top_[i * stride + p + 1];
        for (const Candidate* c : by_lo_[p]) {
          best = std::max(best, weight_[index_of(c)] + top_[(i - 1) * stride + c->hi]);
        }
        top_[i * stride + p] = best;
      }
    }

    // Incumbent: the collection maximizing the plain psi-sum, read back from
    // the table. Optimal outright when all coefficients are equal.
    path_.clear();
    chosen_.clear();
    for (std::size_t i = max_k_, p = 0; i > 0 && p < points_;) {
      const double here = top_[i * stride + p];
      if (here == top_[i * stride + p + 1]) {
        ++p;
        continue;
      }
      const Candidate* pick = nullptr;
      for (const Candidate* c : by_lo_[p]) {
        if (weight_[index_of(c)] + top_[(i - 1) * stride + c->hi] == here) {
          pick = c;
          break;
        }
      }
      if (pick == nullptr) break;  // unreachable: the table was built from these sums
      path_.push_back(pick);
      chosen_.push_back(weight_[index_of(pick)]);
      p = pick->hi;
      --i;
    }
    best_ = path_.empty() ? 0.0 : dominance_value();
    best_path_ = path_;
    path_.clear();
    chosen_.clear();
    expand_dominance(0);
  }

  double dominance_value() {
    terms_.assign(chosen_.begin(), chosen_.end());
    std::sort(terms_.begin(), terms_.end(), std::greater<>());
    for (std::size_t n = 0; n < terms_.size(); ++n) terms_[n] *= coeff_[n + 1];
    return canonical_sum(terms_);
  }

  double dominance_bound(std::size_t end) {
    // prefix sums of the chosen weights, largest first
    prefix_.assign(1, 0.0);
    sorted_.assign(chosen_.begin(), chosen_.end());
    std::sort(sorted_.begin(), sorted_.end(), std::greater<>());
    for (double w : sorted_) prefix_.push_back(prefix_.back() + w);
    const std::size_t stride = points_ + 1;
    double bound = 0.0;
    for (std::size_t n = 1; n <= max_k_; ++n) {
      if (coeff_drop_[n] == 0.0) continue;
      double best = 0.0;
      for (std::size_t j = 0; j <= std::min(n, sorted_.size()); ++j) {
        best = std::max(best, prefix_[j] + top_[(n - j) * stride + end]);
      }
      bound += coeff_drop_[n] * best;
    }
    return bound * (1.0 + 1e-12);
  }

  void expand_dominance(std::size_t end) {
    for (std::size_t q = end; q < points_; ++q) {
      for (const Candidate* c : by_lo_[q]) {
        count_node();
        path_.push_back(c);
        chosen_.push_back(weight_[index_of(c)]);
        const double v = dominance_value();
        if (v > best_) {
          best_ = v;
          best_path_ = path_;
        }
        if (c->hi < points_ - 1 && improves(dominance_bound(c->hi))) expand_dominance(c->hi);
        chosen_.pop_back();
        path_.pop_back();
      }
    }
  }

  // ---- general sequences ---------------------------------------------------

  void run_general() {
    std::vector<double> best_from(points_ + 1, 0.0);
    std::vector<std::vector<const Candidate*>> witness_from(points_ + 1);
    best_from_ = &best_from;
    for (std::size_t p = points_; p-- > 0;) {
      best_ = best_from[p + 1];
      best_path_ = witness_from[p + 1];
      for (const Candidate* c : by_lo_[p]) {
        count_node();
        path_.assign(1, c);
        descend_general(general_value());
      }
      best_from[p] = best_;
      witness_from[p] = best_path_;
    }
    best_ = best_from[0];
    best_path_ = witness_from[0];
    best_from_ = nullptr;
  }

  double general_value() {
    inc_.clear();
    for (const Candidate* c : path_) inc_.push_back(c->increment * scale_);
    return best_assignment(inc_, seq_).value;
  }

  void descend_general(double value) {
    if (value > best_) {
      best_ = value;
      best_path_ = path_;
    }
    const auto& best_from = *best_from_;
    const std::size_t end = path_.back()->hi;
    if (!improves((value + best_from[end]) * (1.0 + 1e-12))) return;
    for (std::size_t q = end; q < points_; ++q) {
      for (const Candidate* c : by_lo_[q]) {
        count_node();
        path_.push_back(c);
        const double v = general_value();
        if (v > best_ || improves((v + best_from[c->hi]) * (1.0 + 1e-12))) descend_general(v);
        path_.pop_back();
      }
    }
  }

  std::vector<Candidate> candidates_;
  std::size_t points_;
  const YoungSequence& seq_;
  std::size_t node_limit_;
  double tie_tolerance_;
  bool dominance_ = false;
  std::size_t max_k_ = 0;
  std::vector<double> coeff_;
  std::vector<double> coeff_drop_;
  std::vector<std::vector<const Candidate*>> by_lo_;

  double scale_ = 1.0;
  std::size_t nodes_ = 0;
  double best_ = 0.0;
  std::vector<const Candidate*> best_path_;
  std::vector<const Candidate*> path_;

  std::vector<double> weight_;
  std::vector<double> top_;
  std::vector<double> chosen_;
  std::vector<double> terms_;
  std::vector<double> sorted_;
  std::vector<double> prefix_;

  const std::vector<double>* best_from_ = nullptr;
  std::vector<double> inc_;
};

}  // namespace detail

namespace {

using detail::Candidate;
using detail::CollectionSearch;

std::vector<std::size_t> extremal_indices(const SampledFunction& x) {
  std::vector<std::size_t> idx;
  const std::size_t m = x.size() - 1;
  idx.push_back(0);
  for (std::size_t i = 1; i < m; ++i) {
    const double left = x[i] - x[i - 1];
    const double right = x[i + 1] - x[i];
    // interior plateau points add nothing the plateau ends do not
    if (left == 0.0 && right == 0.0) continue;
    if (left * right <= 0.0) idx.push_back(i);
  }
  idx.push_back(m);
  return idx;
}

// An interval whose endpoints are not the extremes of x over it is dominated
// by a sub-interval with a larger increment, so only intervals running from
// an argmin to an argmax (or back) are kept.
std::vector<Candidate> full_candidates(const SampledFunction& x, bool extremal) {
  std::vector<std::size_t> pts;
  if (extremal) {
    pts = extremal_indices(x);
  } else {
    pts.resize(x.size());
    std::iota(pts.begin(), pts.end(), 0);
  }
  std::vector<Candidate> out;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    double lo = x[pts[a]];
    double hi = x[pts[a]];
    std::size_t scanned = pts[a];
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      for (; scanned < pts[b]; ++scanned) {
        lo = std::min(lo, x[scanned + 1]);
        hi = std::max(hi, x[scanned + 1]);
      }
      const double xa = x[pts[a]];
      const double xb = x[pts[b]];
      const bool rising = xa <= lo && xb >= hi;
      const bool falling = xa >= hi && xb <= lo;
      if (!rising && !falling) {
        // once x(a) is no longer extreme on [a, b] it never is again
        if (xa > lo && xa < hi) break;
        continue;
      }
      const double inc = std::abs(xb - xa);
      if (inc > 0.0) out.push_back({pts[a], pts[b], inc});
    }
  }
  return out;
}

std::vector<Candidate> family_candidates(const SampledFunction& x, std::span<const GridInterval> family) {
  std::vector<GridInterval> fam(family.begin(), family.end());
  std::sort(fam.begin(), fam.end());
  fam.erase(std::unique(fam.begin(), fam.end()), fam.end());
  std::vector<Candidate> out;
  for (const auto& I : fam) {
    if (I.lo >= I.hi || I.hi >= x.size()) throw ParameterError("family interval is degenerate or off the grid");
    // zero increments contribute phi_n(0) = 0 and only push others to smaller phi_n
    const double inc = std::abs(x[I.hi] - x[I.lo]);
    if (inc > 0.0) out.push_back({I.lo, I.hi, inc});
  }
  return out;
}

}  // namespace

VariationValue phi_var_oracle(const SampledFunction& x, const YoungSequence& seq, std::size_t k_max,
                              std::size_t max_points) {
  if (k_max == 0) throw ParameterError("k_max must be positive");
  if (x.size() > max_points) {
    throw BudgetError("oracle enumeration limited to " + std::to_string(max_points) + " grid points");
  }
  const auto intervals = all_grid_intervals(x.size());

  VariationValue best;
  best.method = VariationMethod::oracle;
  std::vector<std::size_t> chosen;

  auto score = [&] {
    const std::size_t k = chosen.size();
    std::vector<double> inc(k);
    for (std::size_t j = 0; j < k; ++j) {
      const auto& I = intervals[chosen[j]];
      inc[j] = std::abs(x[I.hi] - x[I.lo]);
    }
    // perm[n] = interval placed on phi_{n+1}
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<double> terms(k);
    do {
      for (std::size_t n = 0; n < k; ++n) terms[n] = seq.eval(n + 1, inc[perm[n]]);
      const double total = canonical_sum(terms);
      if (total > best.value) {
        best.value = total;
        best.witness.intervals.clear();
        best.witness.assignment.assign(k, 0);
        for (std::size_t j = 0; j < k; ++j) best.witness.intervals.push_back(intervals[chosen[j]]);
        for (std::size_t n = 0; n < k; ++n) best.witness.assignment[perm[n]] = n + 1;
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  };

  auto extend = [&](auto&& self, std::size_t from, std::size_t end) -> void {
    score();
    if (chosen.size() == k_max) return;
    for (std::size_t i = from; i < intervals.size(); ++i) {
      if (intervals[i].lo < end) continue;
      chosen.push_back(i);
      self(self, i + 1, intervals[i].hi);
      chosen.pop_back();
    }
  };
  extend(extend, 0, 0);
  return best;
}

VariationValue phi_var(const SampledFunction& x, const YoungSequence& seq, const SearchOptions& opts) {
  CollectionSearch search(full_candidates(x, opts.extremal_pruning), x.size(), seq, opts);
  return search.run(1.0);
}

VariationValue phi_var_lower_bound(const SampledFunction& x, const YoungSequence& seq) {
  const auto pts = extremal_indices(x);
  IntervalCollection c;
  std::vector<double> inc;
  for (std::size_t a = 0; a + 1 < pts.size(); ++a) {
    const double v = std::abs(x[pts[a + 1]] - x[pts[a]]);
    if (v > 0.0) {
      c.intervals.push_back({pts[a], pts[a + 1]});
      inc.push_back(v);
    }
  }
  const auto asg = best_assignment(inc, seq);
  c.assignment = asg.index;
  return {asg.value, std::move(c), VariationMethod::greedy_lower_bound};
}

VariationValue restricted_V(const SampledFunction& x, std::span<const GridInterval> family, const YoungSequence& seq,
                            const SearchOptions& opts) {
  CollectionSearch search(family_candidates(x, family), x.size(), seq, opts);
  return search.run(1.0);
}

double bisect_luxemburg(const std::function<bool(double)>& feasible, double start, double tol) {
  if (!(tol > 0.0)) throw ParameterError("luxemburg tolerance must be positive");
  if (!(start > 0.0) || !std::isfinite(start)) throw ParameterError("luxemburg bracket start must be positive");
  double lo = 0.0;
  double hi = 0.0;
  if (feasible(start)) {
    hi = start;
    lo = start / 2;
    while (feasible(lo)) {
      hi = lo;
      lo /= 2;
      if (lo == 0.0) return 0.0;
    }
  } else {
    lo = start;
    hi = start * 2;
    while (!feasible(hi)) {
      lo = hi;
      hi *= 2;
      if (!std::isfinite(hi)) throw BudgetError("luxemburg bracket diverged");
    }
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    if (feasible(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

ScaledVariation::ScaledVariation(const SampledFunction& x, const YoungSequence& seq, const IntervalFamily& family,
                                 const SearchOptions& opts)
    : search_(std::make_unique<CollectionSearch>(family.is_all() ? full_candidates(x, opts.extremal_pruning)
                                                                 : family_candidates(x, family.intervals()),
                                                 x.size(), seq, opts)) {}

ScaledVariation::~ScaledVariation() = default;
ScaledVariation::ScaledVariation(ScaledVariation&&) noexcept = default;
ScaledVariation& ScaledVariation::operator=(ScaledVariation&&) noexcept = default;

bool ScaledVariation::trivial() const noexcept { return search_->empty(); }

VariationValue ScaledVariation::at(double scale) { return search_->run(scale); }

double luxemburg(const SampledFunction& x, const YoungSequence& seq, const IntervalFamily& family, double tol,
                 const SearchOptions& opts) {
  if (!(tol > 0.0)) throw ParameterError("luxemburg tolerance must be positive");
  ScaledVariation v(x, seq, family, opts);
  if (v.trivial()) return 0.0;
  // The starting point depends on x only, never on the family, so that nested
  // families walk the same bracket lattice and stay exactly ordered.
  return bisect_luxemburg([&](double lambda) { return v.at(1.0 / lambda).value <= 1.0; }, x.spread(), tol);
}

double norm_phi(const SampledFunction& x, const YoungSequence& seq, const IntervalFamily& family, double tol,
                const SearchOptions& opts) {
  return std::abs(x[0]) + luxemburg(x, seq, family, tol, opts);
}

std::string to_string(VariationMethod m) {
  switch (m) {
    case VariationMethod::oracle:
      return "oracle";
    case VariationMethod::exact_search:
      return "exact-search";
    case VariationMethod::greedy_lower_bound:
      return "greedy-lower-bound";
  }
  return "unknown";
}

void write_variation_report(std::ostream& out, const VariationValue& v, const SampledFunction& x) {
  using text::fmt_real;
  out << "value " << fmt_real(v.value) << '\n';
  out << "method " << to_string(v.method) << '\n';
  out << "witness " << v.witness.size() << '\n';
  for (std::size_t j = 0; j < v.witness.size(); ++j) {
    const auto& I = v.witness.intervals[j];
    out << "  [" << I.lo << ',' << I.hi << "] t=[" << fmt_real(x.grid()[I.lo]) << ',' << fmt_real(x.grid()[I.hi])
        << "] |x(I)|=" << fmt_real(std::abs(x[I.hi] - x[I.lo])) << " -> phi_" << v.witness.assignment[j] << '\n';
  }
}

}  // namespace bvtk
