#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bvtk/grid.hpp"
#include "bvtk/young.hpp"

// All suprema below range over intervals with grid endpoints, i.e. they are
// the variations of the piecewise-linear interpolant of the samples.

namespace bvtk {

/// Pairwise non-overlapping grid intervals with an assignment to phi_1..phi_k.
struct IntervalCollection {
  std::vector<GridInterval> intervals;  ///< sorted left to right
  std::vector<std::size_t> assignment;  ///< assignment[j] = n: interval j uses phi_n

  std::size_t size() const noexcept { return intervals.size(); }
  bool operator==(const IntervalCollection&) const = default;
};

enum class VariationMethod { oracle, exact_search, greedy_lower_bound };

struct VariationValue {
  double value = 0.0;
  IntervalCollection witness;
  VariationMethod method = VariationMethod::exact_search;
};

struct SearchOptions {
  std::size_t node_limit = 20'000'000;
  /// Restrict candidate endpoints to local extrema of the samples (plus both
  /// ends). Checked against the exhaustive oracle in the test suite.
  bool extremal_pruning = true;
  /// Subtrees whose bound exceeds the incumbent by less than this relative
  /// amount are skipped. 0 makes the search exact in floating point (up to
  /// the order-independent canonical summation), at exponential cost on data
  /// with many equal-valued collections.
  double tie_tolerance = 1e-10;
};

/// Family of grid intervals J, or every grid interval (ALL).
class IntervalFamily {
 public:
  static IntervalFamily all() { return IntervalFamily(); }
  explicit IntervalFamily(std::vector<GridInterval> intervals) : intervals_(std::move(intervals)), all_(false) {}

  bool is_all() const noexcept { return all_; }
  std::span<const GridInterval> intervals() const noexcept { return intervals_; }

  /// Union of two explicit families (duplicates removed).
  static IntervalFamily join(const IntervalFamily& a, const IntervalFamily& b);

 private:
  IntervalFamily() = default;
  std::vector<GridInterval> intervals_;
  bool all_ = true;
};

/// sum_{i <= upto} |x(t_i) - x(t_{i-1})|; upto defaults to the last index.
double jordan_var(const SampledFunction& x, std::optional<std::size_t> upto = std::nullopt);

/// v_x(t_i) = var(x, [0, t_i]) with v_x(0) = 0.
SampledFunction variation_function(const SampledFunction& x);

/// Sum of phi_{assignment}(|x(I)|) over the witness.
double collection_value(const SampledFunction& x, const IntervalCollection& c, const YoungSequence& seq);

/// Exhaustive Phi-variation: every set of at most k_max non-overlapping grid
/// intervals and every assignment of them to phi_1..phi_k. Exponential;
/// throws BudgetError when the grid has more than max_points points.
VariationValue phi_var_oracle(const SampledFunction& x, const YoungSequence& seq, std::size_t k_max,
                              std::size_t max_points = 8);

/// Exact Phi-variation at grid resolution by branch-and-bound over interval
/// collections, with the optimal assignment solved per collection.
VariationValue phi_var(const SampledFunction& x, const YoungSequence& seq, const SearchOptions& opts = {});

/// Consecutive monotone runs between extrema, assigned by sorting: a lower bound.
VariationValue phi_var_lower_bound(const SampledFunction& x, const YoungSequence& seq);

/// V_J(x): supremum over pairwise non-overlapping sub-collections of `family`.
/// The empty family gives 0.
VariationValue restricted_V(const SampledFunction& x, std::span<const GridInterval> family,
                            const YoungSequence& seq, const SearchOptions& opts = {});

namespace detail {
class CollectionSearch;
}

/// V_J(s * x) for varying s, with the candidate intervals prepared once.
/// Not thread-safe; use one per thread.
class ScaledVariation {
 public:
  ScaledVariation(const SampledFunction& x, const YoungSequence& seq, const IntervalFamily& family,
                  const SearchOptions& opts = {});
  ~ScaledVariation();
  ScaledVariation(ScaledVariation&&) noexcept;
  ScaledVariation& operator=(ScaledVariation&&) noexcept;

  /// No interval of the family has a nonzero increment: V_J(s * x) = 0 for all s.
  bool trivial() const noexcept;
  VariationValue at(double scale);

 private:
  std::unique_ptr<detail::CollectionSearch> search_;
};

/// Bisection for inf{lambda > 0 : feasible(lambda)} where feasible is monotone
/// (false below the infimum, true above). The bracket is found by halving or
/// doubling from `start`; returns the midpoint of the final bracket, whose
/// width is at most tol.
double bisect_luxemburg(const std::function<bool(double)>& feasible, double start, double tol);

/// inf{lambda > 0 : V_J(x / lambda) <= 1} by bisection on lambda (absolute
/// tolerance; midpoint of the final bracket). Returns 0 when every increment
/// over J vanishes.
double luxemburg(const SampledFunction& x, const YoungSequence& seq, const IntervalFamily& family, double tol,
                 const SearchOptions& opts = {});

/// |x(0)| + luxemburg(x, seq, family, tol).
double norm_phi(const SampledFunction& x, const YoungSequence& seq, const IntervalFamily& family, double tol,
                const SearchOptions& opts = {});

std::string to_string(VariationMethod m);

/// Text block: value, method, and the witness as "[lo,hi] -> phi_n" lines.
void write_variation_report(std::ostream& out, const VariationValue& v, const SampledFunction& x);

}  // namespace bvtk
