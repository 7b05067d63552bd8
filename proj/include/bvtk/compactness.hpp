#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bvtk/grid.hpp"
#include "bvtk/kernel.hpp"
#include "bvtk/sweep.hpp"
#include "bvtk/variation.hpp"
#include "bvtk/young.hpp"

namespace bvtk {

/// A family of semi-norms indexed by interval families. The evaluator is
/// free-form so that other index sets can be plugged in later; phi() gives
/// ||x||_J = |x(0)| + |x|_J.
class SeminormFamily {
 public:
  using Evaluator = std::function<double(const SampledFunction&, const IntervalFamily&)>;

  SeminormFamily(std::string name, Evaluator eval) : name_(std::move(name)), eval_(std::move(eval)) {}
  static SeminormFamily phi(const YoungSequence& seq, double tol, const SearchOptions& opts = {});

  double operator()(const SampledFunction& x, const IntervalFamily& family) const { return eval_(x, family); }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  Evaluator eval_;
};

/// Search options under which V_J is computed without tie pruning, so that
/// monotonicity in J holds exactly rather than up to the tie tolerance.
SearchOptions exact_search_options();

/// Q(x) = (x(0), x(b_1), x(a_1), ..., x(b_N), x(a_N)) and sigma = 1 + sum_{n<=N} phi_n(1).
struct Projection {
  std::vector<GridInterval> family;
  double sigma = 1.0;

  std::vector<double> apply(const SampledFunction& x) const;
  double bound_factor() const noexcept { return 1.0 + 2.0 * sigma; }
};

Projection make_projection(std::vector<GridInterval> family, const YoungSequence& seq);

/// (1 + 2 sigma) max|Q(x)| - ||x||_J. Non-negative up to the bisection
/// tolerance. Throws ParameterError for an empty family.
double q_bound_check(const SampledFunction& x, const std::vector<GridInterval>& family, const YoungSequence& seq,
                     double tol, const SearchOptions& opts = exact_search_options());

/// (1 + phi_1^{-1}(1)) ||x||_Phi - max_i |x(t_i)|.
double sup_bound_check(const SampledFunction& x, const YoungSequence& seq, double tol, const SearchOptions& opts = {});

struct EpsilonNet {
  double cell_side = 0.0;                  ///< eps / (1 + 2 sigma) in every Q-coordinate
  std::vector<std::size_t> members;        ///< sample indices forming the net
  std::vector<std::size_t> nearest;        ///< per sample: position in `members` of its cell's member
  double worst_distance = 0.0;             ///< max_x ||x - member||_J
  double count_bound = 0.0;                ///< (ceil(2R(1+2 sigma)/eps) + 1)^(2N+1)
  bool covers = false;                     ///< worst_distance <= eps (+ tol)
};

/// Lattice net in the projection image: samples sharing a Q-cell of side
/// eps / (1 + 2 sigma) are within eps of each other in ||.||_J; the first
/// sample of each occupied cell is kept.
EpsilonNet build_epsilon_net(const std::vector<SampledFunction>& samples, const std::vector<GridInterval>& family,
                             const YoungSequence& seq, double eps, double tol,
                             const SearchOptions& opts = exact_search_options());

struct AxiomReport {
  double a1_max_deviation = 0.0;  ///< |norm over the explicit all-interval family - norm_phi|
  bool a1_pass = false;
  std::size_t a2_checks = 0;
  std::size_t a2_violations = 0;
  bool a2_pass = false;
  EpsilonNet a5;
  bool a5_pass = false;
  bool pass() const noexcept { return a1_pass && a2_pass && a5_pass; }
};

struct AxiomOptions {
  double tol = 1e-9;
  std::size_t a2_pairs = 20;       ///< random family pairs per sample
  std::size_t max_family_size = 4;
  std::uint64_t seed = 1;
  SearchOptions search = exact_search_options();
};

/// A1: the explicit family of all grid intervals reproduces norm_phi exactly.
/// A2: ||x||_J and ||x||_J' never exceed ||x||_{J u J'} on random pairs.
/// A5: an epsilon-net of the samples for `net_family` via build_epsilon_net.
AxiomReport check_A1_A2_A5(const YoungSequence& seq, const std::vector<SampledFunction>& samples,
                           const std::vector<GridInterval>& net_family, double eps, const AxiomOptions& opts = {});

/// Coarse-to-fine dyadic intervals [k/2^l, (k+1)/2^l] and their half-shifts
/// [(k+1/2)/2^l, (k+3/2)/2^l] for l = 0..depth, snapped to the nearest grid
/// points, degenerate and repeated intervals dropped.
std::vector<GridInterval> dyadic_pool(const Grid& grid, std::size_t depth);

struct EquinormCertificate {
  double eps = 0.0;
  std::vector<GridInterval> family;
  double margin = 0.0;  ///< max over pairs of |x-y|_Phi - |x-y|_J, minus eps; valid iff <= 0
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;

  bool valid() const noexcept { return margin <= 0.0; }
};

struct EquinormOptions {
  double tol = 1e-9;
  std::size_t max_family = 24;
  Execution exec = Execution::parallel;
  SearchOptions search{};
};

struct EquinormSearchResult {
  std::optional<EquinormCertificate> certificate;
  std::vector<GridInterval> family;  ///< last family tried
  double margin = 0.0;               ///< its margin
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
  std::size_t steps = 0;
  std::string note;  ///< why the search stopped, on failure
};

/// Greedy growth of J from `pool`: each step adds the pool interval that most
/// raises |x-y|_J for the currently worst pair, then re-checks all pairs.
/// Failure is evidence of non-precompactness at this grid scale, not proof.
EquinormSearchResult equinormed_search(const std::vector<SampledFunction>& A, const YoungSequence& seq, double eps,
                                       const std::vector<GridInterval>& pool, const EquinormOptions& opts = {});

struct CertificateCheck {
  double margin = 0.0;         ///< recomputed through the independent path
  double max_disagreement = 0.0;  ///< largest gap between the two paths on any pairwise norm
  std::size_t worst_i = 0;
  std::size_t worst_j = 0;
  bool valid = false;          ///< recomputed margin <= slack
};

/// Re-evaluates every pair serially: |x-y|_Phi over the explicit family of all
/// grid intervals, and |x-y|_J by direct enumeration of the non-overlapping
/// sub-collections of J (no branch-and-bound). `slack` absorbs the two
/// bisection tolerances.
CertificateCheck verify_certificate(const std::vector<SampledFunction>& A, const YoungSequence& seq,
                                    const EquinormCertificate& cert, double tol, double slack);

void write_certificate(std::ostream& out, const EquinormSearchResult& r, const std::vector<SampledFunction>& A);

struct HellySelection {
  std::vector<std::size_t> indices;  ///< increasing
  SampledFunction limit;             ///< last selected member
};

/// Diagonal bisection over the grid points: at each point the value bracket
/// [-bound, bound] is halved until narrower than tol, keeping the half with
/// more members (ties: the half holding the largest index). All selected
/// members then agree within tol at every grid point.
HellySelection helly_select(const std::vector<SampledFunction>& seq, double bound, double tol);

/// |x(0)| + var x.
double bv_norm(const SampledFunction& x);

struct DemoReport {
  std::vector<double> bv_norms;
  std::vector<double> image_norms;  ///< ||K x_v||_Phi
  bool decays = false;              ///< some image norm falls below decay_tol
  std::size_t first_below = 0;      ///< index of the first one that does
};

/// ||K x_v||_Phi along a sequence in the unit BV ball. Throws ParameterError
/// if some ||x_v||_BV exceeds 1.
DemoReport compactness_equiv_demo(const Kernel& k, const YoungSequence& seq, const std::vector<SampledFunction>& xs,
                                  const Grid& t_grid, double tol, double decay_tol,
                                  Extension ext = Extension::left_value, Execution exec = Execution::parallel);

/// x_v = indicator of (1 - 1/v, 1] sampled on grid, v = 1..count.
std::vector<SampledFunction> shrinking_support_sequence(const Grid& grid, std::size_t count);

}  // namespace bvtk
