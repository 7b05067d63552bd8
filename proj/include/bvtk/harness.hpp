#pragma once

// Seeded random instances and the randomized suites run by the CLI.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bvtk/grid.hpp"
#include "bvtk/stieltjes.hpp"
#include "bvtk/variation.hpp"
#include "bvtk/young.hpp"

namespace bvtk::harness {

/// mt19937_64 with a portable mapping to doubles (std distributions are not
/// specified bit-for-bit across standard libraries).
class Random {
 public:
  explicit Random(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }  // [0, 1)
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(uniform() * static_cast<double>(n)); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Strictly increasing grid with `cells` cells and random spacing.
Grid random_grid(Random& rng, std::size_t cells);
SampledFunction random_function(Random& rng, const Grid& grid, double amplitude = 1.0);
StepFunction random_step(Random& rng, const Grid& grid, double amplitude = 1.0);
/// Non-decreasing with values in [0, 1].
SampledFunction random_distribution(Random& rng, const Grid& grid);
/// Convex piecewise-linear or power Young function.
YoungFunction random_young(Random& rng);

struct IdentitySuite {
  std::size_t instances = 0;
  double reduction_max = 0.0;
  std::size_t reduction_fail = 0;
  double jensen_min = 0.0;
  double jensen_max = 0.0;
  std::size_t jensen_fail = 0;
  std::vector<double> parts_orders;  ///< finest-pair order per smooth pair
  std::vector<double> parts_fit;     ///< least-squares order over all levels, for the report
  std::size_t parts_fail = 0;

  bool pass() const noexcept { return reduction_fail == 0 && jensen_fail == 0 && parts_fail == 0; }
};

struct IdentityOptions {
  std::size_t n = 200;
  std::uint64_t seed = 20240611;
  bool linear_phi = false;      ///< use phi(t) = t in the Jensen checks
  double reduction_tol = 1e-10;
  double jensen_tol = 1e-8;
  unsigned parts_min_level = 4;
  unsigned parts_max_level = 12;
  double order_guard = 1e-6;    ///< finest-pair order must be >= 1 - order_guard
};

/// check_reduction on random step f and random x, check_jensen on random
/// admissible (phi, f, g), and the parts residual under dyadic refinement on
/// a fixed list of smooth pairs.
IdentitySuite run_identity_suite(const IdentityOptions& opts);

struct NamedSequence {
  std::string label;
  YoungSequence seq;
};

/// jordan, wiener(2), waterman(lambda_n = n), schramm(c_n = 1/n, p = 2) and a
/// two-piece custom sequence that is not of the form c_n * psi.
std::vector<NamedSequence> oracle_sequences();

struct OracleOptions {
  std::size_t n = 200;  ///< random functions; each is checked against every sequence
  std::uint64_t seed = 20240611;
  std::size_t max_points = 6;
  /// Exact: no extremal pruning and no tie tolerance, values must agree bit
  /// for bit. Otherwise the default search is used and rel_tol applies.
  bool exact = true;
  double rel_tol = 1e-15;
};

struct OracleMismatch {
  std::size_t trial = 0;
  std::string sequence;
  double search = 0.0;
  double oracle = 0.0;
};

struct OracleSuite {
  std::size_t trials = 0;
  std::size_t comparisons = 0;
  double worst_rel = 0.0;
  std::vector<OracleMismatch> mismatches;

  bool pass() const noexcept { return mismatches.empty(); }
};

/// phi_var against phi_var_oracle on random grids of 2..max_points points.
OracleSuite run_oracle_suite(const OracleOptions& opts);

}  // namespace bvtk::harness
