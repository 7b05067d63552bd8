#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bvtk/young.hpp"

namespace bvtk {

/// Sums terms in decreasing order. Every collection value in the library goes
/// through this so that equal multisets of terms give bit-identical totals.
double canonical_sum(std::vector<double>& terms);

/// Optimal injective assignment of k increments to phi_1..phi_k.
struct Assignment {
  std::vector<std::size_t> index;  ///< index[j] in 1..k: the phi used for increment j
  double value = 0.0;              ///< sum_n phi_n(increment assigned to n)
};

/// Maximizes sum_j phi_{index[j]}(increments[j]).
///
/// Dominance sequences (phi_n = c_n psi, c_n non-increasing) are solved by
/// sorting increments in decreasing order. Otherwise the assignment is solved
/// exactly: full permutation search for k <= 7, Hungarian method above.
Assignment best_assignment(std::span<const double> increments, const YoungSequence& seq);

/// Hungarian method on a square matrix (row-major), maximizing the total.
/// Returns column for each row.
std::vector<std::size_t> max_weight_assignment(std::span<const double> weights, std::size_t k);

/// Evaluates a fixed assignment.
double assignment_value(std::span<const double> increments, std::span<const std::size_t> index,
                        const YoungSequence& seq);

}  // namespace bvtk
