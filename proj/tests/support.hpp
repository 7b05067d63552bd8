#pragma once

// Helpers shared by the unit tests: seeded instances and a brute-force
// Phi-variation written independently of the library's own oracle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include "bvtk/grid.hpp"
#include "bvtk/harness.hpp"
#include "bvtk/young.hpp"

namespace ts {

using bvtk::Grid;
using bvtk::SampledFunction;
using bvtk::YoungSequence;
using bvtk::harness::Random;

inline SampledFunction on_uniform(std::vector<double> values) {
  const std::size_t cells = values.size() - 1;
  return SampledFunction(Grid::uniform(cells), std::move(values));
}

inline SampledFunction on_grid(std::vector<double> pts, std::vector<double> values) {
  return SampledFunction(Grid(std::move(pts)), std::move(values));
}

// Every way to choose pairwise non-overlapping grid intervals, then every
// assignment of the chosen increments to distinct indices 1..k (all
// permutations of k indices out of 1..k). Grids of up to 6 points.
inline double brute_phi_var(const SampledFunction& x, const YoungSequence& seq) {
  const std::size_t m = x.size();
  double best = 0.0;
  std::vector<double> incs;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (!incs.empty()) {
      const std::size_t k = incs.size();
      std::vector<std::size_t> perm(k);
      std::iota(perm.begin(), perm.end(), std::size_t{1});
      do {
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += seq.eval(perm[j], incs[j]);
        best = std::max(best, s);
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    for (std::size_t a = from; a < m; ++a) {
      for (std::size_t b = a + 1; b < m; ++b) {
        incs.push_back(std::abs(x[b] - x[a]));
        rec(b);
        incs.pop_back();
      }
    }
  };
  rec(0);
  return best;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace ts
