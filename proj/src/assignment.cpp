#include "bvtk/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "bvtk/error.hpp"

namespace bvtk {

double canonical_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end(), std::greater<>());
  double total = 0.0;
  for (double t : terms) total += t;
  return total;
}

double assignment_value(std::span<const double> increments, std::span<const std::size_t> index,
                        const YoungSequence& seq) {
  const std::size_t k = increments.size();
  std::vector<double> by_slot(k + 1, 0.0);
  std::vector<bool> used(k + 1, false);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t n = index[j];
    if (n == 0 || n > k || used[n]) throw ParameterError("assignment is not a permutation of 1..k");
    used[n] = true;
    by_slot[n] = increments[j];
  }
  std::vector<double> terms(k);
  for (std::size_t n = 1; n <= k; ++n) terms[n - 1] = seq.eval(n, by_slot[n]);
  return canonical_sum(terms);
}

std::vector<std::size_t> max_weight_assignment(std::span<const double> weights, std::size_t k) {
  if (weights.size() != k * k) throw ParameterError("assignment matrix must be k x k");
  // Jonker-Volgenant style O(k^3) shortest augmenting path on costs = -weights.
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0), minv(k + 1);
  std::vector<std::size_t> p(k + 1, 0), way(k + 1, 0);
  std::vector<bool> used(k + 1);
  auto cost = [&](std::size_t i, std::size_t j) { return -weights[(i - 1) * k + (j - 1)]; };
  for (std::size_t i = 1; i <= k; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= k; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= k; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> col(k);
  for (std::size_t j = 1; j <= k; ++j) col[p[j] - 1] = j - 1;
  return col;
}

Assignment best_assignment(std::span<const double> increments, const YoungSequence& seq) {
  const std::size_t k = increments.size();
  Assignment out;
  out.index.assign(k, 0);
  if (k == 0) return out;

  if (seq.has_dominance_certificate()) {
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return increments[a] > increments[b]; });
    for (std::size_t n = 0; n < k; ++n) out.index[order[n]] = n + 1;
    out.value = assignment_value(increments, out.index, seq);
    return out;
  }

  if (k <= 7) {
    // Depth-first over permutations in lexicographic order; perm[n] is the
    // increment placed in slot n+1. A branch is cut only when even its row
    // maxima cannot reach the incumbent by more than rounding, so every
    // permutation that could tie the maximum is still summed canonically.
    std::vector<double> table(k * k);
    for (std::size_t n = 0; n < k; ++n) {
      for (std::size_t j = 0; j < k; ++j) table[n * k + j] = seq.eval(n + 1, increments[j]);
    }
    std::vector<double> rest(k + 1, 0.0);
    for (std::size_t n = k; n-- > 0;) {
      rest[n] = rest[n + 1] + *std::max_element(table.begin() + static_cast<std::ptrdiff_t>(n * k),
                                                table.begin() + static_cast<std::ptrdiff_t>((n + 1) * k));
    }
    // Slots with identical rows are interchangeable: only increasing column
    // order across them is visited. The lexicographically first optimum
    // already has that form, so the result is unchanged.
    std::vector<bool> same_as_prev(k, false);
    for (std::size_t n = 1; n < k; ++n) {
      same_as_prev[n] = std::equal(table.begin() + static_cast<std::ptrdiff_t>(n * k),
                                   table.begin() + static_cast<std::ptrdiff_t>((n + 1) * k),
                                   table.begin() + static_cast<std::ptrdiff_t>((n - 1) * k));
    }
    double best = -1.0;
    std::vector<std::size_t> perm(k);
    std::vector<std::size_t> best_perm(k);
    std::iota(best_perm.begin(), best_perm.end(), 0);
    std::vector<double> terms(k);
    std::vector<bool> used(k, false);
    auto dfs = [&](auto&& self, std::size_t n, double partial) -> void {
      if (n == k) {
        for (std::size_t m = 0; m < k; ++m) terms[m] = table[m * k + perm[m]];
        const double total = canonical_sum(terms);
        if (total > best) {
          best = total;
          best_perm = perm;
        }
        return;
      }
      if ((partial + rest[n]) * (1.0 + 1e-12) < best) return;
      for (std::size_t j = 0; j < k; ++j) {
        if (used[j] || (same_as_prev[n] && j < perm[n - 1])) continue;
        used[j] = true;
        perm[n] = j;
        self(self, n + 1, partial + table[n * k + j]);
        used[j] = false;
      }
    };
    dfs(dfs, 0, 0.0);
    for (std::size_t n = 0; n < k; ++n) out.index[best_perm[n]] = n + 1;
    out.value = best;
    return out;
  }

  std::vector<double> w(k * k);
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t n = 0; n < k; ++n) w[j * k + n] = seq.eval(n + 1, increments[j]);
  }
  const auto col = max_weight_assignment(w, k);
  for (std::size_t j = 0; j < k; ++j) out.index[j] = col[j] + 1;
  out.value = assignment_value(increments, out.index, seq);
  return out;
}

}  // namespace bvtk
