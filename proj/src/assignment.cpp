#include "genepool/assignment.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace genepool {

namespace {

void validate(const std::vector<std::vector<double>>& weight) {
  const std::size_t n = weight.size();
  if (n == 0) throw std::invalid_argument("assignment: empty matrix");
  for (const auto& row : weight) {
    if (row.size() != n) throw std::invalid_argument("assignment: matrix must be square");
    for (double w : row)
      if (!std::isfinite(w)) throw std::invalid_argument("assignment: non-finite weight");
  }
}

// Minimum-cost perfect assignment via shortest augmenting paths with dual
// potentials. 1-based internally; column 0 is the virtual unmatched row slot.
AssignmentResult solve_min_cost(const std::vector<std::vector<double>>& cost) {
  const std::size_t n = cost.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);

  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      std::size_t j1 = 0;
      double delta = inf;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
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
    } while (j0);
  }

  AssignmentResult out;
  out.assignment.resize(n);
  for (std::size_t j = 1; j <= n; ++j) {
    out.assignment[p[j] - 1] = j - 1;
    out.total_weight += cost[p[j] - 1][j - 1];
  }
  return out;
}

}  // namespace

AssignmentResult max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  validate(weight);
  std::vector<std::vector<double>> cost(weight.size());
  for (std::size_t r = 0; r < weight.size(); ++r) {
    cost[r].resize(weight.size());
    for (std::size_t c = 0; c < weight.size(); ++c) cost[r][c] = -weight[r][c];
  }
  AssignmentResult res = solve_min_cost(cost);
  res.total_weight = -res.total_weight;
  return res;
}

AssignmentResult lexicographic_max_weight_assignment(
    const std::vector<std::vector<double>>& weight) {
  validate(weight);
  const std::size_t n = weight.size();
  const double optimum = max_weight_assignment(weight).total_weight;

  std::vector<std::size_t> cols(n);
  for (std::size_t c = 0; c < n; ++c) cols[c] = c;

  std::vector<std::size_t> result(n);
  double remaining = optimum;  // optimal weight of the untouched subproblem
  for (std::size_t r = 0; r < n; ++r) {
    const double eps = 1e-9 * (1.0 + std::abs(remaining));
    for (std::size_t ci = 0; ci < cols.size(); ++ci) {
      const std::size_t c = cols[ci];
      double rest = 0.0;
      if (r + 1 < n) {
        std::vector<std::vector<double>> sub;
        sub.reserve(n - r - 1);
        for (std::size_t rr = r + 1; rr < n; ++rr) {
          std::vector<double> row;
          row.reserve(cols.size() - 1);
          for (std::size_t cj = 0; cj < cols.size(); ++cj)
            if (cj != ci) row.push_back(weight[rr][cols[cj]]);
          sub.push_back(std::move(row));
        }
        rest = max_weight_assignment(sub).total_weight;
      }
      if (weight[r][c] + rest >= remaining - eps) {
        result[r] = c;
        remaining -= weight[r][c];
        cols.erase(cols.begin() + ci);
        break;
      }
    }
  }

  AssignmentResult out;
  out.assignment = std::move(result);
  out.total_weight = optimum;
  return out;
}

}  // namespace genepool
