#pragma once

#include <cstddef>
#include <vector>

namespace genepool {

struct AssignmentResult {
  std::vector<std::size_t> assignment;  // assignment[row] = column
  double total_weight = 0.0;
};

// Maximum-weight perfect assignment on a square weight matrix (Hungarian
// method with potentials, O(n^3)). Which optimum is returned when several
// exist is unspecified. Throws std::invalid_argument on a non-square or
// non-finite matrix.
AssignmentResult max_weight_assignment(const std::vector<std::vector<double>>& weight);

// Same optimal total weight, but among all optima returns the one whose
// assignment vector is lexicographically smallest. Fixes rows left to right,
// re-solving the remainder for each candidate column; O(n^5) worst case,
// negligible for alphabet-sized inputs. Equality of totals is tested with a
// relative 1e-9 tolerance, exact for integer-valued weights.
AssignmentResult lexicographic_max_weight_assignment(
    const std::vector<std::vector<double>>& weight);

}  // namespace genepool
