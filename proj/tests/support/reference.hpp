#pragma once

#include <cstddef>
#include <vector>

#include "chats/metaeval.hpp"

// Independent reimplementations used as test oracles.
namespace chats::testing {

// (#concordant + 0.5 * #tied) / (#pos * #neg), O(n^2).
double pair_count_auc(const LabeledScores& d);

// Adaptive Simpson integration of the t density from 0 to |t|.
double quadrature_t_cdf(double t, double df);

// Exhaustive threshold search with exact rational comparisons: binarize at
// every midpoint (plus both infinities), keep the largest phi^2 (smallest p),
// then the larger phi, then the lower threshold.
struct ReferenceSweep {
  double threshold = 0.0;
  long long num = 0;        // ad - bc
  long long den = 0;        // (a+b)(c+d)(a+c)(b+d), 0 when degenerate
  std::vector<int> predicted;
};
ReferenceSweep reference_sweep(const std::vector<double>& scores, const std::vector<int>& labels);

}  // namespace chats::testing
