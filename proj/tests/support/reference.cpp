#include "reference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

namespace chats::testing {

double pair_count_auc(const LabeledScores& d) {
  double good = 0, pairs = 0;
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j)
      if (d.labels[i] == 1 && d.labels[j] == 0) {
        pairs += 1;
        if (d.scores[i] > d.scores[j]) good += 1;
        if (d.scores[i] == d.scores[j]) good += 0.5;
      }
  return good / pairs;
}

namespace {

double t_density(double x, double df) {
  const double c = std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * M_PI);
  return c * std::pow(1 + x * x / df, -(df + 1) / 2);
}

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double eps, int depth) {
  const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15 * eps)
    return left + right + (left + right - whole) / 15;
  return simpson(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
}

}  // namespace

double quadrature_t_cdf(double t, double df) {
  auto f = [df](double x) { return t_density(x, df); };
  const double b = std::fabs(t);
  if (b == 0) return 0.5;
  const double fa = f(0), fb = f(b), fm = f(b / 2);
  const double half = simpson(f, 0, b, fa, fm, fb, b / 6 * (fa + 4 * fm + fb), 1e-13, 60);
  return t > 0 ? 0.5 + half : 0.5 - half;
}

ReferenceSweep reference_sweep(const std::vector<double>& scores, const std::vector<int>& labels) {
  std::set<double> distinct(scores.begin(), scores.end());
  std::vector<double> sorted(distinct.begin(), distinct.end());
  std::vector<double> thresholds{-std::numeric_limits<double>::infinity()};
  for (std::size_t i = 1; i < sorted.size(); ++i) thresholds.push_back(sorted[i - 1] + (sorted[i] - sorted[i - 1]) / 2);
  thresholds.push_back(std::numeric_limits<double>::infinity());

  ReferenceSweep best;
  bool have = false;
  for (double t : thresholds) {
    ReferenceSweep cur;
    cur.threshold = t;
    long long a = 0, b = 0, c = 0, d = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const int p = scores[i] > t;
      cur.predicted.push_back(p);
      if (p && labels[i]) ++a;
      if (p && !labels[i]) ++b;
      if (!p && labels[i]) ++c;
      if (!p && !labels[i]) ++d;
    }
    cur.num = a * d - b * c;
    cur.den = (a + b) * (c + d) * (a + c) * (b + d);
    if (cur.den == 0) cur.num = 0;
    if (!have) {
      best = cur;
      have = true;
      continue;
    }
    // Compare phi^2 = num^2 / den exactly: num1^2 * den2 vs num2^2 * den1.
    // Degenerate binarizations have phi = 0 (p = 1).
    const __int128 lhs = static_cast<__int128>(cur.num) * cur.num * (best.den == 0 ? 1 : best.den);
    const __int128 rhs = static_cast<__int128>(best.num) * best.num * (cur.den == 0 ? 1 : cur.den);
    const auto sign = [](long long v) { return (v > 0) - (v < 0); };
    if (lhs > rhs || (lhs == rhs && sign(cur.num) > sign(best.num))) best = cur;
  }
  return best;
}

}  // namespace chats::testing
