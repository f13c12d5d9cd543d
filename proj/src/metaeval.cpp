#include "chats/metaeval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "chats/errors.hpp"

namespace chats {

void LabeledScores::validate() const {
  if (scores.size() != labels.size())
    throw LengthMismatch("scores and labels differ in length: " + std::to_string(scores.size()) +
                         " vs " + std::to_string(labels.size()));
  if (!item_ids.empty() && item_ids.size() != scores.size())
    throw LengthMismatch("item ids are not aligned with scores");
  if (scores.empty()) throw EmptyInput("no labeled scores");
  for (int l : labels)
    if (l != 0 && l != 1) throw std::invalid_argument("labels must be 0 or 1");
}

bool LabeledScores::single_class() const {
  return std::all_of(labels.begin(), labels.end(), [&](int l) { return l == labels.front(); });
}

Confusion confusion_at(const LabeledScores& data, double threshold) {
  data.validate();
  Confusion c;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const bool pred = data.scores[i] > threshold;
    const bool pos = data.labels[i] == 1;
    if (pred && pos) ++c.tp;
    else if (pred) ++c.fp;
    else if (pos) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassifierReport classify_metrics(const LabeledScores& data, double threshold) {
  ClassifierReport r;
  r.threshold = threshold;
  r.counts = confusion_at(data, threshold);
  const Confusion& c = r.counts;
  r.accuracy = ratio(c.tp + c.tn, c.n());
  r.precision_undefined = c.tp + c.fp == 0;
  r.recall_undefined = c.tp + c.fn == 0;
  r.precision = ratio(c.tp, c.tp + c.fp);
  r.recall = ratio(c.tp, c.tp + c.fn);
  r.f1 = r.precision + r.recall > 0 ? 2 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  const std::size_t pos = c.tp + c.fn, neg = c.tn + c.fp;
  r.single_class = pos == 0 || neg == 0;
  if (r.single_class) {
    r.balanced_accuracy = pos == 0 ? ratio(c.tn, neg) : ratio(c.tp, pos);
  } else {
    r.balanced_accuracy = 0.5 * (ratio(c.tp, pos) + ratio(c.tn, neg));
  }
  const AucResult a = auc(data);
  r.auc = a.value;
  r.auc_undefined = a.undefined;
  return r;
}

AucResult auc(const LabeledScores& data) {
  data.validate();
  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return data.scores[a] < data.scores[b]; });
  // Average ranks (1-based) over tie groups.
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && data.scores[order[j + 1]] == data.scores[order[i]]) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
    i = j + 1;
  }
  double pos_rank_sum = 0.0;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.labels[i] == 1) {
      pos_rank_sum += rank[i];
      ++pos;
    }
  }
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) return {0.5, true};
  const double p = static_cast<double>(pos);
  const double u = pos_rank_sum - p * (p + 1.0) / 2.0;
  return {u / (p * static_cast<double>(neg)), false};
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIter = 10000;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = df / (df + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(df / 2.0, 0.5, x);
  return t > 0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double df) {
  if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
  if (std::isinf(t)) return 0.0;
  return std::clamp(regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t)), 0.0, 1.0);
}

CorrelationReport pearson_with_p(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw LengthMismatch("correlation inputs differ in length: " + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()));
  const std::size_t n = x.size();
  if (n < 3) throw std::invalid_argument("correlation needs at least 3 points");
  CorrelationReport rep;
  rep.n = n;
  const double nd = static_cast<double>(n);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / nd;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / nd;
  double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    rep.degenerate_variance = true;
    return rep;
  }
  const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  rep.pearson = r;
  const double df = nd - 2.0;
  if (std::fabs(r) >= 1.0) {
    rep.p_value = 0.0;
    return rep;
  }
  const double t = r * std::sqrt(df / (1.0 - r * r));
  rep.p_value = student_t_two_sided_p(t, df);
  return rep;
}

std::vector<double> sweep_candidates(const std::vector<double>& scores) {
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<double> out;
  out.reserve(sorted.size() + 1);
  out.push_back(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    out.push_back(sorted[i] + (sorted[i + 1] - sorted[i]) / 2.0);
  out.push_back(std::numeric_limits<double>::infinity());
  return out;
}

SweepResult sweep_threshold(const std::vector<double>& scores, const std::vector<int>& human_binary) {
  if (scores.size() != human_binary.size())
    throw LengthMismatch("sweep inputs differ in length");
  for (int h : human_binary)
    if (h != 0 && h != 1) throw std::invalid_argument("human labels must be 0 or 1");
  const std::vector<double> human(human_binary.begin(), human_binary.end());
  const std::vector<double> candidates = sweep_candidates(scores);

  // Both sides are binary, so r is phi over the 2x2 counts. Candidates are
  // ordered on r^2 = N^2 / D (one rounding of exact integers) and the sign of
  // N; p is strictly decreasing in r^2 at fixed n, so this is min p, then max r.
  SweepResult best;
  bool have = false;
  bool all_degenerate = true;
  double best_r2 = 0.0;
  int best_sign = 0;
  std::vector<double> bin(scores.size());
  for (double t : candidates) {
    std::int64_t a = 0, b = 0, c = 0, d = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      const bool pred = scores[i] > t;
      bin[i] = pred ? 1.0 : 0.0;
      if (pred) (human_binary[i] ? a : b)++;
      else (human_binary[i] ? c : d)++;
    }
    const std::int64_t num = a * d - b * c;
    const std::int64_t den_l = (a + b) * (c + d), den_r = (a + c) * (b + d);
    const double r2 = den_l == 0 || den_r == 0
                          ? 0.0
                          : static_cast<double>(num * num) /
                                (static_cast<double>(den_l) * static_cast<double>(den_r));
    const int sign = den_l == 0 || den_r == 0 ? 0 : (num > 0) - (num < 0);
    const bool better = !have || r2 > best_r2 || (r2 == best_r2 && sign > best_sign);
    all_degenerate = all_degenerate && (den_l == 0 || den_r == 0);
    if (better) {
      CorrelationReport rep = pearson_with_p(bin, human);
      rep.threshold = t;
      best.threshold = t;
      best.report = rep;
      best_r2 = r2;
      best_sign = sign;
      have = true;
    }
  }
  best.degenerate = all_degenerate;
  best.candidates_tried = candidates.size();
  return best;
}

std::vector<PrPoint> precision_recall_curve(const LabeledScores& data) {
  data.validate();
  std::vector<double> thresholds = sweep_candidates(data.scores);
  thresholds.pop_back();  // +inf predicts nothing
  std::vector<PrPoint> out;
  out.reserve(thresholds.size());
  for (double t : thresholds) {
    const Confusion c = confusion_at(data, t);
    out.push_back({t, ratio(c.tp, c.tp + c.fp), ratio(c.tp, c.tp + c.fn)});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PrPoint& a, const PrPoint& b) { return a.recall > b.recall; });
  return out;
}

std::string pr_curve_csv(const std::vector<PrPoint>& curve) {
  std::ostringstream os;
  os.precision(17);
  os << "threshold,precision,recall\n";
  for (const auto& p : curve) os << p.threshold << ',' << p.precision << ',' << p.recall << '\n';
  return os.str();
}

KappaResult cohens_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  if (a.size() != b.size())
    throw LengthMismatch("rating vectors differ in length: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()));
  if (a.empty()) throw EmptyInput("no ratings");
  const double n = static_cast<double>(a.size());
  std::map<std::string, std::pair<std::size_t, std::size_t>> marginals;
  std::size_t agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i] ? 1 : 0;
    ++marginals[a[i]].first;
    ++marginals[b[i]].second;
  }
  // kappa = (n * agree - sum m_a m_b) / (n^2 - sum m_a m_b), one division of exact integers.
  const auto count = static_cast<long double>(a.size());
  long double chance = 0;
  for (const auto& [cat, m] : marginals)
    chance += static_cast<long double>(m.first) * static_cast<long double>(m.second);
  KappaResult r;
  r.observed = static_cast<double>(agree) / n;
  r.expected = static_cast<double>(chance / (count * count));
  const long double den = count * count - chance;
  if (den <= 0) {
    r.kappa = agree == a.size() ? 1.0 : 0.0;
    r.undefined = agree != a.size();
    return r;
  }
  r.kappa = static_cast<double>((count * static_cast<long double>(agree) - chance) / den);
  return r;
}

KappaResult cohens_kappa(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<std::string> sa, sb;
  sa.reserve(a.size());
  sb.reserve(b.size());
  for (int v : a) sa.push_back(std::to_string(v));
  for (int v : b) sb.push_back(std::to_string(v));
  return cohens_kappa(sa, sb);
}

int summary_label_from_sentences(const std::vector<int>& sentence_labels) {
  if (sentence_labels.empty()) throw EmptyInput("summary has no sentence labels");
  return std::any_of(sentence_labels.begin(), sentence_labels.end(), [](int l) { return l == 0; })
             ? 0
             : 1;
}

}  // namespace chats
