#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace chats {

struct LabeledScores {
  std::vector<double> scores;
  std::vector<int> labels;  // 0 or 1
  std::vector<std::string> item_ids;  // optional; empty or aligned

  // Throws LengthMismatch or EmptyInput; labels must be 0/1.
  void validate() const;
  std::size_t size() const { return scores.size(); }
  bool single_class() const;
};

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t n() const { return tp + fp + tn + fn; }
};

Confusion confusion_at(const LabeledScores& data, double threshold);

struct ClassifierReport {
  double accuracy = 0.0;
  double balanced_accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double auc = 0.5;
  double threshold = 0.0;
  Confusion counts;
  bool single_class = false;
  bool auc_undefined = false;
  bool precision_undefined = false;  // no positive predictions; reported as 0
  bool recall_undefined = false;     // no positive labels; reported as 0
};

// prediction = score > threshold.
ClassifierReport classify_metrics(const LabeledScores& data, double threshold);

struct AucResult {
  double value = 0.5;
  bool undefined = false;  // single-class labels
};

// Mann-Whitney AUC with average ranks for ties.
AucResult auc(const LabeledScores& data);

// Regularized incomplete beta I_x(a, b), continued fraction to 1e-15.
double regularized_incomplete_beta(double a, double b, double x);
// Student t cumulative distribution with `df` degrees of freedom.
double student_t_cdf(double t, double df);
// Two-sided tail probability P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

struct CorrelationReport {
  double pearson = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  std::optional<double> threshold;  // set when one side was binarized
  bool degenerate_variance = false;  // r undefined; reported as 0 with p = 1
};

// Product-moment correlation with a two-sided t-test p-value. Throws
// LengthMismatch, or std::invalid_argument when n < 3.
CorrelationReport pearson_with_p(const std::vector<double>& x, const std::vector<double>& y);

struct SweepResult {
  double threshold = 0.0;
  CorrelationReport report;
  bool degenerate = false;  // every candidate binarization had zero variance
  std::size_t candidates_tried = 0;
};

// -inf, the midpoints between consecutive distinct sorted scores, then +inf.
std::vector<double> sweep_candidates(const std::vector<double>& scores);

// Binarizes scores at each candidate threshold (score > t) and keeps the one
// with the smallest p-value, then the largest r, then the lowest threshold.
SweepResult sweep_threshold(const std::vector<double>& scores, const std::vector<int>& human_binary);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// One point at -inf and one per midpoint between distinct scores, ordered by
// recall descending (then threshold ascending).
std::vector<PrPoint> precision_recall_curve(const LabeledScores& data);
std::string pr_curve_csv(const std::vector<PrPoint>& curve);

struct KappaResult {
  double kappa = 0.0;
  double observed = 0.0;  // p_o
  double expected = 0.0;  // p_e
  bool undefined = false;
};

KappaResult cohens_kappa(const std::vector<std::string>& a, const std::vector<std::string>& b);
KappaResult cohens_kappa(const std::vector<int>& a, const std::vector<int>& b);

// 0 when any sentence label is 0. Throws EmptyInput.
int summary_label_from_sentences(const std::vector<int>& sentence_labels);

}  // namespace chats
