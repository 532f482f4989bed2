#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "sera/graph.hpp"
#include "sera/matrix.hpp"

namespace sera {

enum class SimilarityKind { COS, CORR };

const char* sim_name(SimilarityKind s);
std::optional<SimilarityKind> sim_from_name(std::string_view s);

// Cosine of the angle between x and y. If either norm is below 1e-300 the
// score is 0 and *degenerate (when given) is set.
double cos_sim(const double* x, const double* y, std::size_t d, bool* degenerate = nullptr);

// Pearson correlation = cosine after centering each vector; requires d >= 2.
// Zero-variance vectors degenerate to score 0.
double corr_sim(const double* x, const double* y, std::size_t d, bool* degenerate = nullptr);

// Scores for every unordered pair u < v in lexicographic order, with ground
// truth from the graph's edge set. Self-pairs are never scored.
struct ScoreSet {
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  std::vector<double> scores;
  std::vector<uint8_t> truth;
  std::size_t positives = 0, negatives = 0;
  std::size_t degenerate_pairs = 0;  // pairs where at least one side degenerated
};

ScoreSet score_pairs(const DenseMatrix& h, const Graph& g, SimilarityKind sim);

// The attack run on raw features instead of representations.
ScoreSet feature_baseline(const DenseMatrix& x, const Graph& g,
                          SimilarityKind sim = SimilarityKind::COS);

struct AttackMetrics {
  double fpr = 0.0, fnr = 0.0, err = 0.0;  // err is defined as fpr + fnr
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// Classify score >= tau as "edge". FPR/FNR are NaN when the respective class
// is empty.
AttackMetrics rates(const ScoreSet& s, double tau);

// Mann-Whitney statistic with tie mid-ranks; equals the area under the
// empirical ROC curve. Throws when either class is empty.
double auroc(const ScoreSet& s);

struct ThresholdChoice {
  double tau = 0.0;
  AttackMetrics metrics;
};

// Exact minimizer of FPR+FNR over all distinct scores plus +inf; ties keep
// the largest threshold.
ThresholdChoice best_threshold(const ScoreSet& s);

// Fraction of edges whose endpoints share a label / mean edge cosine.
// NaN on an edgeless graph.
double label_homophily(const Graph& g, const std::vector<int32_t>& labels);
double feature_homophily(const Graph& g, const DenseMatrix& x);

}  // namespace sera
