#include "sera/attack.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace sera {

namespace {

constexpr double kDegenerateNorm = 1e-300;

using MapRM = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using MapRMMut = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

// Flat index of pair (u, v), u < v, in lexicographic order over C(n, 2).
inline std::size_t pair_index(std::size_t u, std::size_t v, std::size_t n) {
  return u * (2 * n - u - 1) / 2 + (v - u - 1);
}

}  // namespace

const char* sim_name(SimilarityKind s) {
  return s == SimilarityKind::COS ? "cos" : "corr";
}

std::optional<SimilarityKind> sim_from_name(std::string_view s) {
  if (s == "cos") return SimilarityKind::COS;
  if (s == "corr") return SimilarityKind::CORR;
  return std::nullopt;
}

double cos_sim(const double* x, const double* y, std::size_t d, bool* degenerate) {
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    xx += x[k] * x[k];
    yy += y[k] * y[k];
    xy += x[k] * y[k];
  }
  const double nx = std::sqrt(xx), ny = std::sqrt(yy);
  if (nx < kDegenerateNorm || ny < kDegenerateNorm) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return xy / (nx * ny);
}

double corr_sim(const double* x, const double* y, std::size_t d, bool* degenerate) {
  if (d < 2) throw std::invalid_argument("corr_sim: needs at least 2 dimensions");
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(d);
  my /= static_cast<double>(d);
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double a = x[k] - mx, b = y[k] - my;
    xx += a * a;
    yy += b * b;
    xy += a * b;
  }
  const double nx = std::sqrt(xx), ny = std::sqrt(yy);
  if (nx < kDegenerateNorm || ny < kDegenerateNorm) {
    if (degenerate) *degenerate = true;
    return 0.0;
  }
  return xy / (nx * ny);
}

ScoreSet score_pairs(const DenseMatrix& h, const Graph& g, SimilarityKind sim) {
  const std::size_t n = h.rows(), d = h.cols();
  if (n != g.num_nodes()) throw std::invalid_argument("score_pairs: row count != node count");
  if (n < 2) throw std::invalid_argument("score_pairs: need at least 2 nodes");
  if (sim == SimilarityKind::CORR && d < 2)
    throw std::invalid_argument("score_pairs: corr needs at least 2 dimensions");

  // Rows are preprocessed (centered for corr) and scaled to unit norm, so
  // every pair score is a single dot product. Degenerate rows become zero
  // vectors, which makes all their pair scores exactly 0.
  DenseMatrix unit(n, d);
  std::vector<uint8_t> degenerate(n, 0);
  std::size_t n_degenerate = 0;
  for (std::size_t v = 0; v < n; ++v) {
    const double* src = h.row(v);
    double* dst = unit.row(v);
    double mean = 0.0;
    if (sim == SimilarityKind::CORR) {
      for (std::size_t k = 0; k < d; ++k) mean += src[k];
      mean /= static_cast<double>(d);
    }
    double ss = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double a = src[k] - mean;
      dst[k] = a;
      ss += a * a;
    }
    const double norm = std::sqrt(ss);
    if (norm < kDegenerateNorm) {
      degenerate[v] = 1;
      ++n_degenerate;
      std::memset(dst, 0, d * sizeof(double));
    } else {
      const double inv = 1.0 / norm;
      for (std::size_t k = 0; k < d; ++k) dst[k] *= inv;
    }
  }

  const std::size_t total = n * (n - 1) / 2;
  ScoreSet out;
  out.pairs.reserve(total);
  out.scores.assign(total, 0.0);
  out.truth.assign(total, 0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      out.pairs.emplace_back(static_cast<uint32_t>(u), static_cast<uint32_t>(v));

  // Upper-triangular blocked GEMM: each row block is multiplied against the
  // trailing rows only, then scattered into the flat pair order.
  MapRM U(unit.data().data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  constexpr std::size_t kBlock = 256;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> s;
  for (std::size_t r0 = 0; r0 < n; r0 += kBlock) {
    const std::size_t r1 = std::min(r0 + kBlock, n);
    const std::size_t tail = n - r0;
    s.noalias() = U.middleRows(static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(r1 - r0)) *
                  U.middleRows(static_cast<Eigen::Index>(r0), static_cast<Eigen::Index>(tail)).transpose();
    for (std::size_t u = r0; u < r1; ++u) {
      const double* srow = s.data() + (u - r0) * tail;
      double* dst = out.scores.data() + pair_index(u, u + 1, n);
      // columns of s are offset by r0; pair (u, v) sits at column v - r0
      std::memcpy(dst, srow + (u + 1 - r0), (n - u - 1) * sizeof(double));
    }
  }

  g.for_each_edge([&](uint32_t u, uint32_t v) { out.truth[pair_index(u, v, n)] = 1; });
  out.positives = g.num_edges();
  out.negatives = total - out.positives;
  out.degenerate_pairs =
      n_degenerate * (n - n_degenerate) + n_degenerate * (n_degenerate - 1) / 2;
  return out;
}

ScoreSet feature_baseline(const DenseMatrix& x, const Graph& g, SimilarityKind sim) {
  return score_pairs(x, g, sim);
}

namespace {

AttackMetrics metrics_from_counts(std::size_t tp, std::size_t fp, std::size_t pos,
                                  std::size_t neg) {
  AttackMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = pos - tp;
  m.tn = neg - fp;
  m.fpr = neg ? static_cast<double>(fp) / static_cast<double>(neg)
              : std::numeric_limits<double>::quiet_NaN();
  m.fnr = pos ? static_cast<double>(m.fn) / static_cast<double>(pos)
              : std::numeric_limits<double>::quiet_NaN();
  m.err = m.fpr + m.fnr;
  return m;
}

}  // namespace

AttackMetrics rates(const ScoreSet& s, double tau) {
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < s.scores.size(); ++i) {
    if (s.scores[i] >= tau) {
      if (s.truth[i]) ++tp;
      else ++fp;
    }
  }
  return metrics_from_counts(tp, fp, s.positives, s.negatives);
}

double auroc(const ScoreSet& s) {
  const std::size_t pos = s.positives, neg = s.negatives;
  if (pos == 0 || neg == 0)
    throw std::domain_error("auroc: undefined when one class is empty");
  std::vector<uint32_t> order(s.scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return s.scores[a] < s.scores[b];
  });
  // Sum of mid-ranks over positives; ties within a group all get the mean
  // of the ranks the group spans.
  double rank_sum = 0.0;
  std::size_t i = 0;
  const std::size_t m = order.size();
  while (i < m) {
    std::size_t j = i;
    std::size_t pos_in_group = 0;
    while (j < m && s.scores[order[j]] == s.scores[order[i]]) {
      pos_in_group += s.truth[order[j]];
      ++j;
    }
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    rank_sum += mid_rank * static_cast<double>(pos_in_group);
    i = j;
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

ThresholdChoice best_threshold(const ScoreSet& s) {
  if (s.positives == 0 || s.negatives == 0)
    throw std::domain_error("best_threshold: undefined when one class is empty");
  std::vector<uint32_t> order(s.scores.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
    return s.scores[a] > s.scores[b];
  });

  ThresholdChoice best;
  best.tau = std::numeric_limits<double>::infinity();
  best.metrics = metrics_from_counts(0, 0, s.positives, s.negatives);  // predict nothing

  std::size_t tp = 0, fp = 0, i = 0;
  const std::size_t m = order.size();
  while (i < m) {
    const double tau = s.scores[order[i]];
    // consume the whole tie group: predicting ">= tau" includes all of it
    while (i < m && s.scores[order[i]] == tau) {
      if (s.truth[order[i]]) ++tp;
      else ++fp;
      ++i;
    }
    const AttackMetrics cand = metrics_from_counts(tp, fp, s.positives, s.negatives);
    // strict improvement only: on ties the earlier (larger) threshold stays
    if (cand.err < best.metrics.err) {
      best.tau = tau;
      best.metrics = cand;
    }
  }
  return best;
}

double label_homophily(const Graph& g, const std::vector<int32_t>& labels) {
  if (labels.size() != g.num_nodes())
    throw std::invalid_argument("label_homophily: label count != node count");
  if (g.num_edges() == 0) return std::numeric_limits<double>::quiet_NaN();
  std::size_t same = 0;
  g.for_each_edge([&](uint32_t u, uint32_t v) { same += labels[u] == labels[v]; });
  return static_cast<double>(same) / static_cast<double>(g.num_edges());
}

double feature_homophily(const Graph& g, const DenseMatrix& x) {
  if (x.rows() != g.num_nodes())
    throw std::invalid_argument("feature_homophily: row count != node count");
  if (g.num_edges() == 0) return std::numeric_limits<double>::quiet_NaN();
  double acc = 0.0;
  g.for_each_edge([&](uint32_t u, uint32_t v) {
    acc += cos_sim(x.row(u), x.row(v), x.cols());
  });
  return acc / static_cast<double>(g.num_edges());
}

}  // namespace sera
