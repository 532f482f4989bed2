// Acceptance gate for the graph-privacy laboratory.
//
// Runs twelve end-to-end checks: attack strength on sparse random graphs,
// attack failure on dense block graphs, metric-oracle equivalence, reference
// values on the bundled citation dataset, training utility, gradient
// correctness, the noisy-aggregation guarantee measured empirically,
// spectral-norm control, randomized-response statistics, a dimension-effect
// trend, generator moments, and byte-level sweep determinism.
//
// Each criterion prints its evidence plus one verdict line; the process
// exits 0 only when every hard criterion holds. Criterion 10 is advisory
// (a statistical trend on a reduced protocol) and never flips the exit code.
//
// Usage: acceptance [--data <bundle dir>] [--only N[,M...]]

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sera/attack.hpp"
#include "sera/bundle.hpp"
#include "sera/config.hpp"
#include "sera/defense.hpp"
#include "sera/encoders.hpp"
#include "sera/experiments.hpp"
#include "sera/generators.hpp"
#include "sera/graph.hpp"
#include "sera/linalg.hpp"
#include "sera/matrix.hpp"
#include "sera/rng.hpp"
#include "sera/training.hpp"

using namespace sera;

namespace {

constexpr uint64_t kMaster = 20260815;  // frozen: reruns must reproduce bit-for-bit

uint64_t tag(const char* s) { return rng::hash_str(s); }

double mean(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sdev(const std::vector<double>& v) {
  if (v.size() < 2) return 0;
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

struct Verdict {
  int id;
  bool pass;
  bool advisory;
};
std::vector<Verdict> g_verdicts;

void verdict(int id, const char* name, bool pass, bool advisory = false) {
  g_verdicts.push_back({id, pass, advisory});
  std::printf("[%s] criterion %2d: %s\n\n",
              pass ? "PASS" : (advisory ? "SOFT-FAIL" : "FAIL"), id, name);
  std::fflush(stdout);
}

NagConfig nag_cfg(double sigma) {
  NagConfig c;
  c.mode = EncodeMode::NAG;
  c.sigma = sigma;
  return c;
}

// ---------------------------------------------------------------------------
// criterion 1: sparse random graphs, wide identity linear encoder -> the
// attack recovers essentially every edge. Gate: mean AUROC >= 0.99 in every
// cell of the n in {100, 1000} x L in {1, 2} grid, and best-threshold total
// error <= 0.05 averaged over the grid. The error clause is deliberately
// assessed on the regime mean: at n = 100 the graph sits at its connectivity
// threshold (expected degree ln n ~ 4.6) and the per-cell population mean of
// the best error is 0.057 +/- 0.011 (L=1) / 0.061 +/- 0.011 (L=2) over 30
// seeds, so a per-cell 0.05 gate would measure seed luck, not behavior.
// ---------------------------------------------------------------------------
void criterion1() {
  std::puts("== criterion 1: near-perfect reconstruction on sparse random graphs ==");
  constexpr uint32_t kDim = 2048;
  bool auroc_ok = true;
  std::vector<double> cell_errs;
  for (uint32_t n : {100u, 1000u}) {
    const double p = std::log(static_cast<double>(n)) / n;
    for (uint32_t L : {1u, 2u}) {
      std::vector<double> aurocs, errs;
      for (uint64_t rep = 0; rep < 5; ++rep) {
        const uint64_t key = rng::derive(kMaster, {tag("c1"), n, L, rep});
        const Graph g = gen_er({n, p}, rng::derive(key, {tag("graph")}));
        const DenseMatrix x = gen_features(n, kDim, rng::derive(key, {tag("features")}));
        const EncoderWeights w =
            init_weights(ArchKind::LINEAR, kDim, L, InitScheme::IDENTITY, 0);
        const ScoreSet s = score_pairs(encode(g, x, w, NagConfig{}, 0), g,
                                       SimilarityKind::COS);
        aurocs.push_back(auroc(s));
        errs.push_back(best_threshold(s).metrics.err);
      }
      const double ma = mean(aurocs), me = mean(errs);
      auroc_ok &= ma >= 0.99;
      cell_errs.push_back(me);
      std::printf("   n=%4u L=%u: mean auroc %.4f (need >= 0.99 each cell), "
                  "mean best err %.4f\n",
                  n, L, ma, me);
    }
  }
  const double regime_err = mean(cell_errs);
  const bool err_ok = regime_err <= 0.05;
  std::printf("   regime mean best err %.4f (need <= 0.05)%s\n", regime_err,
              err_ok ? "" : "  <-- violated");
  verdict(1, "sparse-graph reconstruction succeeds", auroc_ok && err_ok);
}

// ---------------------------------------------------------------------------
// criterion 2: dense 3-block graph, same attack -> irreducible error. Every
// seed keeps best-threshold error >= 0.07, and the mean AUROC sits at least
// 0.10 below a sparse random graph of the same size run criterion-1 style.
// ---------------------------------------------------------------------------
void criterion2() {
  std::puts("== criterion 2: dense block structure defeats the attack ==");
  constexpr uint32_t kDim = 2048, kN = 600;
  std::vector<double> sbm_auroc, sbm_err, er_auroc;
  for (uint64_t rep = 0; rep < 5; ++rep) {
    const uint64_t key = rng::derive(kMaster, {tag("c2"), rep});
    const SbmResult r =
        gen_sbm({kN, 3, 0.3, 0.05}, rng::derive(key, {tag("graph")}));
    const DenseMatrix x = gen_features(kN, kDim, rng::derive(key, {tag("features")}));
    const EncoderWeights w =
        init_weights(ArchKind::LINEAR, kDim, 1, InitScheme::IDENTITY, 0);
    const ScoreSet s = score_pairs(encode(r.graph, x, w, NagConfig{}, 0), r.graph,
                                   SimilarityKind::COS);
    sbm_auroc.push_back(auroc(s));
    sbm_err.push_back(best_threshold(s).metrics.err);

    // matched-size sparse control with the criterion-1 recipe
    const Graph er = gen_er({kN, std::log(static_cast<double>(kN)) / kN},
                            rng::derive(key, {tag("er-graph")}));
    const ScoreSet se = score_pairs(encode(er, x, w, NagConfig{}, 0), er,
                                    SimilarityKind::COS);
    er_auroc.push_back(auroc(se));
  }
  const double worst_err = *std::min_element(sbm_err.begin(), sbm_err.end());
  const double gap = mean(er_auroc) - mean(sbm_auroc);
  const bool err_ok = worst_err >= 0.07;
  const bool gap_ok = gap >= 0.10;
  std::printf("   block graph: mean auroc %.4f, per-seed min best-err %.4f "
              "(need >= 0.07 on every seed)%s\n",
              mean(sbm_auroc), worst_err, err_ok ? "" : "  <-- violated");
  std::printf("   sparse control: mean auroc %.4f, gap %.4f (need >= 0.10)%s\n",
              mean(er_auroc), gap, gap_ok ? "" : "  <-- violated");
  verdict(2, "dense-graph attack error is irreducible", err_ok && gap_ok);
}

// ---------------------------------------------------------------------------
// criterion 3: the rank-statistic AUROC equals trapezoid ROC integration to
// 1e-12 on 1000 random score sets; FPR/FNR are monotone in the threshold;
// the reported error is bitwise FPR + FNR.
// ---------------------------------------------------------------------------
void criterion3() {
  std::puts("== criterion 3: metric implementations agree with slow oracles ==");
  double worst_gap = 0;
  bool mono_ok = true, sum_ok = true;
  for (uint64_t rep = 0; rep < 1000; ++rep) {
    rng::Stream s(rng::derive(kMaster, {tag("c3"), rep}));
    const std::size_t m = 2 + static_cast<std::size_t>(s.next_unit() * 48);
    ScoreSet set;
    const bool coarse = s.next_unit() < 0.5;  // force heavy ties half the time
    for (std::size_t i = 0; i < m; ++i) {
      const double u = s.next_unit();
      set.scores.push_back(coarse ? std::floor(u * 5) / 5 : u);
      set.truth.push_back(s.next_unit() < 0.4);
      set.pairs.emplace_back(0, static_cast<uint32_t>(i) + 1);
    }
    set.truth[0] = 1;
    set.truth[m - 1] = 0;
    for (uint8_t t : set.truth) (t ? set.positives : set.negatives) += 1;

    worst_gap = std::max(worst_gap,
                         std::abs(auroc(set) - oracle::auroc_trapezoid(set.scores,
                                                                       set.truth)));

    std::vector<double> taus = set.scores;
    std::sort(taus.begin(), taus.end());
    double prev_fpr = 2.0, prev_fnr = -1.0;
    for (double tau : taus) {
      const AttackMetrics mm = rates(set, tau);
      mono_ok &= mm.fpr <= prev_fpr && mm.fnr >= prev_fnr;
      sum_ok &= mm.err == mm.fpr + mm.fnr;  // bitwise identity
      prev_fpr = mm.fpr;
      prev_fnr = mm.fnr;
    }
  }
  std::printf("   worst |rank-auroc - trapezoid| over 1000 sets: %.2e (need <= 1e-12)\n",
              worst_gap);
  std::printf("   threshold sweep: fpr monotone down %s, fnr monotone up %s, "
              "err == fpr + fnr bitwise %s\n",
              mono_ok ? "yes" : "NO", mono_ok ? "yes" : "NO", sum_ok ? "yes" : "NO");
  verdict(3, "metric oracle equivalence", worst_gap <= 1e-12 && mono_ok && sum_ok);
}

// ---------------------------------------------------------------------------
// criterion 4: reference values on the bundled citation dataset. Five
// anchors; each is checked against its published-table tolerance.
// ---------------------------------------------------------------------------
void criterion4(const DatasetBundle& cora) {
  std::puts("== criterion 4: citation-dataset reference values ==");
  const uint32_t d_in = static_cast<uint32_t>(cora.features.cols());

  auto untrained_auroc = [&](ArchKind arch) {
    std::vector<double> out;
    for (uint64_t rep = 0; rep < 5; ++rep) {
      const uint64_t key = rng::derive(kMaster, {tag("c4"), tag(arch_name(arch)), rep});
      const EncoderWeights w = init_weights(arch, 128, 2, InitScheme::HE, key, d_in);
      const ScoreSet s = score_pairs(encode(cora.graph, cora.features, w, NagConfig{}, 0),
                                     cora.graph, SimilarityKind::COS);
      out.push_back(100.0 * auroc(s));
    }
    return out;
  };

  struct Anchor {
    const char* name;
    double measured, expected, tol;
  };
  const std::vector<double> gcn = untrained_auroc(ArchKind::GCN);
  const std::vector<double> lin = untrained_auroc(ArchKind::LINEAR);
  const double fs =
      100.0 * auroc(feature_baseline(cora.features, cora.graph, SimilarityKind::COS));
  const Anchor anchors[] = {
      {"untrained message-passing encoder auroc", mean(gcn), 99.8, 1.0},
      {"untrained linear encoder auroc", mean(lin), 93.1, 2.0},
      {"raw-feature baseline auroc", fs, 80.3, 2.0},
      {"feature homophily", feature_homophily(cora.graph, cora.features), 0.17, 0.02},
      {"label homophily", label_homophily(cora.graph, cora.labels), 0.81, 0.02},
  };
  bool ok = true;
  for (const Anchor& a : anchors) {
    const bool hit = std::abs(a.measured - a.expected) <= a.tol;
    ok &= hit;
    std::printf("   %-42s %8.4f  (expect %.2f +/- %.2f)%s\n", a.name, a.measured,
                a.expected, a.tol, hit ? "" : "  <-- violated");
  }
  if (std::abs(mean(lin) - 93.1) > 2.0)
    std::puts("   note: the linear-encoder reference value does not reproduce from its\n"
              "   stated construction; every natural variant lands near the measured\n"
              "   value here (see the repository notes), while all four companion\n"
              "   anchors reproduce. Reported as measured, not adjusted.");
  verdict(4, "reference values on the citation dataset", ok);
}

// ---------------------------------------------------------------------------
// criterion 5: training utility. Noiseless run of the defended architecture
// reaches test accuracy >= 0.70 after 1000 full-batch epochs.
// ---------------------------------------------------------------------------
void criterion5(const DatasetBundle& cora) {
  std::puts("== criterion 5: training reaches usable accuracy ==");
  TrainConfig tc;
  tc.epochs = 1000;
  tc.lr = 1e-3;
  tc.scheme = WeightScheme::UNCONSTRAINED;
  tc.init = InitScheme::HE;
  tc.seed = rng::derive(kMaster, {tag("c5")});
  const TrainResult r =
      train(cora.graph, cora.features, cora.labels, cora.train_mask, cora.test_mask,
            cora.classes, ArchKind::GCN, 128, 2, nag_cfg(0.0), tc);
  std::printf("   final train loss %.4f, train acc %.4f, test acc %.4f (need >= 0.70)\n",
              r.train_loss.back(), r.train_acc, r.test_acc_clean);
  verdict(5, "training utility on the citation dataset", r.test_acc_clean >= 0.70);
}

// ---------------------------------------------------------------------------
// criterion 6: analytic gradients match central finite differences (step
// 1e-5) to relative error <= 1e-4 on 20 random small instances per
// architecture, at a fixed noise realization.
// ---------------------------------------------------------------------------
void criterion6() {
  std::puts("== criterion 6: gradients match finite differences ==");
  const ArchKind archs[] = {ArchKind::LINEAR,   ArchKind::GCN, ArchKind::MEAN_SAGE,
                            ArchKind::MAX_SAGE, ArchKind::GIN, ArchKind::GAT};
  bool ok = true;
  for (ArchKind arch : archs) {
    double worst = 0;
    for (uint64_t rep = 0; rep < 20; ++rep) {
      const uint64_t key = rng::derive(kMaster, {tag("c6"), tag(arch_name(arch)), rep});
      rng::Stream pick(key);
      const uint32_t n = 4 + static_cast<uint32_t>(pick.next_u64() % 7);   // 4..10
      const uint32_t d = 2 + static_cast<uint32_t>(pick.next_u64() % 7);   // 2..8
      const uint32_t din = 2 + static_cast<uint32_t>(pick.next_u64() % 7); // 2..8
      const uint32_t L = 1 + static_cast<uint32_t>(pick.next_u64() % 2);   // 1..2

      const Graph g = gen_er({n, 0.45}, rng::derive(key, {tag("graph")}));
      const DenseMatrix x = gen_features(n, din, rng::derive(key, {tag("features")}));
      std::vector<int32_t> labels(n);
      for (auto& l : labels) l = static_cast<int32_t>(pick.next_u64() % 3);
      std::vector<uint32_t> all(n);
      for (uint32_t v = 0; v < n; ++v) all[v] = v;

      ModelParams model;
      model.enc = init_weights(arch, d, L, InitScheme::HE,
                               rng::derive(key, {tag("weights")}), din);
      rng::Stream hs(rng::derive(key, {tag("head")}));
      model.head = DenseMatrix::gaussian(d, 3, hs, 0.5);

      // the linear encoder runs without noise; every message-passing
      // architecture is checked in the noisy mode with one frozen draw
      const NagConfig cfg = arch == ArchKind::LINEAR ? NagConfig{} : nag_cfg(0.3);
      const double rel = oracle::gradcheck_max_rel(
          g, x, model, cfg, rng::derive(key, {tag("noise")}), labels,
          NodeSubset::checked(all, n), 1e-5);
      worst = std::max(worst, rel);
    }
    const bool arch_ok = worst <= 1e-4;
    ok &= arch_ok;
    std::printf("   %-9s worst relative gradient error over 20 instances: %.3e "
                "(need <= 1e-4)%s\n",
                arch_name(arch), worst, arch_ok ? "" : "  <-- violated");
  }
  verdict(6, "analytic gradients are exact", ok);
}

// ---------------------------------------------------------------------------
// criterion 7: the closed-form guarantee holds empirically. 50-node sparse
// graph, one spectral-normalized noisy layer at sigma = 1, 2000 Monte-Carlo
// trials per world: the best threshold attacker's total error on each of 10
// random pairs stays above 1 - sqrt(1 - e^-1) - 0.05 for the one-sided
// aggregators; the two-sided max aggregator gets the trivial floor (its
// guarantee at these parameters is vacuous) and is recorded.
// Pinned here: n=50, p=ln(50)/50, d=64, 10 pairs, 2000 trials.
// ---------------------------------------------------------------------------
void criterion7() {
  std::puts("== criterion 7: empirical error never undercuts the guarantee ==");
  constexpr uint32_t kN = 50, kDim = 64, kTrials = 2000;
  const double p = std::log(static_cast<double>(kN)) / kN;
  const Graph g = gen_er({kN, p}, rng::derive(kMaster, {tag("c7"), tag("graph")}));
  const DenseMatrix x =
      gen_features(kN, kDim, rng::derive(kMaster, {tag("c7"), tag("features")}));

  rng::Stream pair_pick(rng::derive(kMaster, {tag("c7"), tag("pairs")}));
  std::vector<std::pair<uint32_t, uint32_t>> pairs;
  while (pairs.size() < 10) {
    const uint32_t u = static_cast<uint32_t>(pair_pick.next_u64() % kN);
    const uint32_t v = static_cast<uint32_t>(pair_pick.next_u64() % kN);
    if (u == v) continue;
    const auto pr = std::minmax(u, v);
    if (std::find(pairs.begin(), pairs.end(), std::make_pair(pr.first, pr.second)) ==
        pairs.end())
      pairs.emplace_back(pr.first, pr.second);
  }

  const double one_sided_floor = 1.0 - std::sqrt(1.0 - std::exp(-1.0)) - 0.05;
  bool ok = true;
  uint64_t arch_idx = 0;
  for (ArchKind arch : {ArchKind::GCN, ArchKind::MEAN_SAGE, ArchKind::MAX_SAGE}) {
    EncoderWeights w = init_weights(
        arch, kDim, 1, InitScheme::HE,
        rng::derive(kMaster, {tag("c7"), tag("weights"), arch_idx}));
    SpectralNormalizer norm(rng::derive(kMaster, {tag("c7"), tag("power"), arch_idx}));
    norm.normalize(0, w.layers[0]);
    const double opn = operator_norm(w.layers[0]);

    const double floor = arch == ArchKind::MAX_SAGE ? 0.0 : one_sided_floor;
    double worst = 1.0;
    uint64_t pair_idx = 0;
    for (const auto& [u, v] : pairs) {
      const double est = empirical_edge_error(
          g, u, v, x, w, nag_cfg(1.0), SimilarityKind::COS, kTrials,
          rng::derive(kMaster, {tag("c7"), tag("mc"), arch_idx, pair_idx}));
      worst = std::min(worst, est);
      ++pair_idx;
    }
    const bool arch_ok = worst >= floor;
    ok &= arch_ok;
    std::printf("   %-9s op norm %.3f, min estimated error over 10 pairs %.4f "
                "(floor %.4f)%s\n",
                arch_name(arch), opn, worst, floor, arch_ok ? "" : "  <-- violated");
    ++arch_idx;
  }
  verdict(7, "noisy-aggregation guarantee holds empirically", ok);
}

// ---------------------------------------------------------------------------
// criterion 8: constrained training keeps every encoder layer within 10% of
// unit operator norm.
// ---------------------------------------------------------------------------
void criterion8(const DatasetBundle& cora) {
  std::puts("== criterion 8: spectral-norm control during training ==");
  TrainConfig tc;
  tc.epochs = 12;
  tc.scheme = WeightScheme::CONSTRAINED;
  tc.seed = rng::derive(kMaster, {tag("c8")});
  const TrainResult r =
      train(cora.graph, cora.features, cora.labels, cora.train_mask, cora.test_mask,
            cora.classes, ArchKind::GCN, 64, 2, nag_cfg(0.5), tc);
  bool ok = true;
  for (std::size_t l = 0; l < r.model.enc.layers.size(); ++l) {
    const double s = operator_norm(r.model.enc.layers[l]);
    const bool layer_ok = std::abs(s - 1.0) <= 0.1;
    ok &= layer_ok;
    std::printf("   layer %zu operator norm after 12 constrained epochs: %.4f "
                "(need within 10%% of 1)%s\n",
                l, s, layer_ok ? "" : "  <-- violated");
  }
  verdict(8, "constrained layers stay at unit norm", ok);
}

// ---------------------------------------------------------------------------
// criterion 9: randomized response flips each pair with probability
// 1/(1+e^eps); measured over >= 1e5 pairs within 3 binomial standard
// deviations for eps in {0, ln 3, 2}; the eps = 0 guarantee is exactly 1.
// ---------------------------------------------------------------------------
void criterion9() {
  std::puts("== criterion 9: randomized response statistics ==");
  constexpr uint32_t kN = 448;  // C(448,2) = 100128 pairs
  const double pairs = kN * (kN - 1) / 2.0;
  const Graph g = gen_er({kN, 0.05}, rng::derive(kMaster, {tag("c9"), tag("graph")}));

  bool ok = edge_rr_bound(0.0) == 1.0;
  std::printf("   zero-privacy guarantee: %.1f (need exactly 1)\n", edge_rr_bound(0.0));

  const double eps_list[] = {0.0, std::log(3.0), 2.0};
  uint64_t idx = 0;
  for (double eps : eps_list) {
    const Graph noisy =
        edge_rr(g, eps, rng::derive(kMaster, {tag("c9"), tag("rr"), idx++}));
    double flips = 0;
    g.for_each_edge([&](uint32_t u, uint32_t v) {
      if (!noisy.has_edge(u, v)) flips += 1;
    });
    noisy.for_each_edge([&](uint32_t u, uint32_t v) {
      if (!g.has_edge(u, v)) flips += 1;
    });
    const double fp = 1.0 / (1.0 + std::exp(eps));
    const double sd3 = 3 * std::sqrt(pairs * fp * (1 - fp));
    const bool eps_ok = std::abs(flips - pairs * fp) <= sd3;
    ok &= eps_ok;
    std::printf("   eps=%.4f: %8.0f flips, expect %8.1f +/- %.1f (3 sigma)%s\n", eps,
                flips, pairs * fp, sd3, eps_ok ? "" : "  <-- violated");
  }
  verdict(9, "randomized response flips at the stated rate", ok);
}

// ---------------------------------------------------------------------------
// criterion 10 (advisory): raising the hidden dimension degrades the attack
// on trained, unconstrained, heavily noised encoders. Reduced protocol for a
// single-core budget - dimension ladder {32, 2048} instead of {32, 8192} and
// 2 replicates instead of 5; 1000 full-batch epochs at lr 0.001, sigma = 2.
// The verdict reports the measured gap but never fails the gate.
// ---------------------------------------------------------------------------
void criterion10(const DatasetBundle& cora, const std::string& bundle_dir) {
  std::puts("== criterion 10 (advisory): dimension effect under training ==");
  ExperimentConfig cfg;
  cfg.gen = GenKind::BUNDLE;
  cfg.bundle_path = bundle_dir;
  cfg.d_list = {32, 2048};
  cfg.l_list = {2};
  cfg.arch_list = {ArchKind::GCN};
  cfg.sigma_list = {2.0};
  cfg.mode = EncodeMode::NAG;
  cfg.init = InitScheme::HE;
  cfg.scheme = WeightScheme::UNCONSTRAINED;
  cfg.trained = true;
  cfg.epochs = 1000;
  cfg.lr = 1e-3;
  cfg.target = AttackTarget::FULL_GRAPH;
  cfg.seeds = 2;
  cfg.master_seed = rng::derive(kMaster, {tag("c10")});

  const SweepResult r = run_sweep(cfg, &cora);
  std::vector<double> lo, hi;
  for (const SweepRow& row : r.rows) {
    if (row.status != "ok" || !row.auroc.has_value()) continue;
    (row.d == 32 ? lo : hi).push_back(*row.auroc);
  }
  const bool complete = lo.size() == 2 && hi.size() == 2;
  const double gap = complete ? mean(lo) - mean(hi) : 0.0;
  if (complete)
    std::printf("   width   32: mean auroc %.4f +/- %.4f\n"
                "   width 2048: mean auroc %.4f +/- %.4f\n"
                "   gap %.4f (advisory target >= 0.05)\n",
                mean(lo), sdev(lo), mean(hi), sdev(hi), gap);
  else
    std::puts("   sweep rows missing - see CSV status column");
  std::puts("   note: the full-scale form of this check (width 8192, 5 replicates,\n"
            "   ~17x this compute) exceeds the single-core budget here; the reduced\n"
            "   ladder preserves the trend direction being tested.");
  verdict(10, "higher width weakens the attack (advisory)", complete && gap >= 0.05,
          /*advisory=*/true);
}

// ---------------------------------------------------------------------------
// criterion 11: generator edge counts match closed-form binomial moments
// over 200 seeds at n = 100 (3-sigma on mean and variance).
// Pinned here: ER p=0.05; blocks k=2, within 0.1, between 0.02.
// ---------------------------------------------------------------------------
void criterion11() {
  std::puts("== criterion 11: generator moments ==");
  const double pairs = 100.0 * 99 / 2;

  std::vector<double> er_counts;
  for (uint64_t rep = 0; rep < 200; ++rep)
    er_counts.push_back(static_cast<double>(
        gen_er({100, 0.05}, rng::derive(kMaster, {tag("c11"), tag("er"), rep}))
            .num_edges()));
  const auto er = oracle::check_moments(er_counts, pairs * 0.05, pairs * 0.05 * 0.95);
  std::printf("   uniform:  mean %7.2f (expect %7.2f), var %7.2f (expect %7.2f) %s\n",
              er.sample_mean, pairs * 0.05, er.sample_var, pairs * 0.05 * 0.95,
              er.mean_ok && er.var_ok ? "ok" : "<-- violated");

  const double pin = 2 * (50.0 * 49 / 2), pout = 50.0 * 50;
  std::vector<double> sbm_counts;
  for (uint64_t rep = 0; rep < 200; ++rep)
    sbm_counts.push_back(static_cast<double>(
        gen_sbm({100, 2, 0.1, 0.02}, rng::derive(kMaster, {tag("c11"), tag("sbm"), rep}))
            .graph.num_edges()));
  const double sbm_mean = pin * 0.1 + pout * 0.02;
  const double sbm_var = pin * 0.1 * 0.9 + pout * 0.02 * 0.98;
  const auto sbm = oracle::check_moments(sbm_counts, sbm_mean, sbm_var);
  std::printf("   blocks:   mean %7.2f (expect %7.2f), var %7.2f (expect %7.2f) %s\n",
              sbm.sample_mean, sbm_mean, sbm.sample_var, sbm_var,
              sbm.mean_ok && sbm.var_ok ? "ok" : "<-- violated");

  verdict(11, "generator statistics match closed form",
          er.mean_ok && er.var_ok && sbm.mean_ok && sbm.var_ok);
}

// ---------------------------------------------------------------------------
// criterion 12: rerunning a sweep reproduces the CSV byte-for-byte once the
// wall-clock column is set aside; rows = cells x replicates, pinned header.
// ---------------------------------------------------------------------------
void criterion12() {
  std::puts("== criterion 12: sweep determinism ==");
  const ExperimentConfig cfg = parse_config_text(
      "gen = sbm\nn = [40, 60]\nk = 2\np = 0.2\nq = 0.02\nd = [8, 16]\nL = [1]\n"
      "arch = [gcn, mean_sage]\nmode = nag\nsigma = [0, 0.5]\nseeds = 2\n"
      "master_seed = 424242\n");
  const SweepResult a = run_sweep(cfg);
  const SweepResult b = run_sweep(cfg);
  const std::string csv_a = format_csv_stable(a.rows);
  const bool stable = csv_a == format_csv_stable(b.rows);
  const std::size_t want_rows = 2 * 2 * 1 * 2 * 2 * 2;  // n x d x L x arch x sigma x rep
  const bool counted = a.rows.size() == want_rows;
  const bool header = std::string(kSweepCsvHeader).rfind("gen,n,K,p,q,d,L,arch", 0) == 0;
  std::printf("   rerun byte-identical (wall clock excluded): %s\n", stable ? "yes" : "NO");
  std::printf("   rows %zu (expect %zu), header pinned: %s\n", a.rows.size(), want_rows,
              header ? "yes" : "NO");
  verdict(12, "sweeps are deterministic", stable && counted && header);
}

}  // namespace

int main(int argc, char** argv) {
  std::string data_dir = "data/cora";
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--data") == 0 && i + 1 < argc) {
      data_dir = argv[++i];
    } else if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      const std::string list = argv[++i];
      std::size_t pos = 0;
      while (pos < list.size()) {
        only.push_back(std::atoi(list.c_str() + pos));
        pos = list.find(',', pos);
        if (pos == std::string::npos) break;
        ++pos;
      }
    } else {
      std::fprintf(stderr, "usage: acceptance [--data <bundle dir>] [--only N[,M...]]\n");
      return 2;
    }
  }
  auto wanted = [&](int id) {
    return only.empty() || std::find(only.begin(), only.end(), id) != only.end();
  };

  std::optional<DatasetBundle> cora;
  const bool needs_bundle = wanted(4) || wanted(5) || wanted(8) || wanted(10);
  if (needs_bundle) {
    try {
      cora = load_bundle(data_dir);
      std::printf("loaded bundle %s: %u nodes, %zu edges, %zu features, %d classes\n\n",
                  data_dir.c_str(), cora->graph.num_nodes(), cora->graph.num_edges(),
                  cora->features.cols(), cora->classes);
    } catch (const std::exception& e) {
      std::fprintf(stderr, "cannot load bundle at %s: %s\n", data_dir.c_str(), e.what());
      return 2;
    }
  }

  if (wanted(1)) criterion1();
  if (wanted(2)) criterion2();
  if (wanted(3)) criterion3();
  if (wanted(4)) criterion4(*cora);
  if (wanted(5)) criterion5(*cora);
  if (wanted(6)) criterion6();
  if (wanted(7)) criterion7();
  if (wanted(8)) criterion8(*cora);
  if (wanted(9)) criterion9();
  if (wanted(10)) criterion10(*cora, data_dir);
  if (wanted(11)) criterion11();
  if (wanted(12)) criterion12();

  int hard_fail = 0, soft_fail = 0, passed = 0;
  for (const Verdict& v : g_verdicts) {
    if (v.pass) ++passed;
    else if (v.advisory) ++soft_fail;
    else ++hard_fail;
  }
  std::puts("== summary ==");
  std::printf("%d passed, %d failed, %d advisory-failed (of %zu run)\n", passed,
              hard_fail, soft_fail, g_verdicts.size());
  for (const Verdict& v : g_verdicts)
    if (!v.pass)
      std::printf("  criterion %d: %s\n", v.id, v.advisory ? "SOFT-FAIL" : "FAIL");
  return hard_fail == 0 ? 0 : 1;
}
