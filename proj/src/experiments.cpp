#include "sera/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sera/defense.hpp"
#include "sera/linalg.hpp"
#include "sera/generators.hpp"
#include "sera/rng.hpp"
#include "sera/training.hpp"

namespace sera {

const char* const kSweepCsvHeader =
    "gen,n,K,p,q,d,L,arch,init,scheme,sigma,sim,trained,target,seed,auroc,best_err,fpr,fnr,"
    "acc_noisy,acc_clean,bound,opnorm_sq,h_label,h_feature,fs_auroc,ms_elapsed,status";

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) {
  if (!v || std::isnan(*v)) return "NA";
  return fmt(*v);
}

std::string fmt_opt(const std::optional<uint32_t>& v) {
  return v ? std::to_string(*v) : "NA";
}

std::string sanitize_status(std::string s) {
  for (char& c : s) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

const char* init_name(InitScheme s) {
  switch (s) {
    case InitScheme::IDENTITY: return "identity";
    case InitScheme::HE: return "he";
    case InitScheme::PRODUCT: return "product";
  }
  return "?";
}

const char* scheme_name(WeightScheme s) {
  return s == WeightScheme::UNCONSTRAINED ? "unconstrained" : "constrained";
}

void append_row(std::string& out, const SweepRow& r, bool stable) {
  out += r.gen;
  out += ',';
  out += std::to_string(r.n);
  out += ',';
  out += fmt_opt(r.k);
  out += ',';
  out += fmt_opt(r.p);
  out += ',';
  out += fmt_opt(r.q);
  out += ',';
  out += std::to_string(r.d);
  out += ',';
  out += std::to_string(r.depth);
  out += ',';
  out += r.arch;
  out += ',';
  out += r.init;
  out += ',';
  out += r.scheme;
  out += ',';
  out += fmt(r.sigma);
  out += ',';
  out += r.sim;
  out += ',';
  out += r.trained ? "true" : "false";
  out += ',';
  out += r.target;
  out += ',';
  out += std::to_string(r.seed);
  out += ',';
  out += fmt_opt(r.auroc);
  out += ',';
  out += fmt_opt(r.best_err);
  out += ',';
  out += fmt_opt(r.fpr);
  out += ',';
  out += fmt_opt(r.fnr);
  out += ',';
  out += fmt_opt(r.acc_noisy);
  out += ',';
  out += fmt_opt(r.acc_clean);
  out += ',';
  out += fmt_opt(r.bound);
  out += ',';
  out += fmt_opt(r.opnorm_sq);
  out += ',';
  out += fmt_opt(r.h_label);
  out += ',';
  out += fmt_opt(r.h_feature);
  out += ',';
  out += fmt_opt(r.fs_auroc);
  out += ',';
  out += stable ? std::string("0") : fmt(r.ms_elapsed);
  out += ',';
  out += r.status;
  out += '\n';
}

struct CellAxes {
  uint32_t n, d, depth;
  ArchKind arch;
  double sigma;
};

// Everything that shapes a replicate's distribution goes into the key; grid
// lists and output knobs stay out, so reshaping the grid never reseeds cells.
std::string cell_key(const ExperimentConfig& cfg, const CellAxes& ax, double p_resolved,
                     AttackTarget resolved) {
  std::string key;
  key += "gen=";
  key += gen_name(cfg.gen);
  key += ";n=" + std::to_string(ax.n);
  key += ";k=";
  key += cfg.gen == GenKind::SBM ? std::to_string(cfg.sbm_k) : "NA";
  key += ";p=";
  key += cfg.gen == GenKind::BUNDLE ? "NA" : fmt17(p_resolved);
  key += ";q=";
  key += cfg.gen == GenKind::SBM ? fmt17(cfg.sbm_q) : "NA";
  key += ";d=" + std::to_string(ax.d);
  key += ";L=" + std::to_string(ax.depth);
  key += ";arch=";
  key += arch_name(ax.arch);
  key += ";init=";
  key += init_name(cfg.init);
  key += ";mode=";
  key += cfg.mode == EncodeMode::NAG ? "nag" : "standard";
  key += ";scheme=";
  key += scheme_name(cfg.scheme);
  key += ";sigma=" + fmt17(ax.sigma);
  key += ";sim=";
  key += sim_name(cfg.sim);
  key += ";trained=";
  key += cfg.trained ? "true" : "false";
  key += ";target=";
  key += target_name(resolved);
  key += ";epochs=" + std::to_string(cfg.epochs);
  key += ";lr=" + fmt17(cfg.lr);
  return key;
}

DenseMatrix select_rows(const DenseMatrix& m, const std::vector<uint32_t>& ids) {
  DenseMatrix out(ids.size(), m.cols());
  for (std::size_t i = 0; i < ids.size(); ++i)
    std::copy(m.row(ids[i]), m.row(ids[i]) + m.cols(), out.row(i));
  return out;
}

// Fills the metric fields of an identity-initialized row. Throws on any
// failure; the caller turns that into an error row.
void run_replicate(const ExperimentConfig& cfg, const DatasetBundle* bundle,
                   const CellAxes& ax, double p_resolved, AttackTarget target, uint32_t rep,
                   uint64_t cell_hash, SweepRow& row) {
  const uint64_t base = rng::derive(cfg.master_seed, {cell_hash, rep});

  // stage: dataset
  Graph synth_graph;
  DenseMatrix synth_x;
  std::vector<int32_t> synth_labels;
  const Graph* g = nullptr;
  const DenseMatrix* x = nullptr;
  const std::vector<int32_t>* labels = nullptr;
  switch (cfg.gen) {
    case GenKind::ER: {
      synth_graph = gen_er({ax.n, p_resolved}, rng::derive(base, {rng::hash_str("graph")}));
      synth_x = gen_features(ax.n, ax.d, rng::derive(base, {rng::hash_str("features")}));
      g = &synth_graph;
      x = &synth_x;
      break;
    }
    case GenKind::SBM: {
      SbmResult res = gen_sbm({ax.n, cfg.sbm_k, p_resolved, cfg.sbm_q},
                              rng::derive(base, {rng::hash_str("graph")}));
      synth_graph = std::move(res.graph);
      synth_labels = std::move(res.membership);
      synth_x = gen_features(ax.n, ax.d, rng::derive(base, {rng::hash_str("features")}));
      g = &synth_graph;
      x = &synth_x;
      labels = &synth_labels;
      break;
    }
    case GenKind::BUNDLE: {
      g = &bundle->graph;
      x = &bundle->features;
      labels = &bundle->labels;
      break;
    }
  }

  NagConfig nag;
  nag.mode = cfg.mode;
  nag.sigma = ax.sigma;

  // stage: weights (trained or drawn)
  EncoderWeights weights;
  if (cfg.trained) {
    TrainConfig tc;
    tc.epochs = cfg.epochs;
    tc.lr = cfg.lr;
    tc.scheme = cfg.scheme;
    tc.init = cfg.init;
    tc.seed = rng::derive(base, {rng::hash_str("train")});
    TrainResult tr = train(*g, *x, *labels, bundle->train_mask, bundle->test_mask,
                           bundle->classes, ax.arch, ax.d, ax.depth, nag, tc);
    row.acc_noisy = tr.test_acc_noisy;
    row.acc_clean = tr.test_acc_clean;
    weights = std::move(tr.model.enc);
  } else {
    weights = init_weights(ax.arch, ax.d, ax.depth, cfg.init,
                           rng::derive(base, {rng::hash_str("weights")}),
                           static_cast<uint32_t>(x->cols()));
  }

  // stage: representations, always on the full graph
  EncodeStats st;
  const DenseMatrix h = encode(*g, *x, weights, nag, rng::derive(base, {rng::hash_str("eval")}),
                               &st);

  // stage: attack surface
  ScoreSet scores;
  std::optional<ScoreSet> fs_scores;
  if (target == AttackTarget::TEST_SUBGRAPH) {
    const InducedSubgraph sub = induced_subgraph(*g, bundle->test_mask);
    const DenseMatrix ht = select_rows(h, sub.parent_id);
    scores = score_pairs(ht, sub.graph, cfg.sim);
    if (cfg.fs_baseline) fs_scores = feature_baseline(select_rows(*x, sub.parent_id), sub.graph);
  } else {
    scores = score_pairs(h, *g, cfg.sim);
    if (cfg.fs_baseline) fs_scores = feature_baseline(*x, *g);
  }

  row.auroc = auroc(scores);
  const ThresholdChoice th = best_threshold(scores);
  row.best_err = th.metrics.err;
  row.fpr = th.metrics.fpr;
  row.fnr = th.metrics.fnr;
  if (fs_scores) row.fs_auroc = auroc(*fs_scores);

  // stage: dataset statistics on the full graph
  if (labels) row.h_label = label_homophily(*g, *labels);
  row.h_feature = feature_homophily(*g, *x);

  // stage: defense analytics
  double opsq = 0.0;
  for (const auto& w : weights.layers) {
    const double s = operator_norm(w);
    opsq += s * s;
  }
  row.opnorm_sq = opsq;
  if (cfg.mode == EncodeMode::NAG && ax.arch != ArchKind::LINEAR)
    row.bound = nag_bound(weights, ax.sigma).bound;
}

std::string cell_label(const SweepRow& r) {
  std::string s = "gen=" + r.gen + " n=" + std::to_string(r.n) + " d=" + std::to_string(r.d) +
                  " L=" + std::to_string(r.depth) + " arch=" + r.arch + " sigma=" + fmt(r.sigma);
  return s;
}

void summarize_cell(std::string& out, const std::vector<SweepRow>& rows, std::size_t lo,
                    std::size_t hi) {
  double sa = 0, sa2 = 0, se = 0, se2 = 0;
  std::size_t ok = 0;
  for (std::size_t i = lo; i < hi; ++i) {
    if (rows[i].status != "ok" || !rows[i].auroc || !rows[i].best_err) continue;
    ++ok;
    sa += *rows[i].auroc;
    sa2 += *rows[i].auroc * *rows[i].auroc;
    se += *rows[i].best_err;
    se2 += *rows[i].best_err * *rows[i].best_err;
  }
  out += cell_label(rows[lo]);
  out += ": ";
  out += std::to_string(ok) + "/" + std::to_string(hi - lo) + " ok";
  if (ok > 0) {
    const double n = static_cast<double>(ok);
    const double ma = sa / n, me = se / n;
    const double va = ok > 1 ? std::max(0.0, (sa2 - n * ma * ma) / (n - 1)) : 0.0;
    const double ve = ok > 1 ? std::max(0.0, (se2 - n * me * me) / (n - 1)) : 0.0;
    out += ", auroc " + fmt(ma) + " +/- " + fmt(std::sqrt(va));
    out += ", best_err " + fmt(me) + " +/- " + fmt(std::sqrt(ve));
  }
  out += '\n';
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, const DatasetBundle* bundle) {
  DatasetBundle loaded;
  if (cfg.gen == GenKind::BUNDLE && bundle == nullptr) {
    loaded = load_bundle(cfg.bundle_path);
    bundle = &loaded;
  }

  std::vector<uint32_t> n_axis = cfg.n_list;
  if (cfg.gen == GenKind::BUNDLE) n_axis = {bundle->graph.num_nodes()};

  SweepResult result;
  for (uint32_t n : n_axis)
    for (uint32_t d : cfg.d_list)
      for (uint32_t depth : cfg.l_list)
        for (ArchKind arch : cfg.arch_list)
          for (double sigma : cfg.sigma_list) {
            const CellAxes ax{n, d, depth, arch, sigma};
            const double p_resolved = cfg.gen == GenKind::BUNDLE ? 0.0 : cfg.resolve_p(n);
            AttackTarget target = cfg.target;
            if (target == AttackTarget::AUTO)
              target = (cfg.gen == GenKind::BUNDLE && cfg.trained)
                           ? AttackTarget::TEST_SUBGRAPH
                           : AttackTarget::FULL_GRAPH;
            const uint64_t cell_hash = rng::hash_str(cell_key(cfg, ax, p_resolved, target));

            for (uint32_t rep = 0; rep < cfg.seeds; ++rep) {
              SweepRow row;
              row.gen = gen_name(cfg.gen);
              row.n = n;
              if (cfg.gen == GenKind::SBM) row.k = cfg.sbm_k;
              if (cfg.gen != GenKind::BUNDLE) row.p = p_resolved;
              if (cfg.gen == GenKind::SBM) row.q = cfg.sbm_q;
              row.d = d;
              row.depth = depth;
              row.arch = arch_name(arch);
              row.init = init_name(cfg.init);
              row.scheme = scheme_name(cfg.scheme);
              row.sigma = sigma;
              row.sim = sim_name(cfg.sim);
              row.trained = cfg.trained;
              row.target = target_name(target);
              row.seed = rep;

              const auto t0 = std::chrono::steady_clock::now();
              try {
                run_replicate(cfg, bundle, ax, p_resolved, target, rep, cell_hash, row);
              } catch (const std::exception& e) {
                row.status = "error:" + sanitize_status(e.what());
              }
              row.ms_elapsed =
                  std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                      .count();
              result.rows.push_back(std::move(row));
            }
          }

  for (std::size_t lo = 0; lo < result.rows.size(); lo += cfg.seeds)
    summarize_cell(result.summary, result.rows, lo,
                   std::min(lo + cfg.seeds, result.rows.size()));
  return result;
}

std::string format_csv(const std::vector<SweepRow>& rows) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const auto& r : rows) append_row(out, r, /*stable=*/false);
  return out;
}

std::string format_csv_stable(const std::vector<SweepRow>& rows) {
  std::string out = kSweepCsvHeader;
  out += '\n';
  for (const auto& r : rows) append_row(out, r, /*stable=*/true);
  return out;
}

}  // namespace sera
