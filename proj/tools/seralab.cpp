// seralab: command-line front end for the graph-privacy laboratory.
//
// Subcommands: gen, encode, attack, train, bound, edgerr, sweep.
// Exit codes: 0 success, 1 usage/configuration problems (bad flags, missing
// files, malformed configs), 2 runtime failures.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sera/attack.hpp"
#include "sera/bundle.hpp"
#include "sera/config.hpp"
#include "sera/defense.hpp"
#include "sera/encoders.hpp"
#include "sera/experiments.hpp"
#include "sera/generators.hpp"
#include "sera/linalg.hpp"
#include "sera/rng.hpp"
#include "sera/training.hpp"

namespace {

using namespace sera;

void require_exists(const std::string& path) {
  if (!std::filesystem::exists(path))
    throw std::invalid_argument("path does not exist: " + path);
}

ArchKind parse_arch(const std::string& s) {
  const auto a = arch_from_name(s);
  if (!a) throw std::invalid_argument("unknown arch '" + s + "'");
  return *a;
}

InitScheme parse_init(const std::string& s) {
  if (s == "identity") return InitScheme::IDENTITY;
  if (s == "he") return InitScheme::HE;
  if (s == "product") return InitScheme::PRODUCT;
  throw std::invalid_argument("unknown init '" + s + "'");
}

EncodeMode parse_mode(const std::string& s) {
  if (s == "standard") return EncodeMode::STANDARD;
  if (s == "nag") return EncodeMode::NAG;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

SimilarityKind parse_sim(const std::string& s) {
  const auto k = sim_from_name(s);
  if (!k) throw std::invalid_argument("unknown sim '" + s + "'");
  return *k;
}

WeightScheme parse_scheme(const std::string& s) {
  if (s == "unconstrained") return WeightScheme::UNCONSTRAINED;
  if (s == "constrained") return WeightScheme::CONSTRAINED;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

// ---------------------------------------------------------------- gen ----

struct GenOpts {
  std::string type = "er";
  uint32_t n = 0;
  std::string p = "auto";
  double q = 0.0;
  uint32_t k = 2;
  uint32_t d = 64;
  uint64_t seed = 1;
  double train_frac = 0.1, test_frac = 0.2;
  std::string out;
};

double resolve_p(const std::string& spec, uint32_t n) {
  if (spec == "auto") return std::log(static_cast<double>(n)) / n;
  const double p = std::stod(spec);
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must lie in [0, 1]");
  return p;
}

int run_gen(const GenOpts& o) {
  if (o.n < 2) throw std::invalid_argument("need n >= 2");
  const double p = resolve_p(o.p, o.n);

  DatasetBundle b;
  if (o.type == "er") {
    b.graph = gen_er({o.n, p}, rng::derive(o.seed, {rng::hash_str("graph")}));
    b.labels.assign(o.n, 0);
    b.classes = 1;
  } else if (o.type == "sbm") {
    SbmResult res = gen_sbm({o.n, o.k, p, o.q}, rng::derive(o.seed, {rng::hash_str("graph")}));
    b.graph = std::move(res.graph);
    b.labels = std::move(res.membership);
    b.classes = static_cast<int32_t>(o.k);
  } else {
    throw std::invalid_argument("type must be er or sbm");
  }
  b.features = gen_features(o.n, o.d, rng::derive(o.seed, {rng::hash_str("features")}));

  // deterministic split: shuffle ids, slice, sort
  std::vector<uint32_t> ids(o.n);
  std::iota(ids.begin(), ids.end(), 0u);
  rng::Stream shuffle(o.seed, {rng::hash_str("split")});
  for (uint32_t i = o.n - 1; i > 0; --i)
    std::swap(ids[i], ids[shuffle.next_u64() % (i + 1)]);
  const auto take = [&](std::size_t from, std::size_t count) {
    std::vector<uint32_t> part(ids.begin() + from, ids.begin() + from + count);
    std::sort(part.begin(), part.end());
    return NodeSubset::checked(std::move(part), o.n);
  };
  const auto n_train = static_cast<std::size_t>(std::ceil(o.train_frac * o.n));
  const auto n_test = static_cast<std::size_t>(std::ceil(o.test_frac * o.n));
  if (n_train + n_test > o.n) throw std::invalid_argument("train + test fractions exceed 1");
  b.train_mask = take(0, n_train);
  b.test_mask = take(n_train, n_test);

  save_bundle(b, o.out);
  std::printf("wrote %s: n=%u edges=%zu d=%u classes=%d train=%zu test=%zu (p=%.6g)\n",
              o.out.c_str(), o.n, b.graph.num_edges(), o.d, b.classes, b.train_mask.size(),
              b.test_mask.size(), p);
  return 0;
}

// ------------------------------------------------------------- encode ----

struct EncodeOpts {
  std::string bundle;
  std::string arch = "gcn";
  uint32_t d = 64, depth = 1;
  std::string init = "identity";
  std::string mode = "standard";
  double sigma = 0.0;
  uint64_t seed = 1;
  std::string checkpoint;
  std::string out;
};

int run_encode(const EncodeOpts& o, bool sigma_set, bool mode_set) {
  require_exists(o.bundle);
  const DatasetBundle b = load_bundle(o.bundle);

  EncoderWeights weights;
  NagConfig cfg;
  if (!o.checkpoint.empty()) {
    require_exists(o.checkpoint);
    LoadedCheckpoint ck = load_checkpoint(o.checkpoint);
    weights = std::move(ck.model.enc);
    cfg = ck.cfg;
  } else {
    weights = init_weights(parse_arch(o.arch), o.d, o.depth, parse_init(o.init),
                           rng::derive(o.seed, {rng::hash_str("weights")}),
                           static_cast<uint32_t>(b.features.cols()));
  }
  if (mode_set) cfg.mode = parse_mode(o.mode);
  if (sigma_set) cfg.sigma = o.sigma;

  EncodeStats st;
  const DenseMatrix h =
      encode(b.graph, b.features, weights, cfg, rng::derive(o.seed, {rng::hash_str("eval")}), &st);
  std::printf("encoded %zu nodes -> %zu dims (arch=%s depth=%u mode=%s sigma=%g)\n", h.rows(),
              h.cols(), arch_name(weights.arch), weights.depth,
              cfg.mode == EncodeMode::NAG ? "nag" : "standard", cfg.sigma);
  if (cfg.mode == EncodeMode::NAG)
    std::printf("rows bypassing normalization: %zu\n", st.zero_norm_rows);
  if (!o.out.empty()) {
    save_matrix(o.out, "representations", h);
    std::printf("wrote %s\n", o.out.c_str());
  }
  return 0;
}

// ------------------------------------------------------------- attack ----

struct AttackOpts {
  std::string reps;
  std::string bundle;
  std::string target = "full";
  std::string sim = "cos";
};

int run_attack(const AttackOpts& o) {
  require_exists(o.reps);
  require_exists(o.bundle);
  const DatasetBundle b = load_bundle(o.bundle);
  DenseMatrix h = load_matrix(o.reps);
  if (h.rows() != b.graph.num_nodes())
    throw std::invalid_argument("representation rows != bundle nodes");

  const SimilarityKind sim = parse_sim(o.sim);
  ScoreSet scores;
  if (o.target == "full") {
    scores = score_pairs(h, b.graph, sim);
  } else if (o.target == "test") {
    const InducedSubgraph sub = induced_subgraph(b.graph, b.test_mask);
    DenseMatrix ht(sub.parent_id.size(), h.cols());
    for (std::size_t i = 0; i < sub.parent_id.size(); ++i)
      std::copy(h.row(sub.parent_id[i]), h.row(sub.parent_id[i]) + h.cols(), ht.row(i));
    scores = score_pairs(ht, sub.graph, sim);
  } else {
    throw std::invalid_argument("target must be full or test");
  }

  const double a = auroc(scores);
  const ThresholdChoice th = best_threshold(scores);
  std::printf("pairs=%zu positives=%zu degenerate=%zu\n", scores.scores.size(),
              scores.positives, scores.degenerate_pairs);
  std::printf("auroc=%.6f best_err=%.6f (fpr=%.6f fnr=%.6f) tau=%.9g\n", a, th.metrics.err,
              th.metrics.fpr, th.metrics.fnr, th.tau);
  return 0;
}

// -------------------------------------------------------------- train ----

struct TrainOpts {
  std::string bundle;
  std::string arch = "gcn";
  uint32_t d = 64, depth = 2;
  double sigma = 0.0;
  std::string mode = "nag";
  std::string scheme = "unconstrained";
  std::string init = "he";
  uint32_t epochs = 1000;
  double lr = 1e-3;
  uint64_t seed = 1;
  uint32_t log_every = 100;
  std::string checkpoint_out;
};

int run_train(const TrainOpts& o) {
  require_exists(o.bundle);
  const DatasetBundle b = load_bundle(o.bundle);

  NagConfig cfg;
  cfg.mode = parse_mode(o.mode);
  cfg.sigma = o.sigma;
  TrainConfig tc;
  tc.epochs = o.epochs;
  tc.lr = o.lr;
  tc.scheme = parse_scheme(o.scheme);
  tc.init = parse_init(o.init);
  tc.seed = o.seed;

  const TrainResult r = train(b.graph, b.features, b.labels, b.train_mask, b.test_mask,
                              b.classes, parse_arch(o.arch), o.d, o.depth, cfg, tc);
  if (o.log_every > 0)
    for (std::size_t e = 0; e < r.train_loss.size(); ++e)
      if ((e + 1) % o.log_every == 0 || e + 1 == r.train_loss.size())
        std::printf("epoch %4zu  loss %.6f\n", e + 1, r.train_loss[e]);
  std::printf("train_acc=%.4f test_acc=%.4f test_acc_clean=%.4f\n", r.train_acc,
              r.test_acc_noisy, r.test_acc_clean);
  if (cfg.mode == EncodeMode::NAG)
    std::printf("rows bypassing normalization (all epochs): %zu\n", r.stats.zero_norm_rows);
  if (!o.checkpoint_out.empty()) {
    save_checkpoint(o.checkpoint_out, r.model, cfg);
    std::printf("wrote %s\n", o.checkpoint_out.c_str());
  }
  return 0;
}

// -------------------------------------------------------------- bound ----

struct BoundOpts {
  std::string checkpoint;
  std::string arch = "gcn";
  uint32_t d = 16, depth = 1;
  std::string init = "identity";
  uint64_t seed = 1;
  double sigma = -1.0;
};

int run_bound(const BoundOpts& o, bool sigma_set) {
  EncoderWeights weights;
  double sigma = o.sigma;
  if (!o.checkpoint.empty()) {
    require_exists(o.checkpoint);
    LoadedCheckpoint ck = load_checkpoint(o.checkpoint);
    weights = std::move(ck.model.enc);
    if (!sigma_set) sigma = ck.cfg.sigma;
  } else {
    if (!sigma_set) throw std::invalid_argument("--sigma is required without a checkpoint");
    weights = init_weights(parse_arch(o.arch), o.d, o.depth, parse_init(o.init),
                           rng::derive(o.seed, {rng::hash_str("weights")}));
  }
  const PrivacyBound pb = nag_bound(weights, sigma);
  std::printf("bound=%.6f opnorm_sq=%.6f c=%g sigma=%g%s\n", pb.bound, pb.opnorm_sq,
              pb.sensitivity_c, sigma, pb.vacuous ? " (vacuous: sigma=0)" : "");
  return 0;
}

// ------------------------------------------------------------- edgerr ----

struct EdgeRrOpts {
  std::string bundle;
  double eps = 1.0;
  uint64_t seed = 1;
  std::string out;
};

int run_edgerr(const EdgeRrOpts& o) {
  require_exists(o.bundle);
  DatasetBundle b = load_bundle(o.bundle);
  const std::size_t before = b.graph.num_edges();
  b.graph = edge_rr(b.graph, o.eps, o.seed);
  save_bundle(b, o.out);
  std::printf("edges %zu -> %zu (eps=%g, keep prob %.6f)\n", before, b.graph.num_edges(), o.eps,
              std::exp(o.eps) / (1.0 + std::exp(o.eps)));
  std::printf("attack error bound: %.6f\n", edge_rr_bound(o.eps));
  std::printf("wrote %s\n", o.out.c_str());
  return 0;
}

// -------------------------------------------------------------- sweep ----

struct SweepOpts {
  std::string config;
  std::string out;
};

int run_sweep_cmd(const SweepOpts& o) {
  require_exists(o.config);
  ExperimentConfig cfg = parse_config_file(o.config);
  if (!o.out.empty()) cfg.out = o.out;

  const SweepResult res = run_sweep(cfg);
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + cfg.out);
  out << format_csv(res.rows);
  if (!out) throw std::runtime_error("write failed: " + cfg.out);

  std::fputs(res.summary.c_str(), stdout);
  std::size_t failed = 0;
  for (const auto& r : res.rows) failed += r.status != "ok";
  std::printf("wrote %zu rows to %s (%zu failed)\n", res.rows.size(), cfg.out.c_str(), failed);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graph representation privacy laboratory"};
  app.require_subcommand(1);

  GenOpts gen_o;
  auto* gen_c = app.add_subcommand("gen", "synthesize a dataset bundle");
  gen_c->add_option("--type", gen_o.type, "er or sbm");
  gen_c->add_option("--n", gen_o.n, "number of nodes")->required();
  gen_c->add_option("--p", gen_o.p, "edge probability, or 'auto' for ln(n)/n");
  gen_c->add_option("--q", gen_o.q, "sbm cross-block probability");
  gen_c->add_option("--k", gen_o.k, "sbm block count");
  gen_c->add_option("--d", gen_o.d, "feature dimension");
  gen_c->add_option("--seed", gen_o.seed, "generator seed");
  gen_c->add_option("--train-frac", gen_o.train_frac, "train mask fraction");
  gen_c->add_option("--test-frac", gen_o.test_frac, "test mask fraction");
  gen_c->add_option("--out", gen_o.out, "output bundle directory")->required();

  EncodeOpts enc_o;
  auto* enc_c = app.add_subcommand("encode", "compute node representations");
  enc_c->add_option("--bundle", enc_o.bundle, "dataset bundle directory")->required();
  enc_c->add_option("--arch", enc_o.arch, "linear gcn mean_sage max_sage gin gat");
  enc_c->add_option("--d", enc_o.d, "layer width");
  enc_c->add_option("--L", enc_o.depth, "layer count");
  enc_c->add_option("--init", enc_o.init, "identity, he or product");
  auto* enc_mode = enc_c->add_option("--mode", enc_o.mode, "standard or nag");
  auto* enc_sigma = enc_c->add_option("--sigma", enc_o.sigma, "noise stddev (nag)");
  enc_c->add_option("--seed", enc_o.seed, "weight/noise seed");
  enc_c->add_option("--checkpoint", enc_o.checkpoint, "use weights from a snapshot");
  enc_c->add_option("--out", enc_o.out, "write representations to this file");

  AttackOpts atk_o;
  auto* atk_c = app.add_subcommand("attack", "edge reconstruction from representations");
  atk_c->add_option("--reps", atk_o.reps, "representation matrix file")->required();
  atk_c->add_option("--bundle", atk_o.bundle, "bundle with the ground-truth graph")->required();
  atk_c->add_option("--target", atk_o.target, "full or test");
  atk_c->add_option("--sim", atk_o.sim, "cos or corr");

  TrainOpts trn_o;
  auto* trn_c = app.add_subcommand("train", "train an encoder + readout");
  trn_c->add_option("--bundle", trn_o.bundle, "dataset bundle directory")->required();
  trn_c->add_option("--arch", trn_o.arch, "encoder architecture");
  trn_c->add_option("--d", trn_o.d, "layer width");
  trn_c->add_option("--L", trn_o.depth, "layer count");
  trn_c->add_option("--sigma", trn_o.sigma, "noise stddev");
  trn_c->add_option("--mode", trn_o.mode, "standard or nag");
  trn_c->add_option("--scheme", trn_o.scheme, "unconstrained or constrained");
  trn_c->add_option("--init", trn_o.init, "identity, he or product");
  trn_c->add_option("--epochs", trn_o.epochs, "training epochs");
  trn_c->add_option("--lr", trn_o.lr, "Adam learning rate");
  trn_c->add_option("--seed", trn_o.seed, "training seed");
  trn_c->add_option("--log-every", trn_o.log_every, "loss print interval (0 = silent)");
  trn_c->add_option("--checkpoint-out", trn_o.checkpoint_out, "write a model snapshot");

  BoundOpts bnd_o;
  auto* bnd_c = app.add_subcommand("bound", "closed-form attack error lower bound");
  bnd_c->add_option("--checkpoint", bnd_o.checkpoint, "model snapshot file");
  bnd_c->add_option("--arch", bnd_o.arch, "encoder architecture");
  bnd_c->add_option("--d", bnd_o.d, "layer width");
  bnd_c->add_option("--L", bnd_o.depth, "layer count");
  bnd_c->add_option("--init", bnd_o.init, "identity, he or product");
  bnd_c->add_option("--seed", bnd_o.seed, "weight seed");
  auto* bnd_sigma = bnd_c->add_option("--sigma", bnd_o.sigma, "noise stddev");

  EdgeRrOpts err_o;
  auto* err_c = app.add_subcommand("edgerr", "randomized response on the edge set");
  err_c->add_option("--bundle", err_o.bundle, "input bundle directory")->required();
  err_c->add_option("--eps", err_o.eps, "privacy parameter")->required();
  err_c->add_option("--seed", err_o.seed, "flip seed");
  err_c->add_option("--out", err_o.out, "output bundle directory")->required();

  SweepOpts swp_o;
  auto* swp_c = app.add_subcommand("sweep", "run an experiment grid from a config");
  swp_c->add_option("--config", swp_o.config, "key = value config file")->required();
  swp_c->add_option("--out", swp_o.out, "override the CSV output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // help exits 0; every usage problem exits 1
  }

  try {
    if (gen_c->parsed()) return run_gen(gen_o);
    if (enc_c->parsed())
      return run_encode(enc_o, enc_sigma->count() > 0, enc_mode->count() > 0);
    if (atk_c->parsed()) return run_attack(atk_o);
    if (trn_c->parsed()) return run_train(trn_o);
    if (bnd_c->parsed()) return run_bound(bnd_o, bnd_sigma->count() > 0);
    if (err_c->parsed()) return run_edgerr(err_o);
    if (swp_c->parsed()) return run_sweep_cmd(swp_o);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
