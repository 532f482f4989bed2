#include "sera/training.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include "sera/bundle.hpp"
#include "sera/linalg.hpp"
#include "sera/rng.hpp"

namespace sera {

ModelGrads ModelGrads::zeros_like(const ModelParams& p) {
  ModelGrads g;
  g.layers.reserve(p.enc.layers.size());
  for (const auto& w : p.enc.layers) g.layers.emplace_back(w.rows(), w.cols());
  for (const auto& gp : p.enc.gat) {
    GatParams z;
    z.beta_src.assign(gp.beta_src.size(), 0.0);
    z.beta_dst.assign(gp.beta_dst.size(), 0.0);
    g.gat.push_back(std::move(z));
  }
  if (!p.enc.input_proj.empty())
    g.input_proj = DenseMatrix(p.enc.input_proj.rows(), p.enc.input_proj.cols());
  g.head = DenseMatrix(p.head.rows(), p.head.cols());
  return g;
}

std::vector<std::pair<double*, std::size_t>> param_buffers(ModelParams& p) {
  std::vector<std::pair<double*, std::size_t>> out;
  if (!p.enc.input_proj.empty())
    out.emplace_back(p.enc.input_proj.data().data(), p.enc.input_proj.data().size());
  for (std::size_t l = 0; l < p.enc.layers.size(); ++l) {
    out.emplace_back(p.enc.layers[l].data().data(), p.enc.layers[l].data().size());
    if (p.enc.arch == ArchKind::GAT) {
      out.emplace_back(p.enc.gat[l].beta_src.data(), p.enc.gat[l].beta_src.size());
      out.emplace_back(p.enc.gat[l].beta_dst.data(), p.enc.gat[l].beta_dst.size());
    }
  }
  out.emplace_back(p.head.data().data(), p.head.data().size());
  return out;
}

std::vector<std::pair<double*, std::size_t>> grad_buffers(ModelGrads& g) {
  std::vector<std::pair<double*, std::size_t>> out;
  if (!g.input_proj.empty())
    out.emplace_back(g.input_proj.data().data(), g.input_proj.data().size());
  for (std::size_t l = 0; l < g.layers.size(); ++l) {
    out.emplace_back(g.layers[l].data().data(), g.layers[l].data().size());
    if (!g.gat.empty()) {
      out.emplace_back(g.gat[l].beta_src.data(), g.gat[l].beta_src.size());
      out.emplace_back(g.gat[l].beta_dst.data(), g.gat[l].beta_dst.size());
    }
  }
  out.emplace_back(g.head.data().data(), g.head.data().size());
  return out;
}

std::vector<std::pair<const double*, std::size_t>> grad_buffers(const ModelGrads& g) {
  auto rw = grad_buffers(const_cast<ModelGrads&>(g));
  return {rw.begin(), rw.end()};
}

DenseMatrix forward_logits(const Graph& g, const DenseMatrix& x, const ModelParams& model,
                           const NagConfig& cfg, uint64_t noise_seed, ForwardTape* tape,
                           EncodeStats* stats) {
  model.enc.validate();
  const uint32_t d = model.enc.d();
  if (model.head.rows() != d || model.head.cols() == 0)
    throw std::invalid_argument("forward_logits: readout shape does not match layer size");

  DenseMatrix h;
  if (!model.enc.input_proj.empty()) {
    if (x.cols() != model.enc.input_proj.rows())
      throw std::invalid_argument("forward_logits: feature width != projection rows");
    h = matmul(x, model.enc.input_proj);
  } else {
    if (x.cols() != d)
      throw std::invalid_argument("forward_logits: feature width != layer size");
    h = x;
  }

  DenseMatrix hidden;
  if (model.enc.arch == ArchKind::LINEAR) {
    if (cfg.mode == EncodeMode::NAG)
      throw std::invalid_argument("linear encoder supports standard mode only");
    for (uint32_t l = 0; l < model.enc.depth; ++l) h = propagate_mean(g, h);
    hidden = matmul(h, model.enc.layers.front());
    if (tape) tape->linear_b = std::move(h);
  } else {
    if (tape) tape->layers.resize(model.enc.depth);
    for (uint32_t l = 0; l < model.enc.depth; ++l) {
      const Activation act = layer_activation(cfg, l + 1 == model.enc.depth);
      const GatParams* gp = model.enc.arch == ArchKind::GAT ? &model.enc.gat[l] : nullptr;
      h = mp_layer(g, h, model.enc.layers[l], gp, model.enc.arch, cfg, act, noise_seed, l,
                   stats, tape ? &tape->layers[l] : nullptr);
    }
    hidden = std::move(h);
  }

  DenseMatrix logits = matmul(hidden, model.head);
  if (tape) {
    tape->hidden = std::move(hidden);
    tape->logits = logits;
  }
  return logits;
}

double cross_entropy(const DenseMatrix& logits, const std::vector<int32_t>& labels,
                     const NodeSubset& mask) {
  if (labels.size() != logits.rows())
    throw std::invalid_argument("cross_entropy: label count != logit rows");
  if (mask.empty()) throw std::invalid_argument("cross_entropy: empty mask");
  const std::size_t c = logits.cols();
  double total = 0.0;
  for (uint32_t v : mask.ids) {
    const double* z = logits.row(v);
    double mx = z[0];
    for (std::size_t k = 1; k < c; ++k) mx = std::max(mx, z[k]);
    double sum = 0.0;
    for (std::size_t k = 0; k < c; ++k) sum += std::exp(z[k] - mx);
    total += mx + std::log(sum) - z[labels[v]];
  }
  return total / static_cast<double>(mask.size());
}

namespace {

// d(cross_entropy)/d(logits): softmax minus one-hot on masked rows, scaled by
// 1/|mask|; zero everywhere else.
DenseMatrix logit_grad(const DenseMatrix& logits, const std::vector<int32_t>& labels,
                       const NodeSubset& mask) {
  const std::size_t c = logits.cols();
  DenseMatrix g(logits.rows(), c);
  const double scale = 1.0 / static_cast<double>(mask.size());
  for (uint32_t v : mask.ids) {
    const double* z = logits.row(v);
    double* gv = g.row(v);
    double mx = z[0];
    for (std::size_t k = 1; k < c; ++k) mx = std::max(mx, z[k]);
    double sum = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      gv[k] = std::exp(z[k] - mx);
      sum += gv[k];
    }
    const double inv = 1.0 / sum;
    for (std::size_t k = 0; k < c; ++k) gv[k] *= inv * scale;
    gv[labels[v]] -= scale;
  }
  return g;
}

// Same merged scan the forward uses: sorted(N(v) + {v}).
template <typename F>
void for_extended(const Graph& g, uint32_t v, F&& f) {
  bool placed = false;
  for (uint32_t u : g.neighbors(v)) {
    if (!placed && v < u) {
      f(v);
      placed = true;
    }
    f(u);
  }
  if (!placed) f(v);
}

}  // namespace

ModelGrads backward(const Graph& g, const DenseMatrix& x, const ModelParams& model,
                    const NagConfig& cfg, const ForwardTape& tape,
                    const std::vector<int32_t>& labels, const NodeSubset& mask) {
  const uint32_t n = g.num_nodes();
  const std::size_t d = model.enc.d();
  const ArchKind arch = model.enc.arch;
  ModelGrads grads = ModelGrads::zeros_like(model);

  const DenseMatrix g_logits = logit_grad(tape.logits, labels, mask);
  grads.head = matmul_tn(tape.hidden, g_logits);     // H^T G
  DenseMatrix grad = matmul_nt(g_logits, model.head);  // G head^T, gradient wrt H

  if (arch == ArchKind::LINEAR) {
    grads.layers[0] = matmul_tn(tape.linear_b, grad);          // B^T G_H
    DenseMatrix gb = matmul_nt(grad, model.enc.layers.front());  // G_H W^T
    for (uint32_t l = 0; l < model.enc.depth; ++l) gb = propagate_mean_transpose(g, gb);
    if (!model.enc.input_proj.empty()) grads.input_proj = matmul_tn(x, gb);
    return grads;
  }

  if (tape.layers.size() != model.enc.depth)
    throw std::invalid_argument("backward: tape depth does not match the model");

  for (uint32_t l = model.enc.depth; l-- > 0;) {
    const LayerTape& tp = tape.layers[l];
    const Activation act = layer_activation(cfg, l + 1 == model.enc.depth);

    if (act == Activation::RELU) {
      for (std::size_t i = 0; i < grad.data().size(); ++i)
        if (!(tp.out.data()[i] > 0.0)) grad.data()[i] = 0.0;
    }
    // grad now holds dL/dZ for the pre-activation aggregate Z (noise is an
    // additive constant under a fixed seed, so it contributes nothing).

    DenseMatrix g_m(n, d);  // gradient wrt the messages M = N W^T
    switch (arch) {
      case ArchKind::MEAN_SAGE: {
        for (uint32_t v = 0; v < n; ++v) {
          const double inv = 1.0 / (g.degree(v) + 1.0);
          const double* gz = grad.row(v);
          for_extended(g, v, [&](uint32_t u) {
            double* gm = g_m.row(u);
            for (std::size_t k = 0; k < d; ++k) gm[k] += inv * gz[k];
          });
        }
        break;
      }
      case ArchKind::GIN: {
        for (uint32_t v = 0; v < n; ++v) {
          const double* gz = grad.row(v);
          for_extended(g, v, [&](uint32_t u) {
            double* gm = g_m.row(u);
            for (std::size_t k = 0; k < d; ++k) gm[k] += gz[k];
          });
        }
        break;
      }
      case ArchKind::GCN: {
        std::vector<double> inv_sqrt(n);
        for (uint32_t v = 0; v < n; ++v) inv_sqrt[v] = 1.0 / std::sqrt(g.degree(v) + 1.0);
        for (uint32_t v = 0; v < n; ++v) {
          const double* gz = grad.row(v);
          for_extended(g, v, [&](uint32_t u) {
            const double c = inv_sqrt[v] * inv_sqrt[u];
            double* gm = g_m.row(u);
            for (std::size_t k = 0; k < d; ++k) gm[k] += c * gz[k];
          });
        }
        break;
      }
      case ArchKind::MAX_SAGE: {
        for (uint32_t v = 0; v < n; ++v) {
          const double* gz = grad.row(v);
          const uint32_t* amax = tp.argmax.data() + std::size_t(v) * d;
          for (std::size_t k = 0; k < d; ++k) g_m(amax[k], k) += gz[k];
        }
        break;
      }
      case ArchKind::GAT: {
        const double slope = cfg.gat_leaky_slope;
        std::vector<double> da_src(n, 0.0), da_dst(n, 0.0);
        std::size_t off = 0;  // cursor into the CSR-extended alpha/att_pre tapes
        std::vector<double> dalpha;
        for (uint32_t v = 0; v < n; ++v) {
          const double* gz = grad.row(v);
          const std::size_t deg_ext = g.degree(v) + 1;
          dalpha.resize(deg_ext);
          // value path: Z_v = sum_i alpha_i M_{u_i}
          std::size_t i = 0;
          for_extended(g, v, [&](uint32_t u) {
            const double a = tp.alpha[off + i];
            const double* mu = tp.messages.row(u);
            double* gm = g_m.row(u);
            double dot = 0.0;
            for (std::size_t k = 0; k < d; ++k) {
              gm[k] += a * gz[k];
              dot += gz[k] * mu[k];
            }
            dalpha[i] = dot;
            ++i;
          });
          // softmax backward, then the LeakyReLU slope
          double srow = 0.0;
          for (std::size_t j = 0; j < deg_ext; ++j) srow += tp.alpha[off + j] * dalpha[j];
          i = 0;
          for_extended(g, v, [&](uint32_t u) {
            const double de = tp.alpha[off + i] * (dalpha[i] - srow);
            const double dpre = de * (tp.att_pre[off + i] > 0.0 ? 1.0 : slope);
            da_src[u] += dpre;
            da_dst[v] += dpre;
            ++i;
          });
          off += deg_ext;
        }
        // score path folds back into the messages; beta gets M^T da
        const GatParams& gp = model.enc.gat[l];
        std::vector<double>& dbs = grads.gat[l].beta_src;
        std::vector<double>& dbd = grads.gat[l].beta_dst;
        for (uint32_t u = 0; u < n; ++u) {
          const double* mu = tp.messages.row(u);
          double* gm = g_m.row(u);
          const double s = da_src[u], t = da_dst[u];
          for (std::size_t k = 0; k < d; ++k) {
            gm[k] += s * gp.beta_src[k] + t * gp.beta_dst[k];
            dbs[k] += s * mu[k];
            dbd[k] += t * mu[k];
          }
        }
        break;
      }
      case ArchKind::LINEAR:
        break;  // unreachable
    }

    grads.layers[l] = matmul_tn(g_m, tp.normalized);
    DenseMatrix g_n = matmul(g_m, model.enc.layers[l]);

    if (!tp.inv_norms.empty()) {
      // unit-normalization backward: g_h = (g - <n, g> n) / |h|; bypassed rows
      // pass the gradient through unchanged
      for (uint32_t v = 0; v < n; ++v) {
        const double inv = tp.inv_norms[v];
        double* gn = g_n.row(v);
        if (inv == 0.0) continue;
        const double* nv = tp.normalized.row(v);
        double dot = 0.0;
        for (std::size_t k = 0; k < d; ++k) dot += nv[k] * gn[k];
        for (std::size_t k = 0; k < d; ++k) gn[k] = inv * (gn[k] - dot * nv[k]);
      }
    }
    grad = std::move(g_n);
  }

  if (!model.enc.input_proj.empty()) grads.input_proj = matmul_tn(x, grad);
  return grads;
}

double accuracy(const DenseMatrix& logits, const std::vector<int32_t>& labels,
                const NodeSubset& mask) {
  if (labels.size() != logits.rows())
    throw std::invalid_argument("accuracy: label count != logit rows");
  if (mask.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t c = logits.cols();
  std::size_t correct = 0;
  for (uint32_t v : mask.ids) {
    const double* z = logits.row(v);
    std::size_t arg = 0;
    for (std::size_t k = 1; k < c; ++k)
      if (z[k] > z[arg]) arg = k;  // strict: smallest index keeps ties
    correct += static_cast<int32_t>(arg) == labels[v];
  }
  return static_cast<double>(correct) / static_cast<double>(mask.size());
}

void adam_step(ModelParams& params, const ModelGrads& grads, AdamState& state, uint32_t t,
               const TrainConfig& cfg) {
  auto ps = param_buffers(params);
  auto gs = grad_buffers(grads);
  if (ps.size() != gs.size()) throw std::logic_error("adam_step: buffer lists disagree");
  if (state.m.empty()) {
    state.m.resize(ps.size());
    state.v.resize(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
      state.m[i].assign(ps[i].second, 0.0);
      state.v[i].assign(ps[i].second, 0.0);
    }
  }
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
  for (std::size_t i = 0; i < ps.size(); ++i) {
    if (ps[i].second != gs[i].second) throw std::logic_error("adam_step: buffer size mismatch");
    double* p = ps[i].first;
    const double* grd = gs[i].first;
    double* m = state.m[i].data();
    double* v = state.v[i].data();
    for (std::size_t j = 0; j < ps[i].second; ++j) {
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * grd[j];
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * grd[j] * grd[j];
      p[j] -= cfg.lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + cfg.adam_eps);
    }
  }
}

TrainResult train(const Graph& g, const DenseMatrix& x, const std::vector<int32_t>& labels,
                  const NodeSubset& train_mask, const NodeSubset& test_mask, int32_t classes,
                  ArchKind arch, uint32_t d, uint32_t L, const NagConfig& nag,
                  const TrainConfig& tc) {
  const uint32_t n = g.num_nodes();
  if (x.rows() != n) throw std::invalid_argument("train: feature rows != node count");
  if (classes < 2) throw std::invalid_argument("train: need at least 2 classes");
  if (labels.size() != n) throw std::invalid_argument("train: label count != node count");
  for (int32_t y : labels)
    if (y < 0 || y >= classes) throw std::invalid_argument("train: label out of range");
  if (train_mask.empty()) throw std::invalid_argument("train: empty training mask");
  if (arch == ArchKind::LINEAR && nag.mode == EncodeMode::NAG)
    throw std::invalid_argument("linear encoder supports standard mode only");

  TrainResult result;
  ModelParams model;
  model.enc = init_weights(arch, d, L, tc.init, rng::derive(tc.seed, {rng::hash_str("init")}),
                           static_cast<uint32_t>(x.cols()));
  {
    rng::Stream hs(tc.seed, {rng::hash_str("head")});
    model.head = DenseMatrix::gaussian(d, static_cast<std::size_t>(classes), hs,
                                       std::sqrt(2.0 / d));
  }

  SpectralNormalizer normer(rng::derive(tc.seed, {rng::hash_str("spectral")}));
  auto constrain = [&] {
    for (std::size_t l = 0; l < model.enc.layers.size(); ++l)
      normer.normalize(l, model.enc.layers[l]);
  };
  // Constrained training keeps the forward inside the unit-norm regime from
  // the very first epoch, not only after the first update.
  if (tc.scheme == WeightScheme::CONSTRAINED) constrain();

  AdamState adam;
  result.train_loss.reserve(tc.epochs);
  for (uint32_t e = 1; e <= tc.epochs; ++e) {
    const uint64_t noise_seed = rng::derive(tc.seed, {rng::hash_str("epoch"), e});
    ForwardTape tape;
    const DenseMatrix logits = forward_logits(g, x, model, nag, noise_seed, &tape, &result.stats);
    result.train_loss.push_back(cross_entropy(logits, labels, train_mask));
    const ModelGrads grads = backward(g, x, model, nag, tape, labels, train_mask);
    adam_step(model, grads, adam, e, tc);
    if (tc.scheme == WeightScheme::CONSTRAINED) constrain();
  }

  const uint64_t eval_seed = rng::derive(tc.seed, {rng::hash_str("eval")});
  const DenseMatrix noisy = forward_logits(g, x, model, nag, eval_seed);
  result.train_acc = accuracy(noisy, labels, train_mask);
  result.test_acc_noisy = accuracy(noisy, labels, test_mask);
  NagConfig clean = nag;
  clean.sigma = 0.0;
  const DenseMatrix quiet = forward_logits(g, x, model, clean, eval_seed);
  result.test_acc_clean = accuracy(quiet, labels, test_mask);
  result.model = std::move(model);
  return result;
}

namespace {

const char* act_token(Activation a) { return a == Activation::RELU ? "relu" : "identity"; }

const char* final_token(NagConfig::FinalAct f) {
  switch (f) {
    case NagConfig::FinalAct::AUTO: return "auto";
    case NagConfig::FinalAct::RELU: return "relu";
    case NagConfig::FinalAct::IDENTITY: return "identity";
  }
  return "?";
}

std::vector<double> row_of(const DenseMatrix& m) {
  if (m.rows() != 1) throw std::runtime_error("snapshot: expected a single-row section");
  return m.data();
}

DenseMatrix as_row(const std::vector<double>& v) {
  DenseMatrix m(1, v.size());
  m.data() = v;
  return m;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& file, const ModelParams& model,
                     const NagConfig& cfg) {
  model.enc.validate();
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + file.string());
  char head[256];
  std::snprintf(head, sizeof head,
                "snapshot arch=%s depth=%u width=%u classes=%zu sigma=%.17g mode=%s "
                "activation=%s final=%s\n",
                arch_name(model.enc.arch), model.enc.depth, model.enc.d(), model.head.cols(),
                cfg.sigma, cfg.mode == EncodeMode::NAG ? "nag" : "standard",
                act_token(cfg.activation), final_token(cfg.final_activation));
  os << head;
  if (!model.enc.input_proj.empty())
    write_matrix_section(os, "input_proj", model.enc.input_proj);
  for (std::size_t l = 0; l < model.enc.layers.size(); ++l) {
    write_matrix_section(os, "layer" + std::to_string(l), model.enc.layers[l]);
    if (model.enc.arch == ArchKind::GAT) {
      write_matrix_section(os, "beta_src" + std::to_string(l), as_row(model.enc.gat[l].beta_src));
      write_matrix_section(os, "beta_dst" + std::to_string(l), as_row(model.enc.gat[l].beta_dst));
    }
  }
  write_matrix_section(os, "head", model.head);
  if (!os) throw std::runtime_error("write failed: " + file.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + file.string());
  std::string manifest;
  if (!std::getline(is, manifest)) throw std::runtime_error("snapshot: empty file");
  std::istringstream ss(manifest);
  std::string tag;
  ss >> tag;
  if (tag != "snapshot") throw std::runtime_error("snapshot: bad manifest: " + manifest);

  LoadedCheckpoint out;
  uint32_t depth = 0, width = 0;
  std::size_t classes = 0;
  std::string tok;
  while (ss >> tok) {
    const std::size_t eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("snapshot: bad token: " + tok);
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "arch") {
      const auto a = arch_from_name(val);
      if (!a) throw std::runtime_error("snapshot: unknown arch: " + val);
      out.model.enc.arch = *a;
    } else if (key == "depth") {
      depth = static_cast<uint32_t>(std::stoul(val));
    } else if (key == "width") {
      width = static_cast<uint32_t>(std::stoul(val));
    } else if (key == "classes") {
      classes = std::stoul(val);
    } else if (key == "sigma") {
      out.cfg.sigma = std::stod(val);
    } else if (key == "mode") {
      out.cfg.mode = val == "nag" ? EncodeMode::NAG : EncodeMode::STANDARD;
    } else if (key == "activation") {
      out.cfg.activation = val == "relu" ? Activation::RELU : Activation::IDENTITY;
    } else if (key == "final") {
      out.cfg.final_activation = val == "auto"   ? NagConfig::FinalAct::AUTO
                                 : val == "relu" ? NagConfig::FinalAct::RELU
                                                 : NagConfig::FinalAct::IDENTITY;
    } else {
      throw std::runtime_error("snapshot: unknown key: " + key);
    }
  }
  if (depth == 0 || width == 0 || classes == 0)
    throw std::runtime_error("snapshot: manifest missing depth/width/classes");
  out.model.enc.depth = depth;

  const std::size_t n_layers = out.model.enc.arch == ArchKind::LINEAR ? 1 : depth;
  std::string name;
  DenseMatrix pending = read_matrix_section(is, &name);
  if (name == "input_proj") {
    out.model.enc.input_proj = std::move(pending);
    pending = read_matrix_section(is, &name);
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    if (l > 0) pending = read_matrix_section(is, &name);
    if (name != "layer" + std::to_string(l))
      throw std::runtime_error("snapshot: expected layer" + std::to_string(l) + ", got " + name);
    out.model.enc.layers.push_back(std::move(pending));
    if (out.model.enc.arch == ArchKind::GAT) {
      GatParams gp;
      gp.beta_src = row_of(read_matrix_section(is, &name));
      if (name != "beta_src" + std::to_string(l))
        throw std::runtime_error("snapshot: out-of-order gat section: " + name);
      gp.beta_dst = row_of(read_matrix_section(is, &name));
      if (name != "beta_dst" + std::to_string(l))
        throw std::runtime_error("snapshot: out-of-order gat section: " + name);
      out.model.enc.gat.push_back(std::move(gp));
    }
  }
  out.model.head = read_matrix_section(is, &name);
  if (name != "head") throw std::runtime_error("snapshot: expected head, got " + name);
  if (out.model.head.rows() != width || out.model.head.cols() != classes)
    throw std::runtime_error("snapshot: head shape disagrees with manifest");
  out.model.enc.validate();
  return out;
}

}  // namespace sera
