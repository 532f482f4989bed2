#include "sera/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "sera/rng.hpp"

namespace sera {

namespace {
constexpr uint64_t kNoiseTag = 0x6e6f697365ull;
constexpr uint64_t kLayerTag = 0x6c61796572ull;
constexpr uint64_t kProjTag = 0x70726f6aull;
constexpr uint64_t kGatTag = 0x676174ull;
}  // namespace

const char* arch_name(ArchKind a) {
  switch (a) {
    case ArchKind::LINEAR: return "linear";
    case ArchKind::GCN: return "gcn";
    case ArchKind::MEAN_SAGE: return "mean_sage";
    case ArchKind::MAX_SAGE: return "max_sage";
    case ArchKind::GIN: return "gin";
    case ArchKind::GAT: return "gat";
  }
  return "?";
}

std::optional<ArchKind> arch_from_name(std::string_view s) {
  for (ArchKind a : {ArchKind::LINEAR, ArchKind::GCN, ArchKind::MEAN_SAGE, ArchKind::MAX_SAGE,
                     ArchKind::GIN, ArchKind::GAT})
    if (s == arch_name(a)) return a;
  return std::nullopt;
}

Activation layer_activation(const NagConfig& cfg, bool final_layer) {
  if (!final_layer) return cfg.activation;
  switch (cfg.final_activation) {
    case NagConfig::FinalAct::RELU: return Activation::RELU;
    case NagConfig::FinalAct::IDENTITY: return Activation::IDENTITY;
    case NagConfig::FinalAct::AUTO:
      return cfg.mode == EncodeMode::NAG ? cfg.activation : Activation::IDENTITY;
  }
  return Activation::IDENTITY;
}

void EncoderWeights::validate() const {
  if (layers.empty()) throw std::invalid_argument("encoder has no layer matrices");
  const std::size_t dd = layers.front().rows();
  for (const auto& w : layers)
    if (w.rows() != dd || w.cols() != dd)
      throw std::invalid_argument("layer matrices must all be square with equal size");
  if (depth < 1) throw std::invalid_argument("depth must be >= 1");
  if (arch == ArchKind::LINEAR) {
    if (layers.size() != 1)
      throw std::invalid_argument("linear encoder carries exactly one effective matrix");
  } else if (layers.size() != depth) {
    throw std::invalid_argument("message-passing encoder needs depth matrices");
  }
  if (arch == ArchKind::GAT) {
    if (gat.size() != layers.size())
      throw std::invalid_argument("gat encoder needs score vectors per layer");
    for (const auto& gp : gat)
      if (gp.beta_src.size() != dd || gp.beta_dst.size() != dd)
        throw std::invalid_argument("gat score vectors must have layer width");
  }
  if (!input_proj.empty() && input_proj.cols() != dd)
    throw std::invalid_argument("input projection width must match layer size");
}

EncoderWeights init_weights(ArchKind arch, uint32_t d, uint32_t L, InitScheme scheme,
                            uint64_t seed, uint32_t d_in) {
  if (d == 0 || L == 0) throw std::invalid_argument("init_weights: d and L must be positive");
  if (scheme == InitScheme::PRODUCT && arch != ArchKind::LINEAR)
    throw std::invalid_argument("product init is defined for the linear encoder only");

  EncoderWeights w;
  w.arch = arch;
  w.depth = L;
  const double he_std = std::sqrt(2.0 / d);

  auto he_matrix = [&](uint32_t layer) {
    rng::Stream s(seed, {kLayerTag, layer});
    return DenseMatrix::gaussian(d, d, s, he_std);
  };

  if (arch == ArchKind::LINEAR) {
    switch (scheme) {
      case InitScheme::IDENTITY:
        w.layers.push_back(DenseMatrix::identity(d));
        break;
      case InitScheme::HE:
        w.layers.push_back(he_matrix(0));
        break;
      case InitScheme::PRODUCT: {
        DenseMatrix acc = he_matrix(0);
        for (uint32_t l = 1; l < L; ++l) acc = matmul(acc, he_matrix(l));
        w.layers.push_back(std::move(acc));
        break;
      }
    }
  } else {
    for (uint32_t l = 0; l < L; ++l)
      w.layers.push_back(scheme == InitScheme::IDENTITY ? DenseMatrix::identity(d)
                                                        : he_matrix(l));
    if (arch == ArchKind::GAT) {
      for (uint32_t l = 0; l < L; ++l) {
        GatParams gp;
        gp.beta_src.assign(d, 0.0);
        gp.beta_dst.assign(d, 0.0);
        if (scheme == InitScheme::HE) {
          rng::Stream s(seed, {kGatTag, l});
          rng::fill_gaussian(s, gp.beta_src.data(), d);
          rng::fill_gaussian(s, gp.beta_dst.data(), d);
          for (double& x : gp.beta_src) x *= he_std;
          for (double& x : gp.beta_dst) x *= he_std;
        }
        w.gat.push_back(std::move(gp));
      }
    }
  }

  if (d_in != 0 && d_in != d) {
    // Identity has no rectangular analogue, so the projection is always a
    // Kaiming draw; it only reconciles dimensions and is never constrained.
    rng::Stream s(seed, {kProjTag});
    w.input_proj = DenseMatrix::gaussian(d_in, d, s, std::sqrt(2.0 / d_in));
  }
  w.validate();
  return w;
}

namespace {

// Visits sorted(N(v) + {v}): neighbor lists are already ascending, v is merged
// into place. Deterministic scan order shared by forward and backward.
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

void apply_activation(DenseMatrix& m, Activation act) {
  if (act == Activation::IDENTITY) return;
  for (double& x : m.data()) x = x > 0.0 ? x : 0.0;
}

}  // namespace

DenseMatrix mp_layer(const Graph& g, const DenseMatrix& h, const DenseMatrix& w,
                     const GatParams* gat, ArchKind arch, const NagConfig& cfg,
                     Activation act, uint64_t noise_seed, uint32_t layer_index,
                     EncodeStats* stats, LayerTape* tape) {
  const uint32_t n = g.num_nodes();
  const std::size_t d = w.rows();
  if (h.rows() != n) throw std::invalid_argument("mp_layer: feature rows != node count");
  if (h.cols() != d || w.cols() != d)
    throw std::invalid_argument("mp_layer: layer expects square W matching input width");
  if (arch == ArchKind::LINEAR) throw std::invalid_argument("mp_layer: linear is not a layer");
  if (arch == ArchKind::GAT && gat == nullptr)
    throw std::invalid_argument("mp_layer: gat layer without score vectors");

  const bool nag = cfg.mode == EncodeMode::NAG;

  // Input normalization (NAG): rows become unit vectors; degenerate rows pass
  // through untouched and are reported, never turned into NaN.
  DenseMatrix normalized = h;
  std::vector<double> inv_norms;
  if (nag) {
    inv_norms.assign(n, 0.0);
    for (uint32_t v = 0; v < n; ++v) {
      double s = 0.0;
      const double* row = h.row(v);
      for (std::size_t k = 0; k < d; ++k) s += row[k] * row[k];
      const double nrm = std::sqrt(s);
      if (nrm < cfg.norm_epsilon) {
        if (stats) ++stats->zero_norm_rows;
        continue;  // inv_norms stays 0: bypass marker
      }
      inv_norms[v] = 1.0 / nrm;
      double* out = normalized.row(v);
      for (std::size_t k = 0; k < d; ++k) out[k] *= inv_norms[v];
    }
  }

  DenseMatrix messages = matmul_nt(normalized, w);  // row v = W h_v
  DenseMatrix z(n, d);

  switch (arch) {
    case ArchKind::MEAN_SAGE: {
      for (uint32_t v = 0; v < n; ++v) {
        double* zv = z.row(v);
        const double inv = 1.0 / (g.degree(v) + 1.0);
        for (uint32_t u : g.neighbors(v)) {
          const double* mu = messages.row(u);
          for (std::size_t k = 0; k < d; ++k) zv[k] += mu[k];
        }
        const double* mv = messages.row(v);
        for (std::size_t k = 0; k < d; ++k) zv[k] = (zv[k] + mv[k]) * inv;
      }
      break;
    }
    case ArchKind::GIN: {
      for (uint32_t v = 0; v < n; ++v) {
        double* zv = z.row(v);
        const double* mv = messages.row(v);
        for (std::size_t k = 0; k < d; ++k) zv[k] = mv[k];
        for (uint32_t u : g.neighbors(v)) {
          const double* mu = messages.row(u);
          for (std::size_t k = 0; k < d; ++k) zv[k] += mu[k];
        }
      }
      break;
    }
    case ArchKind::GCN: {
      std::vector<double> inv_sqrt(n);
      for (uint32_t v = 0; v < n; ++v) inv_sqrt[v] = 1.0 / std::sqrt(g.degree(v) + 1.0);
      for (uint32_t v = 0; v < n; ++v) {
        double* zv = z.row(v);
        const double* mv = messages.row(v);
        for (std::size_t k = 0; k < d; ++k) zv[k] = mv[k] * inv_sqrt[v];
        for (uint32_t u : g.neighbors(v)) {
          const double* mu = messages.row(u);
          for (std::size_t k = 0; k < d; ++k) zv[k] += mu[k] * inv_sqrt[u];
        }
        for (std::size_t k = 0; k < d; ++k) zv[k] *= inv_sqrt[v];
      }
      break;
    }
    case ArchKind::MAX_SAGE: {
      if (tape) tape->argmax.assign(std::size_t(n) * d, 0);
      for (uint32_t v = 0; v < n; ++v) {
        double* zv = z.row(v);
        bool first = true;
        for_extended(g, v, [&](uint32_t u) {
          const double* mu = messages.row(u);
          if (first) {
            for (std::size_t k = 0; k < d; ++k) {
              zv[k] = mu[k];
              if (tape) tape->argmax[std::size_t(v) * d + k] = u;
            }
            first = false;
            return;
          }
          for (std::size_t k = 0; k < d; ++k) {
            if (mu[k] > zv[k]) {  // strict: earliest id keeps ties
              zv[k] = mu[k];
              if (tape) tape->argmax[std::size_t(v) * d + k] = u;
            }
          }
        });
      }
      break;
    }
    case ArchKind::GAT: {
      std::vector<double> a_src(n), a_dst(n);
      for (uint32_t v = 0; v < n; ++v) {
        const double* mv = messages.row(v);
        double s = 0.0, t = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          s += gat->beta_src[k] * mv[k];
          t += gat->beta_dst[k] * mv[k];
        }
        a_src[v] = s;
        a_dst[v] = t;
      }
      const double slope = cfg.gat_leaky_slope;
      std::vector<double> alpha_all, pre_all;
      if (tape) {
        alpha_all.reserve(2 * g.num_edges() + n);
        pre_all.reserve(2 * g.num_edges() + n);
      }
      std::vector<double> pre, al;
      for (uint32_t v = 0; v < n; ++v) {
        pre.clear();
        for_extended(g, v, [&](uint32_t u) { pre.push_back(a_src[u] + a_dst[v]); });
        al.resize(pre.size());
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pre.size(); ++i) {
          al[i] = pre[i] > 0.0 ? pre[i] : slope * pre[i];  // LeakyReLU
          mx = std::max(mx, al[i]);
        }
        double denom = 0.0;
        for (double& a : al) {
          a = std::exp(a - mx);
          denom += a;
        }
        for (double& a : al) a /= denom;

        double* zv = z.row(v);
        std::size_t i = 0;
        for_extended(g, v, [&](uint32_t u) {
          const double* mu = messages.row(u);
          const double a = al[i++];
          for (std::size_t k = 0; k < d; ++k) zv[k] += a * mu[k];
        });
        if (tape) {
          alpha_all.insert(alpha_all.end(), al.begin(), al.end());
          pre_all.insert(pre_all.end(), pre.begin(), pre.end());
        }
      }
      if (tape) {
        tape->alpha = std::move(alpha_all);
        tape->att_pre = std::move(pre_all);
        tape->a_src = std::move(a_src);
        tape->a_dst = std::move(a_dst);
      }
      break;
    }
    case ArchKind::LINEAR:
      break;  // unreachable
  }

  if (nag && cfg.sigma > 0.0) {
    std::vector<double> eps(d);
    for (uint32_t v = 0; v < n; ++v) {
      rng::Stream s(noise_seed, {kNoiseTag, layer_index, v});
      rng::fill_gaussian(s, eps.data(), d);
      double* zv = z.row(v);
      for (std::size_t k = 0; k < d; ++k) zv[k] += cfg.sigma * eps[k];
    }
  }

  if (tape) {
    tape->inv_norms = std::move(inv_norms);
    if (arch == ArchKind::GAT) tape->messages = std::move(messages);
    tape->normalized = std::move(normalized);
  }
  apply_activation(z, act);
  if (tape) tape->out = z;
  return z;
}

DenseMatrix propagate_mean(const Graph& g, const DenseMatrix& x) {
  const uint32_t n = g.num_nodes();
  if (x.rows() != n) throw std::invalid_argument("propagate_mean: rows != node count");
  const std::size_t d = x.cols();
  DenseMatrix out(n, d);
  for (uint32_t v = 0; v < n; ++v) {
    double* ov = out.row(v);
    const double* self = x.row(v);
    for (std::size_t k = 0; k < d; ++k) ov[k] = self[k];
    for (uint32_t u : g.neighbors(v)) {
      const double* src = x.row(u);
      for (std::size_t k = 0; k < d; ++k) ov[k] += src[k];
    }
    const double inv = 1.0 / (g.degree(v) + 1.0);
    for (std::size_t k = 0; k < d; ++k) ov[k] *= inv;
  }
  return out;
}

DenseMatrix propagate_mean_transpose(const Graph& g, const DenseMatrix& x) {
  const uint32_t n = g.num_nodes();
  if (x.rows() != n) throw std::invalid_argument("propagate_mean_transpose: rows != node count");
  const std::size_t d = x.cols();
  // scale rows by 1/(deg+1) first, then scatter over A+I
  DenseMatrix scaled = x;
  for (uint32_t v = 0; v < n; ++v) {
    const double inv = 1.0 / (g.degree(v) + 1.0);
    double* row = scaled.row(v);
    for (std::size_t k = 0; k < d; ++k) row[k] *= inv;
  }
  DenseMatrix out = scaled;
  for (uint32_t v = 0; v < n; ++v) {
    double* ov = out.row(v);
    for (uint32_t u : g.neighbors(v)) {
      const double* src = scaled.row(u);
      for (std::size_t k = 0; k < d; ++k) ov[k] += src[k];
    }
  }
  return out;
}

DenseMatrix encode_linear(const Graph& g, const DenseMatrix& x, const DenseMatrix& w,
                          uint32_t L) {
  if (x.rows() != g.num_nodes())
    throw std::invalid_argument("encode_linear: feature rows != node count");
  if (w.rows() != x.cols() || w.cols() != w.rows())
    throw std::invalid_argument("encode_linear: W must be square matching feature width");
  DenseMatrix cur = x;
  for (uint32_t step = 0; step < L; ++step) cur = propagate_mean(g, cur);
  return matmul(cur, w);
}

DenseMatrix encode(const Graph& g, const DenseMatrix& x, const EncoderWeights& weights,
                   const NagConfig& cfg, uint64_t noise_seed, EncodeStats* stats) {
  weights.validate();
  const uint32_t d = weights.d();
  DenseMatrix h;
  if (!weights.input_proj.empty()) {
    if (x.cols() != weights.input_proj.rows())
      throw std::invalid_argument("encode: feature width does not match input projection");
    h = matmul(x, weights.input_proj);
  } else {
    if (x.cols() != d)
      throw std::invalid_argument("encode: feature width " + std::to_string(x.cols()) +
                                  " != layer size " + std::to_string(d));
    h = x;
  }

  if (weights.arch == ArchKind::LINEAR) {
    if (cfg.mode == EncodeMode::NAG)
      throw std::invalid_argument("linear encoder supports standard mode only");
    return encode_linear(g, h, weights.layers.front(), weights.depth);
  }

  for (uint32_t l = 0; l < weights.depth; ++l) {
    const Activation act = layer_activation(cfg, l + 1 == weights.depth);
    const GatParams* gp = weights.arch == ArchKind::GAT ? &weights.gat[l] : nullptr;
    h = mp_layer(g, h, weights.layers[l], gp, weights.arch, cfg, act, noise_seed, l, stats);
  }
  return h;
}

}  // namespace sera
