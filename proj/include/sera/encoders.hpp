#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sera/graph.hpp"
#include "sera/matrix.hpp"

namespace sera {

enum class ArchKind { LINEAR, GCN, MEAN_SAGE, MAX_SAGE, GIN, GAT };
enum class Activation { RELU, IDENTITY };
enum class EncodeMode { STANDARD, NAG };
enum class InitScheme { IDENTITY, HE, PRODUCT };

const char* arch_name(ArchKind a);
std::optional<ArchKind> arch_from_name(std::string_view s);

struct NagConfig {
  EncodeMode mode = EncodeMode::STANDARD;
  double sigma = 0.0;                      // noise stddev, NAG mode only
  Activation activation = Activation::RELU;
  // AUTO keeps the hidden activation on every layer in NAG mode and switches
  // the last layer to IDENTITY in standard mode.
  enum class FinalAct { AUTO, RELU, IDENTITY } final_activation = FinalAct::AUTO;
  double norm_epsilon = 1e-12;  // rows with smaller norm bypass normalization
  double gat_leaky_slope = 0.2;
};

Activation layer_activation(const NagConfig& cfg, bool final_layer);

struct GatParams {
  std::vector<double> beta_src, beta_dst;  // d each
};

// L square d x d layer matrices (LINEAR keeps a single effective matrix and a
// separate depth). When the incoming feature dimension differs from d, an
// input projection (d_in x d) maps features first; it is a per-node transform
// that touches no edges, so it stays outside the privacy-bound sum and outside
// spectral normalization.
struct EncoderWeights {
  ArchKind arch = ArchKind::LINEAR;
  uint32_t depth = 1;
  std::vector<DenseMatrix> layers;
  std::vector<GatParams> gat;  // GAT only, one per layer
  DenseMatrix input_proj;      // empty when feature dim == d

  uint32_t d() const { return static_cast<uint32_t>(layers.front().rows()); }
  void validate() const;
};

// d_in = 0 means "features already have width d" (no projection).
EncoderWeights init_weights(ArchKind arch, uint32_t d, uint32_t L, InitScheme scheme,
                            uint64_t seed, uint32_t d_in = 0);

struct EncodeStats {
  std::size_t zero_norm_rows = 0;  // rows that bypassed NAG normalization
};

// Per-layer forward record, filled when training needs a backward pass.
struct LayerTape {
  std::vector<double> inv_norms;  // NAG: 1/|h_v|, 0 marks a bypassed row; empty in STANDARD
  DenseMatrix normalized;         // layer input after normalization (== input in STANDARD)
  DenseMatrix messages;           // GAT only: M = normalized * W^T
  std::vector<uint32_t> argmax;   // MAX_SAGE only: winning node per (v, coord)
  std::vector<double> alpha;      // GAT: attention weights, CSR-extended order
  std::vector<double> att_pre;    // GAT: scores before LeakyReLU, same order
  std::vector<double> a_src, a_dst;  // GAT: per-node score halves
  DenseMatrix out;                // post-activation layer output
};

// One message-passing layer (Eq-8 style). NAG mode normalizes input rows,
// aggregates transformed messages over N(v) and v itself, adds fresh
// N(0, sigma^2 I) noise per node, then applies the activation. STANDARD mode
// skips both the normalization and the noise. Noise draws are indexed by
// (noise_seed, layer_index, node), so any (graph, seed) pair names one
// deterministic noise field regardless of evaluation order.
DenseMatrix mp_layer(const Graph& g, const DenseMatrix& h, const DenseMatrix& w,
                     const GatParams* gat, ArchKind arch, const NagConfig& cfg,
                     Activation act, uint64_t noise_seed, uint32_t layer_index,
                     EncodeStats* stats = nullptr, LayerTape* tape = nullptr);

// One mean-propagation step P x with P = (D+I)^{-1}(A+I), and its transpose
// P^T x = (A+I)(D+I)^{-1} x. Both walk the sparse adjacency once.
DenseMatrix propagate_mean(const Graph& g, const DenseMatrix& x);
DenseMatrix propagate_mean_transpose(const Graph& g, const DenseMatrix& x);

// Depth-L mean-propagation encoder: H = ((D+I)^{-1} (A+I))^L X W, all
// propagation done on the sparse adjacency, W applied once at the end.
DenseMatrix encode_linear(const Graph& g, const DenseMatrix& x, const DenseMatrix& w,
                          uint32_t L);

// Full encoder dispatch. LINEAR supports STANDARD mode only.
DenseMatrix encode(const Graph& g, const DenseMatrix& x, const EncoderWeights& weights,
                   const NagConfig& cfg, uint64_t noise_seed, EncodeStats* stats = nullptr);

}  // namespace sera
