#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "sera/encoders.hpp"
#include "sera/graph.hpp"
#include "sera/matrix.hpp"

namespace sera {

enum class WeightScheme { UNCONSTRAINED, CONSTRAINED };

struct ModelParams {
  EncoderWeights enc;
  DenseMatrix head;  // d x classes readout
};

struct ModelGrads {
  std::vector<DenseMatrix> layers;
  std::vector<GatParams> gat;  // gradient holders, same shapes as the params
  DenseMatrix input_proj;      // empty when the model has no projection
  DenseMatrix head;

  static ModelGrads zeros_like(const ModelParams& p);
};

// Uniform flat view over every trainable buffer, in a fixed order
// ([proj?, W_0, (beta_src_0, beta_dst_0,) ..., head]). The optimizer walks
// params and grads through the same ordering, and the gradient checks perturb
// parameters through it.
std::vector<std::pair<double*, std::size_t>> param_buffers(ModelParams& p);
std::vector<std::pair<double*, std::size_t>> grad_buffers(ModelGrads& g);
std::vector<std::pair<const double*, std::size_t>> grad_buffers(const ModelGrads& g);

struct ForwardTape {
  std::vector<LayerTape> layers;  // per message-passing layer
  DenseMatrix linear_b;           // LINEAR only: propagated features before W
  DenseMatrix hidden;             // final representations H
  DenseMatrix logits;
};

// Encoder forward plus the linear readout. When tape is given, records
// everything the backward pass consumes.
DenseMatrix forward_logits(const Graph& g, const DenseMatrix& x, const ModelParams& model,
                           const NagConfig& cfg, uint64_t noise_seed,
                           ForwardTape* tape = nullptr, EncodeStats* stats = nullptr);

// Mean negative log-likelihood over the masked rows (log-sum-exp stabilized).
double cross_entropy(const DenseMatrix& logits, const std::vector<int32_t>& labels,
                     const NodeSubset& mask);

// Exact gradients of cross_entropy(forward_logits(...)) with respect to every
// trainable buffer, replayed from the tape. Noise enters the forward as an
// additive constant, so it never appears here.
ModelGrads backward(const Graph& g, const DenseMatrix& x, const ModelParams& model,
                    const NagConfig& cfg, const ForwardTape& tape,
                    const std::vector<int32_t>& labels, const NodeSubset& mask);

// Fraction of masked rows whose argmax prediction (smallest index on ties)
// matches the label.
double accuracy(const DenseMatrix& logits, const std::vector<int32_t>& labels,
                const NodeSubset& mask);

struct TrainConfig {
  uint32_t epochs = 1000;
  double lr = 1e-3;
  double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  WeightScheme scheme = WeightScheme::UNCONSTRAINED;
  InitScheme init = InitScheme::HE;
  uint64_t seed = 0;
};

struct AdamState {
  std::vector<std::vector<double>> m, v;
};

// One full-batch Adam update (t counts steps from 1). Grows the state lazily
// on first use.
void adam_step(ModelParams& params, const ModelGrads& grads, AdamState& state, uint32_t t,
               const TrainConfig& cfg);

struct TrainResult {
  ModelParams model;
  std::vector<double> train_loss;  // one entry per epoch
  double train_acc = 0.0;          // final, on the training mask, eval noise
  double test_acc_noisy = 0.0;     // eval noise drawn from the eval stream
  double test_acc_clean = 0.0;     // same model, sigma forced to 0
  EncodeStats stats;
};

// Deterministic full-batch training: fresh layer noise every epoch, Adam on
// all trainable buffers, and (CONSTRAINED) each layer matrix rescaled to unit
// spectral norm after every step. The readout and the input projection touch
// no edges and are never constrained.
TrainResult train(const Graph& g, const DenseMatrix& x, const std::vector<int32_t>& labels,
                  const NodeSubset& train_mask, const NodeSubset& test_mask, int32_t classes,
                  ArchKind arch, uint32_t d, uint32_t L, const NagConfig& nag,
                  const TrainConfig& tc);

// Model snapshot: one "snapshot key=value ..." manifest line, then the weight
// matrices as float32 sections in a fixed order. Weights round-trip at
// float32 precision.
void save_checkpoint(const std::filesystem::path& file, const ModelParams& model,
                     const NagConfig& cfg);

struct LoadedCheckpoint {
  ModelParams model;
  NagConfig cfg;
};
LoadedCheckpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace sera
