#pragma once

#include <torch/torch.h>

namespace talkfield {

inline constexpr int64_t kNumAu = 9;  // speech-related action units

// Normalized inverse-occurrence weights: w_i = (n/r_i) / sum_j (1/r_j),
// so sum_i w_i == n. Throws ArgumentError if any rate is outside (0,1].
torch::Tensor compute_au_weights(const torch::Tensor& rates);

// Weighted multi-label binary cross-entropy; predictions are clamped to
// [eps_bce, 1-eps_bce] before the logs.
torch::Tensor weighted_bce_loss(const torch::Tensor& labels,
                                const torch::Tensor& predictions,
                                const torch::Tensor& weights,
                                double eps_bce = 1e-7);

// Weighted multi-label Dice loss: (1/n) sum_i w_i (1 - (2 x x^ + e)/(x^2 + x^^2 + e)).
torch::Tensor weighted_dice_loss(const torch::Tensor& labels,
                                 const torch::Tensor& predictions,
                                 const torch::Tensor& weights,
                                 double eps = 1e-7);

struct QuantizeResult {
  torch::Tensor quantized;  // (d), exactly a codebook row in the forward pass
  int64_t index = 0;
};

// Learned codebook with nearest-neighbor queries. Gradients cross the
// query via the straight-through estimator; ties resolve to the lowest
// index. Tracks per-entry usage so stale entries can be re-seeded.
struct VectorCodebookImpl : torch::nn::Module {
  VectorCodebookImpl(int64_t num_entries, int64_t dim);

  QuantizeResult quantize(const torch::Tensor& input);
  // inputs (B,d) -> quantized (B,d), indices (B)
  std::pair<torch::Tensor, torch::Tensor> quantize_batch(
      const torch::Tensor& inputs);
  // Row gather that stays differentiable w.r.t. the entries (for the
  // codebook-update term of the training loss).
  torch::Tensor lookup(const torch::Tensor& indices) const;

  // Re-seed entries that were never selected in the last `staleness` calls
  // to quantize_batch, drawing replacements from the given encoder outputs.
  void refresh_dead_entries(const torch::Tensor& samples, int64_t staleness);

  int64_t size() const { return entries.size(0); }
  int64_t dim() const { return entries.size(1); }
  // Fraction of entries selected at least once for the given inputs.
  double usage_fraction(const torch::Tensor& inputs);

  torch::Tensor entries;       // (M, d) parameter
  torch::Tensor stale_counts;  // (M) buffer, int64

 private:
  torch::Tensor nearest_indices(const torch::Tensor& inputs) const;
};
TORCH_MODULE(VectorCodebook);

// Frame -> AU feature (for the semantic codebook) plus a sigmoid head
// predicting the AU activations themselves.
struct AuEncoderImpl : torch::nn::Module {
  AuEncoderImpl(int resolution = 64, int64_t d_code = 32, int64_t n_au = kNumAu);

  torch::Tensor encode(const torch::Tensor& frame);         // (d_code)
  torch::Tensor encode_batch(const torch::Tensor& frames);  // (B,d_code)
  torch::Tensor predict(const torch::Tensor& frame);        // (n_au) in [0,1]
  torch::Tensor predict_batch(const torch::Tensor& frames);

  int64_t d_code() const { return d_code_; }

 private:
  int resolution_;
  int64_t d_code_;
  torch::nn::Sequential conv{nullptr};
  torch::nn::Sequential fc{nullptr};
  torch::nn::Linear au_head{nullptr};
};
TORCH_MODULE(AuEncoder);

// Frame -> global facial feature (for the global codebook).
struct GlobalEncoderImpl : torch::nn::Module {
  GlobalEncoderImpl(int resolution = 64, int64_t d_glo = 64);

  torch::Tensor encode(const torch::Tensor& frame);
  torch::Tensor encode_batch(const torch::Tensor& frames);

  int64_t d_glo() const { return d_glo_; }

 private:
  int resolution_;
  int64_t d_glo_;
  torch::nn::Sequential net{nullptr};
  torch::nn::Linear out{nullptr};
};
TORCH_MODULE(GlobalEncoder);

// (f_AU, f_glo) -> RGB frame at the working resolution.
struct SpaceDecoderImpl : torch::nn::Module {
  SpaceDecoderImpl(int64_t d_au, int64_t d_glo, int resolution = 64);

  torch::Tensor decode(const torch::Tensor& f_au, const torch::Tensor& f_glo);
  torch::Tensor decode_batch(const torch::Tensor& f_au,
                             const torch::Tensor& f_glo);

 private:
  int64_t d_au_, d_glo_;
  int resolution_;
  torch::nn::Linear in{nullptr};
  torch::nn::Sequential net{nullptr};
};
TORCH_MODULE(SpaceDecoder);

// VQ training loss: L1 reconstruction plus codebook/commitment terms for
// both spaces. sg(x) terms are detached, so each term trains exactly one
// side of its pair.
torch::Tensor standardized_loss(
    const torch::Tensor& decoded, const torch::Tensor& target,
    const torch::Tensor& f_au_enc, const torch::Tensor& f_au_quant,
    const torch::Tensor& f_glo_enc, const torch::Tensor& f_glo_quant,
    double beta1 = 0.25, double beta2 = 0.25);

}  // namespace talkfield
