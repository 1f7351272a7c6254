#pragma once

#include <functional>
#include <optional>

#include <torch/torch.h>

#include "talkfield/camera.h"
#include "talkfield/head_param.h"
#include "talkfield/rng.h"

namespace talkfield {

struct RenderConfig {
  int n_samples = 32;       // stratified samples per ray
  int low_res = 16;         // rendered feature-map side
  int upsample_factor = 4;  // power of two; output side = low_res * factor
  int d_feat = 32;          // feature channels produced by the field
  int l_pos = 10;           // positional-encoding frequencies for positions
  int l_dir = 4;            // positional-encoding frequencies for directions
  int hidden = 128;         // field MLP width
  double t_near = 1.2;      // world units
  double t_far = 3.4;

  int out_res() const { return low_res * upsample_factor; }
  void validate() const;
};

// Density and per-point feature for one 3D sample.
struct FieldOutput {
  torch::Tensor z;      // (d_feat)
  torch::Tensor sigma;  // scalar, >= 0
};

// Batched field evaluation: positions/dirs (N,3) -> sigma (N), z (N,d_feat).
struct FieldBatch {
  torch::Tensor sigma;
  torch::Tensor z;
};
using FieldFn =
    std::function<FieldBatch(const torch::Tensor&, const torch::Tensor&)>;

// [x, sin(2^k x), cos(2^k x)]_{k<L}; output dim = d*(1+2L).
torch::Tensor positional_encoding(const torch::Tensor& x, int num_freqs);

// Quadrature of the transmittance integral over one batch of rays:
//   alpha_i = 1 - exp(-sigma_i * delta_i), T_i = prod_{j<i}(1 - alpha_j),
//   weights = T * alpha, feature = sum_i w_i z_i, opacity = sum_i w_i.
struct CompositeResult {
  torch::Tensor feature;        // (R, d)
  torch::Tensor opacity;        // (R)
  torch::Tensor weights;        // (R, N)
  torch::Tensor transmittance;  // (R, N)
};
CompositeResult composite(const torch::Tensor& sigma, const torch::Tensor& z,
                          const torch::Tensor& deltas);

// Conditioned implicit field: an MLP over positionally encoded coordinates.
// The head conditioning vector enters the first layer (algebraically a
// plain Linear over the concatenated input, split so the condition term is
// computed once per frame); illumination and view direction join at the
// feature head. Density is softplus-activated and sees neither.
struct FieldMlpImpl : torch::nn::Module {
  explicit FieldMlpImpl(const RenderConfig& cfg);

  // pe_pos: (N, pos_enc_dim), pe_dir: (N, dir_enc_dim),
  // cond: (trunk_dim) or (N, trunk_dim), illu: (27) or (N, 27)
  FieldBatch forward_encoded(const torch::Tensor& pe_pos,
                             const torch::Tensor& pe_dir,
                             const torch::Tensor& cond,
                             const torch::Tensor& illu);
  FieldBatch forward(const torch::Tensor& positions, const torch::Tensor& dirs,
                     const HeadParams& params);

  int pos_enc_dim() const { return 3 * (1 + 2 * cfg_.l_pos); }
  int dir_enc_dim() const { return 3 * (1 + 2 * cfg_.l_dir); }

 private:
  RenderConfig cfg_;
  torch::nn::Linear pos_in{nullptr}, cond_in{nullptr};
  torch::nn::Linear trunk1{nullptr}, trunk2{nullptr};
  torch::nn::Linear sigma_head{nullptr};
  torch::nn::Linear feat_in{nullptr}, feat_out{nullptr};
};
TORCH_MODULE(FieldMlp);

// Learned upsampler H_u: feature map (low_res, low_res, d_feat) -> RGB image
// (3, low_res*factor, low_res*factor) in [0,1].
struct FeatureUpsamplerImpl : torch::nn::Module {
  FeatureUpsamplerImpl(int d_feat, int upsample_factor);
  torch::Tensor forward(const torch::Tensor& feature_map);

 private:
  int d_feat_;
  int factor_;
  torch::nn::Sequential net{nullptr};
};
TORCH_MODULE(FeatureUpsampler);

// Full conditional renderer: rays -> stratified samples -> field ->
// composited feature map -> upsampled RGB frame.
struct NerfRendererImpl : torch::nn::Module {
  explicit NerfRendererImpl(const RenderConfig& cfg);

  FieldOutput field_eval(const torch::Tensor& position,
                         const torch::Tensor& view_dir,
                         const HeadParams& params);

  // Low-res pass over an arbitrary field; jitter == nullptr renders with
  // bin midpoints (deterministic).
  struct LowRes {
    torch::Tensor features;  // (low_res, low_res, d_feat)
    torch::Tensor opacity;   // (low_res, low_res)
  };
  LowRes render_lowres(const CameraPose& pose, const FieldFn& field,
                       RandomStream* jitter = nullptr) const;
  LowRes render_lowres(const CameraPose& pose, const HeadParams& params,
                       RandomStream* jitter = nullptr);

  std::pair<torch::Tensor, torch::Tensor> render_ray(
      const Ray& ray, const HeadParams& params,
      RandomStream* jitter = nullptr);

  // (3, out_res, out_res) in [0,1]
  torch::Tensor render_frame(const CameraPose& pose, const HeadParams& params,
                             RandomStream* jitter = nullptr);

  torch::Tensor upsample(const torch::Tensor& feature_map) {
    return upsampler->forward(feature_map);
  }

  FieldFn field_fn(const HeadParams& params);

  const RenderConfig& config() const { return cfg_; }
  FieldMlp field{nullptr};
  FeatureUpsampler upsampler{nullptr};

 private:
  RenderConfig cfg_;
  // samples (R, n) along rays plus the matching deltas
  std::pair<torch::Tensor, torch::Tensor> sample_depths(
      int64_t n_rays, double t_near, double t_far, RandomStream* jitter,
      torch::Dtype dtype) const;
};
TORCH_MODULE(NerfRenderer);

// Sum of squared pixel differences (Eq. over all channels/pixels).
torch::Tensor photometric_loss(const torch::Tensor& pred,
                               const torch::Tensor& gt);

// Peak signal-to-noise ratio in dB for unit-range images.
double psnr(const torch::Tensor& pred, const torch::Tensor& gt);

}  // namespace talkfield
