#pragma once

#include <torch/torch.h>

namespace talkfield {

// Fixed widths of the head parameter vector.
inline constexpr int64_t kIdDim = 100;
inline constexpr int64_t kExpDim = 79;
inline constexpr int64_t kAlbDim = 100;
inline constexpr int64_t kIlluDim = 27;

// Five-part conditioning vector for the radiance field: identity, the two
// expression components (speech movement and speaking style), albedo and
// illumination.
struct HeadParams {
  torch::Tensor f_id;         // (100)
  torch::Tensor f_exp_aud;    // (79)
  torch::Tensor f_exp_style;  // (79)
  torch::Tensor f_alb;        // (100)
  torch::Tensor f_illu;       // (27)

  void validate() const;
  // Concatenation of the four shape/appearance vectors fed to the field
  // trunk (everything except f_illu).
  torch::Tensor trunk_conditions() const;
};

// Image-derived subset: what the prior extractor reads off a single frame.
struct ExtractedPrior {
  torch::Tensor f_id;    // (100)
  torch::Tensor f_exp;   // (79)
  torch::Tensor f_alb;   // (100)
  torch::Tensor f_illu;  // (27)

  void validate() const;
};

// Small convolutional encoder with one head per prior component. Stands in
// for 3DMM fitting; trained end-to-end with the renderer.
struct PriorExtractorImpl : torch::nn::Module {
  PriorExtractorImpl(int resolution = 64, int base_channels = 16);

  // frame: (3, H, W) in [0,1]. Throws ShapeError on a mismatched resolution
  // or out-of-range pixel values.
  ExtractedPrior extract(const torch::Tensor& frame);
  // Batched variant, frames: (B, 3, H, W); returns (B, 100/79/100/27).
  std::tuple<torch::Tensor, torch::Tensor, torch::Tensor, torch::Tensor>
  extract_batch(const torch::Tensor& frames);

  int resolution() const { return resolution_; }

 private:
  int resolution_;
  torch::nn::Sequential conv{nullptr};
  torch::nn::Linear shared{nullptr};
  torch::nn::Linear head_id{nullptr}, head_exp{nullptr}, head_alb{nullptr},
      head_illu{nullptr};
};
TORCH_MODULE(PriorExtractor);

// HeadParams with f_id/f_alb/f_illu copied from the prior and the two
// expression blocks supplied by the audio path. Inputs are not mutated.
HeadParams assemble(const ExtractedPrior& prior, const torch::Tensor& exp_aud,
                    const torch::Tensor& exp_style);

}  // namespace talkfield
