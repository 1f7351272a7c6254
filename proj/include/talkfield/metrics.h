#pragma once

#include <vector>

#include <torch/torch.h>

#include "talkfield/audio_disentangle.h"

namespace talkfield {

// Windowed SSIM over grayscale unit-range images: 11x11 Gaussian window
// (sigma 1.5), C1=(0.01)^2, C2=(0.03)^2, mean over all fully covered
// windows. Symmetric in its arguments.
double ssim(const torch::Tensor& a, const torch::Tensor& b);

// SSIM of RGB images (3,H,W): computed on the luminance-free channel mean.
double ssim_rgb(const torch::Tensor& a, const torch::Tensor& b);

// Mean Euclidean distance over 79 lip-landmark rows ((79,2) tensors).
double lmd79(const torch::Tensor& a, const torch::Tensor& b);

// Fraction of action units whose thresholded prediction matches the binary
// ground truth.
double au_acc(const torch::Tensor& pred, const torch::Tensor& gt,
              double threshold = 0.5);

// Mean cosine similarity of SyncNet embeddings over (frame, audio) pairs.
double syncnet_confidence(SyncNet net, const std::vector<torch::Tensor>& frames,
                          const std::vector<torch::Tensor>& audio);

}  // namespace talkfield
