#pragma once

#include <torch/torch.h>

namespace talkfield {

struct CameraPose {
  torch::Tensor rotation;     // (3,3) double, camera axes as columns
  torch::Tensor translation;  // (3) double, camera origin in world units
  double fx = 0, fy = 0, cx = 0, cy = 0;  // pixels

  // Throws PoseError unless rotation is orthonormal with det +1 (1e-6).
  void validate() const;
  // Same camera with intrinsics divided by `factor` (for low-res ray grids).
  CameraPose scaled(double factor) const;
};

// Right-handed look-at camera: +z forward, +x image-right, +y image-down.
CameraPose look_at(const torch::Tensor& position, const torch::Tensor& target,
                   double fx, double fy, double cx, double cy);

struct Ray {
  torch::Tensor origin;     // (3)
  torch::Tensor direction;  // (3), unit norm
  double t_near = 0, t_far = 0;
};

// One ray per pixel (pixel centers), row-major over (y, x). Directions are
// unit-norm double tensors.
struct RayGrid {
  torch::Tensor origins;     // (H*W, 3)
  torch::Tensor directions;  // (H*W, 3)
  int width = 0, height = 0;
};

RayGrid generate_rays(const CameraPose& pose, int width, int height);

}  // namespace talkfield
