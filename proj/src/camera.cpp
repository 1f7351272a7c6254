#include "talkfield/camera.h"

#include "talkfield/errors.h"

namespace talkfield {

void CameraPose::validate() const {
  if (!rotation.defined() || rotation.dim() != 2 || rotation.size(0) != 3 ||
      rotation.size(1) != 3 || !translation.defined() ||
      translation.numel() != 3) {
    throw PoseError("CameraPose: rotation must be (3,3), translation (3)");
  }
  auto r = rotation.to(torch::kFloat64);
  auto should_be_eye = torch::matmul(r, r.t());
  double err = (should_be_eye - torch::eye(3, torch::kFloat64))
                   .abs()
                   .max()
                   .item<double>();
  double det = torch::linalg_det(r).item<double>();
  if (err > 1e-6 || std::abs(det - 1.0) > 1e-6) {
    throw PoseError("CameraPose: rotation is not a proper rotation matrix");
  }
  if (fx <= 0 || fy <= 0) throw PoseError("CameraPose: focal must be positive");
}

CameraPose CameraPose::scaled(double factor) const {
  CameraPose p = *this;
  p.fx /= factor;
  p.fy /= factor;
  p.cx /= factor;
  p.cy /= factor;
  return p;
}

CameraPose look_at(const torch::Tensor& position, const torch::Tensor& target,
                   double fx, double fy, double cx, double cy) {
  auto pos = position.to(torch::kFloat64);
  auto fwd = (target.to(torch::kFloat64) - pos);
  fwd = fwd / fwd.norm();
  auto world_up = torch::tensor({0.0, 1.0, 0.0}, torch::kFloat64);
  auto right = torch::cross(fwd, world_up, 0);
  right = right / right.norm();
  auto down = torch::cross(fwd, right, 0);
  auto rot = torch::stack({right, down, fwd}, /*dim=*/1);
  CameraPose pose{rot, pos, fx, fy, cx, cy};
  pose.validate();
  return pose;
}

RayGrid generate_rays(const CameraPose& pose, int width, int height) {
  pose.validate();
  if (width <= 0 || height <= 0) {
    throw ArgumentError("generate_rays: dimensions must be positive");
  }
  auto xs = (torch::arange(width, torch::kFloat64) + 0.5 - pose.cx) / pose.fx;
  auto ys = (torch::arange(height, torch::kFloat64) + 0.5 - pose.cy) / pose.fy;
  auto grid = torch::meshgrid({ys, xs}, "ij");
  auto dirs_cam = torch::stack(
      {grid[1].flatten(), grid[0].flatten(),
       torch::ones({int64_t(width) * height}, torch::kFloat64)},
      /*dim=*/1);
  auto dirs_world =
      torch::matmul(dirs_cam, pose.rotation.to(torch::kFloat64).t());
  dirs_world = dirs_world / dirs_world.norm(2, /*dim=*/1, /*keepdim=*/true);
  auto origins = pose.translation.to(torch::kFloat64)
                     .unsqueeze(0)
                     .expand({int64_t(width) * height, 3})
                     .clone();
  return {origins, dirs_world, width, height};
}

}  // namespace talkfield
