#include "talkfield/head_param.h"

#include "talkfield/errors.h"

namespace talkfield {

namespace {

void check_vec(const torch::Tensor& v, int64_t len, const char* name) {
  if (!v.defined() || v.dim() != 1 || v.size(0) != len) {
    throw DimensionError(std::string(name) + ": expected length " +
                         std::to_string(len));
  }
  if (!torch::all(torch::isfinite(v)).item<bool>()) {
    throw NumericError(std::string(name) + ": non-finite entries");
  }
}

}  // namespace

void HeadParams::validate() const {
  check_vec(f_id, kIdDim, "f_id");
  check_vec(f_exp_aud, kExpDim, "f_exp_aud");
  check_vec(f_exp_style, kExpDim, "f_exp_style");
  check_vec(f_alb, kAlbDim, "f_alb");
  check_vec(f_illu, kIlluDim, "f_illu");
}

torch::Tensor HeadParams::trunk_conditions() const {
  return torch::cat({f_id, f_exp_aud, f_exp_style, f_alb});
}

void ExtractedPrior::validate() const {
  check_vec(f_id, kIdDim, "f_id");
  check_vec(f_exp, kExpDim, "f_exp");
  check_vec(f_alb, kAlbDim, "f_alb");
  check_vec(f_illu, kIlluDim, "f_illu");
}

PriorExtractorImpl::PriorExtractorImpl(int resolution, int base_channels)
    : resolution_(resolution) {
  using namespace torch::nn;
  int c = base_channels;
  conv = Sequential(
      Conv2d(Conv2dOptions(3, c, 3).stride(2).padding(1)), ReLU(),
      Conv2d(Conv2dOptions(c, 2 * c, 3).stride(2).padding(1)), ReLU(),
      Conv2d(Conv2dOptions(2 * c, 4 * c, 3).stride(2).padding(1)), ReLU(),
      Conv2d(Conv2dOptions(4 * c, 4 * c, 3).stride(2).padding(1)), ReLU());
  const int spatial = resolution / 16;
  const int flat = 4 * c * spatial * spatial;
  shared = Linear(flat, 256);
  head_id = Linear(256, kIdDim);
  head_exp = Linear(256, kExpDim);
  head_alb = Linear(256, kAlbDim);
  head_illu = Linear(256, kIlluDim);
  register_module("conv", conv);
  register_module("shared", shared);
  register_module("head_id", head_id);
  register_module("head_exp", head_exp);
  register_module("head_alb", head_alb);
  register_module("head_illu", head_illu);
}

std::tuple<torch::Tensor, torch::Tensor, torch::Tensor, torch::Tensor>
PriorExtractorImpl::extract_batch(const torch::Tensor& frames) {
  if (frames.dim() != 4 || frames.size(1) != 3 ||
      frames.size(2) != resolution_ || frames.size(3) != resolution_) {
    throw ShapeError("PriorExtractor: expected (B,3," +
                     std::to_string(resolution_) + "," +
                     std::to_string(resolution_) + ") frames");
  }
  if ((frames.min().item<double>() < 0.0) ||
      (frames.max().item<double>() > 1.0)) {
    throw ShapeError("PriorExtractor: pixel values must lie in [0,1]");
  }
  auto h = conv->forward(frames).flatten(1);
  h = torch::relu(shared(h));
  return {head_id(h), head_exp(h), head_alb(h), head_illu(h)};
}

ExtractedPrior PriorExtractorImpl::extract(const torch::Tensor& frame) {
  if (frame.dim() != 3) throw ShapeError("PriorExtractor: expected (3,H,W)");
  auto [id, exp, alb, illu] = extract_batch(frame.unsqueeze(0));
  return {id.squeeze(0), exp.squeeze(0), alb.squeeze(0), illu.squeeze(0)};
}

HeadParams assemble(const ExtractedPrior& prior, const torch::Tensor& exp_aud,
                    const torch::Tensor& exp_style) {
  prior.validate();
  if (exp_aud.dim() != 1 || exp_aud.size(0) != kExpDim ||
      exp_style.dim() != 1 || exp_style.size(0) != kExpDim) {
    throw DimensionError("assemble: expression vectors must have length " +
                         std::to_string(kExpDim));
  }
  HeadParams p{prior.f_id, exp_aud, exp_style, prior.f_alb, prior.f_illu};
  p.validate();
  return p;
}

}  // namespace talkfield
