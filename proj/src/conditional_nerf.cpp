#include "talkfield/conditional_nerf.h"

#include <cmath>

#include "talkfield/errors.h"

namespace talkfield {

void RenderConfig::validate() const {
  if (n_samples <= 0 || low_res <= 0 || upsample_factor <= 0 || d_feat <= 0 ||
      l_pos <= 0 || l_dir <= 0 || hidden <= 0) {
    throw ArgumentError("RenderConfig: all counts must be positive");
  }
  if ((upsample_factor & (upsample_factor - 1)) != 0) {
    throw ArgumentError("RenderConfig: upsample_factor must be a power of two");
  }
  if (!(t_near > 0) || !(t_near < t_far)) {
    throw ArgumentError("RenderConfig: need 0 < t_near < t_far");
  }
}

torch::Tensor positional_encoding(const torch::Tensor& x, int num_freqs) {
  std::vector<torch::Tensor> parts;
  parts.reserve(1 + 2 * num_freqs);
  parts.push_back(x);
  for (int k = 0; k < num_freqs; ++k) {
    double f = std::pow(2.0, k);
    parts.push_back(torch::sin(x * f));
    parts.push_back(torch::cos(x * f));
  }
  return torch::cat(parts, -1);
}

namespace {

torch::Tensor cumprod_exclusive(const torch::Tensor& t) {
  auto c = torch::cumprod(t, -1);
  c = torch::roll(c, 1, -1);
  c.index_put_({torch::indexing::Slice(), 0}, 1.0);
  return c;
}

}  // namespace

CompositeResult composite(const torch::Tensor& sigma, const torch::Tensor& z,
                          const torch::Tensor& deltas) {
  if (sigma.dim() != 2 || deltas.sizes() != sigma.sizes() || z.dim() != 3 ||
      z.size(0) != sigma.size(0) || z.size(1) != sigma.size(1)) {
    throw DimensionError("composite: expected sigma/deltas (R,N), z (R,N,d)");
  }
  auto alpha = 1.0 - torch::exp(-sigma * deltas);
  auto transmittance = cumprod_exclusive(1.0 - alpha);
  auto weights = transmittance * alpha;
  auto feature = (weights.unsqueeze(-1) * z).sum(1);
  auto opacity = weights.sum(-1);
  return {feature, opacity, weights, transmittance};
}

FieldMlpImpl::FieldMlpImpl(const RenderConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  using torch::nn::Linear;
  using torch::nn::LinearOptions;
  const int trunk_dim = kIdDim + 2 * kExpDim + kAlbDim;
  pos_in = Linear(pos_enc_dim(), cfg.hidden);
  cond_in = Linear(LinearOptions(trunk_dim, cfg.hidden).bias(false));
  trunk1 = Linear(cfg.hidden, cfg.hidden);
  trunk2 = Linear(cfg.hidden, cfg.hidden);
  sigma_head = Linear(cfg.hidden, 1);
  feat_in = Linear(cfg.hidden + dir_enc_dim() + kIlluDim, cfg.hidden / 2);
  feat_out = Linear(cfg.hidden / 2, cfg.d_feat);
  register_module("pos_in", pos_in);
  register_module("cond_in", cond_in);
  register_module("trunk1", trunk1);
  register_module("trunk2", trunk2);
  register_module("sigma_head", sigma_head);
  register_module("feat_in", feat_in);
  register_module("feat_out", feat_out);
}

FieldBatch FieldMlpImpl::forward_encoded(const torch::Tensor& pe_pos,
                                         const torch::Tensor& pe_dir,
                                         const torch::Tensor& cond,
                                         const torch::Tensor& illu) {
  auto cond_term = cond_in(cond.dim() == 1 ? cond.unsqueeze(0) : cond);
  auto h = torch::relu(pos_in(pe_pos) + cond_term);
  h = torch::relu(trunk1(h));
  h = torch::relu(trunk2(h));
  auto sigma = torch::softplus(sigma_head(h)).squeeze(-1);
  auto illu_b = illu.dim() == 1
                    ? illu.unsqueeze(0).expand({pe_pos.size(0), kIlluDim})
                    : illu;
  auto f = torch::relu(feat_in(torch::cat({h, pe_dir, illu_b}, -1)));
  return {sigma, feat_out(f)};
}

FieldBatch FieldMlpImpl::forward(const torch::Tensor& positions,
                                 const torch::Tensor& dirs,
                                 const HeadParams& params) {
  if (positions.dim() != 2 || positions.size(1) != 3 || dirs.dim() != 2 ||
      dirs.size(1) != 3) {
    throw DimensionError("FieldMlp: positions/dirs must be (N,3)");
  }
  if (!torch::all(torch::isfinite(positions)).item<bool>()) {
    throw NumericError("FieldMlp: non-finite positions");
  }
  params.validate();
  auto pe_pos = positional_encoding(positions, cfg_.l_pos);
  auto pe_dir = positional_encoding(dirs, cfg_.l_dir);
  return forward_encoded(pe_pos, pe_dir, params.trunk_conditions(),
                         params.f_illu);
}

FeatureUpsamplerImpl::FeatureUpsamplerImpl(int d_feat, int upsample_factor)
    : d_feat_(d_feat), factor_(upsample_factor) {
  using namespace torch::nn;
  int stages = 0;
  for (int f = upsample_factor; f > 1; f /= 2) ++stages;
  auto seq = Sequential(Conv2d(Conv2dOptions(d_feat, 32, 3).padding(1)), ReLU());
  for (int s = 0; s < stages; ++s) {
    seq->push_back(Upsample(UpsampleOptions()
                                .scale_factor(std::vector<double>{2, 2})
                                .mode(torch::kNearest)));
    seq->push_back(Conv2d(Conv2dOptions(32, 32, 3).padding(1)));
    seq->push_back(ReLU());
  }
  seq->push_back(Conv2d(Conv2dOptions(32, 16, 3).padding(1)));
  seq->push_back(ReLU());
  seq->push_back(Conv2d(Conv2dOptions(16, 3, 1)));
  net = seq;
  register_module("net", net);
}

torch::Tensor FeatureUpsamplerImpl::forward(const torch::Tensor& feature_map) {
  if (feature_map.dim() != 3 || feature_map.size(0) != feature_map.size(1) ||
      feature_map.size(2) != d_feat_) {
    throw DimensionError("FeatureUpsampler: expected (S,S," +
                         std::to_string(d_feat_) + ") feature map");
  }
  auto x = feature_map.permute({2, 0, 1}).unsqueeze(0);
  return torch::sigmoid(net->forward(x)).squeeze(0);
}

NerfRendererImpl::NerfRendererImpl(const RenderConfig& cfg) : cfg_(cfg) {
  cfg.validate();
  field = FieldMlp(cfg);
  upsampler = FeatureUpsampler(cfg.d_feat, cfg.upsample_factor);
  register_module("field", field);
  register_module("upsampler", upsampler);
}

FieldOutput NerfRendererImpl::field_eval(const torch::Tensor& position,
                                         const torch::Tensor& view_dir,
                                         const HeadParams& params) {
  auto out = field->forward(position.unsqueeze(0), view_dir.unsqueeze(0), params);
  return {out.z.squeeze(0), out.sigma.squeeze(0)};
}

FieldFn NerfRendererImpl::field_fn(const HeadParams& params) {
  params.validate();
  auto cond = params.trunk_conditions();
  auto illu = params.f_illu;
  auto net = field;
  int l_pos = cfg_.l_pos, l_dir = cfg_.l_dir;
  return [net, cond, illu, l_pos, l_dir](const torch::Tensor& pos,
                                         const torch::Tensor& dirs) mutable {
    return net->forward_encoded(positional_encoding(pos, l_pos),
                                positional_encoding(dirs, l_dir), cond, illu);
  };
}

std::pair<torch::Tensor, torch::Tensor> NerfRendererImpl::sample_depths(
    int64_t n_rays, double t_near, double t_far, RandomStream* jitter,
    torch::Dtype dtype) const {
  const int n = cfg_.n_samples;
  const double bin = (t_far - t_near) / n;
  torch::Tensor u;
  if (jitter) {
    u = jitter->uniform_tensor({n_rays, n}, torch::kFloat64);
  } else {
    u = torch::full({n_rays, n}, 0.5, torch::kFloat64);
  }
  auto idx = torch::arange(n, torch::kFloat64).unsqueeze(0);
  auto t = t_near + (idx + u) * bin;
  // delta_i = t_{i+1} - t_i, with the far bound closing the last bin
  auto t_next = torch::cat({t.index({torch::indexing::Slice(),
                                     torch::indexing::Slice(1, torch::indexing::None)}),
                            torch::full({n_rays, 1}, t_far, torch::kFloat64)},
                           -1);
  return {t.to(dtype), (t_next - t).clamp_min(0).to(dtype)};
}

NerfRendererImpl::LowRes NerfRendererImpl::render_lowres(
    const CameraPose& pose, const FieldFn& fn, RandomStream* jitter) const {
  auto dtype = torch::typeMetaToScalarType(
      field->named_parameters().begin()->value().dtype());
  auto low_pose = pose.scaled(cfg_.upsample_factor);
  auto rays = generate_rays(low_pose, cfg_.low_res, cfg_.low_res);
  const int64_t n_rays = rays.origins.size(0);
  auto [t, deltas] =
      sample_depths(n_rays, cfg_.t_near, cfg_.t_far, jitter, dtype);

  auto origins = rays.origins.to(dtype);
  auto dirs = rays.directions.to(dtype);
  auto points =
      origins.unsqueeze(1) + dirs.unsqueeze(1) * t.unsqueeze(-1);  // (R,N,3)
  auto flat_points = points.reshape({-1, 3});
  auto flat_dirs = dirs.unsqueeze(1)
                       .expand({n_rays, cfg_.n_samples, 3})
                       .reshape({-1, 3});
  auto out = fn(flat_points, flat_dirs);
  auto sigma = out.sigma.reshape({n_rays, cfg_.n_samples});
  auto z = out.z.reshape({n_rays, cfg_.n_samples, cfg_.d_feat});
  auto comp = composite(sigma, z, deltas);
  return {comp.feature.reshape({cfg_.low_res, cfg_.low_res, cfg_.d_feat}),
          comp.opacity.reshape({cfg_.low_res, cfg_.low_res})};
}

NerfRendererImpl::LowRes NerfRendererImpl::render_lowres(
    const CameraPose& pose, const HeadParams& params, RandomStream* jitter) {
  return render_lowres(pose, field_fn(params), jitter);
}

std::pair<torch::Tensor, torch::Tensor> NerfRendererImpl::render_ray(
    const Ray& ray, const HeadParams& params, RandomStream* jitter) {
  if (std::abs(ray.direction.to(torch::kFloat64).norm().item<double>() - 1.0) >
      1e-9) {
    throw ArgumentError("render_ray: direction must be unit norm");
  }
  if (!(ray.t_near > 0) || !(ray.t_near < ray.t_far)) {
    throw ArgumentError("render_ray: need 0 < t_near < t_far");
  }
  auto dtype = torch::typeMetaToScalarType(
      field->named_parameters().begin()->value().dtype());
  auto [t, deltas] = sample_depths(1, ray.t_near, ray.t_far, jitter, dtype);

  auto origin = ray.origin.to(dtype).unsqueeze(0);
  auto dir = ray.direction.to(dtype).unsqueeze(0);
  auto points = origin.unsqueeze(1) + dir.unsqueeze(1) * t.unsqueeze(-1);
  auto dirs = dir.unsqueeze(1).expand({1, cfg_.n_samples, 3}).reshape({-1, 3});
  auto out = field->forward(points.reshape({-1, 3}), dirs, params);
  auto comp = composite(out.sigma.reshape({1, cfg_.n_samples}),
                        out.z.reshape({1, cfg_.n_samples, cfg_.d_feat}), deltas);
  return {comp.feature.squeeze(0), comp.opacity.squeeze(0)};
}

torch::Tensor NerfRendererImpl::render_frame(const CameraPose& pose,
                                             const HeadParams& params,
                                             RandomStream* jitter) {
  auto low = render_lowres(pose, params, jitter);
  return upsampler->forward(low.features);
}

torch::Tensor photometric_loss(const torch::Tensor& pred,
                               const torch::Tensor& gt) {
  if (pred.sizes() != gt.sizes()) {
    throw DimensionError("photometric_loss: image shapes differ");
  }
  auto d = pred - gt;
  return (d * d).sum();
}

double psnr(const torch::Tensor& pred, const torch::Tensor& gt) {
  auto mse = (pred - gt).pow(2).mean().item<double>();
  if (mse <= 0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(mse);
}

}  // namespace talkfield
