#include "talkfield/standardized_space.h"

#include "talkfield/errors.h"

namespace talkfield {

torch::Tensor compute_au_weights(const torch::Tensor& rates) {
  if (rates.dim() != 1 || rates.numel() < 1) {
    throw ArgumentError("compute_au_weights: rates must be a nonempty vector");
  }
  auto r = rates.to(torch::kFloat64);
  if ((r.min().item<double>() <= 0.0) || (r.max().item<double>() > 1.0)) {
    throw ArgumentError("compute_au_weights: rates must lie in (0,1]");
  }
  auto inv = 1.0 / r;
  auto n = static_cast<double>(rates.numel());
  return (n * inv) / inv.sum();
}

namespace {

void check_au_triplet(const torch::Tensor& x, const torch::Tensor& x_hat,
                      const torch::Tensor& w, const char* who) {
  if (x.dim() != 1 || x.sizes() != x_hat.sizes() || x.sizes() != w.sizes()) {
    throw DimensionError(std::string(who) +
                         ": labels/predictions/weights must match");
  }
}

}  // namespace

torch::Tensor weighted_bce_loss(const torch::Tensor& labels,
                                const torch::Tensor& predictions,
                                const torch::Tensor& weights, double eps_bce) {
  check_au_triplet(labels, predictions, weights, "weighted_bce_loss");
  auto p = torch::clamp(predictions, eps_bce, 1.0 - eps_bce);
  auto terms =
      weights * (labels * torch::log(p) + (1.0 - labels) * torch::log(1.0 - p));
  return -terms.sum() / static_cast<double>(labels.numel());
}

torch::Tensor weighted_dice_loss(const torch::Tensor& labels,
                                 const torch::Tensor& predictions,
                                 const torch::Tensor& weights, double eps) {
  check_au_triplet(labels, predictions, weights, "weighted_dice_loss");
  if (!(eps > 0)) throw ArgumentError("weighted_dice_loss: eps must be > 0");
  auto num = 2.0 * labels * predictions + eps;
  auto den = labels * labels + predictions * predictions + eps;
  auto terms = weights * (1.0 - num / den);
  return terms.sum() / static_cast<double>(labels.numel());
}

VectorCodebookImpl::VectorCodebookImpl(int64_t num_entries, int64_t dim) {
  if (num_entries < 1 || dim < 1) {
    throw ArgumentError("VectorCodebook: need at least one entry");
  }
  double bound = 1.0 / static_cast<double>(num_entries);
  entries = register_parameter(
      "entries", torch::empty({num_entries, dim}).uniform_(-bound, bound));
  stale_counts = register_buffer(
      "stale_counts", torch::zeros({num_entries}, torch::kInt64));
}

torch::Tensor VectorCodebookImpl::nearest_indices(
    const torch::Tensor& inputs) const {
  auto x = inputs.detach().to(torch::kFloat64);
  auto e = entries.detach().to(torch::kFloat64);
  auto d2 = (x.unsqueeze(1) - e.unsqueeze(0)).pow(2).sum(-1);  // (B, M)
  // lowest index wins ties, so scan with strict less-than
  const int64_t b = d2.size(0), m = d2.size(1);
  auto acc = d2.accessor<double, 2>();
  auto idx = torch::empty({b}, torch::kInt64);
  auto* ip = idx.data_ptr<int64_t>();
  for (int64_t i = 0; i < b; ++i) {
    int64_t best = 0;
    double best_d = acc[i][0];
    for (int64_t j = 1; j < m; ++j) {
      if (acc[i][j] < best_d) {
        best_d = acc[i][j];
        best = j;
      }
    }
    ip[i] = best;
  }
  return idx;
}

namespace {

// Forward pass emits the selected codebook rows bit-exactly; the backward
// pass copies the downstream gradient onto the encoder output unchanged.
struct StraightThrough
    : torch::autograd::Function<StraightThrough> {
  static torch::Tensor forward(torch::autograd::AutogradContext*,
                               const torch::Tensor& input,
                               const torch::Tensor& selected) {
    return selected.detach().to(input.dtype());
  }
  static torch::autograd::tensor_list backward(
      torch::autograd::AutogradContext*, torch::autograd::tensor_list grads) {
    return {grads[0], torch::Tensor()};
  }
};

}  // namespace

std::pair<torch::Tensor, torch::Tensor> VectorCodebookImpl::quantize_batch(
    const torch::Tensor& inputs) {
  if (inputs.dim() != 2 || inputs.size(1) != dim()) {
    throw ArgumentError("VectorCodebook: inputs must be (B," +
                        std::to_string(dim()) + ")");
  }
  auto idx = nearest_indices(inputs);
  auto quantized = StraightThrough::apply(inputs, entries.index_select(0, idx));

  {
    torch::NoGradGuard no_grad;
    stale_counts += 1;
    stale_counts.index_put_({idx}, 0);
  }
  return {quantized, idx};
}

torch::Tensor VectorCodebookImpl::lookup(const torch::Tensor& indices) const {
  return entries.index_select(0, indices);
}

QuantizeResult VectorCodebookImpl::quantize(const torch::Tensor& input) {
  if (input.dim() != 1 || input.size(0) != dim()) {
    throw ArgumentError("VectorCodebook: input must have dimension " +
                        std::to_string(dim()));
  }
  auto [q, idx] = quantize_batch(input.unsqueeze(0));
  return {q.squeeze(0), idx.item<int64_t>()};
}

void VectorCodebookImpl::refresh_dead_entries(const torch::Tensor& samples,
                                              int64_t staleness) {
  torch::NoGradGuard no_grad;
  if (samples.dim() != 2 || samples.size(1) != dim() || samples.size(0) < 1) {
    return;
  }
  auto counts = stale_counts.accessor<int64_t, 1>();
  int64_t next_sample = 0;
  for (int64_t j = 0; j < size(); ++j) {
    if (counts[j] >= staleness) {
      entries[j] = samples[next_sample % samples.size(0)].detach().to(
          entries.dtype());
      stale_counts[j] = 0;
      ++next_sample;
    }
  }
}

double VectorCodebookImpl::usage_fraction(const torch::Tensor& inputs) {
  auto idx = nearest_indices(inputs);
  auto used = std::get<0>(torch::_unique(idx));
  return static_cast<double>(used.numel()) / static_cast<double>(size());
}

AuEncoderImpl::AuEncoderImpl(int resolution, int64_t d_code, int64_t n_au)
    : resolution_(resolution), d_code_(d_code) {
  using namespace torch::nn;
  // four conv layers, then four fully connected ones
  conv = Sequential(
      Conv2d(Conv2dOptions(3, 16, 3).stride(2).padding(1)), ReLU(),
      Conv2d(Conv2dOptions(16, 32, 3).stride(2).padding(1)), ReLU(),
      Conv2d(Conv2dOptions(32, 32, 3).stride(2).padding(1)), ReLU(),
      Conv2d(Conv2dOptions(32, 64, 3).stride(2).padding(1)), ReLU());
  const int spatial = resolution / 16;
  fc = Sequential(Linear(64 * spatial * spatial, 256), ReLU(),
                  Linear(256, 128), ReLU(), Linear(128, 64), ReLU(),
                  Linear(64, d_code));
  au_head = Linear(d_code, n_au);
  register_module("conv", conv);
  register_module("fc", fc);
  register_module("au_head", au_head);
}

torch::Tensor AuEncoderImpl::encode_batch(const torch::Tensor& frames) {
  if (frames.dim() != 4 || frames.size(1) != 3 ||
      frames.size(2) != resolution_ || frames.size(3) != resolution_) {
    throw ShapeError("AuEncoder: expected (B,3," + std::to_string(resolution_) +
                     "," + std::to_string(resolution_) + ")");
  }
  return fc->forward(conv->forward(frames).flatten(1));
}

torch::Tensor AuEncoderImpl::encode(const torch::Tensor& frame) {
  if (frame.dim() != 3) throw ShapeError("AuEncoder: expected (3,H,W)");
  return encode_batch(frame.unsqueeze(0)).squeeze(0);
}

torch::Tensor AuEncoderImpl::predict_batch(const torch::Tensor& frames) {
  return torch::sigmoid(au_head(encode_batch(frames)));
}

torch::Tensor AuEncoderImpl::predict(const torch::Tensor& frame) {
  if (frame.dim() != 3) throw ShapeError("AuEncoder: expected (3,H,W)");
  return predict_batch(frame.unsqueeze(0)).squeeze(0);
}

GlobalEncoderImpl::GlobalEncoderImpl(int resolution, int64_t d_glo)
    : resolution_(resolution), d_glo_(d_glo) {
  using namespace torch::nn;
  net = Sequential(
      Conv2d(Conv2dOptions(3, 16, 3).stride(2).padding(1)), ReLU(),
      Conv2d(Conv2dOptions(16, 32, 3).stride(2).padding(1)), ReLU(),
      Conv2d(Conv2dOptions(32, 64, 3).stride(2).padding(1)), ReLU());
  const int spatial = resolution / 8;
  out = Linear(64 * spatial * spatial, d_glo);
  register_module("net", net);
  register_module("out", out);
}

torch::Tensor GlobalEncoderImpl::encode_batch(const torch::Tensor& frames) {
  if (frames.dim() != 4 || frames.size(1) != 3 ||
      frames.size(2) != resolution_ || frames.size(3) != resolution_) {
    throw ShapeError("GlobalEncoder: expected (B,3," +
                     std::to_string(resolution_) + "," +
                     std::to_string(resolution_) + ")");
  }
  return out(net->forward(frames).flatten(1));
}

torch::Tensor GlobalEncoderImpl::encode(const torch::Tensor& frame) {
  if (frame.dim() != 3) throw ShapeError("GlobalEncoder: expected (3,H,W)");
  return encode_batch(frame.unsqueeze(0)).squeeze(0);
}

SpaceDecoderImpl::SpaceDecoderImpl(int64_t d_au, int64_t d_glo, int resolution)
    : d_au_(d_au), d_glo_(d_glo), resolution_(resolution) {
  using namespace torch::nn;
  in = Linear(d_au + d_glo, 64 * 4 * 4);
  auto seq = Sequential();
  int channels[] = {64, 48, 32, 24, 16};
  int stages = 0;
  for (int s = 4; s < resolution; s *= 2) ++stages;
  for (int s = 0; s < stages; ++s) {
    seq->push_back(Upsample(UpsampleOptions()
                                .scale_factor(std::vector<double>{2, 2})
                                .mode(torch::kNearest)));
    seq->push_back(Conv2d(
        Conv2dOptions(channels[s], channels[s + 1], 3).padding(1)));
    seq->push_back(ReLU());
  }
  seq->push_back(Conv2d(Conv2dOptions(channels[stages], 3, 3).padding(1)));
  net = seq;
  register_module("in", in);
  register_module("net", net);
}

torch::Tensor SpaceDecoderImpl::decode_batch(const torch::Tensor& f_au,
                                             const torch::Tensor& f_glo) {
  if (f_au.dim() != 2 || f_glo.dim() != 2 || f_au.size(1) != d_au_ ||
      f_glo.size(1) != d_glo_ || f_au.size(0) != f_glo.size(0)) {
    throw DimensionError("SpaceDecoder: expected (B," + std::to_string(d_au_) +
                         ") and (B," + std::to_string(d_glo_) + ")");
  }
  auto h = in(torch::cat({f_au, f_glo}, -1));
  h = torch::relu(h).reshape({f_au.size(0), 64, 4, 4});
  return torch::sigmoid(net->forward(h));
}

torch::Tensor SpaceDecoderImpl::decode(const torch::Tensor& f_au,
                                       const torch::Tensor& f_glo) {
  if (f_au.dim() != 1 || f_glo.dim() != 1) {
    throw DimensionError("SpaceDecoder: expected vectors");
  }
  return decode_batch(f_au.unsqueeze(0), f_glo.unsqueeze(0)).squeeze(0);
}

torch::Tensor standardized_loss(
    const torch::Tensor& decoded, const torch::Tensor& target,
    const torch::Tensor& f_au_enc, const torch::Tensor& f_au_quant,
    const torch::Tensor& f_glo_enc, const torch::Tensor& f_glo_quant,
    double beta1, double beta2) {
  if (decoded.sizes() != target.sizes()) {
    throw DimensionError("standardized_loss: image shapes differ");
  }
  if (f_au_enc.sizes() != f_au_quant.sizes() ||
      f_glo_enc.sizes() != f_glo_quant.sizes()) {
    throw DimensionError("standardized_loss: feature shapes differ");
  }
  auto sq = [](const torch::Tensor& t) { return (t * t).sum(); };
  auto rec = (decoded - target).abs().sum();
  auto au_codebook = sq(f_au_enc.detach() - f_au_quant);
  auto au_commit = sq(f_au_enc - f_au_quant.detach());
  auto glo_codebook = sq(f_glo_enc.detach() - f_glo_quant);
  auto glo_commit = sq(f_glo_enc - f_glo_quant.detach());
  return rec + au_codebook + beta1 * au_commit + glo_codebook +
         beta2 * glo_commit;
}

}  // namespace talkfield
