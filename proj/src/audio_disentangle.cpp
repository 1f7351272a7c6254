#include "talkfield/audio_disentangle.h"

#include "talkfield/errors.h"
#include "talkfield/head_param.h"

namespace talkfield {

namespace {

void check_audio(const torch::Tensor& audio, int batched) {
  bool ok = batched ? (audio.dim() == 3 && audio.size(1) == kAudioRows &&
                       audio.size(2) == kAudioCols)
                    : (audio.dim() == 2 && audio.size(0) == kAudioRows &&
                       audio.size(1) == kAudioCols);
  if (!ok) {
    throw ShapeError("audio window: expected (" + std::to_string(kAudioRows) +
                     "," + std::to_string(kAudioCols) + ")");
  }
}

void check_frames(const torch::Tensor& frames, int resolution) {
  if (frames.dim() != 4 || frames.size(1) != 3 ||
      frames.size(2) != resolution || frames.size(3) != resolution) {
    throw ShapeError("frame: expected (B,3," + std::to_string(resolution) +
                     "," + std::to_string(resolution) + ")");
  }
}

}  // namespace

LipNetImpl::LipNetImpl(int resolution) : resolution_(resolution) {
  using namespace torch::nn;
  image_enc = Sequential(
      Conv2d(Conv2dOptions(3, 16, 3).stride(2).padding(1)), ReLU(),
      Conv2d(Conv2dOptions(16, 32, 3).stride(2).padding(1)), ReLU());
  audio_enc = Sequential(Flatten(FlattenOptions().start_dim(1)),
                         Linear(kAudioRows * kAudioCols, 128), ReLU(),
                         Linear(128, 8 * (resolution / 4) * (resolution / 4)));
  decode = Sequential(
      Conv2d(Conv2dOptions(32 + 8, 32, 3).padding(1)), ReLU(),
      Upsample(UpsampleOptions().scale_factor(std::vector<double>{2, 2})
                   .mode(torch::kNearest)),
      Conv2d(Conv2dOptions(32, 16, 3).padding(1)), ReLU(),
      Upsample(UpsampleOptions().scale_factor(std::vector<double>{2, 2})
                   .mode(torch::kNearest)),
      Conv2d(Conv2dOptions(16, 3, 3).padding(1)));
  register_module("image_enc", image_enc);
  register_module("audio_enc", audio_enc);
  register_module("decode", decode);
}

torch::Tensor LipNetImpl::generate_batch(const torch::Tensor& frames,
                                         const torch::Tensor& audio) {
  check_frames(frames, resolution_);
  check_audio(audio, /*batched=*/1);
  if (frames.size(0) != audio.size(0)) {
    throw ShapeError("LipNet: frame/audio batch mismatch");
  }
  const int64_t b = frames.size(0);
  const int64_t s = resolution_ / 4;
  auto fi = image_enc->forward(frames);
  auto fa = audio_enc->forward(audio).reshape({b, 8, s, s});
  auto out = decode->forward(torch::cat({fi, fa}, 1));
  return torch::sigmoid(out);
}

torch::Tensor LipNetImpl::generate(const torch::Tensor& identity_frame,
                                   const torch::Tensor& audio) {
  if (identity_frame.dim() != 3) throw ShapeError("LipNet: expected (3,H,W)");
  check_audio(audio, /*batched=*/0);
  return generate_batch(identity_frame.unsqueeze(0), audio.unsqueeze(0))
      .squeeze(0);
}

SyncNetImpl::SyncNetImpl(int resolution, int d_sync) : resolution_(resolution) {
  using namespace torch::nn;
  face_enc = Sequential(
      Conv2d(Conv2dOptions(3, 16, 3).stride(2).padding(1)), ReLU(),
      Conv2d(Conv2dOptions(16, 32, 3).stride(2).padding(1)), ReLU(),
      Conv2d(Conv2dOptions(32, 32, 3).stride(2).padding(1)), ReLU());
  const int spatial = resolution / 8;
  face_out = Linear(32 * spatial * spatial, d_sync);
  audio_enc = Sequential(Flatten(FlattenOptions().start_dim(1)),
                         Linear(kAudioRows * kAudioCols, 128), ReLU(),
                         Linear(128, d_sync));
  register_module("face_enc", face_enc);
  register_module("face_out", face_out);
  register_module("audio_enc", audio_enc);
}

torch::Tensor SyncNetImpl::embed_faces(const torch::Tensor& faces) {
  check_frames(faces, resolution_);
  return face_out(face_enc->forward(faces).flatten(1));
}

torch::Tensor SyncNetImpl::embed_audio(const torch::Tensor& windows) {
  check_audio(windows, /*batched=*/1);
  return audio_enc->forward(windows);
}

SyncEmbeddings SyncNetImpl::embed(const torch::Tensor& face,
                                  const torch::Tensor& audio) {
  if (face.dim() != 3) throw ShapeError("SyncNet: expected (3,H,W) face");
  check_audio(audio, /*batched=*/0);
  return {embed_faces(face.unsqueeze(0)).squeeze(0),
          embed_audio(audio.unsqueeze(0)).squeeze(0)};
}

StyleNetImpl::StyleNetImpl() {
  using namespace torch::nn;
  net = Sequential(Flatten(FlattenOptions().start_dim(1)),
                   Linear(kAudioRows * kAudioCols, 128), ReLU(),
                   Linear(128, 128), ReLU(), Linear(128, kExpDim));
  register_module("net", net);
}

torch::Tensor StyleNetImpl::extract_batch(const torch::Tensor& audio) {
  check_audio(audio, /*batched=*/1);
  return net->forward(audio);
}

torch::Tensor StyleNetImpl::extract(const torch::Tensor& audio) {
  check_audio(audio, /*batched=*/0);
  return extract_batch(audio.unsqueeze(0)).squeeze(0);
}

FuseNetImpl::FuseNetImpl() {
  using namespace torch::nn;
  net = Sequential(Linear(2 * kExpDim, 128), torch::nn::Tanh(),
                   Linear(128, kExpDim));
  register_module("net", net);
}

torch::Tensor FuseNetImpl::fuse(const torch::Tensor& f_exp_aud,
                                const torch::Tensor& f_exp_style) {
  auto check = [](const torch::Tensor& v, const char* name) {
    if (v.dim() != 1 || v.size(0) != kExpDim) {
      throw DimensionError(std::string(name) + ": expected length " +
                           std::to_string(kExpDim));
    }
  };
  check(f_exp_aud, "f_exp_aud");
  check(f_exp_style, "f_exp_style");
  return net->forward(torch::cat({f_exp_aud, f_exp_style}).unsqueeze(0))
      .squeeze(0);
}

torch::Tensor FuseNetImpl::fuse_batch(const torch::Tensor& f_exp_aud,
                                      const torch::Tensor& f_exp_style) {
  if (f_exp_aud.dim() != 2 || f_exp_aud.size(1) != kExpDim ||
      f_exp_style.sizes() != f_exp_aud.sizes()) {
    throw DimensionError("fuse_batch: expected matching (B,79) inputs");
  }
  return net->forward(torch::cat({f_exp_aud, f_exp_style}, -1));
}

torch::Tensor lip_sync_loss(const torch::Tensor& f_lip, const torch::Tensor& f_a,
                            double eps, double eps_cos) {
  if (f_lip.dim() != 2 || f_a.dim() != 2 || f_lip.sizes() != f_a.sizes()) {
    throw DimensionError("lip_sync_loss: embeddings must be (B,d) and match");
  }
  if (f_lip.size(0) < 1) throw ArgumentError("lip_sync_loss: empty batch");
  if (eps <= 0) throw ArgumentError("lip_sync_loss: eps must be positive");
  auto dot = (f_lip * f_a).sum(-1);
  auto norms = f_lip.norm(2, -1) * f_a.norm(2, -1);
  auto cos = dot / torch::clamp_min(norms, eps);
  return -torch::log(torch::clamp(cos, eps_cos, 1.0)).mean();
}

torch::Tensor lip_sync_loss(const std::vector<SyncEmbeddings>& pairs,
                            double eps, double eps_cos) {
  if (pairs.empty()) throw ArgumentError("lip_sync_loss: empty batch");
  std::vector<torch::Tensor> lips, auds;
  lips.reserve(pairs.size());
  auds.reserve(pairs.size());
  for (const auto& p : pairs) {
    lips.push_back(p.f_lip);
    auds.push_back(p.f_a);
  }
  return lip_sync_loss(torch::stack(lips), torch::stack(auds), eps, eps_cos);
}

torch::Tensor expression_loss(const torch::Tensor& f_gen_exp,
                              const torch::Tensor& f_gt_exp) {
  if (f_gen_exp.sizes() != f_gt_exp.sizes()) {
    throw DimensionError("expression_loss: size mismatch");
  }
  auto d = f_gen_exp - f_gt_exp;
  return (d * d).sum();
}

}  // namespace talkfield
