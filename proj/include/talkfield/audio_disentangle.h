#pragma once

#include <vector>

#include <torch/torch.h>

namespace talkfield {

// Audio windows are short mel-like feature matrices centered on a video
// frame: (kAudioRows, kAudioCols).
inline constexpr int64_t kAudioRows = 16;
inline constexpr int64_t kAudioCols = 20;
inline constexpr int64_t kSyncDim = 64;

struct SyncEmbeddings {
  torch::Tensor f_lip;  // (d_sync)
  torch::Tensor f_a;    // (d_sync)
};

struct DisentangledAudio {
  torch::Tensor f_exp_aud;    // (79)
  torch::Tensor f_exp_style;  // (79)
};

// Audio-conditioned image generator: paints the identity frame's lip region
// to match the audio window.
struct LipNetImpl : torch::nn::Module {
  explicit LipNetImpl(int resolution = 64);

  // (3,H,W) + (rows,cols) -> (3,H,W) in [0,1]
  torch::Tensor generate(const torch::Tensor& identity_frame,
                         const torch::Tensor& audio);
  torch::Tensor generate_batch(const torch::Tensor& frames,
                               const torch::Tensor& audio);

 private:
  int resolution_;
  torch::nn::Sequential image_enc{nullptr};
  torch::nn::Sequential audio_enc{nullptr};
  torch::nn::Sequential decode{nullptr};
};
TORCH_MODULE(LipNet);

// Two-tower scorer: a face encoder and an audio encoder mapping to a shared
// embedding space where matched pairs have high cosine similarity.
struct SyncNetImpl : torch::nn::Module {
  explicit SyncNetImpl(int resolution = 64, int d_sync = kSyncDim);

  SyncEmbeddings embed(const torch::Tensor& face, const torch::Tensor& audio);
  torch::Tensor embed_faces(const torch::Tensor& faces);    // (B,d)
  torch::Tensor embed_audio(const torch::Tensor& windows);  // (B,d)

 private:
  int resolution_;
  torch::nn::Sequential face_enc{nullptr};
  torch::nn::Linear face_out{nullptr};
  torch::nn::Sequential audio_enc{nullptr};
};
TORCH_MODULE(SyncNet);

// Speaking-style features from the audio window alone.
struct StyleNetImpl : torch::nn::Module {
  StyleNetImpl();
  torch::Tensor extract(const torch::Tensor& audio);        // (79)
  torch::Tensor extract_batch(const torch::Tensor& audio);  // (B,79)

 private:
  torch::nn::Sequential net{nullptr};
};
TORCH_MODULE(StyleNet);

// Fuses speech-movement and style expression features into one vector.
struct FuseNetImpl : torch::nn::Module {
  FuseNetImpl();
  torch::Tensor fuse(const torch::Tensor& f_exp_aud,
                     const torch::Tensor& f_exp_style);
  torch::Tensor fuse_batch(const torch::Tensor& f_exp_aud,
                           const torch::Tensor& f_exp_style);  // (B,79)x2

 private:
  torch::nn::Sequential net{nullptr};
};
TORCH_MODULE(FuseNet);

// Mean over the batch of -log(cos similarity), with the cosine clamped to
// [eps_cos, 1] and the norm product floored at eps.
torch::Tensor lip_sync_loss(const std::vector<SyncEmbeddings>& pairs,
                            double eps = 1e-8, double eps_cos = 1e-7);
// Batched form over (B,d) embedding matrices.
torch::Tensor lip_sync_loss(const torch::Tensor& f_lip, const torch::Tensor& f_a,
                            double eps = 1e-8, double eps_cos = 1e-7);

// Sum of squared differences between fused and target expression vectors.
torch::Tensor expression_loss(const torch::Tensor& f_gen_exp,
                              const torch::Tensor& f_gt_exp);

}  // namespace talkfield
