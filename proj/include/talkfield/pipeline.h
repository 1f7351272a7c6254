#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "talkfield/audio_disentangle.h"
#include "talkfield/conditional_nerf.h"
#include "talkfield/config.h"
#include "talkfield/head_param.h"
#include "talkfield/metrics.h"
#include "talkfield/standardized_space.h"
#include "talkfield/synth_data.h"

namespace talkfield {

// Whole-audio conditioning used by the --no-disentangle ablation: a single
// trainable projection of the raw window standing in for the two
// disentangled expression vectors.
struct AudioEmbedImpl : torch::nn::Module {
  AudioEmbedImpl();
  // (B,rows,cols) -> pair of (B,79)
  std::pair<torch::Tensor, torch::Tensor> forward(const torch::Tensor& windows);

 private:
  torch::nn::Linear proj{nullptr};
};
TORCH_MODULE(AudioEmbed);

// Appends step/name/value rows to loss_curve.csv under the output dir.
class LossCurveWriter {
 public:
  LossCurveWriter() = default;
  explicit LossCurveWriter(const std::string& out_dir);
  void log(int64_t step, const std::string& name, double value);

 private:
  std::shared_ptr<std::ofstream> file_;
};

// Owns every trainable module plus the sampling stream, and drives the
// three training stages, synthesis and evaluation. Checkpoints capture all
// module weights, live optimizer states, the sampler stream and the config
// hash, so a reloaded run continues bit-exactly.
class Pipeline {
 public:
  explicit Pipeline(const PipelineConfig& config);

  // Stage 1: SyncNet (contrastive), LipNet (reconstruction + sync loss),
  // StyleNet/FuseNet (expression loss against frozen-extractor targets).
  void train_disentangle(const std::string& out_dir);
  // Stage 2: field, upsampler and prior extractor under photometric loss.
  void train_nerf(const std::string& out_dir);
  // Stage 3: AU encoder under L_bce + L_dice, then codebooks/decoder under
  // the standardized-space loss.
  void train_space(const std::string& out_dir);

  void save_checkpoint(const std::string& path) const;
  void load_checkpoint(const std::string& path);

  // Full inference: one frame per audio window, poses cycled. With both
  // space paths disabled the raw renders are returned.
  std::vector<torch::Tensor> synthesize(const torch::Tensor& audio_track,
                                        const std::vector<CameraPose>& poses,
                                        int identity = 0);

  // Mean metrics over the given split ("train" or "test"):
  // {ssim, lmd79, au_acc, syncnet}.
  nlohmann::json evaluate(const std::string& split);

  // Render the pipeline's output frame for one dataset record.
  torch::Tensor infer_frame(int identity, int t, const CameraPose& pose);

  const PipelineConfig& config() const { return config_; }
  const std::string& stage() const { return stage_; }
  int64_t steps_done() const { return steps_done_; }
  const std::vector<double>& stage_losses() const { return stage_losses_; }
  double train_view_psnr(int max_views = 12);

  // Conditioning vectors for frame t of an identity, through the
  // disentangled path or the whole-audio one.
  HeadParams conditions_for(int identity, int t);

  PriorExtractor extractor{nullptr};
  LipNet lipnet{nullptr};
  SyncNet syncnet{nullptr};
  StyleNet stylenet{nullptr};
  FuseNet fusenet{nullptr};
  AudioEmbed audio_embed{nullptr};
  NerfRenderer renderer{nullptr};
  AuEncoder au_encoder{nullptr};
  GlobalEncoder global_encoder{nullptr};
  VectorCodebook semantic_book{nullptr};
  VectorCodebook global_book{nullptr};
  SpaceDecoder decoder{nullptr};

 private:
  void require_dataset();
  void require_stage(const std::string& need, const char* op);
  torch::Tensor identity_frame(int id);
  torch::Tensor train_frame(int id, int t, int pose);
  void build_audio_caches();
  torch::Tensor decode_frame(const torch::Tensor& frame);

  torch::optim::Adam& optimizer(const std::string& name,
                                std::vector<torch::Tensor> params, double lr);

  PipelineConfig config_;
  std::string stage_ = "init";
  int64_t steps_done_ = 0;
  RandomStream sampler_;
  std::vector<double> stage_losses_;

  std::optional<DatasetManifest> data_;
  std::map<int, torch::Tensor> identity_frames_;           // id -> (3,R,R)
  std::map<std::pair<int, int>, torch::Tensor> frame_cache_;  // (id, t*P+p)
  std::vector<torch::Tensor> tracks_;                      // id -> (T,r,c)
  std::vector<torch::Tensor> lipwav_cache_;                // id -> (T,3,R,R)
  std::vector<torch::Tensor> style_cache_;                 // id -> (T,79)

  std::map<std::string, std::shared_ptr<torch::optim::Adam>> optimizers_;
};

}  // namespace talkfield
