#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "talkfield/conditional_nerf.h"
#include "talkfield/synth_data.h"

namespace talkfield {

// Everything a full run needs: dataset location and generation parameters,
// per-stage schedules, renderer geometry, codebook sizes, trade-off and
// epsilon constants, and the seed. Loadable from a JSON document with the
// same field names; absent fields keep their defaults.
struct PipelineConfig {
  std::string dataset = "data";
  uint64_t seed = 7;

  SynthConfig synth;

  // stage 1: audio disentanglement
  int disentangle_iters = 2000;
  double disentangle_lr = 1e-4;
  int batch = 8;              // frames per sync-loss batch
  double sync_margin = 0.3;   // hinge margin for mismatched pairs
  double lipnet_recon_weight = 1.0;

  // stage 2: conditional field
  int nerf_iters = 20000;
  double nerf_lr = 5e-4;
  double psnr_early_stop = 0.0;  // >0: stop once train-view PSNR passes this
  int psnr_check_every = 250;

  // stage 3: AU encoder then codebooks/decoder
  int au_iters = 2000;
  int space_iters = 3000;
  double space_lr = 1e-4;
  int space_batch = 8;
  double encoder_noise = 0.02;  // input augmentation for the space encoders

  // codebooks
  int semantic_entries = 64;
  int semantic_dim = 32;
  int global_entries = 128;
  int global_dim = 64;
  double beta1 = 0.25;
  double beta2 = 0.25;
  int dead_entry_steps = 500;

  // epsilons
  double eps_sync = 1e-8;
  double eps_cos = 1e-7;
  double eps_bce = 1e-7;
  double eps_dice = 1e-7;

  RenderConfig render;

  // ablations; part of the config hash, so all stages of a run must agree
  bool no_disentangle = false;
  bool no_global_space = false;
  bool no_au_space = false;

  void validate() const;
  nlohmann::json to_json() const;
  static PipelineConfig from_json(const nlohmann::json& j);
  static PipelineConfig load(const std::string& path);

  // Stable hash of the canonical JSON form.
  std::string hash() const;
};

}  // namespace talkfield
