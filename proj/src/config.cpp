#include "talkfield/config.h"

#include <fstream>
#include <functional>
#include <sstream>

#include "talkfield/errors.h"

namespace talkfield {

namespace {

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

void PipelineConfig::validate() const {
  if (disentangle_iters < 0 || nerf_iters < 0 || au_iters < 0 ||
      space_iters < 0 || batch < 1 || space_batch < 1) {
    throw ArgumentError("config: iteration/batch counts must be positive");
  }
  if (beta1 < 0 || beta2 < 0) {
    throw ArgumentError("config: loss weights must be nonnegative");
  }
  if (eps_sync <= 0 || eps_cos <= 0 || eps_bce <= 0 || eps_dice <= 0) {
    throw ArgumentError("config: epsilons must be positive");
  }
  if (semantic_entries < 1 || global_entries < 1 || semantic_dim < 1 ||
      global_dim < 1) {
    throw ArgumentError("config: codebook sizes must be positive");
  }
  render.validate();
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json j;
  j["dataset"] = dataset;
  j["seed"] = seed;
  j["synth"] = {{"resolution", synth.resolution},
                {"frames", synth.frames},
                {"identities", synth.identities},
                {"num_poses", synth.num_poses},
                {"orbit_radius", synth.orbit_radius},
                {"focal", synth.focal},
                {"elevation_deg", synth.elevation_deg},
                {"yaw_step_deg", synth.yaw_step_deg},
                {"test_every", synth.test_every},
                {"audio_corr_noise", synth.audio_corr_noise},
                {"audio_white_noise", synth.audio_white_noise}};
  j["disentangle_iters"] = disentangle_iters;
  j["disentangle_lr"] = disentangle_lr;
  j["batch"] = batch;
  j["sync_margin"] = sync_margin;
  j["lipnet_recon_weight"] = lipnet_recon_weight;
  j["nerf_iters"] = nerf_iters;
  j["nerf_lr"] = nerf_lr;
  j["psnr_early_stop"] = psnr_early_stop;
  j["psnr_check_every"] = psnr_check_every;
  j["au_iters"] = au_iters;
  j["space_iters"] = space_iters;
  j["space_lr"] = space_lr;
  j["space_batch"] = space_batch;
  j["encoder_noise"] = encoder_noise;
  j["semantic_entries"] = semantic_entries;
  j["semantic_dim"] = semantic_dim;
  j["global_entries"] = global_entries;
  j["global_dim"] = global_dim;
  j["beta1"] = beta1;
  j["beta2"] = beta2;
  j["dead_entry_steps"] = dead_entry_steps;
  j["eps_sync"] = eps_sync;
  j["eps_cos"] = eps_cos;
  j["eps_bce"] = eps_bce;
  j["eps_dice"] = eps_dice;
  j["render"] = {{"n_samples", render.n_samples},
                 {"low_res", render.low_res},
                 {"upsample_factor", render.upsample_factor},
                 {"d_feat", render.d_feat},
                 {"l_pos", render.l_pos},
                 {"l_dir", render.l_dir},
                 {"hidden", render.hidden},
                 {"t_near", render.t_near},
                 {"t_far", render.t_far}};
  j["no_disentangle"] = no_disentangle;
  j["no_global_space"] = no_global_space;
  j["no_au_space"] = no_au_space;
  return j;
}

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j) {
  PipelineConfig c;
  maybe(j, "dataset", c.dataset);
  maybe(j, "seed", c.seed);
  if (j.contains("synth")) {
    const auto& s = j.at("synth");
    maybe(s, "resolution", c.synth.resolution);
    maybe(s, "frames", c.synth.frames);
    maybe(s, "identities", c.synth.identities);
    maybe(s, "num_poses", c.synth.num_poses);
    maybe(s, "orbit_radius", c.synth.orbit_radius);
    maybe(s, "focal", c.synth.focal);
    maybe(s, "elevation_deg", c.synth.elevation_deg);
    maybe(s, "yaw_step_deg", c.synth.yaw_step_deg);
    maybe(s, "test_every", c.synth.test_every);
    maybe(s, "audio_corr_noise", c.synth.audio_corr_noise);
    maybe(s, "audio_white_noise", c.synth.audio_white_noise);
  }
  maybe(j, "disentangle_iters", c.disentangle_iters);
  maybe(j, "disentangle_lr", c.disentangle_lr);
  maybe(j, "batch", c.batch);
  maybe(j, "sync_margin", c.sync_margin);
  maybe(j, "lipnet_recon_weight", c.lipnet_recon_weight);
  maybe(j, "nerf_iters", c.nerf_iters);
  maybe(j, "nerf_lr", c.nerf_lr);
  maybe(j, "psnr_early_stop", c.psnr_early_stop);
  maybe(j, "psnr_check_every", c.psnr_check_every);
  maybe(j, "au_iters", c.au_iters);
  maybe(j, "space_iters", c.space_iters);
  maybe(j, "space_lr", c.space_lr);
  maybe(j, "space_batch", c.space_batch);
  maybe(j, "encoder_noise", c.encoder_noise);
  maybe(j, "semantic_entries", c.semantic_entries);
  maybe(j, "semantic_dim", c.semantic_dim);
  maybe(j, "global_entries", c.global_entries);
  maybe(j, "global_dim", c.global_dim);
  maybe(j, "beta1", c.beta1);
  maybe(j, "beta2", c.beta2);
  maybe(j, "dead_entry_steps", c.dead_entry_steps);
  maybe(j, "eps_sync", c.eps_sync);
  maybe(j, "eps_cos", c.eps_cos);
  maybe(j, "eps_bce", c.eps_bce);
  maybe(j, "eps_dice", c.eps_dice);
  if (j.contains("render")) {
    const auto& r = j.at("render");
    maybe(r, "n_samples", c.render.n_samples);
    maybe(r, "low_res", c.render.low_res);
    maybe(r, "upsample_factor", c.render.upsample_factor);
    maybe(r, "d_feat", c.render.d_feat);
    maybe(r, "l_pos", c.render.l_pos);
    maybe(r, "l_dir", c.render.l_dir);
    maybe(r, "hidden", c.render.hidden);
    maybe(r, "t_near", c.render.t_near);
    maybe(r, "t_far", c.render.t_far);
  }
  maybe(j, "no_disentangle", c.no_disentangle);
  maybe(j, "no_global_space", c.no_global_space);
  maybe(j, "no_au_space", c.no_au_space);
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("config: cannot open " + path);
  return from_json(nlohmann::json::parse(f));
}

std::string PipelineConfig::hash() const {
  // The two space flags may be applied at inference on a fully trained
  // checkpoint (they bypass paths rather than change trained weights), so
  // they stay out of the hash. --no-disentangle changes the trained
  // architecture and is hashed.
  PipelineConfig canonical = *this;
  canonical.no_global_space = false;
  canonical.no_au_space = false;
  const std::string canon = canonical.to_json().dump();
  // FNV-1a, stable across runs and platforms
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

}  // namespace talkfield
