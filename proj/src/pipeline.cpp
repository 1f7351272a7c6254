#include "talkfield/pipeline.h"

#include <filesystem>
#include <fstream>

#include "talkfield/blob_io.h"
#include "talkfield/checkpoint.h"
#include "talkfield/errors.h"
#include "talkfield/png_io.h"

namespace fs = std::filesystem;

namespace talkfield {

AudioEmbedImpl::AudioEmbedImpl() {
  proj = torch::nn::Linear(kAudioRows * kAudioCols, 2 * kExpDim);
  register_module("proj", proj);
}

std::pair<torch::Tensor, torch::Tensor> AudioEmbedImpl::forward(
    const torch::Tensor& windows) {
  if (windows.dim() != 3 || windows.size(1) != kAudioRows ||
      windows.size(2) != kAudioCols) {
    throw ShapeError("AudioEmbed: expected (B,rows,cols) windows");
  }
  auto out = proj(windows.flatten(1));
  return {out.narrow(1, 0, kExpDim), out.narrow(1, kExpDim, kExpDim)};
}

LossCurveWriter::LossCurveWriter(const std::string& out_dir) {
  fs::create_directories(out_dir);
  auto path = fs::path(out_dir) / "loss_curve.csv";
  bool fresh = !fs::exists(path);
  file_ = std::make_shared<std::ofstream>(path, std::ios::app);
  if (!*file_) throw IoError("cannot open " + path.string());
  if (fresh) *file_ << "step,loss_name,value\n";
}

void LossCurveWriter::log(int64_t step, const std::string& name, double value) {
  if (file_) *file_ << step << "," << name << "," << value << "\n";
}

namespace {

const char* const kModuleNames[] = {
    "extractor",  "lipnet",         "syncnet",       "stylenet",
    "fusenet",    "audio_embed",    "renderer",      "au_encoder",
    "global_encoder", "semantic_book", "global_book", "decoder"};

double cosine_mean(const torch::Tensor& a, const torch::Tensor& b) {
  auto cos = (a * b).sum(-1) / torch::clamp_min(a.norm(2, -1) * b.norm(2, -1),
                                                1e-8);
  return cos.mean().item<double>();
}

}  // namespace

Pipeline::Pipeline(const PipelineConfig& config)
    : config_(config), sampler_(config.seed) {
  config_.validate();
  // fixed construction order under a fixed torch seed: identical runs get
  // identical initial weights
  torch::manual_seed(config_.seed);
  const int res = config_.synth.resolution;
  extractor = PriorExtractor(res);
  lipnet = LipNet(res);
  syncnet = SyncNet(res);
  stylenet = StyleNet();
  fusenet = FuseNet();
  audio_embed = AudioEmbed();
  renderer = NerfRenderer(config_.render);
  au_encoder = AuEncoder(res, config_.semantic_dim);
  global_encoder = GlobalEncoder(res, config_.global_dim);
  semantic_book = VectorCodebook(config_.semantic_entries, config_.semantic_dim);
  global_book = VectorCodebook(config_.global_entries, config_.global_dim);
  decoder = SpaceDecoder(config_.semantic_dim, config_.global_dim, res);
}

void Pipeline::require_dataset() {
  if (data_) return;
  data_ = load_manifest(config_.dataset);
  if (data_->resolution != config_.synth.resolution ||
      data_->resolution != config_.render.out_res()) {
    throw ArgumentError(
        "pipeline: dataset resolution does not match the configuration");
  }
  tracks_.clear();
  for (int id = 0; id < data_->identities; ++id) {
    tracks_.push_back(
        read_blob((fs::path(data_->root) / data_->audio_tracks[id]).string()));
  }
}

void Pipeline::require_stage(const std::string& need, const char* op) {
  if (stage_ != need) {
    throw ArgumentError(std::string(op) + ": requires a '" + need +
                        "' checkpoint, have '" + stage_ + "'");
  }
}

torch::Tensor Pipeline::identity_frame(int id) {
  auto it = identity_frames_.find(id);
  if (it != identity_frames_.end()) return it->second;
  auto img = read_png(
      (fs::path(data_->root) / data_->identity_frames[id]).string());
  identity_frames_[id] = img;
  return img;
}

torch::Tensor Pipeline::train_frame(int id, int t, int pose) {
  auto key = std::make_pair(id, t * data_->num_poses + pose);
  auto it = frame_cache_.find(key);
  if (it != frame_cache_.end()) return it->second;
  auto img = data_->load_frame(data_->record(id, t, pose));
  frame_cache_[key] = img;
  return img;
}

void Pipeline::build_audio_caches() {
  if (config_.no_disentangle) return;
  if (!lipwav_cache_.empty()) return;
  torch::NoGradGuard no_grad;
  for (int id = 0; id < data_->identities; ++id) {
    auto idframe = identity_frame(id);
    const int64_t t_total = tracks_[id].size(0);
    auto frames = idframe.unsqueeze(0).expand({t_total, 3, idframe.size(1),
                                               idframe.size(2)});
    lipwav_cache_.push_back(
        lipnet->generate_batch(frames.contiguous(), tracks_[id]).detach());
    style_cache_.push_back(stylenet->extract_batch(tracks_[id]).detach());
  }
}

HeadParams Pipeline::conditions_for(int identity, int t) {
  auto prior = extractor->extract(identity_frame(identity));
  if (config_.no_disentangle) {
    auto [aud, style] = audio_embed->forward(tracks_[identity][t].unsqueeze(0));
    return assemble(prior, aud.squeeze(0), style.squeeze(0));
  }
  build_audio_caches();
  auto exp_aud = extractor->extract(lipwav_cache_[identity][t]).f_exp;
  return assemble(prior, exp_aud, style_cache_[identity][t]);
}

torch::optim::Adam& Pipeline::optimizer(const std::string& name,
                                        std::vector<torch::Tensor> params,
                                        double lr) {
  auto it = optimizers_.find(name);
  if (it != optimizers_.end()) return *it->second;
  auto opt = std::make_shared<torch::optim::Adam>(std::move(params),
                                                  torch::optim::AdamOptions(lr));
  optimizers_[name] = opt;
  return *opt;
}

namespace {

std::vector<torch::Tensor> collect_params(
    std::initializer_list<std::shared_ptr<torch::nn::Module>> modules) {
  std::vector<torch::Tensor> out;
  for (const auto& m : modules) {
    for (auto& p : m->parameters()) out.push_back(p);
  }
  return out;
}

void zero_grads(std::initializer_list<std::shared_ptr<torch::nn::Module>> ms) {
  for (const auto& m : ms) m->zero_grad();
}

}  // namespace

void Pipeline::train_disentangle(const std::string& out_dir) {
  require_dataset();
  if (stage_ != "disentangle") {
    stage_ = "disentangle";
    steps_done_ = 0;
    stage_losses_.clear();
  }
  LossCurveWriter log(out_dir);

  auto& opt_sync = optimizer("sync", syncnet->parameters(), config_.disentangle_lr);
  torch::optim::Adam* opt_lip = nullptr;
  torch::optim::Adam* opt_sf = nullptr;
  if (!config_.no_disentangle) {
    opt_lip = &optimizer("lip", lipnet->parameters(), config_.disentangle_lr);
    opt_sf = &optimizer(
        "stylefuse",
        collect_params({stylenet.ptr(), fusenet.ptr()}),
        config_.disentangle_lr);
  }

  auto all_mods = {std::static_pointer_cast<torch::nn::Module>(syncnet.ptr()),
                   std::static_pointer_cast<torch::nn::Module>(lipnet.ptr()),
                   std::static_pointer_cast<torch::nn::Module>(stylenet.ptr()),
                   std::static_pointer_cast<torch::nn::Module>(fusenet.ptr()),
                   std::static_pointer_cast<torch::nn::Module>(extractor.ptr())};

  const auto& train_t = data_->train_t;
  const int b = config_.batch;
  for (int64_t step = steps_done_; step < config_.disentangle_iters; ++step) {
    std::vector<torch::Tensor> faces_v, idframes_v, win_v, win_neg_v, gt_exp_v;
    for (int k = 0; k < b; ++k) {
      int id = static_cast<int>(sampler_.index(data_->identities));
      int t = train_t[sampler_.index(static_cast<int64_t>(train_t.size()))];
      int tn = t;
      while (tn == t) {
        tn = train_t[sampler_.index(static_cast<int64_t>(train_t.size()))];
      }
      faces_v.push_back(train_frame(id, t, 0));
      idframes_v.push_back(identity_frame(id));
      win_v.push_back(tracks_[id][t]);
      win_neg_v.push_back(tracks_[id][tn]);
    }
    auto faces = torch::stack(faces_v);
    auto idframes = torch::stack(idframes_v);
    auto windows = torch::stack(win_v);
    auto windows_neg = torch::stack(win_neg_v);

    // (a) contrastive sync scorer on real pairs
    zero_grads(all_mods);
    auto f_real = syncnet->embed_faces(faces);
    auto a_real = syncnet->embed_audio(windows);
    auto a_neg = syncnet->embed_audio(windows_neg);
    auto l_pos = lip_sync_loss(f_real, a_real, config_.eps_sync, config_.eps_cos);
    auto cos_neg =
        (f_real * a_neg).sum(-1) /
        torch::clamp_min(f_real.norm(2, -1) * a_neg.norm(2, -1), config_.eps_sync);
    auto l_neg = torch::relu(cos_neg - config_.sync_margin).mean();
    auto l_sync = l_pos + l_neg;
    l_sync.backward();
    opt_sync.step();

    double l_lip_val = 0, l_rec_val = 0, l_exp_val = 0;
    if (!config_.no_disentangle) {
      // (b) generator: reconstruction anchor + sync loss through a frozen
      // scorer snapshot
      zero_grads(all_mods);
      auto lipwav = lipnet->generate_batch(idframes, windows);
      auto l_rec = torch::mse_loss(lipwav, faces);
      auto a_det = syncnet->embed_audio(windows).detach();
      auto l_lip =
          lip_sync_loss(syncnet->embed_faces(lipwav), a_det, config_.eps_sync,
                        config_.eps_cos);
      auto l_gen = l_lip + config_.lipnet_recon_weight * l_rec;
      l_gen.backward();
      opt_lip->step();
      l_lip_val = l_lip.item<double>();
      l_rec_val = l_rec.item<double>();

      // (c) style/fusion against frozen-extractor expression targets
      zero_grads(all_mods);
      torch::Tensor exp_aud, exp_gt;
      {
        torch::NoGradGuard no_grad;
        exp_aud = std::get<1>(extractor->extract_batch(lipwav.detach()));
        exp_gt = std::get<1>(extractor->extract_batch(faces));
      }
      auto f_style = stylenet->extract_batch(windows);
      auto f_gen = fusenet->fuse_batch(exp_aud.detach(), f_style);
      auto l_exp = (f_gen - exp_gt).pow(2).sum(-1).mean();
      l_exp.backward();
      opt_sf->step();
      l_exp_val = l_exp.item<double>();
    }

    double total = l_sync.item<double>() + l_lip_val + l_rec_val + l_exp_val;
    log.log(step, "l_sync", l_sync.item<double>());
    if (!config_.no_disentangle) {
      log.log(step, "l_lip", l_lip_val);
      log.log(step, "l_rec", l_rec_val);
      log.log(step, "l_exp", l_exp_val);
    }
    log.log(step, "total", total);
    stage_losses_.push_back(total);
    steps_done_ = step + 1;
  }
  // stage-1 nets are frozen from here on; later caches must not reuse stale
  // outputs
  lipwav_cache_.clear();
  style_cache_.clear();
}

void Pipeline::train_nerf(const std::string& out_dir) {
  require_dataset();
  if (stage_ != "nerf") {
    require_stage("disentangle", "train_nerf");
    stage_ = "nerf";
    steps_done_ = 0;
    stage_losses_.clear();
  }
  build_audio_caches();
  LossCurveWriter log(out_dir);

  std::vector<torch::Tensor> params = renderer->parameters();
  for (auto& p : extractor->parameters()) params.push_back(p);
  if (config_.no_disentangle) {
    for (auto& p : audio_embed->parameters()) params.push_back(p);
  }
  auto& opt = optimizer("nerf", params, config_.nerf_lr);

  auto mods = {std::static_pointer_cast<torch::nn::Module>(renderer.ptr()),
               std::static_pointer_cast<torch::nn::Module>(extractor.ptr()),
               std::static_pointer_cast<torch::nn::Module>(audio_embed.ptr())};

  const auto& train_t = data_->train_t;
  for (int64_t step = steps_done_; step < config_.nerf_iters; ++step) {
    int id = static_cast<int>(sampler_.index(data_->identities));
    int t = train_t[sampler_.index(static_cast<int64_t>(train_t.size()))];
    int pose = static_cast<int>(sampler_.index(data_->num_poses));

    zero_grads(mods);
    auto params_t = conditions_for(id, t);
    auto img = renderer->render_frame(data_->poses[pose], params_t, &sampler_);
    auto loss = photometric_loss(img, train_frame(id, t, pose));
    loss.backward();
    opt.step();

    log.log(step, "l_pho", loss.item<double>());
    stage_losses_.push_back(loss.item<double>());
    steps_done_ = step + 1;

    if (config_.psnr_check_every > 0 &&
        (step + 1) % config_.psnr_check_every == 0) {
      double p = train_view_psnr();
      log.log(step, "psnr", p);
      if (config_.psnr_early_stop > 0 && p > config_.psnr_early_stop) break;
    }
  }
}

double Pipeline::train_view_psnr(int max_views) {
  require_dataset();
  build_audio_caches();
  torch::NoGradGuard no_grad;
  const auto& train_t = data_->train_t;
  int n = std::min<int>(max_views, static_cast<int>(train_t.size()));
  double mse_sum = 0;
  int64_t count = 0;
  for (int k = 0; k < n; ++k) {
    int id = k % data_->identities;
    int t = train_t[(k * train_t.size()) / n];
    int pose = k % data_->num_poses;
    auto params_t = conditions_for(id, t);
    auto img = renderer->render_frame(data_->poses[pose], params_t, nullptr);
    auto gt = train_frame(id, t, pose);
    mse_sum += (img - gt).pow(2).sum().item<double>();
    count += gt.numel();
  }
  double mse = mse_sum / static_cast<double>(count);
  return mse > 0 ? -10.0 * std::log10(mse)
                 : std::numeric_limits<double>::infinity();
}

void Pipeline::train_space(const std::string& out_dir) {
  require_dataset();
  if (stage_ != "space") {
    require_stage("nerf", "train_space");
    stage_ = "space";
    steps_done_ = 0;
    stage_losses_.clear();
  }
  LossCurveWriter log(out_dir);

  auto weights = compute_au_weights(data_->occurrence_rates).to(torch::kFloat32);
  auto& opt_au = optimizer("au", au_encoder->parameters(), config_.space_lr);

  std::vector<torch::Tensor> space_params = collect_params(
      {au_encoder.ptr(), global_encoder.ptr(), decoder.ptr(),
       semantic_book.ptr(), global_book.ptr()});
  auto& opt_space = optimizer("space", space_params, config_.space_lr);

  auto mods = {std::static_pointer_cast<torch::nn::Module>(au_encoder.ptr()),
               std::static_pointer_cast<torch::nn::Module>(global_encoder.ptr()),
               std::static_pointer_cast<torch::nn::Module>(decoder.ptr()),
               std::static_pointer_cast<torch::nn::Module>(semantic_book.ptr()),
               std::static_pointer_cast<torch::nn::Module>(global_book.ptr())};

  const auto& train_t = data_->train_t;
  const int b = config_.space_batch;
  const bool both_off = config_.no_au_space && config_.no_global_space;
  const int64_t total =
      config_.au_iters + (both_off ? 0 : config_.space_iters);

  auto sample_batch = [&](std::vector<torch::Tensor>& frames_v,
                          std::vector<torch::Tensor>& labels_v) {
    for (int k = 0; k < b; ++k) {
      int id = static_cast<int>(sampler_.index(data_->identities));
      int t = train_t[sampler_.index(static_cast<int64_t>(train_t.size()))];
      int pose = static_cast<int>(sampler_.index(data_->num_poses));
      frames_v.push_back(train_frame(id, t, pose));
      const auto& rec = data_->record(id, t, pose);
      labels_v.push_back(torch::tensor(rec.au));
    }
  };

  for (int64_t step = steps_done_; step < total; ++step) {
    std::vector<torch::Tensor> frames_v, labels_v;
    sample_batch(frames_v, labels_v);
    auto frames = torch::stack(frames_v);
    auto labels = torch::stack(labels_v);

    if (step < config_.au_iters) {
      zero_grads(mods);
      auto pred = au_encoder->predict_batch(frames);
      torch::Tensor loss = torch::zeros({}, torch::kFloat32);
      for (int k = 0; k < b; ++k) {
        loss = loss + weighted_bce_loss(labels[k], pred[k], weights,
                                        config_.eps_bce) +
               weighted_dice_loss(labels[k], pred[k], weights, config_.eps_dice);
      }
      loss = loss / b;
      loss.backward();
      opt_au.step();
      log.log(step, "l_au", loss.item<double>());
      stage_losses_.push_back(loss.item<double>());
    } else {
      zero_grads(mods);
      auto noisy = frames;
      if (config_.encoder_noise > 0) {
        noisy = (frames + sampler_.normal_tensor(
                              {frames.size(0), frames.size(1), frames.size(2),
                               frames.size(3)},
                              config_.encoder_noise))
                    .clamp(0, 1);
      }
      const double bd = static_cast<double>(b);
      torch::Tensor loss = torch::zeros({}, torch::kFloat32);
      torch::Tensor dec_au, dec_glo;
      if (!config_.no_au_space) {
        auto f_au = au_encoder->encode_batch(noisy);
        auto [q_au, i_au] = semantic_book->quantize_batch(f_au);
        auto lut_au = semantic_book->lookup(i_au);
        loss = loss + (f_au.detach() - lut_au).pow(2).sum() / bd +
               config_.beta1 * (f_au - lut_au.detach()).pow(2).sum() / bd;
        semantic_book->refresh_dead_entries(f_au.detach(),
                                            config_.dead_entry_steps);
        dec_au = q_au;
      } else {
        dec_au = torch::zeros({frames.size(0), config_.semantic_dim});
      }
      if (!config_.no_global_space) {
        auto f_glo = global_encoder->encode_batch(noisy);
        auto [q_glo, i_glo] = global_book->quantize_batch(f_glo);
        auto lut_glo = global_book->lookup(i_glo);
        loss = loss + (f_glo.detach() - lut_glo).pow(2).sum() / bd +
               config_.beta2 * (f_glo - lut_glo.detach()).pow(2).sum() / bd;
        global_book->refresh_dead_entries(f_glo.detach(),
                                          config_.dead_entry_steps);
        dec_glo = q_glo;
      } else {
        dec_glo = torch::zeros({frames.size(0), config_.global_dim});
      }
      auto decoded = decoder->decode_batch(dec_au, dec_glo);
      loss = loss + (decoded - frames).abs().sum() / bd;
      loss.backward();
      opt_space.step();
      log.log(step, "l_s", loss.item<double>());
      stage_losses_.push_back(loss.item<double>());
    }
    steps_done_ = step + 1;
  }
}

torch::Tensor Pipeline::decode_frame(const torch::Tensor& frame) {
  if (config_.no_au_space && config_.no_global_space) return frame;
  torch::Tensor f_au, f_glo;
  if (config_.no_au_space) {
    f_au = torch::zeros({config_.semantic_dim});
  } else {
    f_au = semantic_book->quantize(au_encoder->encode(frame)).quantized;
  }
  if (config_.no_global_space) {
    f_glo = torch::zeros({config_.global_dim});
  } else {
    f_glo = global_book->quantize(global_encoder->encode(frame)).quantized;
  }
  return decoder->decode(f_au, f_glo);
}

torch::Tensor Pipeline::infer_frame(int identity, int t,
                                    const CameraPose& pose) {
  torch::NoGradGuard no_grad;
  auto params = conditions_for(identity, t);
  auto rendered = renderer->render_frame(pose, params, nullptr);
  return decode_frame(rendered);
}

std::vector<torch::Tensor> Pipeline::synthesize(
    const torch::Tensor& audio_track, const std::vector<CameraPose>& poses,
    int identity) {
  require_dataset();
  require_stage("space", "synthesize");
  if (poses.empty()) throw ArgumentError("synthesize: pose list is empty");
  if (audio_track.dim() != 3) {
    throw ShapeError("synthesize: audio track must be (T,rows,cols)");
  }
  torch::NoGradGuard no_grad;
  auto idframe = identity_frame(identity);
  auto prior = extractor->extract(idframe);

  std::vector<torch::Tensor> frames;
  for (int64_t t = 0; t < audio_track.size(0); ++t) {
    auto window = audio_track[t];
    HeadParams params;
    if (config_.no_disentangle) {
      auto [aud, style] = audio_embed->forward(window.unsqueeze(0));
      params = assemble(prior, aud.squeeze(0), style.squeeze(0));
    } else {
      auto lipwav = lipnet->generate(idframe, window);
      auto exp_aud = extractor->extract(lipwav).f_exp;
      params = assemble(prior, exp_aud, stylenet->extract(window));
    }
    auto rendered =
        renderer->render_frame(poses[t % poses.size()], params, nullptr);
    frames.push_back(decode_frame(rendered));
  }
  return frames;
}

nlohmann::json Pipeline::evaluate(const std::string& split) {
  require_dataset();
  require_stage("space", "evaluate");
  torch::NoGradGuard no_grad;

  const auto& ts = split == "train" ? data_->train_t : data_->test_t;
  if (split != "train" && split != "test") {
    throw ArgumentError("evaluate: split must be 'train' or 'test'");
  }

  std::map<std::pair<int, int>, std::unique_ptr<ApertureEstimator>> estimators;
  auto estimator = [&](int id, int pose) -> ApertureEstimator& {
    auto key = std::make_pair(id, pose);
    auto it = estimators.find(key);
    if (it == estimators.end()) {
      it = estimators
               .emplace(key, std::make_unique<ApertureEstimator>(
                                 data_->scenes[id], data_->poses[pose],
                                 data_->resolution))
               .first;
    }
    return *it->second;
  };

  double ssim_sum = 0, lmd_sum = 0, acc_sum = 0;
  int count = 0;
  std::vector<torch::Tensor> gen_frames, gen_audio;
  for (int id = 0; id < data_->identities; ++id) {
    for (int t : ts) {
      for (int pose = 0; pose < data_->num_poses; ++pose) {
        const auto& rec = data_->record(id, t, pose);
        auto gen = infer_frame(id, t, data_->poses[pose]);
        auto gt = data_->load_frame(rec);
        ssim_sum += ssim_rgb(gen, gt);
        auto gt_lm = data_->load_landmarks(rec).to(torch::kFloat64);
        lmd_sum += lmd79(estimator(id, pose).landmarks(gen), gt_lm);
        acc_sum += au_acc(au_encoder->predict(gen), torch::tensor(rec.au));
        if (pose == 0) {
          gen_frames.push_back(gen);
          gen_audio.push_back(tracks_[id][t]);
        }
        ++count;
      }
    }
  }
  double sync = syncnet_confidence(syncnet, gen_frames, gen_audio);
  nlohmann::json out;
  out["ssim"] = ssim_sum / count;
  out["lmd79"] = lmd_sum / count;
  out["au_acc"] = acc_sum / count;
  out["syncnet"] = sync;
  return out;
}

void Pipeline::save_checkpoint(const std::string& path) const {
  torch::serialize::OutputArchive root;
  archive_write_string(root, "config_hash", config_.hash());
  archive_write_string(root, "stage", stage_);
  archive_write_i64(root, "steps_done", steps_done_);
  archive_write_string(root, "rng", sampler_.state());

  const std::shared_ptr<torch::nn::Module> modules[] = {
      extractor.ptr(), lipnet.ptr(),      syncnet.ptr(),
      stylenet.ptr(),  fusenet.ptr(),     audio_embed.ptr(),
      renderer.ptr(),  au_encoder.ptr(),  global_encoder.ptr(),
      semantic_book.ptr(), global_book.ptr(), decoder.ptr()};
  for (size_t i = 0; i < std::size(kModuleNames); ++i) {
    torch::serialize::OutputArchive sub;
    modules[i]->save(sub);
    root.write(std::string("module:") + kModuleNames[i], sub);
  }

  std::string opt_names;
  for (const auto& [name, opt] : optimizers_) {
    torch::serialize::OutputArchive sub;
    opt->save(sub);
    root.write("optim:" + name, sub);
    opt_names += opt_names.empty() ? name : "," + name;
  }
  archive_write_string(root, "optim_names", opt_names);

  if (auto dir = fs::path(path).parent_path(); !dir.empty()) {
    fs::create_directories(dir);
  }
  root.save_to(path);
}

void Pipeline::load_checkpoint(const std::string& path) {
  torch::serialize::InputArchive root;
  try {
    root.load_from(path);
  } catch (const c10::Error& e) {
    throw IoError("checkpoint: cannot load " + path);
  }
  auto saved_hash = archive_read_string(root, "config_hash");
  if (saved_hash != config_.hash()) {
    throw ArgumentError(
        "checkpoint: config hash mismatch (checkpoint " + saved_hash +
        ", current " + config_.hash() + ")");
  }
  stage_ = archive_read_string(root, "stage");
  steps_done_ = archive_read_i64(root, "steps_done");
  sampler_.set_state(archive_read_string(root, "rng"));

  const std::shared_ptr<torch::nn::Module> modules[] = {
      extractor.ptr(), lipnet.ptr(),      syncnet.ptr(),
      stylenet.ptr(),  fusenet.ptr(),     audio_embed.ptr(),
      renderer.ptr(),  au_encoder.ptr(),  global_encoder.ptr(),
      semantic_book.ptr(), global_book.ptr(), decoder.ptr()};
  for (size_t i = 0; i < std::size(kModuleNames); ++i) {
    torch::serialize::InputArchive sub;
    root.read(std::string("module:") + kModuleNames[i], sub);
    modules[i]->load(sub);
  }

  optimizers_.clear();
  auto opt_names = archive_read_string(root, "optim_names");
  size_t start = 0;
  while (start < opt_names.size()) {
    size_t comma = opt_names.find(',', start);
    if (comma == std::string::npos) comma = opt_names.size();
    std::string name = opt_names.substr(start, comma - start);
    start = comma + 1;
    if (name.empty()) continue;

    std::vector<torch::Tensor> params;
    double lr = config_.space_lr;
    if (name == "sync") {
      params = syncnet->parameters();
      lr = config_.disentangle_lr;
    } else if (name == "lip") {
      params = lipnet->parameters();
      lr = config_.disentangle_lr;
    } else if (name == "stylefuse") {
      params = collect_params({stylenet.ptr(), fusenet.ptr()});
      lr = config_.disentangle_lr;
    } else if (name == "nerf") {
      params = renderer->parameters();
      for (auto& p : extractor->parameters()) params.push_back(p);
      if (config_.no_disentangle) {
        for (auto& p : audio_embed->parameters()) params.push_back(p);
      }
      lr = config_.nerf_lr;
    } else if (name == "au") {
      params = au_encoder->parameters();
    } else if (name == "space") {
      params = collect_params({au_encoder.ptr(), global_encoder.ptr(),
                               decoder.ptr(), semantic_book.ptr(),
                               global_book.ptr()});
    } else {
      throw IoError("checkpoint: unknown optimizer " + name);
    }
    auto opt = std::make_shared<torch::optim::Adam>(
        params, torch::optim::AdamOptions(lr));
    torch::serialize::InputArchive sub;
    root.read("optim:" + name, sub);
    opt->load(sub);
    optimizers_[name] = opt;
  }

  // anything cached from pre-load weights is stale
  lipwav_cache_.clear();
  style_cache_.clear();
}

}  // namespace talkfield
