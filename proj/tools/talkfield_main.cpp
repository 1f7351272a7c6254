#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "talkfield/blob_io.h"
#include "talkfield/config.h"
#include "talkfield/errors.h"
#include "talkfield/pipeline.h"
#include "talkfield/png_io.h"
#include "talkfield/synth_data.h"

namespace fs = std::filesystem;
using namespace talkfield;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out = "out";
  std::string init;
  int64_t seed = -1;
  bool no_disentangle = false;
  bool no_global_space = false;
  bool no_au_space = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_init) {
  cmd->add_option("--config", args.config_path, "pipeline config JSON");
  cmd->add_option("--seed", args.seed, "override the config seed");
  cmd->add_option("--out", args.out, "output directory");
  if (with_init) {
    cmd->add_option("--init", args.init, "checkpoint to start from");
  }
  cmd->add_flag("--no-disentangle", args.no_disentangle,
                "condition on the whole audio window");
  cmd->add_flag("--no-global-space", args.no_global_space,
                "drop the global codebook path");
  cmd->add_flag("--no-au-space", args.no_au_space,
                "drop the AU codebook path");
}

PipelineConfig make_config(const CommonArgs& args) {
  PipelineConfig cfg;
  if (!args.config_path.empty()) cfg = PipelineConfig::load(args.config_path);
  if (args.seed >= 0) cfg.seed = static_cast<uint64_t>(args.seed);
  if (args.no_disentangle) cfg.no_disentangle = true;
  if (args.no_global_space) cfg.no_global_space = true;
  if (args.no_au_space) cfg.no_au_space = true;
  return cfg;
}

int run_stage(const CommonArgs& args, const std::string& stage) {
  auto cfg = make_config(args);
  Pipeline pipeline(cfg);
  if (!args.init.empty()) pipeline.load_checkpoint(args.init);
  if (stage == "disentangle") {
    pipeline.train_disentangle(args.out);
  } else if (stage == "nerf") {
    pipeline.train_nerf(args.out);
  } else {
    pipeline.train_space(args.out);
  }
  auto ckpt = (fs::path(args.out) / "checkpoint.pt").string();
  pipeline.save_checkpoint(ckpt);
  std::cout << "stage " << stage << " done, checkpoint: " << ckpt << "\n";
  if (!pipeline.stage_losses().empty()) {
    std::cout << "final loss: " << pipeline.stage_losses().back() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"talkfield: audio-driven conditional-field talking heads"};
  app.require_subcommand(1);

  CommonArgs gen_args, dis_args, nerf_args, space_args, synth_args, eval_args;

  auto* gen = app.add_subcommand("gen-data", "generate the synthetic dataset");
  add_common(gen, gen_args, false);

  auto* dis = app.add_subcommand("train-disentangle",
                                 "stage 1: audio disentanglement");
  add_common(dis, dis_args, true);

  auto* nerf = app.add_subcommand("train-nerf", "stage 2: conditional field");
  add_common(nerf, nerf_args, true);

  auto* space = app.add_subcommand("train-space",
                                   "stage 3: standardized space");
  add_common(space, space_args, true);

  auto* synth = app.add_subcommand("synthesize", "render frames from audio");
  add_common(synth, synth_args, true);
  std::string audio_path;
  std::string pose_indices = "0";
  int identity = 0;
  synth->add_option("--audio", audio_path, "audio track blob")->required();
  synth->add_option("--pose-indices", pose_indices,
                    "comma-separated dataset pose indices, cycled over frames");
  synth->add_option("--identity", identity, "identity index");

  auto* eval = app.add_subcommand("evaluate", "metrics over a dataset split");
  add_common(eval, eval_args, true);
  std::string split = "test";
  eval->add_option("--split", split, "train or test");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      auto cfg = make_config(gen_args);
      generate_dataset(cfg.dataset, cfg.seed, cfg.synth);
      std::cout << "dataset written to " << cfg.dataset << "\n";
      return 0;
    }
    if (dis->parsed()) return run_stage(dis_args, "disentangle");
    if (nerf->parsed()) return run_stage(nerf_args, "nerf");
    if (space->parsed()) return run_stage(space_args, "space");

    if (synth->parsed()) {
      auto cfg = make_config(synth_args);
      Pipeline pipeline(cfg);
      if (synth_args.init.empty()) {
        throw ArgumentError("synthesize: --init checkpoint required");
      }
      pipeline.load_checkpoint(synth_args.init);
      auto manifest = load_manifest(cfg.dataset);
      std::vector<CameraPose> poses;
      std::stringstream ss(pose_indices);
      for (std::string item; std::getline(ss, item, ',');) {
        int idx = std::stoi(item);
        if (idx < 0 || idx >= static_cast<int>(manifest.poses.size())) {
          throw ArgumentError("synthesize: pose index out of range");
        }
        poses.push_back(manifest.poses[idx]);
      }
      auto track = read_blob(audio_path);
      auto frames = pipeline.synthesize(track, poses, identity);
      auto dir = fs::path(synth_args.out) / "frames";
      fs::create_directories(dir);
      for (size_t i = 0; i < frames.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "%05zu.png", i);
        write_png((dir / name).string(), frames[i]);
      }
      std::cout << frames.size() << " frames written to " << dir << "\n";
      return 0;
    }

    if (eval->parsed()) {
      auto cfg = make_config(eval_args);
      Pipeline pipeline(cfg);
      if (eval_args.init.empty()) {
        throw ArgumentError("evaluate: --init checkpoint required");
      }
      pipeline.load_checkpoint(eval_args.init);
      auto metrics = pipeline.evaluate(split);
      fs::create_directories(eval_args.out);
      std::ofstream f(fs::path(eval_args.out) / "metrics.json");
      f << metrics.dump(1) << "\n";
      std::cout << metrics.dump(1) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
