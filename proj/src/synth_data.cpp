#include "talkfield/synth_data.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "talkfield/audio_disentangle.h"
#include "talkfield/blob_io.h"
#include "talkfield/errors.h"
#include "talkfield/png_io.h"
#include "talkfield/rng.h"
#include "talkfield/standardized_space.h"

namespace fs = std::filesystem;

namespace talkfield {

namespace {

constexpr double kPi = 3.14159265358979323846;

torch::Tensor vec3(const std::vector<double>& v) {
  return torch::tensor(v, torch::kFloat64);
}

std::vector<double> normalized(std::vector<double> v) {
  double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  for (auto& x : v) x /= n;
  return v;
}

// Orthonormal tangent frame of the mouth patch on the unit sphere.
struct MouthFrame {
  torch::Tensor m;   // center direction
  torch::Tensor eu;  // image-right-ish tangent
  torch::Tensor ev;  // face-up tangent
};

MouthFrame mouth_frame(const SceneSpec& scene) {
  auto m = vec3(scene.mouth_dir);
  auto up = torch::tensor({0.0, 1.0, 0.0}, torch::kFloat64);
  auto eu = torch::cross(up, m, 0);
  eu = eu / eu.norm();
  auto ev = torch::cross(m, eu, 0);
  return {m, eu, ev};
}

double aperture_at(const SceneSpec& scene, int t) {
  if (t < 0 || t >= scene.frames) {
    throw IndexError("scene: frame index " + std::to_string(t) +
                     " out of range [0," + std::to_string(scene.frames) + ")");
  }
  return scene.aperture[static_cast<size_t>(t)];
}

}  // namespace

nlohmann::json SceneSpec::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["frames"] = frames;
  j["axes"] = {ax, ay, az};
  j["mouth_half_width"] = mouth_half_width;
  j["mouth_max_half_height"] = mouth_max_half_height;
  j["mouth_dir"] = mouth_dir;
  j["albedo"] = albedo;
  j["mouth_color"] = mouth_color;
  j["eye_color"] = eye_color;
  j["light_dir"] = light_dir;
  j["ambient"] = ambient;
  j["eye_offset_u"] = eye_offset_u;
  j["eye_offset_v"] = eye_offset_v;
  j["eye_radius"] = eye_radius;
  j["background"] = background;
  j["aperture"] = aperture;
  j["timbre"] = timbre;
  j["rhythm_freq"] = rhythm_freq;
  j["rhythm_phase"] = rhythm_phase;
  j["audio_corr_noise"] = audio_corr_noise;
  j["audio_white_noise"] = audio_white_noise;
  return j;
}

SceneSpec SceneSpec::from_json(const nlohmann::json& j) {
  SceneSpec s;
  s.seed = j.at("seed").get<uint64_t>();
  s.frames = j.at("frames").get<int>();
  auto axes = j.at("axes").get<std::vector<double>>();
  s.ax = axes[0];
  s.ay = axes[1];
  s.az = axes[2];
  s.mouth_half_width = j.at("mouth_half_width").get<double>();
  s.mouth_max_half_height = j.at("mouth_max_half_height").get<double>();
  s.mouth_dir = j.at("mouth_dir").get<std::vector<double>>();
  s.albedo = j.at("albedo").get<std::vector<double>>();
  s.mouth_color = j.at("mouth_color").get<std::vector<double>>();
  s.eye_color = j.at("eye_color").get<std::vector<double>>();
  s.light_dir = j.at("light_dir").get<std::vector<double>>();
  s.ambient = j.at("ambient").get<double>();
  s.eye_offset_u = j.at("eye_offset_u").get<double>();
  s.eye_offset_v = j.at("eye_offset_v").get<double>();
  s.eye_radius = j.at("eye_radius").get<double>();
  s.background = j.at("background").get<std::vector<double>>();
  s.aperture = j.at("aperture").get<std::vector<double>>();
  s.timbre = j.at("timbre").get<std::vector<double>>();
  s.rhythm_freq = j.at("rhythm_freq").get<double>();
  s.rhythm_phase = j.at("rhythm_phase").get<double>();
  s.audio_corr_noise = j.at("audio_corr_noise").get<double>();
  s.audio_white_noise = j.at("audio_white_noise").get<double>();
  return s;
}

SceneSpec make_scene(uint64_t seed, const SynthConfig& config) {
  if (config.frames < 1) throw ArgumentError("make_scene: frames must be >= 1");
  RandomStream rng(seed * 0x9e3779b97f4a7c15ULL + 12345);
  SceneSpec s;
  s.seed = seed;
  s.frames = config.frames;
  s.ax = 0.55 + 0.08 * rng.uniform();
  s.ay = 0.66 + 0.08 * rng.uniform();
  s.az = 0.52 + 0.06 * rng.uniform();
  s.mouth_half_width = 0.20 + 0.05 * rng.uniform();
  s.mouth_max_half_height = 0.11 + 0.04 * rng.uniform();
  s.mouth_dir = normalized({0.0, -0.38, 0.925});
  s.albedo = {0.55 + 0.30 * rng.uniform(), 0.40 + 0.25 * rng.uniform(),
              0.35 + 0.20 * rng.uniform()};
  s.mouth_color = {0.10, 0.03, 0.04};
  s.eye_color = {0.06, 0.07, 0.10};
  s.light_dir = normalized({-0.3 + 0.6 * rng.uniform(), 0.45, 0.85});
  s.ambient = 0.35;
  s.background = {0.16, 0.17, 0.20};
  s.timbre = {rng.uniform(), rng.uniform()};
  s.rhythm_freq = 4.0 + rng.index(4);
  s.rhythm_phase = 2 * kPi * rng.uniform();
  s.audio_corr_noise = config.audio_corr_noise;
  s.audio_white_noise = config.audio_white_noise;

  // speech-like aperture drive: two incommensurate sinusoids, clipped so the
  // signal spends time at both extremes
  double f1 = 3.0 + rng.index(3);
  double f2 = 7.0 + rng.index(5);
  double p1 = 2 * kPi * rng.uniform();
  double p2 = 2 * kPi * rng.uniform();
  s.aperture.resize(config.frames);
  for (int t = 0; t < config.frames; ++t) {
    double x = static_cast<double>(t) / config.frames;
    double base = 0.5 + 0.45 * std::sin(2 * kPi * f1 * x + p1) +
                  0.35 * std::sin(2 * kPi * f2 * x + p2);
    s.aperture[t] = std::clamp(base, 0.0, 1.0);
  }
  return s;
}

std::vector<CameraPose> dataset_poses(const SynthConfig& config) {
  std::vector<CameraPose> poses;
  const double el = config.elevation_deg * kPi / 180.0;
  const double c = config.resolution / 2.0;
  for (int p = 0; p < config.num_poses; ++p) {
    double yaw =
        (p - (config.num_poses - 1) / 2.0) * config.yaw_step_deg * kPi / 180.0;
    auto position = torch::tensor({config.orbit_radius * std::sin(yaw) * std::cos(el),
                                   config.orbit_radius * std::sin(el),
                                   config.orbit_radius * std::cos(yaw) * std::cos(el)},
                                  torch::kFloat64);
    poses.push_back(look_at(position, torch::zeros({3}, torch::kFloat64),
                            config.focal, config.focal, c, c));
  }
  // frontal camera first
  std::swap(poses[0], poses[config.num_poses / 2]);
  return poses;
}

torch::Tensor render_with_aperture(const SceneSpec& scene,
                                   const CameraPose& pose, double aperture,
                                   int resolution) {
  auto rays = generate_rays(pose, resolution, resolution);
  auto axes = torch::tensor({scene.ax, scene.ay, scene.az}, torch::kFloat64);
  auto o = rays.origins / axes;
  auto d = rays.directions / axes;
  auto qa = (d * d).sum(-1);
  auto qb = 2.0 * (o * d).sum(-1);
  auto qc = (o * o).sum(-1) - 1.0;
  auto disc = qb * qb - 4.0 * qa * qc;
  auto hit = disc >= 0;
  auto t_hit = (-qb - torch::sqrt(torch::clamp_min(disc, 0.0))) / (2.0 * qa);
  hit = hit & (t_hit > 0);

  auto p = rays.origins + rays.directions * t_hit.unsqueeze(-1);
  auto sphere = p / axes;  // unit-sphere coordinates of the surface point
  auto normal = p / (axes * axes);
  normal = normal / normal.norm(2, -1, true);
  auto light = vec3(normalized(scene.light_dir));
  auto bright = scene.ambient + (1.0 - scene.ambient) *
                                    torch::relu((normal * light).sum(-1));
  auto color = vec3(scene.albedo).unsqueeze(0) * bright.unsqueeze(-1);

  auto frame = mouth_frame(scene);
  auto u = (sphere * frame.eu).sum(-1);
  auto v = (sphere * frame.ev).sum(-1);
  auto front = (sphere * frame.m).sum(-1) > 0;

  const double h = scene.mouth_max_half_height * aperture;
  if (h > 0) {
    auto uu = u / scene.mouth_half_width;
    auto vv = v / h;
    auto mouth = front & (uu * uu + vv * vv < 1.0);
    color = torch::where(mouth.unsqueeze(-1),
                         vec3(scene.mouth_color).unsqueeze(0), color);
  }
  for (double side : {-1.0, 1.0}) {
    auto eye_dir = frame.m + scene.eye_offset_v * frame.ev +
                   side * scene.eye_offset_u * frame.eu;
    eye_dir = eye_dir / eye_dir.norm();
    auto dist2 = (sphere - eye_dir.unsqueeze(0)).pow(2).sum(-1);
    auto eye = front & (dist2 < scene.eye_radius * scene.eye_radius);
    color = torch::where(eye.unsqueeze(-1), vec3(scene.eye_color).unsqueeze(0),
                         color);
  }

  color = torch::where(hit.unsqueeze(-1), color,
                       vec3(scene.background).unsqueeze(0));
  return color.reshape({resolution, resolution, 3})
      .permute({2, 0, 1})
      .clamp(0, 1)
      .to(torch::kFloat32);
}

torch::Tensor render_gt(const SceneSpec& scene, const CameraPose& pose, int t,
                        int resolution) {
  return render_with_aperture(scene, pose, aperture_at(scene, t), resolution);
}

torch::Tensor landmarks_for_aperture(const SceneSpec& scene,
                                     const CameraPose& pose, double aperture) {
  pose.validate();
  constexpr int kFine = 790;
  constexpr int kPoints = 79;
  auto frame = mouth_frame(scene);
  auto axes = torch::tensor({scene.ax, scene.ay, scene.az}, torch::kFloat64);
  const double h = scene.mouth_max_half_height * aperture;

  auto psi = torch::arange(kFine, torch::kFloat64) * (2 * kPi / kFine);
  auto u = scene.mouth_half_width * torch::cos(psi);
  auto v = h * torch::sin(psi);
  auto rad = torch::sqrt(torch::clamp_min(1.0 - u * u - v * v, 0.0));
  auto sphere = u.unsqueeze(-1) * frame.eu.unsqueeze(0) +
                v.unsqueeze(-1) * frame.ev.unsqueeze(0) +
                rad.unsqueeze(-1) * frame.m.unsqueeze(0);
  auto world = sphere * axes;
  auto cam = torch::matmul(world - pose.translation.unsqueeze(0),
                           pose.rotation.to(torch::kFloat64));
  auto px = pose.fx * cam.select(1, 0) / cam.select(1, 2) + pose.cx;
  auto py = pose.fy * cam.select(1, 1) / cam.select(1, 2) + pose.cy;
  auto poly = torch::stack({px, py}, -1);  // (kFine, 2)

  // uniform arc-length resampling of the closed polyline
  auto pa = poly.accessor<double, 2>();
  std::vector<double> cum(kFine + 1, 0.0);
  for (int i = 0; i < kFine; ++i) {
    int j = (i + 1) % kFine;
    double dx = pa[j][0] - pa[i][0], dy = pa[j][1] - pa[i][1];
    cum[i + 1] = cum[i] + std::sqrt(dx * dx + dy * dy);
  }
  const double total = cum[kFine];
  auto out = torch::empty({kPoints, 2}, torch::kFloat64);
  auto oa = out.accessor<double, 2>();
  int seg = 0;
  for (int k = 0; k < kPoints; ++k) {
    double target = total * k / kPoints;
    while (seg < kFine - 1 && cum[seg + 1] < target) ++seg;
    double seg_len = cum[seg + 1] - cum[seg];
    double w = seg_len > 0 ? (target - cum[seg]) / seg_len : 0.0;
    int j = (seg + 1) % kFine;
    oa[k][0] = pa[seg][0] + w * (pa[j][0] - pa[seg][0]);
    oa[k][1] = pa[seg][1] + w * (pa[j][1] - pa[seg][1]);
  }
  return out;
}

torch::Tensor gt_landmarks(const SceneSpec& scene, const CameraPose& pose,
                           int t) {
  return landmarks_for_aperture(scene, pose, aperture_at(scene, t));
}

torch::Tensor au_thresholds() {
  auto th = torch::empty({kNumAu}, torch::kFloat64);
  for (int i = 0; i < kNumAu; ++i) th[i] = (i + 0.5) / 10.0;
  return th;
}

torch::Tensor gt_au_labels(const SceneSpec& scene, int t) {
  double a = aperture_at(scene, t);
  return (au_thresholds() < a).to(torch::kFloat32);
}

torch::Tensor audio_track(const SceneSpec& scene) {
  const int64_t t_total = scene.frames;
  // per-timestep feature row, shared by every window that covers it
  RandomStream noise(scene.seed * 0x2545f4914f6cdd1dULL + 777);
  auto feat = torch::zeros({t_total, kAudioCols}, torch::kFloat64);
  auto fa = feat.accessor<double, 2>();
  for (int64_t t = 0; t < t_total; ++t) {
    double a = scene.aperture[static_cast<size_t>(t)];
    double x = static_cast<double>(t) / t_total;
    fa[t][0] = a;
    fa[t][1] = 0.5 + 0.5 * std::sin(2 * kPi * scene.rhythm_freq * x +
                                    scene.rhythm_phase);
    fa[t][2] = scene.timbre[0];
    fa[t][3] = scene.timbre[1];
    for (int c = 4; c < 12; ++c) {
      fa[t][c] = a + scene.audio_corr_noise * noise.normal();
    }
    for (int c = 12; c < 20; ++c) {
      fa[t][c] = scene.audio_white_noise * noise.normal();
    }
  }
  auto feat32 = feat.to(torch::kFloat32);
  auto track = torch::zeros({t_total, kAudioRows, kAudioCols}, torch::kFloat32);
  for (int64_t t = 0; t < t_total; ++t) {
    for (int64_t r = 0; r < kAudioRows; ++r) {
      int64_t src = std::clamp<int64_t>(t - kAudioRows / 2 + r, 0, t_total - 1);
      track[t][r] = feat32[src];
    }
  }
  return track;
}

torch::Tensor audio_window(const torch::Tensor& track, int t) {
  if (track.dim() != 3) throw ShapeError("audio_window: track must be (T,r,c)");
  if (t < 0 || t >= track.size(0)) {
    throw IndexError("audio_window: frame index out of range");
  }
  return track[t];
}

double aperture_from_window(const torch::Tensor& window) {
  if (window.dim() != 2 || window.size(0) != kAudioRows ||
      window.size(1) != kAudioCols) {
    throw ShapeError("aperture_from_window: bad window shape");
  }
  return window[kAudioRows / 2][0].item<double>();
}

ApertureEstimator::ApertureEstimator(const SceneSpec& scene,
                                     const CameraPose& pose, int resolution,
                                     int grid)
    : scene_(scene), pose_(pose), resolution_(resolution) {
  if (grid < 2) throw ArgumentError("ApertureEstimator: grid must be >= 2");
  auto corners = landmarks_for_aperture(scene, pose, 1.0);
  auto xs = corners.select(1, 0);
  auto ys = corners.select(1, 1);
  x0_ = std::clamp<int64_t>(int64_t(xs.min().item<double>()) - 3, 0, resolution - 1);
  x1_ = std::clamp<int64_t>(int64_t(xs.max().item<double>()) + 4, 1, resolution);
  y0_ = std::clamp<int64_t>(int64_t(ys.min().item<double>()) - 3, 0, resolution - 1);
  y1_ = std::clamp<int64_t>(int64_t(ys.max().item<double>()) + 4, 1, resolution);

  std::vector<torch::Tensor> tiles;
  grid_values_.resize(grid);
  for (int g = 0; g < grid; ++g) {
    grid_values_[g] = static_cast<double>(g) / (grid - 1);
    auto img = render_with_aperture(scene, pose, grid_values_[g], resolution);
    tiles.push_back(img.index({torch::indexing::Slice(),
                               torch::indexing::Slice(y0_, y1_),
                               torch::indexing::Slice(x0_, x1_)}));
  }
  templates_ = torch::stack(tiles);
}

double ApertureEstimator::estimate(const torch::Tensor& frame) const {
  if (frame.dim() != 3 || frame.size(1) != resolution_ ||
      frame.size(2) != resolution_) {
    throw ShapeError("ApertureEstimator: frame resolution mismatch");
  }
  auto crop = frame
                  .index({torch::indexing::Slice(),
                          torch::indexing::Slice(y0_, y1_),
                          torch::indexing::Slice(x0_, x1_)})
                  .to(torch::kFloat32)
                  .unsqueeze(0);
  auto err = (templates_ - crop).pow(2).mean({1, 2, 3});
  return grid_values_[err.argmin().item<int64_t>()];
}

torch::Tensor ApertureEstimator::landmarks(const torch::Tensor& frame) const {
  return landmarks_for_aperture(scene_, pose_, estimate(frame));
}

const FrameRecord& DatasetManifest::record(int id, int t, int pose) const {
  for (const auto& r : records) {
    if (r.id == id && r.t == t && r.pose == pose) return r;
  }
  throw IndexError("manifest: no record for (id,t,pose)");
}

torch::Tensor DatasetManifest::load_frame(const FrameRecord& r) const {
  return read_png((fs::path(root) / r.frame).string());
}

torch::Tensor DatasetManifest::load_audio(const FrameRecord& r) const {
  return read_blob((fs::path(root) / r.audio).string());
}

torch::Tensor DatasetManifest::load_landmarks(const FrameRecord& r) const {
  return read_blob((fs::path(root) / r.landmarks).string());
}

namespace {

nlohmann::json pose_to_json(const CameraPose& p) {
  nlohmann::json j;
  auto r = p.rotation.to(torch::kFloat64).contiguous();
  j["rotation"] = std::vector<double>(r.data_ptr<double>(), r.data_ptr<double>() + 9);
  auto t = p.translation.to(torch::kFloat64).contiguous();
  j["translation"] =
      std::vector<double>(t.data_ptr<double>(), t.data_ptr<double>() + 3);
  j["intrinsics"] = {p.fx, p.fy, p.cx, p.cy};
  return j;
}

CameraPose pose_from_json(const nlohmann::json& j) {
  auto rv = j.at("rotation").get<std::vector<double>>();
  auto tv = j.at("translation").get<std::vector<double>>();
  auto in = j.at("intrinsics").get<std::vector<double>>();
  CameraPose p;
  p.rotation = torch::tensor(rv, torch::kFloat64).reshape({3, 3});
  p.translation = torch::tensor(tv, torch::kFloat64);
  p.fx = in[0];
  p.fy = in[1];
  p.cx = in[2];
  p.cy = in[3];
  return p;
}

std::string frame_name(int id, int t, int pose) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "frames/id%d_t%04d_p%d.png", id, t, pose);
  return buf;
}

}  // namespace

void generate_dataset(const std::string& dir, uint64_t seed,
                      const SynthConfig& config) {
  fs::create_directories(fs::path(dir) / "frames");
  fs::create_directories(fs::path(dir) / "audio");
  fs::create_directories(fs::path(dir) / "landmarks");

  auto poses = dataset_poses(config);
  nlohmann::json manifest;
  manifest["resolution"] = config.resolution;
  manifest["frames"] = config.frames;
  manifest["identities"] = config.identities;
  manifest["num_poses"] = config.num_poses;
  for (const auto& p : poses) manifest["poses"].push_back(pose_to_json(p));
  auto th = au_thresholds();
  manifest["au_thresholds"] =
      std::vector<double>(th.data_ptr<double>(), th.data_ptr<double>() + kNumAu);

  std::vector<int> train_t, test_t;
  for (int t = 0; t < config.frames; ++t) {
    (t % config.test_every == 0 ? test_t : train_t).push_back(t);
  }
  manifest["train_t"] = train_t;
  manifest["test_t"] = test_t;

  auto counts = torch::zeros({kNumAu}, torch::kFloat64);
  manifest["records"] = nlohmann::json::array();
  for (int id = 0; id < config.identities; ++id) {
    auto scene = make_scene(seed + static_cast<uint64_t>(id), config);
    auto track = audio_track(scene);
    std::string track_path = "audio/id" + std::to_string(id) + "_track.blob";
    write_blob((fs::path(dir) / track_path).string(), track);

    // neutral identity frame: the most closed mouth in the train split
    int t_neutral = train_t[0];
    for (int t : train_t) {
      if (scene.aperture[t] < scene.aperture[t_neutral]) t_neutral = t;
    }

    nlohmann::json ident;
    ident["scene"] = scene.to_json();
    ident["audio_track"] = track_path;
    ident["identity_frame"] = frame_name(id, t_neutral, 0);
    manifest["identities_meta"].push_back(ident);

    for (int t = 0; t < config.frames; ++t) {
      auto labels = gt_au_labels(scene, t);
      counts += labels.to(torch::kFloat64);
      std::string audio_path =
          "audio/id" + std::to_string(id) + "_t" + std::to_string(t) + ".blob";
      write_blob((fs::path(dir) / audio_path).string(), track[t]);
      for (int p = 0; p < config.num_poses; ++p) {
        auto img = render_gt(scene, poses[p], t, config.resolution);
        write_png((fs::path(dir) / frame_name(id, t, p)).string(), img);
        std::string lm_path = "landmarks/id" + std::to_string(id) + "_t" +
                              std::to_string(t) + "_p" + std::to_string(p) +
                              ".blob";
        write_blob((fs::path(dir) / lm_path).string(),
                   gt_landmarks(scene, poses[p], t).to(torch::kFloat32));
        nlohmann::json rec;
        rec["id"] = id;
        rec["t"] = t;
        rec["pose"] = p;
        rec["frame"] = frame_name(id, t, p);
        rec["audio"] = audio_path;
        rec["landmarks"] = lm_path;
        rec["au"] = std::vector<float>(labels.data_ptr<float>(),
                                       labels.data_ptr<float>() + kNumAu);
        manifest["records"].push_back(rec);
      }
    }
  }

  auto rates = counts / static_cast<double>(config.identities * config.frames);
  if (rates.min().item<double>() <= 0.0) {
    throw ArgumentError(
        "generate_dataset: an action unit never occurs for this seed; "
        "occurrence rates must be positive");
  }
  manifest["occurrence_rates"] = std::vector<double>(
      rates.data_ptr<double>(), rates.data_ptr<double>() + kNumAu);

  std::ofstream f(fs::path(dir) / "manifest.json");
  if (!f) throw IoError("generate_dataset: cannot write manifest");
  f << manifest.dump(1) << "\n";
}

DatasetManifest load_manifest(const std::string& dir) {
  std::ifstream f(fs::path(dir) / "manifest.json");
  if (!f) throw IoError("load_manifest: cannot open " + dir + "/manifest.json");
  nlohmann::json j = nlohmann::json::parse(f);

  DatasetManifest m;
  m.root = dir;
  m.resolution = j.at("resolution").get<int>();
  m.frames = j.at("frames").get<int>();
  m.identities = j.at("identities").get<int>();
  m.num_poses = j.at("num_poses").get<int>();
  for (const auto& pj : j.at("poses")) m.poses.push_back(pose_from_json(pj));
  m.thresholds = torch::tensor(j.at("au_thresholds").get<std::vector<double>>(),
                               torch::kFloat64);
  m.occurrence_rates = torch::tensor(
      j.at("occurrence_rates").get<std::vector<double>>(), torch::kFloat64);
  m.train_t = j.at("train_t").get<std::vector<int>>();
  m.test_t = j.at("test_t").get<std::vector<int>>();
  for (const auto& ij : j.at("identities_meta")) {
    m.scenes.push_back(SceneSpec::from_json(ij.at("scene")));
    m.audio_tracks.push_back(ij.at("audio_track").get<std::string>());
    m.identity_frames.push_back(ij.at("identity_frame").get<std::string>());
  }
  for (const auto& rj : j.at("records")) {
    FrameRecord r;
    r.id = rj.at("id").get<int>();
    r.t = rj.at("t").get<int>();
    r.pose = rj.at("pose").get<int>();
    r.frame = rj.at("frame").get<std::string>();
    r.audio = rj.at("audio").get<std::string>();
    r.landmarks = rj.at("landmarks").get<std::string>();
    r.au = rj.at("au").get<std::vector<float>>();
    m.records.push_back(std::move(r));
  }
  return m;
}

}  // namespace talkfield
