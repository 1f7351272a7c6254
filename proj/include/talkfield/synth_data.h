#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <torch/torch.h>

#include "talkfield/camera.h"

namespace talkfield {

// Generation parameters for the synthetic talking-head dataset.
struct SynthConfig {
  int resolution = 64;
  int frames = 200;     // timesteps per identity
  int identities = 2;
  int num_poses = 5;    // yaw sweep around the head
  double orbit_radius = 2.2;
  double focal = 76.0;  // pixels at `resolution`
  double elevation_deg = 10.0;
  double yaw_step_deg = 15.0;
  int test_every = 5;   // t % test_every == 0 goes to the test split
  double audio_corr_noise = 0.6;   // noise on aperture-correlated channels
  double audio_white_noise = 0.5;  // pure distractor channels
};

// Fully parametric head scene: a shaded ellipsoid with an elliptical mouth
// patch whose height follows the aperture drive a(t), plus two eye patches.
// Every supervision signal (frames, landmarks, AU labels, audio) is an
// exact analytic function of this struct.
struct SceneSpec {
  uint64_t seed = 0;
  int frames = 0;
  double ax = 0, ay = 0, az = 0;           // ellipsoid semi-axes
  double mouth_half_width = 0;             // on the unit sphere
  double mouth_max_half_height = 0;
  std::vector<double> mouth_dir;           // unit 3-vector
  std::vector<double> albedo;              // (3)
  std::vector<double> mouth_color;         // (3)
  std::vector<double> eye_color;           // (3)
  std::vector<double> light_dir;           // unit 3-vector, toward the light
  double ambient = 0.35;
  double eye_offset_u = 0.30, eye_offset_v = 0.62, eye_radius = 0.10;
  std::vector<double> background;          // (3)
  std::vector<double> aperture;            // a(t), length `frames`, in [0,1]
  std::vector<double> timbre;              // (2) identity constants
  double rhythm_freq = 5.0;
  double rhythm_phase = 0.0;
  double audio_corr_noise = 0.6;
  double audio_white_noise = 0.5;

  nlohmann::json to_json() const;
  static SceneSpec from_json(const nlohmann::json& j);
};

SceneSpec make_scene(uint64_t seed, const SynthConfig& config);

// Camera ring used for the dataset; pose 0 is frontal.
std::vector<CameraPose> dataset_poses(const SynthConfig& config);

// Analytic ray-traced frame, (3,R,R) float32 in [0,1].
torch::Tensor render_gt(const SceneSpec& scene, const CameraPose& pose, int t,
                        int resolution);
torch::Tensor render_with_aperture(const SceneSpec& scene,
                                   const CameraPose& pose, double aperture,
                                   int resolution);

// 79 points sampled uniformly by arc length along the projected mouth
// contour, pixel coordinates, (79,2) double.
torch::Tensor gt_landmarks(const SceneSpec& scene, const CameraPose& pose,
                           int t);
torch::Tensor landmarks_for_aperture(const SceneSpec& scene,
                                     const CameraPose& pose, double aperture);

// Binary speech-AU labels: AU i fires when a(t) exceeds its threshold.
torch::Tensor au_thresholds();
torch::Tensor gt_au_labels(const SceneSpec& scene, int t);

// Mel-like audio features. The full track is (T, rows, cols) float32; the
// center row of channel 0 carries a(t) itself, so the aperture is exactly
// recoverable. Remaining channels are rhythm/timbre/noise distractors.
torch::Tensor audio_track(const SceneSpec& scene);
torch::Tensor audio_window(const torch::Tensor& track, int t);
double aperture_from_window(const torch::Tensor& window);

// Recovers the aperture shown in `frame` by photometric matching of the
// mouth region against the analytic renderer over an aperture grid.
// Precomputes the candidate renders once per (scene, pose).
class ApertureEstimator {
 public:
  ApertureEstimator(const SceneSpec& scene, const CameraPose& pose,
                    int resolution, int grid = 65);
  double estimate(const torch::Tensor& frame) const;
  torch::Tensor landmarks(const torch::Tensor& frame) const;

 private:
  SceneSpec scene_;
  CameraPose pose_;
  int resolution_;
  std::vector<double> grid_values_;
  torch::Tensor templates_;  // (G, 3, bh, bw)
  int64_t y0_ = 0, y1_ = 0, x0_ = 0, x1_ = 0;
};

// On-disk dataset: frames as PNG, audio windows / landmarks as float32
// blobs, manifest as JSON.
struct FrameRecord {
  int id = 0, t = 0, pose = 0;
  std::string frame, audio, landmarks;
  std::vector<float> au;
};

struct DatasetManifest {
  std::string root;
  int resolution = 0, frames = 0, identities = 0, num_poses = 0;
  std::vector<CameraPose> poses;
  torch::Tensor thresholds;        // (9)
  torch::Tensor occurrence_rates;  // (9), empirical over all frames
  std::vector<int> train_t, test_t;
  std::vector<SceneSpec> scenes;
  std::vector<std::string> identity_frames;  // neutral frame per identity
  std::vector<std::string> audio_tracks;
  std::vector<FrameRecord> records;

  const FrameRecord& record(int id, int t, int pose) const;
  torch::Tensor load_frame(const FrameRecord& r) const;     // (3,R,R)
  torch::Tensor load_audio(const FrameRecord& r) const;     // (rows,cols)
  torch::Tensor load_landmarks(const FrameRecord& r) const; // (79,2)
};

void generate_dataset(const std::string& dir, uint64_t seed,
                      const SynthConfig& config);
DatasetManifest load_manifest(const std::string& dir);

}  // namespace talkfield
