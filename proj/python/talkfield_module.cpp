#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "talkfield/audio_disentangle.h"
#include "talkfield/camera.h"
#include "talkfield/conditional_nerf.h"
#include "talkfield/config.h"
#include "talkfield/metrics.h"
#include "talkfield/pipeline.h"
#include "talkfield/standardized_space.h"
#include "talkfield/synth_data.h"

namespace py = pybind11;
using namespace talkfield;

namespace {

torch::Tensor tensor_from(const py::array_t<double, py::array::c_style |
                                                        py::array::forcecast>& a) {
  std::vector<int64_t> shape(a.ndim());
  for (py::ssize_t i = 0; i < a.ndim(); ++i) shape[i] = a.shape(i);
  auto t = torch::from_blob(const_cast<double*>(a.data()), shape,
                            torch::kFloat64);
  return t.clone();
}

py::array_t<double> array_from(const torch::Tensor& t) {
  auto c = t.detach().to(torch::kFloat64).contiguous();
  std::vector<py::ssize_t> shape(c.sizes().begin(), c.sizes().end());
  py::array_t<double> out(shape);
  std::memcpy(out.mutable_data(), c.data_ptr<double>(),
              sizeof(double) * c.numel());
  return out;
}

using DArray =
    py::array_t<double, py::array::c_style | py::array::forcecast>;

}  // namespace

PYBIND11_MODULE(_talkfield, m) {
  m.doc() = "audio-driven conditional-field talking heads (C++ core)";

  // losses
  m.def(
      "lip_sync_loss",
      [](const DArray& f_lip, const DArray& f_a, double eps, double eps_cos) {
        return lip_sync_loss(tensor_from(f_lip), tensor_from(f_a), eps, eps_cos)
            .item<double>();
      },
      py::arg("f_lip"), py::arg("f_a"), py::arg("eps") = 1e-8,
      py::arg("eps_cos") = 1e-7);
  m.def("expression_loss", [](const DArray& a, const DArray& b) {
    return expression_loss(tensor_from(a), tensor_from(b)).item<double>();
  });
  m.def("photometric_loss", [](const DArray& a, const DArray& b) {
    return photometric_loss(tensor_from(a), tensor_from(b)).item<double>();
  });
  m.def("compute_au_weights", [](const DArray& rates) {
    return array_from(compute_au_weights(tensor_from(rates)));
  });
  m.def(
      "weighted_bce_loss",
      [](const DArray& x, const DArray& x_hat, const DArray& w, double eps) {
        return weighted_bce_loss(tensor_from(x), tensor_from(x_hat),
                                 tensor_from(w), eps)
            .item<double>();
      },
      py::arg("x"), py::arg("x_hat"), py::arg("w"), py::arg("eps") = 1e-7);
  m.def(
      "weighted_dice_loss",
      [](const DArray& x, const DArray& x_hat, const DArray& w, double eps) {
        return weighted_dice_loss(tensor_from(x), tensor_from(x_hat),
                                  tensor_from(w), eps)
            .item<double>();
      },
      py::arg("x"), py::arg("x_hat"), py::arg("w"), py::arg("eps") = 1e-7);

  // quantization
  m.def("quantize", [](const DArray& input, const DArray& book) {
    auto entries = tensor_from(book);
    VectorCodebook cb(entries.size(0), entries.size(1));
    {
      torch::NoGradGuard g;
      cb->entries.copy_(entries);
    }
    auto r = cb->quantize(tensor_from(input));
    return py::make_tuple(array_from(r.quantized), r.index);
  });

  // volume rendering
  m.def("composite", [](const DArray& sigma, const DArray& z,
                        const DArray& deltas) {
    auto r = composite(tensor_from(sigma), tensor_from(z), tensor_from(deltas));
    return py::make_tuple(array_from(r.feature), array_from(r.opacity),
                          array_from(r.weights), array_from(r.transmittance));
  });
  m.def("generate_rays", [](const DArray& rotation, const DArray& translation,
                            double fx, double fy, double cx, double cy,
                            int width, int height) {
    CameraPose pose{tensor_from(rotation), tensor_from(translation), fx, fy,
                    cx, cy};
    auto rays = generate_rays(pose, width, height);
    return py::make_tuple(array_from(rays.origins),
                          array_from(rays.directions));
  });

  // metrics
  m.def("ssim", [](const DArray& a, const DArray& b) {
    return ssim(tensor_from(a), tensor_from(b));
  });
  m.def("lmd79", [](const DArray& a, const DArray& b) {
    return lmd79(tensor_from(a), tensor_from(b));
  });
  m.def(
      "au_acc",
      [](const DArray& pred, const DArray& gt, double threshold) {
        return au_acc(tensor_from(pred), tensor_from(gt), threshold);
      },
      py::arg("pred"), py::arg("gt"), py::arg("threshold") = 0.5);

  // synthetic data
  m.def(
      "generate_dataset",
      [](const std::string& dir, uint64_t seed, int identities, int frames,
         int num_poses, int resolution) {
        SynthConfig cfg;
        cfg.identities = identities;
        cfg.frames = frames;
        cfg.num_poses = num_poses;
        cfg.resolution = resolution;
        generate_dataset(dir, seed, cfg);
      },
      py::arg("dir"), py::arg("seed") = 7, py::arg("identities") = 2,
      py::arg("frames") = 200, py::arg("num_poses") = 5,
      py::arg("resolution") = 64);
  m.def(
      "render_scene_frame",
      [](uint64_t seed, int t, int pose_index, int frames, int resolution) {
        SynthConfig cfg;
        cfg.frames = frames;
        cfg.resolution = resolution;
        auto scene = make_scene(seed, cfg);
        auto poses = dataset_poses(cfg);
        return array_from(render_gt(scene, poses.at(pose_index), t, resolution));
      },
      py::arg("seed") = 7, py::arg("t") = 0, py::arg("pose_index") = 0,
      py::arg("frames") = 200, py::arg("resolution") = 64);

  // pipeline
  py::class_<Pipeline>(m, "Pipeline")
      .def(py::init([](const std::string& config_json) {
             auto cfg = PipelineConfig::from_json(
                 nlohmann::json::parse(config_json));
             return std::make_unique<Pipeline>(cfg);
           }),
           py::arg("config_json") = "{}")
      .def("train_disentangle", &Pipeline::train_disentangle)
      .def("train_nerf", &Pipeline::train_nerf)
      .def("train_space", &Pipeline::train_space)
      .def("save_checkpoint", &Pipeline::save_checkpoint)
      .def("load_checkpoint", &Pipeline::load_checkpoint)
      .def("evaluate",
           [](Pipeline& p, const std::string& split) {
             return p.evaluate(split).dump();
           })
      .def("train_view_psnr", &Pipeline::train_view_psnr,
           py::arg("max_views") = 12)
      .def_property_readonly("stage", &Pipeline::stage)
      .def_property_readonly(
          "final_loss", [](const Pipeline& p) {
            return p.stage_losses().empty() ? 0.0 : p.stage_losses().back();
          });

  m.def("default_config_json",
        []() { return PipelineConfig().to_json().dump(); });
}
