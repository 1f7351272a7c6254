#include "talkfield/metrics.h"

#include <cmath>

#include "talkfield/errors.h"

namespace talkfield {

namespace {

constexpr int kWin = 11;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::vector<double> gaussian_kernel() {
  std::vector<double> k(kWin);
  double sum = 0;
  for (int i = 0; i < kWin; ++i) {
    double d = i - (kWin - 1) / 2.0;
    k[i] = std::exp(-d * d / (2 * kSigma * kSigma));
    sum += k[i];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// separable valid-mode Gaussian filter
torch::Tensor gauss_filter(const torch::Tensor& img) {
  static const std::vector<double> k = gaussian_kernel();
  auto kern = torch::tensor(k, torch::kFloat64);
  auto x = img.unsqueeze(0).unsqueeze(0);
  auto kh = kern.reshape({1, 1, 1, kWin});
  auto kv = kern.reshape({1, 1, kWin, 1});
  x = torch::conv2d(x, kh);
  x = torch::conv2d(x, kv);
  return x.squeeze(0).squeeze(0);
}

}  // namespace

double ssim(const torch::Tensor& a, const torch::Tensor& b) {
  if (a.dim() != 2 || a.sizes() != b.sizes()) {
    throw DimensionError("ssim: images must be equal-shape (H,W)");
  }
  if (a.size(0) < kWin || a.size(1) < kWin) {
    throw DimensionError("ssim: images smaller than the filter window");
  }
  auto x = a.detach().to(torch::kFloat64);
  auto y = b.detach().to(torch::kFloat64);

  auto mu_x = gauss_filter(x);
  auto mu_y = gauss_filter(y);
  auto var_x = gauss_filter(x * x) - mu_x * mu_x;
  auto var_y = gauss_filter(y * y) - mu_y * mu_y;
  auto cov = gauss_filter(x * y) - mu_x * mu_y;

  auto num = (2 * mu_x * mu_y + kC1) * (2 * cov + kC2);
  auto den = (mu_x * mu_x + mu_y * mu_y + kC1) * (var_x + var_y + kC2);
  return (num / den).mean().item<double>();
}

double ssim_rgb(const torch::Tensor& a, const torch::Tensor& b) {
  if (a.dim() != 3 || a.size(0) != 3 || a.sizes() != b.sizes()) {
    throw DimensionError("ssim_rgb: images must be equal-shape (3,H,W)");
  }
  return ssim(a.mean(0), b.mean(0));
}

double lmd79(const torch::Tensor& a, const torch::Tensor& b) {
  if (a.dim() != 2 || a.size(0) != 79 || a.size(1) != 2 ||
      b.sizes() != a.sizes()) {
    throw DimensionError("lmd79: landmark sets must be (79,2)");
  }
  auto d = (a.to(torch::kFloat64) - b.to(torch::kFloat64)).pow(2).sum(-1).sqrt();
  return d.mean().item<double>();
}

double au_acc(const torch::Tensor& pred, const torch::Tensor& gt,
              double threshold) {
  if (pred.dim() != 1 || pred.sizes() != gt.sizes()) {
    throw DimensionError("au_acc: prediction/label lengths differ");
  }
  auto g = gt.to(torch::kFloat64);
  auto binary = (g == 0.0) | (g == 1.0);
  if (!torch::all(binary).item<bool>()) {
    throw ArgumentError("au_acc: ground-truth labels must be binary");
  }
  auto hits = ((pred.to(torch::kFloat64) >= threshold) == (g >= 0.5));
  return hits.to(torch::kFloat64).mean().item<double>();
}

double syncnet_confidence(SyncNet net, const std::vector<torch::Tensor>& frames,
                          const std::vector<torch::Tensor>& audio) {
  if (frames.empty() || frames.size() != audio.size()) {
    throw ArgumentError("syncnet_confidence: need equal-length nonempty lists");
  }
  torch::NoGradGuard no_grad;
  auto f = net->embed_faces(torch::stack(frames));
  auto a = net->embed_audio(torch::stack(audio));
  auto cos = (f * a).sum(-1) /
             torch::clamp_min(f.norm(2, -1) * a.norm(2, -1), 1e-8);
  return cos.mean().item<double>();
}

}  // namespace talkfield
