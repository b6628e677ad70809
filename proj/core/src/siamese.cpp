#include "omniflow/siamese.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "omniflow/equirect_warp.hpp"
#include "omniflow/error.hpp"

namespace omniflow {

namespace {

// Uniform double in [0, 1) from the top 53 bits; independent of the
// standard library's distribution implementations.
double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

EulerAngles draw_rotation(std::mt19937_64& gen) {
  for (;;) {
    EulerAngles a;
    a.pitch = -kPi + kTwoPi * unit_uniform(gen);
    a.roll = -kPi + kTwoPi * unit_uniform(gen);
    a.yaw = -kPi + kTwoPi * unit_uniform(gen);
    const double largest = std::max({std::abs(a.pitch), std::abs(a.roll), std::abs(a.yaw)});
    if (largest >= kMinAugmentationAngle) return a;
  }
}

double l2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

void require_compatible(const LatentVector& p, const LatentVector& z) {
  if (p.dim() != z.dim()) throw ArgumentError("latent dimensions differ");
  if (p.dim() == 0) throw ArgumentError("latent vectors must not be empty");
}

}  // namespace

Strategy parse_strategy(std::string_view name) {
  if (name == "v1") return Strategy::v1;
  if (name == "v2") return Strategy::v2;
  throw ArgumentError("unknown augmentation strategy '" + std::string(name) + "'");
}

std::string_view strategy_name(Strategy s) { return s == Strategy::v1 ? "v1" : "v2"; }

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ (stream * 0xD1B54A32D192ED03ULL + 1));
}

AugmentationPair sample_augmentation(Strategy strategy, std::uint64_t seed) {
  std::mt19937_64 gen(splitmix64(seed));
  AugmentationPair pair;
  pair.strategy = strategy;
  bool rotate_left = false;
  if (strategy == Strategy::v2) rotate_left = (gen() >> 63) != 0;
  const EulerAngles r = draw_rotation(gen);
  (rotate_left ? pair.left : pair.right) = r;
  return pair;
}

std::vector<AugmentationPair> sample_augmentations(Strategy strategy, std::uint64_t seed,
                                                   std::size_t count) {
  std::vector<AugmentationPair> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back(sample_augmentation(strategy, derive_seed(seed, i)));
  }
  return out;
}

LatentVector::LatentVector(std::vector<double> values) : v_(std::move(values)) {
  if (v_.size() < 2) throw ArgumentError("latent vectors need dimension >= 2");
  for (double x : v_) {
    if (!std::isfinite(x)) throw ArgumentError("latent vectors must be finite");
  }
}

double cosine_distance(const LatentVector& p, const LatentVector& z) {
  require_compatible(p, z);
  double pz = 0.0, pp = 0.0, zz = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    pz += p[i] * z[i];
    pp += p[i] * p[i];
    zz += z[i] * z[i];
  }
  if (pp == 0.0 || zz == 0.0) throw ArgumentError("cosine distance of a zero vector");
  // sqrt(pp * zz) rather than |p| * |z|: exact for p == z.
  return -std::clamp(pz / std::sqrt(pp * zz), -1.0, 1.0);
}

std::vector<double> cosine_distance_grad(const LatentVector& p, const LatentVector& z) {
  require_compatible(p, z);
  const double np = l2(p.values());
  const double nz = l2(z.values());
  if (np == 0.0 || nz == 0.0) throw ArgumentError("cosine distance of a zero vector");
  double pz = 0.0;
  for (std::size_t i = 0; i < p.dim(); ++i) pz += p[i] * z[i];
  std::vector<double> g(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    g[i] = -(z[i] / (np * nz) - pz * p[i] / (np * np * np * nz));
  }
  return g;
}

SimilarityLoss symmetrized_similarity_loss(const LatentVector& p_left, const LatentVector& z_right,
                                           const LatentVector& p_right,
                                           const LatentVector& z_left) {
  SimilarityLoss out;
  out.value = 0.5 * cosine_distance(p_left, z_right) + 0.5 * cosine_distance(p_right, z_left);
  out.grad_p_left = cosine_distance_grad(p_left, z_right);
  out.grad_p_right = cosine_distance_grad(p_right, z_left);
  for (double& g : out.grad_p_left) g *= 0.5;
  for (double& g : out.grad_p_right) g *= 0.5;
  // Stop-gradient: targets are constants.
  out.grad_z_left.assign(z_left.dim(), 0.0);
  out.grad_z_right.assign(z_right.dim(), 0.0);
  return out;
}

std::vector<double> sequence_weights(std::size_t n, double gamma) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = std::pow(gamma, static_cast<double>(n - 1 - i));
  return w;
}

SequenceLoss sequence_flow_loss_rotated(std::span<const FlowField> predictions,
                                        const FlowField& target, double gamma) {
  if (predictions.empty()) throw EmptyInputError("sequence loss needs at least one prediction");
  const std::vector<double> w = sequence_weights(predictions.size(), gamma);
  const double terms = 2.0 * static_cast<double>(target.size());
  if (terms == 0.0) throw EmptyInputError("sequence loss over an empty field");
  SequenceLoss out;
  for (std::size_t k = 0; k < predictions.size(); ++k) {
    const FlowField& f = predictions[k];
    if (f.width() != target.width() || f.height() != target.height()) {
      throw ShapeError("prediction shape does not match ground truth");
    }
    FlowField g(f.width(), f.height());
    double sum = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double du = static_cast<double>(f.u_plane()[i]) - target.u_plane()[i];
      const double dv = static_cast<double>(f.v_plane()[i]) - target.v_plane()[i];
      sum += std::abs(du) + std::abs(dv);
      const double scale = w[k] / terms;
      g.u_plane()[i] = static_cast<float>(scale * ((du > 0) - (du < 0)));
      g.v_plane()[i] = static_cast<float>(scale * ((dv > 0) - (dv < 0)));
    }
    out.per_prediction.push_back(sum / terms);
    out.grads.push_back(std::move(g));
  }
  for (std::size_t k = 0; k < w.size(); ++k) out.value += w[k] * out.per_prediction[k];
  return out;
}

SequenceLoss sequence_flow_loss(std::span<const FlowField> predictions, const FlowField& gt,
                                const Rotation3& r, double gamma) {
  if (predictions.empty()) throw EmptyInputError("sequence loss needs at least one prediction");
  const WarpMap w = build_warp_map(r, gt.width(), gt.height());
  return sequence_flow_loss_rotated(predictions, warp_flow(gt, w, r), gamma);
}

double hybrid_loss(double similarity, double flow) {
  if (!std::isfinite(similarity) || !std::isfinite(flow)) {
    throw ArgumentError("hybrid loss terms must be finite");
  }
  return similarity + flow;
}

CollapseReport collapse_monitor(std::span<const LatentVector> latents) {
  if (latents.size() < 2) throw EmptyInputError("collapse monitor needs at least two latents");
  const std::size_t d = latents[0].dim();
  std::vector<std::vector<double>> unit;
  unit.reserve(latents.size());
  for (const LatentVector& z : latents) {
    if (z.dim() != d) throw ArgumentError("latent dimensions differ");
    const double n = l2(z.values());
    if (n == 0.0) throw ArgumentError("cannot normalise a zero latent");
    std::vector<double> u(d);
    for (std::size_t i = 0; i < d; ++i) u[i] = z[i] / n;
    unit.push_back(std::move(u));
  }
  CollapseReport out;
  out.channel_std.resize(d);
  const double count = static_cast<double>(unit.size());
  for (std::size_t c = 0; c < d; ++c) {
    // Shifted-data variance: exact zero when every sample is identical.
    const double shift = unit[0][c];
    double s1 = 0.0, s2 = 0.0;
    for (const auto& u : unit) {
      const double x = u[c] - shift;
      s1 += x;
      s2 += x * x;
    }
    const double var = std::max(0.0, (s2 - s1 * s1 / count) / count);
    out.channel_std[c] = std::sqrt(var);
    out.mean_std += out.channel_std[c];
  }
  out.mean_std /= static_cast<double>(d);
  out.reference = 1.0 / std::sqrt(static_cast<double>(d));
  out.collapsed = out.mean_std < 0.01 * out.reference;
  return out;
}

void check_encoder_output(const EncoderOutput& out, int iterations, int width, int height) {
  if (static_cast<int>(out.flows.size()) != iterations) {
    throw ArgumentError("encoder returned " + std::to_string(out.flows.size()) +
                        " flow fields, declared " + std::to_string(iterations));
  }
  for (const FlowField& f : out.flows) {
    if (f.width() != width || f.height() != height) {
      throw ShapeError("encoder flow field does not match the input frames");
    }
  }
  if (out.latent.dim() < 2) throw ArgumentError("encoder latent must have dimension >= 2");
}

}  // namespace omniflow
