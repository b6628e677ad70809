#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "omniflow/raster.hpp"
#include "omniflow/sphere_geometry.hpp"

namespace omniflow {

// ---------------------------------------------------------------------------
// Rotational augmentation
// ---------------------------------------------------------------------------

/// v1: the left stream is never rotated. v2: a fair coin picks the
/// unrotated side for every sample.
enum class Strategy { v1, v2 };

/// Accepts "v1"/"v2"; throws ArgumentError otherwise.
Strategy parse_strategy(std::string_view name);
std::string_view strategy_name(Strategy s);

struct EulerAngles {
  double pitch = 0.0;
  double roll = 0.0;
  double yaw = 0.0;

  bool is_zero() const { return pitch == 0.0 && roll == 0.0 && yaw == 0.0; }
  Rotation3 rotation() const { return Rotation3::from_euler(pitch, roll, yaw); }
  friend bool operator==(const EulerAngles&, const EulerAngles&) = default;
};

struct AugmentationPair {
  Strategy strategy = Strategy::v1;
  EulerAngles left;
  EulerAngles right;

  Rotation3 left_rotation() const { return left.rotation(); }
  Rotation3 right_rotation() const { return right.rotation(); }
  friend bool operator==(const AugmentationPair&, const AugmentationPair&) = default;
};

/// Draws on the rotating side must have max(|pitch|, |roll|, |yaw|) >= this.
inline constexpr double kMinAugmentationAngle = 0.05;

/// splitmix64 finaliser; used to derive independent per-sample streams.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Angles uniform in [-pi, pi) on the rotating side; deterministic in seed.
AugmentationPair sample_augmentation(Strategy strategy, std::uint64_t seed);

/// Element i equals sample_augmentation(strategy, derive_seed(seed, i)), so
/// any slice can be regenerated independently.
std::vector<AugmentationPair> sample_augmentations(Strategy strategy, std::uint64_t seed,
                                                   std::size_t count);

// ---------------------------------------------------------------------------
// Latents and losses
// ---------------------------------------------------------------------------

/// Projector/predictor output. Finite, dimension >= 2.
class LatentVector {
 public:
  LatentVector() = default;
  explicit LatentVector(std::vector<double> values);

  std::size_t dim() const { return v_.size(); }
  double operator[](std::size_t i) const { return v_[i]; }
  std::span<const double> values() const { return v_; }

  friend bool operator==(const LatentVector&, const LatentVector&) = default;

 private:
  std::vector<double> v_;
};

/// Negative cosine similarity -(p/|p|).(z/|z|), in [-1, 1].
/// Throws ArgumentError for a zero vector or mismatched dimensions.
double cosine_distance(const LatentVector& p, const LatentVector& z);

/// Gradient of cosine_distance with respect to p (z held fixed).
std::vector<double> cosine_distance_grad(const LatentVector& p, const LatentVector& z);

/// Symmetrised similarity loss with stop-gradient targets.
///
/// The z arguments are treated as constants: their gradient entries are
/// zero vectors by construction.
struct SimilarityLoss {
  double value = 0.0;
  std::vector<double> grad_p_left;
  std::vector<double> grad_p_right;
  std::vector<double> grad_z_left;
  std::vector<double> grad_z_right;
};

SimilarityLoss symmetrized_similarity_loss(const LatentVector& p_left, const LatentVector& z_right,
                                           const LatentVector& p_right,
                                           const LatentVector& z_left);

/// gamma^(n-i) for i = 1..n; the final prediction has weight exactly 1.
std::vector<double> sequence_weights(std::size_t n, double gamma = 0.8);

struct SequenceLoss {
  double value = 0.0;
  std::vector<double> per_prediction;  // unweighted mean L1 of each prediction
  std::vector<FlowField> grads;        // d value / d prediction, per prediction
};

/// Weighted L1 sequence loss against the ground truth rotated by r.
/// The per-prediction term is the mean absolute difference over all pixels
/// and both channels.
SequenceLoss sequence_flow_loss(std::span<const FlowField> predictions, const FlowField& gt,
                                const Rotation3& r, double gamma = 0.8);

/// Same loss against an already rotated target.
SequenceLoss sequence_flow_loss_rotated(std::span<const FlowField> predictions,
                                        const FlowField& rotated_gt, double gamma = 0.8);

/// Throws ArgumentError on non-finite input.
double hybrid_loss(double similarity, double flow);

struct CollapseReport {
  std::vector<double> channel_std;  // of l2-normalised latents
  double mean_std = 0.0;
  double reference = 0.0;  // 1/sqrt(d)
  bool collapsed = false;  // mean_std below 1% of the reference
};

/// Throws EmptyInputError for fewer than two latents.
CollapseReport collapse_monitor(std::span<const LatentVector> latents);

// ---------------------------------------------------------------------------
// Encoder plug-in boundary
// ---------------------------------------------------------------------------

struct EncoderOutput {
  std::vector<FlowField> flows;  // refinement sequence, last is final
  LatentVector latent;
};

/// A frame pair goes in; `iterations` flow fields and one latent come out.
struct Encoder {
  int iterations = 0;
  std::function<EncoderOutput(const Image& first, const Image& second)> run;
};

/// Throws ShapeError / ArgumentError when an output violates the contract.
void check_encoder_output(const EncoderOutput& out, int iterations, int width, int height);

}  // namespace omniflow
