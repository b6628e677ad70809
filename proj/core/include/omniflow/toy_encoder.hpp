#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "omniflow/raster.hpp"
#include "omniflow/siamese.hpp"

namespace omniflow {

/// Trainable scalars of the toy flow head.
struct FlowHeadParams {
  double step = 0.5;
  double damping = 0.25;
};

/// Two-layer predictor h(z) = W2 tanh(W1 z + b1) + b2 with d-d-d widths.
struct Predictor {
  int dim = 0;
  std::vector<double> w1, b1, w2, b2;  // row-major d x d matrices

  static Predictor random(int dim, std::uint64_t seed);

  LatentVector apply(const LatentVector& z) const;

  std::size_t parameter_count() const { return w1.size() + b1.size() + w2.size() + b2.size(); }
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);
};

/// Deterministic stand-in for a learned flow network and projector.
///
/// Flow head: the 2x2 block-averaged frame difference drives a normal-flow
/// estimate c = -dI * grad(I0) / (|grad(I0)|^2 + eps); four damped updates
/// u_k = (1 - step*damping) u_{k-1} + step * c produce the sequence.
/// Projector: the final flow is lifted to sphere motion, block-pooled to
/// 8x16 cells and multiplied by a fixed random matrix.
class ToyEncoder {
 public:
  static constexpr int kIterations = 4;
  static constexpr int kPooledHeight = 8;
  static constexpr int kPooledWidth = 16;
  static constexpr int kFeatures = 3 * kPooledHeight * kPooledWidth;

  explicit ToyEncoder(int latent_dim = 8, FlowHeadParams params = {},
                      std::uint64_t projection_seed = 7);

  int latent_dim() const { return dim_; }
  const FlowHeadParams& params() const { return params_; }
  std::span<const double> projection() const { return projection_; }

  /// Unrotated pipeline: frames -> flow sequence and projected latent.
  /// Frames must be equirectangular with height divisible by 8 and
  /// width by 16; ShapeError otherwise or if the frames differ in shape.
  EncoderOutput operator()(const Image& first, const Image& second) const;

  Encoder as_encoder() const;

 private:
  int dim_;
  FlowHeadParams params_;
  std::vector<double> projection_;  // dim x kFeatures
};

struct PipelineInputs {
  Image frame0;
  Image frame1;
  FlowField gt;  // forward flow of the unrotated pair
};

struct PipelineGradient {
  double step = 0.0;
  double damping = 0.0;
  std::vector<double> predictor;  // Predictor::flatten() order
};

struct PipelineResult {
  double loss = 0.0;
  double similarity = 0.0;
  double flow = 0.0;  // sum of both streams' sequence losses
  LatentVector z_left, z_right, p_left, p_right;
  PipelineGradient grad;
};

/// Values substituted for sg(z_left), sg(z_right) in the similarity term.
/// Evaluating the loss with the targets frozen is what the analytic
/// gradient differentiates.
struct FrozenTargets {
  LatentVector z_left;
  LatentVector z_right;
};

/// Full two-stream forward/backward pass:
///   z = P(R'(Theta(E(R(X, r))))),  p = h(z),
///   L = L_sim(p_l, sg(z_r), p_r, sg(z_l)) + L_flow(left) + L_flow(right).
/// Each stream rotates the frames by its own rotation, runs the toy flow head,
/// lifts the final flow to sphere motion, rotates it back, and projects.
/// The flow loss compares every iteration against the ground truth rotated
/// into that stream's frame. Gradients cover the flow-head scalars and every
/// predictor weight; the z targets contribute none.
PipelineResult siamese_pipeline(const ToyEncoder& encoder, const FlowHeadParams& params,
                                const Predictor& predictor, const PipelineInputs& inputs,
                                const AugmentationPair& augmentation, double gamma = 0.8,
                                const FrozenTargets* frozen = nullptr);

}  // namespace omniflow
