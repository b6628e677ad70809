#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "omniflow/error.hpp"
#include "omniflow/toy_encoder.hpp"
#include "test_support.hpp"

using namespace omniflow;
using omniflow::testing::random_flow;
using omniflow::testing::random_image;

namespace {

// Smooth periodic texture plus a little noise, shifted by `dx` columns.
Image texture(int w, int h, double dx, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> n(-2.0, 2.0);
  Image img(w, h, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double t = kTwoPi * (x - dx) / w;
      img.at(x, y) = static_cast<float>(128 + 60 * std::sin(t) + 25 * std::cos(2 * t + 0.7 * y) +
                                        n(gen));
    }
  }
  return img;
}

PipelineInputs tiny_inputs() {
  // gt is deliberately far from anything the toy head predicts so the L1
  // terms stay away from their kinks.
  PipelineInputs in{texture(16, 8, 0.0, 1), texture(16, 8, 0.6, 2), random_flow(16, 8, 1.0, 3)};
  for (float& u : in.gt.u_plane()) u += 20.0f;
  for (float& v : in.gt.v_plane()) v -= 15.0f;
  return in;
}

void expect_relative(double got, double want, double tol, const std::string& what) {
  EXPECT_LE(std::abs(got - want), tol * std::max(std::abs(want), 1e-3))
      << what << ": analytic " << got << " vs numeric " << want;
}

}  // namespace

TEST(ToyEncoder, SequenceLengthAndShape) {
  const ToyEncoder enc(8);
  const Image a = texture(64, 32, 0.0, 4), b = texture(64, 32, 1.0, 5);
  const EncoderOutput out = enc(a, b);
  EXPECT_EQ(out.flows.size(), static_cast<std::size_t>(ToyEncoder::kIterations));
  EXPECT_EQ(out.latent.dim(), 8u);
  EXPECT_NO_THROW(check_encoder_output(out, ToyEncoder::kIterations, 64, 32));
  const Encoder e = enc.as_encoder();
  EXPECT_EQ(e.iterations, ToyEncoder::kIterations);
  EXPECT_EQ(e.run(a, b).latent, out.latent);
}

TEST(ToyEncoder, IdenticalFramesGiveZeroFlow) {
  const ToyEncoder enc;
  const Image a = random_image(32, 16, 3, 6);
  const EncoderOutput out = enc(a, a);
  for (const FlowField& f : out.flows) {
    for (float u : f.u_plane()) EXPECT_NEAR(u, 0.0f, 1e-6f);
    for (float v : f.v_plane()) EXPECT_NEAR(v, 0.0f, 1e-6f);
  }
}

TEST(ToyEncoder, MovingTextureGivesNonzeroFlow) {
  const ToyEncoder enc;
  const EncoderOutput out = enc(texture(64, 32, 0.0, 7), texture(64, 32, 1.0, 7));
  double mean_u = 0.0;
  for (float u : out.flows.back().u_plane()) mean_u += u;
  mean_u /= static_cast<double>(out.flows.back().size());
  EXPECT_GT(mean_u, 0.1);
}

TEST(ToyEncoder, DeterministicAndValidated) {
  const ToyEncoder enc(6, {}, 11);
  const Image a = texture(32, 16, 0.0, 8), b = texture(32, 16, 0.5, 9);
  EXPECT_EQ(enc(a, b).latent, enc(a, b).latent);
  EXPECT_NE(ToyEncoder(6, {}, 12)(a, b).latent, enc(a, b).latent);
  EXPECT_THROW(enc(a, texture(64, 32, 0, 1)), ShapeError);
  EXPECT_THROW(enc(Image(24, 12, 1), Image(24, 12, 1)), ShapeError);
  EXPECT_THROW(ToyEncoder(1), ArgumentError);
}

TEST(Predictor, FlattenRoundTrip) {
  Predictor p = Predictor::random(5, 3);
  EXPECT_EQ(p.parameter_count(), 2u * 25u + 2u * 5u);
  const std::vector<double> flat = p.flatten();
  Predictor q = Predictor::random(5, 4);
  q.assign(flat);
  const LatentVector z({0.1, -0.2, 0.3, 0.4, -0.5});
  EXPECT_EQ(p.apply(z), q.apply(z));
  EXPECT_THROW(q.assign(std::span(flat.data(), 3)), ArgumentError);
}

TEST(Pipeline, IdentityRotationsAgree) {
  const ToyEncoder enc(8);
  const Predictor pred = Predictor::random(8, 1);
  const PipelineInputs in = tiny_inputs();
  const PipelineResult r = siamese_pipeline(enc, enc.params(), pred, in, AugmentationPair{});
  EXPECT_EQ(r.z_left, r.z_right);
  EXPECT_EQ(r.p_left, r.p_right);
  EXPECT_EQ(symmetrized_similarity_loss(r.z_left, r.z_right, r.z_right, r.z_left).value, -1.0);
  EXPECT_EQ(r.similarity, cosine_distance(r.p_left, r.z_right));
  EXPECT_EQ(r.loss, r.similarity + r.flow);
}

TEST(Pipeline, GradientMatchesFiniteDifferences) {
  const ToyEncoder enc(6);
  const Predictor pred = Predictor::random(6, 2);
  const PipelineInputs in = tiny_inputs();
  const FlowHeadParams params{0.45, 0.3};
  for (Strategy s : {Strategy::v1, Strategy::v2}) {
    const AugmentationPair aug = sample_augmentation(s, 17);
    const PipelineResult r = siamese_pipeline(enc, params, pred, in, aug);
    EXPECT_NE(r.similarity, -1.0);

    // sg(z): the targets stay at their unperturbed values.
    const FrozenTargets frozen{r.z_left, r.z_right};
    auto loss_at = [&](FlowHeadParams p, const Predictor& h) {
      return siamese_pipeline(enc, p, h, in, aug, 0.8, &frozen).loss;
    };
    const double eps = 1e-6;
    {
      FlowHeadParams hi = params, lo = params;
      hi.step += eps;
      lo.step -= eps;
      expect_relative(r.grad.step, (loss_at(hi, pred) - loss_at(lo, pred)) / (2 * eps), 1e-4,
                      "step");
    }
    {
      FlowHeadParams hi = params, lo = params;
      hi.damping += eps;
      lo.damping -= eps;
      expect_relative(r.grad.damping, (loss_at(hi, pred) - loss_at(lo, pred)) / (2 * eps), 1e-4,
                      "damping");
    }
    const std::vector<double> flat = pred.flatten();
    ASSERT_EQ(r.grad.predictor.size(), flat.size());
    for (std::size_t i = 0; i < flat.size(); i += 3) {
      std::vector<double> up = flat, dn = flat;
      up[i] += eps;
      dn[i] -= eps;
      Predictor hp = pred, lp = pred;
      hp.assign(up);
      lp.assign(dn);
      expect_relative(r.grad.predictor[i], (loss_at(params, hp) - loss_at(params, lp)) / (2 * eps),
                      1e-4, "predictor[" + std::to_string(i) + "]");
    }
  }
}
