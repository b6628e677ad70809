#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "omniflow/dataset_stats.hpp"
#include "omniflow/error.hpp"
#include "omniflow/sphere_geometry.hpp"
#include "test_support.hpp"

using namespace omniflow;
using omniflow::testing::power_law_image;
using omniflow::testing::random_flow;
using omniflow::testing::random_image;
using omniflow::testing::uniform_flow;

namespace {

Image scaled(const Image& img, float s) {
  Image out = img;
  for (float& v : out.samples()) v *= s;
  return out;
}

Image shifted(const Image& img, int k) {
  Image out(img.width(), img.height(), img.channels());
  const int w = img.width();
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < img.channels(); ++c) out.at((x + k) % w, y, c) = img.at(x, y, c);
  return out;
}

}  // namespace

TEST(Histogram, EdgesClampingAndMerge) {
  Histogram h = Histogram::linear(0.0, 4.0, 4);
  h.add(-10.0);
  h.add(0.0);
  h.add(3.999);
  h.add(4.0);
  h.add(NAN);
  EXPECT_EQ(h.counts(), (std::vector<std::uint64_t>{2, 0, 0, 2}));
  EXPECT_EQ(h.total(), 4u);
  EXPECT_EQ(h.invalid(), 1u);
  Histogram g = Histogram::linear(0.0, 4.0, 4);
  g.add(1.5, 3);
  Histogram gh = g, hg = h;
  gh.merge(h);
  hg.merge(g);
  EXPECT_EQ(gh.counts(), hg.counts());
  EXPECT_EQ(gh.mode_bin(), 1);
  EXPECT_THROW(h.merge(Histogram::linear(0.0, 5.0, 4)), ArgumentError);
  EXPECT_THROW(Histogram({1.0, 1.0}), ArgumentError);
}

TEST(Luminance, Oracles) {
  const Image black(16, 8, 3, 0.0f);
  const Histogram hb = luminance_histogram(std::span(&black, 1));
  EXPECT_EQ(hb.counts()[0], 128u);
  EXPECT_EQ(hb.total(), 128u);

  Image half(16, 8, 1, 0.0f);
  for (int y = 0; y < 8; ++y)
    for (int x = 8; x < 16; ++x) half.at(x, y) = 255.0f;
  const std::vector<double> n = luminance_histogram(std::span(&half, 1)).normalized();
  EXPECT_EQ(n[0], 0.5);
  EXPECT_EQ(n[255], 0.5);

  const std::vector<Image> noise{random_image(32, 16, 3, 1), random_image(32, 16, 3, 2)};
  const std::vector<double> m = luminance_histogram(noise).normalized();
  EXPECT_NEAR(std::accumulate(m.begin(), m.end(), 0.0), 1.0, 1e-12);
  EXPECT_THROW(luminance_histogram(std::span<const Image>{}), EmptyInputError);
}

TEST(Luminance, LumaWeights) {
  Image px(1, 1, 3);
  px.at(0, 0, 0) = 100;
  px.at(0, 0, 1) = 50;
  px.at(0, 0, 2) = 200;
  EXPECT_NEAR(to_gray(px).at(0, 0), 0.299 * 100 + 0.587 * 50 + 0.114 * 200, 1e-4);
}

TEST(Spectrum, WhiteNoiseIsFlat) {
  std::vector<Image> frames;
  for (int k = 0; k < 4; ++k) frames.push_back(random_image(256, 256, 1, 10 + k));
  const PowerSpectrum ps = power_spectrum_slope(frames);
  EXPECT_EQ(ps.crop_size, 256);
  EXPECT_EQ(ps.frames, 4);
  EXPECT_NEAR(ps.slope, 0.0, 0.15);
}

TEST(Spectrum, PowerLawFieldHasSlopeMinusTwo) {
  const std::vector<Image> frames{power_law_image(512, 2.0, 1), power_law_image(512, 2.0, 2)};
  const PowerSpectrum ps = power_spectrum_slope(frames);
  EXPECT_EQ(ps.crop_size, 512);
  EXPECT_EQ(ps.fit_low, 4.0);
  EXPECT_EQ(ps.fit_high, 64.0);
  EXPECT_NEAR(ps.slope, -2.0, 0.15);
}

TEST(Spectrum, CropSizeSelection) {
  EXPECT_EQ(spectrum_crop_size(1024, 512), 512);
  EXPECT_EQ(spectrum_crop_size(400, 200), 128);
  EXPECT_EQ(spectrum_crop_size(64, 32), 32);
  EXPECT_THROW(SpectrumAccumulator(48), ArgumentError);
  SpectrumAccumulator acc(64);
  EXPECT_THROW(acc.add(Image(32, 32, 1)), ShapeError);
  EXPECT_THROW(acc.result(), EmptyInputError);
}

TEST(Spectrum, SlopeInvariantToIntensityScale) {
  const Image img = power_law_image(128, 2.0, 5);
  const PowerSpectrum a = power_spectrum_slope(std::span(&img, 1));
  const Image img4 = scaled(img, 4.0f);
  const PowerSpectrum b = power_spectrum_slope(std::span(&img4, 1));
  EXPECT_NEAR(a.slope, b.slope, 1e-12);
  EXPECT_NEAR(b.intercept - a.intercept, std::log10(16.0), 1e-12);
}

TEST(Spectrum, MergeMatchesSequential) {
  const Image a = power_law_image(64, 2.0, 7), b = power_law_image(64, 2.0, 8);
  SpectrumAccumulator seq(64), left(64), right(64);
  seq.add(a);
  seq.add(b);
  left.add(a);
  right.add(b);
  left.merge(right);
  EXPECT_EQ(seq.result().power, left.result().power);
  EXPECT_THROW(left.merge(SpectrumAccumulator(32)), ArgumentError);
}

TEST(Derivatives, GaussianKurtosisIsThree) {
  std::mt19937_64 gen(99);
  std::normal_distribution<double> n01(0.0, 1.0);
  Image frame(1024, 1024, 1);
  for (float& v : frame.samples()) v = static_cast<float>(n01(gen));
  const DerivativeStats s = derivative_kurtosis(std::span(&frame, 1), DerivativeAxis::spatial_x);
  EXPECT_GE(s.moments.count(), 1000000u);
  ASSERT_TRUE(s.kurtosis().has_value());
  EXPECT_NEAR(*s.kurtosis(), 3.0, 0.2);
}

TEST(Derivatives, ConstantFramesAreDegenerate) {
  const std::vector<Image> frames(3, Image(32, 16, 1, 77.0f));
  for (DerivativeAxis axis :
       {DerivativeAxis::spatial_x, DerivativeAxis::spatial_y, DerivativeAxis::temporal}) {
    const DerivativeStats s = derivative_kurtosis(frames, axis);
    EXPECT_FALSE(s.kurtosis().has_value());
    EXPECT_EQ(s.histogram.counts()[s.histogram.bin_of(0.0)], s.histogram.total());
  }
  EXPECT_THROW(derivative_kurtosis(std::span(frames.data(), 1), DerivativeAxis::temporal),
               EmptyInputError);
}

TEST(Derivatives, CountsAndSeamWrap) {
  Image ramp(8, 4, 1);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 8; ++x) ramp.at(x, y) = static_cast<float>(x);
  const DerivativeStats sx = derivative_kurtosis(std::span(&ramp, 1), DerivativeAxis::spatial_x);
  EXPECT_EQ(sx.histogram.total(), 32u);
  EXPECT_EQ(sx.histogram.counts()[sx.histogram.bin_of(1.0)], 28u);
  EXPECT_EQ(sx.histogram.counts()[sx.histogram.bin_of(-7.0)], 4u);
  const DerivativeStats sy = derivative_kurtosis(std::span(&ramp, 1), DerivativeAxis::spatial_y);
  EXPECT_EQ(sy.histogram.total(), 24u);
}

TEST(Derivatives, HorizontalShiftInvariance) {
  const Image img = random_image(64, 32, 1, 4);
  const Image moved = shifted(img, 13);
  const Histogram a = luminance_histogram(std::span(&img, 1));
  const Histogram b = luminance_histogram(std::span(&moved, 1));
  EXPECT_EQ(a.counts(), b.counts());
  const DerivativeStats da = derivative_kurtosis(std::span(&img, 1), DerivativeAxis::spatial_x);
  const DerivativeStats db = derivative_kurtosis(std::span(&moved, 1), DerivativeAxis::spatial_x);
  EXPECT_EQ(da.histogram.counts(), db.histogram.counts());
}

TEST(FlowStatistics, UniformDiagonal) {
  const FlowField f = uniform_flow(16, 8, 1.0f, 1.0f);
  const FlowStats s = flow_statistics(std::span(&f, 1));
  EXPECT_EQ(s.direction.total(), 128u);
  EXPECT_EQ(s.direction.counts()[s.direction.bin_of(kPi / 4)], 128u);
  EXPECT_EQ(s.speed.counts()[s.speed.bin_of(std::sqrt(2.0))], 128u);
  EXPECT_EQ(s.u.counts()[s.u.bin_of(1.0)], 128u);
  EXPECT_EQ(s.undefined_direction, 0u);
  EXPECT_FALSE(s.du.kurtosis().has_value());
}

TEST(FlowStatistics, ZeroFlowHasNoDirection) {
  const FlowField f(16, 8);
  const FlowStats s = flow_statistics(std::span(&f, 1));
  EXPECT_EQ(s.speed.counts()[0], 128u);
  EXPECT_EQ(s.direction.total(), 0u);
  EXPECT_EQ(s.undefined_direction, 128u);
  EXPECT_THROW(flow_statistics(std::span<const FlowField>{}), EmptyInputError);
}

TEST(FlowStatistics, InvalidVectorsAreCounted) {
  FlowField f = uniform_flow(4, 2, 2.0f, 0.0f);
  f.u(1, 1) = NAN;
  const FlowStats s = flow_statistics(std::span(&f, 1));
  EXPECT_EQ(s.invalid, 1u);
  EXPECT_EQ(s.u.total(), 7u);
  EXPECT_EQ(s.speed.total() + s.invalid, 8u);
}

TEST(FlowStatistics, MirroredCorpusIsSymmetric) {
  const FlowField f = random_flow(64, 32, 10.0, 3);
  FlowField g(64, 32);
  for (std::size_t i = 0; i < f.size(); ++i) {
    g.u_plane()[i] = -f.u_plane()[i];
    g.v_plane()[i] = -f.v_plane()[i];
  }
  const std::vector<FlowField> corpus{f, g};
  const FlowStats s = flow_statistics(corpus);
  const auto& c = s.direction.counts();
  const std::size_t half = c.size() / 2;
  std::uint64_t diff = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::uint64_t other = c[(i + half) % c.size()];
    diff += c[i] > other ? c[i] - other : other - c[i];
  }
  // Angles landing exactly on a bin edge may round to either neighbour.
  EXPECT_LE(diff, 4u);
  EXPECT_EQ(s.direction.total(), 2u * 64u * 32u);
}

TEST(FlowStatistics, MergeIsExact) {
  const FlowField a = random_flow(32, 16, 5, 1), b = random_flow(32, 16, 5, 2);
  const std::vector<FlowField> both{a, b};
  const FlowStats all = flow_statistics(both);
  FlowStats left = flow_statistics(std::span(&a, 1));
  left.merge(flow_statistics(std::span(&b, 1)));
  EXPECT_EQ(all.u.counts(), left.u.counts());
  EXPECT_EQ(all.speed.counts(), left.speed.counts());
  EXPECT_EQ(all.direction.counts(), left.direction.counts());
  EXPECT_EQ(all.du.histogram.counts(), left.du.histogram.counts());
  EXPECT_EQ(all.du.moments.count(), left.du.moments.count());
  EXPECT_NEAR(*all.du.kurtosis(), *left.du.kurtosis(), 1e-12);
}
