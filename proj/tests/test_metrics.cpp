#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "omniflow/error.hpp"
#include "omniflow/metrics.hpp"
#include "omniflow/sphere_geometry.hpp"
#include "test_support.hpp"

using namespace omniflow;
using omniflow::testing::random_flow;

namespace {

FlowField single(float u, float v) {
  FlowField f(1, 1);
  f.u(0, 0) = u;
  f.v(0, 0) = v;
  return f;
}

}  // namespace

TEST(Metrics, EndpointErrorOracles) {
  EXPECT_EQ(epe(single(3, 4), single(0, 0)), 5.0);
  FlowField pred(2, 1), gt(2, 1);
  pred.u(1, 0) = 3;
  pred.v(1, 0) = 4;
  EXPECT_EQ(epe(pred, gt), 2.5);
  const FlowField r = random_flow(16, 8, 10, 1);
  EXPECT_EQ(epe(r, r), 0.0);
}

TEST(Metrics, AngularErrorOracles) {
  EXPECT_EQ(ae(single(1, 0), single(0, 0)), std::acos(1.0 / std::sqrt(2.0)));
  EXPECT_NEAR(ae(single(1, 0), single(0, 0)), 0.78540, 5e-6);
  EXPECT_EQ(ae(single(0, 1), single(0, -1)), std::acos(0.0));
  const FlowField r = random_flow(16, 8, 10, 2);
  EXPECT_EQ(ae(r, r), 0.0);
  const FlowField big = random_flow(16, 8, 1e6, 3);
  const double a = ae(big, random_flow(16, 8, 1e6, 4));
  EXPECT_GE(a, 0.0);
  EXPECT_LE(a, kPi);
}

TEST(Metrics, DistortionWeighted) {
  const FlowField p = random_flow(16, 8, 5, 5), g = random_flow(16, 8, 5, 6);
  const DensityMap half = DensityMap::uniform(16, 8, 0.5);
  EXPECT_EQ(epe_d(p, g, half), 2.0 * epe(p, g));
  EXPECT_EQ(ae_d(p, g, half), 2.0 * ae(p, g));
  EXPECT_EQ(epe_d(g, g, half), 0.0);
  EXPECT_EQ(ae_d(g, g, half), 0.0);
  const DensityMap q = DensityMap::uniform(1, 1, 0.75);
  EXPECT_EQ(epe_d(single(1, 0), single(0, 0), q), 4.0);
  EXPECT_EQ(ae_d(single(1, 0), single(0, 0), q), 4.0 * std::acos(1.0 / std::sqrt(2.0)));
  EXPECT_NEAR(ae_d(single(1, 0), single(0, 0), q), 3.1416, 5e-5);
  EXPECT_THROW(epe_d(p, g, DensityMap::uniform(16, 8, 1.0)), ArgumentError);
  EXPECT_THROW(epe_d(p, g, DensityMap::uniform(8, 4, 0.5)), ShapeError);
}

TEST(Metrics, WeightedBoundsUnweighted) {
  const FlowField p = random_flow(64, 32, 5, 7), g = random_flow(64, 32, 5, 8);
  const DensityMap d = build_density_map(64, 32, 32);
  EXPECT_GE(epe_d(p, g, d), epe(p, g));
  EXPECT_GE(ae_d(p, g, d), ae(p, g));
}

TEST(Metrics, MaskAndValidity) {
  FlowField p(2, 1), g(2, 1);
  p.u(0, 0) = 3;
  p.v(0, 0) = 4;
  p.u(1, 0) = 100;
  const Mask m{1, 0};
  EXPECT_EQ(epe(p, g, &m), 5.0);
  g.u(0, 0) = NAN;
  EXPECT_EQ(epe(p, g), 100.0);
  const Mask none{0, 0};
  EXPECT_THROW(epe(p, g, &none), EmptyInputError);
  EXPECT_THROW(epe(p, FlowField(1, 2)), ShapeError);
  const Mask short_mask{1};
  EXPECT_THROW(epe(p, g, &short_mask), ShapeError);
}

TEST(Metrics, SpeedBinsUniform) {
  FlowField g(8, 4), p(8, 4);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.u_plane()[i] = 3.0f;
    p.u_plane()[i] = 3.0f + static_cast<float>(i % 3);
  }
  const MetricReport r = speed_binned(p, g, DensityMap::uniform(8, 4, 0.5));
  const double full = epe(p, g);
  for (SpeedRegion s : {SpeedRegion::all, SpeedRegion::below5, SpeedRegion::below10,
                        SpeedRegion::below20}) {
    ASSERT_TRUE(r.region(s).has_value());
    EXPECT_EQ(r.region(s)->epe, full);
  }
  EXPECT_FALSE(r.region(SpeedRegion::atleast20).has_value());
  EXPECT_EQ(*r.epe_d, 2.0 * full);
  EXPECT_EQ(r.region(SpeedRegion::all)->count, r.valid_pixels);
}

TEST(Metrics, SpeedBinsHandPartition) {
  FlowField g(2, 2), p(2, 2);
  // Speeds 2, 2, 30, 30 with errors 1, 1, 9, 9.
  g.u(0, 0) = 2; p.u(0, 0) = 3;
  g.v(1, 0) = 2; p.v(1, 0) = 3;
  g.u(0, 1) = 30; p.u(0, 1) = 39;
  g.v(1, 1) = -30; p.v(1, 1) = -39;
  const MetricReport r = speed_binned(p, g, DensityMap::uniform(2, 2, 0.5));
  EXPECT_EQ(r.region(SpeedRegion::below5)->epe, 1.0);
  EXPECT_EQ(r.region(SpeedRegion::atleast20)->epe, 9.0);
  EXPECT_EQ(r.region(SpeedRegion::all)->epe, 5.0);
  EXPECT_EQ(r.region(SpeedRegion::below20)->count, 2u);
  EXPECT_EQ(r.region(SpeedRegion::below10)->count, 2u);
}

TEST(Metrics, OverlappingRegionsNest) {
  const FlowField g = random_flow(64, 32, 30, 9), p = random_flow(64, 32, 30, 10);
  const MetricReport r = speed_binned(p, g, DensityMap::uniform(64, 32, 0.6));
  EXPECT_LE(r.region(SpeedRegion::below5)->count, r.region(SpeedRegion::below10)->count);
  EXPECT_LE(r.region(SpeedRegion::below10)->count, r.region(SpeedRegion::below20)->count);
  EXPECT_EQ(r.region(SpeedRegion::below20)->count + r.region(SpeedRegion::atleast20)->count,
            r.valid_pixels);
}

TEST(Metrics, PartitionRecombinesExactly) {
  const int w = 128, h = 64;
  const FlowField g = random_flow(w, h, 40, 11), p = random_flow(w, h, 40, 12);
  Mask slow(g.size()), fast(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const bool below = std::hypot(g.u_plane()[i], g.v_plane()[i]) < 20.0;
    slow[i] = below;
    fast[i] = !below;
  }
  MetricAccumulator a, b, all;
  a.add(p, g, nullptr, &slow);
  b.add(p, g, nullptr, &fast);
  all.add(p, g);
  MetricAccumulator merged_ab = a, merged_ba = b;
  merged_ab.merge(b);
  merged_ba.merge(a);
  const MetricReport global = all.report();
  EXPECT_EQ(merged_ab.report().epe, global.epe);
  EXPECT_EQ(merged_ab.report().ae, global.ae);
  EXPECT_EQ(merged_ba.report().epe, global.epe);
  EXPECT_EQ(global.epe, epe(p, g));

  const MetricReport r = speed_binned(p, g, DensityMap::uniform(w, h, 0.5));
  const auto& lo = *r.region(SpeedRegion::below20);
  const auto& hi = *r.region(SpeedRegion::atleast20);
  EXPECT_EQ(lo.epe, a.report().epe);
  EXPECT_EQ(hi.epe, b.report().epe);
  const double recombined =
      (lo.count * lo.epe + hi.count * hi.epe) / static_cast<double>(lo.count + hi.count);
  EXPECT_NEAR(recombined, global.epe, 1e-13 * global.epe);
}

TEST(Metrics, AccumulatorIsOrderIndependent) {
  std::vector<FlowField> preds, gts;
  for (int k = 0; k < 4; ++k) {
    preds.push_back(random_flow(32, 16, 8, 100 + k));
    gts.push_back(random_flow(32, 16, 8, 200 + k));
  }
  const DensityMap d = build_density_map(32, 16, 16);
  MetricAccumulator fwd, rev;
  for (int k = 0; k < 4; ++k) fwd.add(preds[k], gts[k], &d);
  for (int k = 3; k >= 0; --k) rev.add(preds[k], gts[k], &d);
  const MetricReport a = fwd.report(), b = rev.report();
  EXPECT_EQ(a.epe, b.epe);
  EXPECT_EQ(a.ae, b.ae);
  EXPECT_EQ(*a.epe_d, *b.epe_d);
  ASSERT_EQ(a.density.size(), 5u);
  std::size_t binned = 0;
  for (const auto& bin : a.density)
    if (bin.stats) binned += bin.stats->count;
  EXPECT_EQ(binned, a.valid_pixels);
  MetricAccumulator mixed;
  mixed.add(preds[0], gts[0], &d);
  EXPECT_THROW(mixed.add(preds[1], gts[1]), ArgumentError);
}

TEST(Metrics, EmptyAccumulator) {
  MetricAccumulator acc;
  EXPECT_THROW(acc.report(), EmptyInputError);
  EXPECT_THROW(MetricAccumulator({0.5, 0.5}), ArgumentError);
}
