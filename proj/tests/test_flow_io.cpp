#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>

#include "omniflow/error.hpp"
#include "omniflow/flow_io.hpp"
#include "omniflow/png_io.hpp"
#include "test_support.hpp"

using namespace omniflow;
using omniflow::testing::random_flow;
using omniflow::testing::random_image;
using omniflow::testing::TempDir;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary);
  out << bytes;
}

bool bit_equal(const FlowField& a, const FlowField& b) {
  if (a.width() != b.width() || a.height() != b.height()) return false;
  return std::memcmp(a.u_plane().data(), b.u_plane().data(), a.size() * sizeof(float)) == 0 &&
         std::memcmp(a.v_plane().data(), b.v_plane().data(), a.size() * sizeof(float)) == 0;
}

// root/<video>/{frames,flow_fw,flow_bw}, `frames` frames of 16x8.
void make_video(const fs::path& dir, int frames, bool backward = true) {
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "flow_fw");
  if (backward) fs::create_directories(dir / "flow_bw");
  for (int i = 0; i < frames; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "%04d", i);
    write_png(to_raster8(random_image(16, 8, 3, i)), dir / "frames" / (std::string(name) + ".png"));
    if (i + 1 < frames) {
      write_flo(random_flow(16, 8, 2, i), dir / "flow_fw" / (std::string(name) + ".flo"));
      if (backward) write_flo(random_flow(16, 8, 2, i), dir / "flow_bw" / (std::string(name) + ".flo"));
    }
  }
}

}  // namespace

TEST(Flo, RoundTripIsBitExact) {
  TempDir tmp;
  FlowField f = random_flow(37, 11, 50, 1);
  f.u(3, 4) = NAN;
  f.v(0, 0) = -0.0f;
  f.u(1, 1) = 1e10f;
  write_flo(f, tmp / "a.flo");
  EXPECT_TRUE(bit_equal(read_flo(tmp / "a.flo"), f));
}

TEST(Flo, TwoByOneIsTwentyEightBytes) {
  TempDir tmp;
  FlowField f(2, 1);
  f.u(0, 0) = 1.0f;
  f.v(1, 0) = -2.5f;
  write_flo(f, tmp / "t.flo");
  const std::string bytes = slurp(tmp / "t.flo");
  ASSERT_EQ(bytes.size(), 28u);
  EXPECT_EQ(bytes.substr(0, 4), "PIEH");
  // Interleaved u, v per pixel after the 12-byte header.
  float first;
  std::memcpy(&first, bytes.data() + 12, 4);
  EXPECT_EQ(first, 1.0f);
  float last;
  std::memcpy(&last, bytes.data() + 24, 4);
  EXPECT_EQ(last, -2.5f);
}

TEST(Flo, RejectsMalformedFiles) {
  TempDir tmp;
  EXPECT_THROW(read_flo(tmp / "missing.flo"), IoError);
  write_flo(random_flow(4, 3, 1, 2), tmp / "good.flo");
  std::string bytes = slurp(tmp / "good.flo");

  std::string bad = bytes;
  bad[0] = 'X';
  spit(tmp / "magic.flo", bad);
  EXPECT_THROW(read_flo(tmp / "magic.flo"), FormatError);

  spit(tmp / "short.flo", bytes.substr(0, bytes.size() - 1));
  EXPECT_THROW(read_flo(tmp / "short.flo"), FormatError);

  spit(tmp / "long.flo", bytes + "x");
  EXPECT_THROW(read_flo(tmp / "long.flo"), FormatError);

  std::string huge = bytes.substr(0, 12);
  const std::int32_t big = 1 << 30;
  std::memcpy(huge.data() + 4, &big, 4);
  spit(tmp / "huge.flo", huge);
  EXPECT_THROW(read_flo(tmp / "huge.flo"), FormatError);
}

TEST(Flo, WriteLeavesNoTemporaries) {
  TempDir tmp;
  write_flo(random_flow(8, 4, 1, 3), tmp / "x.flo");
  write_flo(random_flow(8, 4, 1, 4), tmp / "x.flo");
  EXPECT_EQ(std::distance(fs::directory_iterator(tmp.path()), fs::directory_iterator()), 1);
  EXPECT_THROW(write_flo(FlowField(2, 2), tmp / "no" / "such" / "dir.flo"), IoError);
}

TEST(Pfm, RoundTripWithNaN) {
  TempDir tmp;
  Image d = random_image(9, 5, 1, 5, 0.1f, 80.0f);
  d.at(2, 3) = NAN;
  write_depth_pfm(d, tmp / "d.pfm");
  const DepthMap back = read_depth_pfm(tmp / "d.pfm");
  ASSERT_EQ(back.depth.width(), 9);
  ASSERT_EQ(back.depth.height(), 5);
  EXPECT_EQ(std::memcmp(back.depth.samples().data(), d.samples().data(), d.samples().size() * 4), 0);
  EXPECT_EQ(back.valid[3 * 9 + 2], 0);
  EXPECT_EQ(std::count(back.valid.begin(), back.valid.end(), 1), 44);
  EXPECT_THROW(write_depth_pfm(Image(2, 2, 3), tmp / "rgb.pfm"), ShapeError);
}

TEST(Pfm, BigEndianAndRowOrder) {
  TempDir tmp;
  // Two rows, bottom row stored first: bottom = {1, 2}, top = {3, 4}.
  std::string bytes = "Pf\n2 2\n1.0\n";
  for (float v : {1.0f, 2.0f, 3.0f, 4.0f}) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    for (int s = 24; s >= 0; s -= 8) bytes.push_back(static_cast<char>((bits >> s) & 0xff));
  }
  spit(tmp / "be.pfm", bytes);
  const DepthMap m = read_depth_pfm(tmp / "be.pfm");
  EXPECT_EQ(m.depth.at(0, 0), 3.0f);
  EXPECT_EQ(m.depth.at(1, 0), 4.0f);
  EXPECT_EQ(m.depth.at(0, 1), 1.0f);
  EXPECT_EQ(m.depth.at(1, 1), 2.0f);

  spit(tmp / "color.pfm", "PF\n2 2\n-1.0\n");
  EXPECT_THROW(read_depth_pfm(tmp / "color.pfm"), FormatError);
  spit(tmp / "trunc.pfm", "Pf\n2 2\n-1.0\nabc");
  EXPECT_THROW(read_depth_pfm(tmp / "trunc.pfm"), FormatError);
}

TEST(Png, RoundTrip) {
  TempDir tmp;
  const Raster8 r = to_raster8(random_image(13, 7, 3, 9));
  write_png(r, tmp / "a.png");
  const PngInfo info = read_png_info(tmp / "a.png");
  EXPECT_EQ(info.width, 13);
  EXPECT_EQ(info.height, 7);
  EXPECT_EQ(info.channels, 3);
  const Image back = read_png(tmp / "a.png");
  for (std::size_t i = 0; i < r.samples.size(); ++i)
    EXPECT_EQ(back.samples()[i], static_cast<float>(r.samples[i]));

  Raster16 g(3, 2, 1);
  g.samples = {0, 1, 257, 65535, 1000, 2};
  write_png(g, tmp / "g.png");
  EXPECT_EQ(read_png_info(tmp / "g.png").bit_depth, 16);
  EXPECT_EQ(read_png(tmp / "g.png").at(2, 0), 1.0f);
  spit(tmp / "bad.png", "not a png");
  EXPECT_THROW(read_png(tmp / "bad.png"), FormatError);
}

TEST(RescaleFlow, ScalesUnits) {
  FlowField f = random_flow(8, 4, 3, 10);
  const FlowField same = rescale_flow(f, 8, 4);
  EXPECT_EQ(same, f);
  const FlowField up = rescale_flow(f, 16, 8);
  EXPECT_EQ(up.u(3, 5), 2.0f * f.u(1, 2));
  EXPECT_EQ(up.v(3, 5), 2.0f * f.v(1, 2));
  EXPECT_THROW(rescale_flow(f, 0, 4), ShapeError);
}

TEST(DatasetIndex, PairsFramesAndFlows) {
  TempDir tmp;
  make_video(tmp / "b_video", 4);
  make_video(tmp / "a_video", 3, false);
  const DatasetIndex idx = index_dataset(tmp.path());
  EXPECT_EQ(idx.videos, 2u);
  EXPECT_EQ(idx.frames, 7u);
  ASSERT_EQ(idx.samples.size(), idx.frames - idx.videos);
  EXPECT_EQ(idx.samples[0].video, "a_video");
  EXPECT_EQ(idx.samples[0].frame_t.filename(), "0000.png");
  EXPECT_EQ(idx.samples[0].frame_t1.filename(), "0001.png");
  EXPECT_FALSE(idx.samples[0].backward_flow.has_value());
  EXPECT_TRUE(idx.samples[2].backward_flow.has_value());
  EXPECT_TRUE(idx.warnings.empty());

  const DatasetIndex again = index_dataset(tmp.path());
  ASSERT_EQ(again.samples.size(), idx.samples.size());
  for (std::size_t i = 0; i < idx.samples.size(); ++i)
    EXPECT_EQ(again.samples[i].forward_flow, idx.samples[i].forward_flow);
}

TEST(DatasetIndex, SplitsAndErrors) {
  TempDir tmp;
  make_video(tmp / "train" / "v0", 3);
  make_video(tmp / "test" / "v1", 2);
  const DatasetIndex idx = index_dataset(tmp.path());
  ASSERT_EQ(idx.samples.size(), 3u);
  EXPECT_EQ(idx.samples[0].split, Split::train);
  EXPECT_EQ(idx.samples[2].split, Split::test);

  TempDir empty;
  EXPECT_TRUE(index_dataset(empty.path()).samples.empty());
  EXPECT_FALSE(index_dataset(empty.path()).warnings.empty());
  EXPECT_THROW(index_dataset(empty / "nope"), IoError);

  TempDir broken;
  fs::create_directories(broken / "v" / "frames");
  EXPECT_THROW(index_dataset(broken.path()), FormatError);

  TempDir mismatch;
  make_video(mismatch / "v", 3);
  write_flo(random_flow(8, 4, 1, 1), mismatch / "v" / "flow_fw" / "0000.flo");
  EXPECT_THROW(index_dataset(mismatch.path()), ShapeError);
  EXPECT_NO_THROW(index_dataset(mismatch.path(), false));
}

TEST(DatasetIndex, BundledMiniDataset) {
  const char* data = std::getenv("OMNIFLOW_DATA");
  ASSERT_NE(data, nullptr);
  const DatasetIndex idx = index_dataset(fs::path(data) / "mini_dataset");
  EXPECT_EQ(idx.videos, 4u);
  EXPECT_EQ(idx.frames, 32u);
  EXPECT_EQ(idx.samples.size(), idx.frames - idx.videos);
  EXPECT_TRUE(idx.warnings.empty());
  const FlowField f = read_flo(idx.samples.front().forward_flow);
  EXPECT_EQ(f.width(), 64);
  EXPECT_EQ(f.height(), 32);
}
