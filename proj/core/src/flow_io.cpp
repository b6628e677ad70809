#include "omniflow/flow_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cctype>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "omniflow/error.hpp"
#include "omniflow/png_io.hpp"

namespace fs = std::filesystem;

namespace omniflow {

namespace {

// Upper bound on either side of a stored raster; guards allocations.
constexpr std::int64_t kMaxSide = 1 << 16;
constexpr std::int64_t kMaxPixels = std::int64_t{1} << 28;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

std::uint32_t get_u32_be(const unsigned char* p) {
  return std::uint32_t{p[3]} | (std::uint32_t{p[2]} << 8) | (std::uint32_t{p[1]} << 16) |
         (std::uint32_t{p[0]} << 24);
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path.string() + "'");
  return std::move(ss).str();
}

void check_dims(std::int64_t w, std::int64_t h, const fs::path& path) {
  if (w <= 0 || h <= 0 || w > kMaxSide || h > kMaxSide || w * h > kMaxPixels) {
    throw FormatError("'" + path.string() + "': implausible dimensions " + std::to_string(w) +
                      "x" + std::to_string(h));
  }
}

struct FloHeader {
  int width = 0;
  int height = 0;
};

FloHeader parse_flo_header(const unsigned char* p, std::size_t size, const fs::path& path) {
  if (size < 12) throw FormatError("'" + path.string() + "': truncated .flo header");
  if (std::bit_cast<float>(get_u32(p)) != kFloMagic) {
    throw FormatError("'" + path.string() + "': bad .flo magic");
  }
  const auto w = static_cast<std::int32_t>(get_u32(p + 4));
  const auto h = static_cast<std::int32_t>(get_u32(p + 8));
  check_dims(w, h, path);
  return {w, h};
}

FloHeader read_flo_header(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  unsigned char buf[12];
  in.read(reinterpret_cast<char*>(buf), 12);
  return parse_flo_header(buf, static_cast<std::size_t>(in.gcount()), path);
}

std::vector<fs::path> list_files(const fs::path& dir, std::string_view ext) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<fs::path> list_dirs(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void index_video(const fs::path& dir, Split split, bool check_dimensions, DatasetIndex& index) {
  const std::string name = dir.filename().string();
  const fs::path frames_dir = dir / "frames";
  const fs::path fw_dir = dir / "flow_fw";
  if (!fs::is_directory(frames_dir)) throw FormatError("video '" + name + "' has no frames/");
  if (!fs::is_directory(fw_dir)) throw FormatError("video '" + name + "' has no flow_fw/");

  const auto frames = list_files(frames_dir, ".png");
  const auto fw = list_files(fw_dir, ".flo");
  std::vector<fs::path> bw, depth;
  if (fs::is_directory(dir / "flow_bw")) bw = list_files(dir / "flow_bw", ".flo");
  if (fs::is_directory(dir / "depth")) depth = list_files(dir / "depth", ".pfm");

  ++index.videos;
  index.frames += frames.size();
  const std::size_t pairs = frames.empty() ? 0 : frames.size() - 1;
  if (fw.size() != pairs) {
    index.warnings.push_back("video '" + name + "': " + std::to_string(frames.size()) +
                             " frames but " + std::to_string(fw.size()) + " forward flows");
  }
  if (!bw.empty() && bw.size() != pairs) {
    index.warnings.push_back("video '" + name + "': backward flow count mismatch, ignored");
    bw.clear();
  }
  if (!depth.empty() && depth.size() != frames.size()) {
    index.warnings.push_back("video '" + name + "': depth count mismatch, ignored");
    depth.clear();
  }

  PngInfo first{};
  if (check_dimensions && !frames.empty()) first = read_png_info(frames[0]);
  const std::size_t n = std::min(pairs, fw.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (check_dimensions) {
      const PngInfo next = read_png_info(frames[i + 1]);
      if (next.width != first.width || next.height != first.height) {
        throw ShapeError("video '" + name + "': frame " + frames[i + 1].filename().string() +
                         " differs in size from the first frame");
      }
      auto check_flow = [&](const fs::path& p) {
        const FloHeader h = read_flo_header(p);
        if (h.width != first.width || h.height != first.height) {
          throw ShapeError("video '" + name + "': flow " + p.filename().string() +
                           " does not match the frame size");
        }
      };
      check_flow(fw[i]);
      if (!bw.empty()) check_flow(bw[i]);
    }
    DatasetSample s;
    s.video = name;
    s.frame_t = frames[i];
    s.frame_t1 = frames[i + 1];
    s.forward_flow = fw[i];
    if (!bw.empty()) s.backward_flow = bw[i];
    if (!depth.empty()) s.depth = depth[i];
    s.split = split;
    index.samples.push_back(std::move(s));
  }
}

}  // namespace

void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.close();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for '" + path.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw IoError("cannot move output into '" + path.string() + "': " + ec.message());
  }
}

FlowField read_flo(const fs::path& path) {
  const std::string bytes = slurp(path);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const FloHeader h = parse_flo_header(p, bytes.size(), path);
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  if (bytes.size() - 12 < n * 8) throw FormatError("'" + path.string() + "': truncated payload");
  if (bytes.size() - 12 > n * 8) throw FormatError("'" + path.string() + "': trailing bytes");
  FlowField f(h.width, h.height);
  for (std::size_t i = 0; i < n; ++i) {
    f.u_plane()[i] = std::bit_cast<float>(get_u32(p + 12 + 8 * i));
    f.v_plane()[i] = std::bit_cast<float>(get_u32(p + 16 + 8 * i));
  }
  return f;
}

void write_flo(const FlowField& f, const fs::path& path) {
  if (f.width() <= 0 || f.height() <= 0) throw ShapeError("cannot write an empty flow field");
  std::string out;
  out.reserve(12 + f.size() * 8);
  put_f32(out, kFloMagic);
  put_u32(out, static_cast<std::uint32_t>(f.width()));
  put_u32(out, static_cast<std::uint32_t>(f.height()));
  for (std::size_t i = 0; i < f.size(); ++i) {
    put_f32(out, f.u_plane()[i]);
    put_f32(out, f.v_plane()[i]);
  }
  write_file_atomic(path, out);
}

DepthMap read_depth_pfm(const fs::path& path) {
  const std::string bytes = slurp(path);
  std::size_t pos = 0;
  auto bad = [&](const std::string& why) {
    return FormatError("'" + path.string() + "': " + why);
  };
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < bytes.size() && !std::isspace(static_cast<unsigned char>(bytes[pos]))) ++pos;
    if (start == pos) throw bad("truncated PFM header");
    return bytes.substr(start, pos - start);
  };
  const std::string magic = token();
  if (magic == "PF") throw bad("colour PFM is not a depth map");
  if (magic != "Pf") throw bad("bad PFM magic");
  std::int64_t w = 0, h = 0;
  double scale = 0.0;
  try {
    std::size_t used = 0;
    const std::string ws = token(), hs = token(), ss = token();
    w = std::stoll(ws, &used);
    if (used != ws.size()) throw bad("bad PFM width");
    h = std::stoll(hs, &used);
    if (used != hs.size()) throw bad("bad PFM height");
    scale = std::stod(ss, &used);
    if (used != ss.size()) throw bad("bad PFM scale");
  } catch (const std::logic_error&) {
    throw bad("malformed PFM header");
  }
  if (scale == 0.0 || !std::isfinite(scale)) throw bad("PFM scale must be nonzero");
  check_dims(w, h, path);
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw bad("truncated PFM header");
  }
  ++pos;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() - pos != n * 4) throw bad("PFM payload size does not match the header");
  const bool little = scale < 0.0;
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
  DepthMap out{Image(static_cast<int>(w), static_cast<int>(h), 1), Mask(n, 1)};
  for (std::int64_t y = 0; y < h; ++y) {
    const std::int64_t src_row = h - 1 - y;
    for (std::int64_t x = 0; x < w; ++x) {
      const unsigned char* q = p + 4 * (src_row * w + x);
      const float v = std::bit_cast<float>(little ? get_u32(q) : get_u32_be(q));
      out.depth.at(static_cast<int>(x), static_cast<int>(y)) = v;
      if (std::isnan(v)) out.valid[static_cast<std::size_t>(y * w + x)] = 0;
    }
  }
  return out;
}

void write_depth_pfm(const Image& depth, const fs::path& path) {
  if (depth.channels() != 1) throw ShapeError("depth maps must have one channel");
  if (depth.empty()) throw ShapeError("cannot write an empty depth map");
  std::string out = "Pf\n" + std::to_string(depth.width()) + " " +
                    std::to_string(depth.height()) + "\n-1.0\n";
  out.reserve(out.size() + depth.samples().size() * 4);
  for (int y = depth.height() - 1; y >= 0; --y) {
    for (int x = 0; x < depth.width(); ++x) put_f32(out, depth.at(x, y));
  }
  write_file_atomic(path, out);
}

FlowField rescale_flow(const FlowField& f, int new_width, int new_height) {
  if (new_width <= 0 || new_height <= 0) throw ShapeError("rescale target must be non-empty");
  if (f.width() <= 0 || f.height() <= 0) throw ShapeError("cannot rescale an empty flow field");
  const double sx = static_cast<double>(new_width) / f.width();
  const double sy = static_cast<double>(new_height) / f.height();
  FlowField out(new_width, new_height);
  for (int y = 0; y < new_height; ++y) {
    const int ys = std::min(f.height() - 1, static_cast<int>((y + 0.5) / sy));
    for (int x = 0; x < new_width; ++x) {
      const int xs = std::min(f.width() - 1, static_cast<int>((x + 0.5) / sx));
      out.u(x, y) = static_cast<float>(f.u(xs, ys) * sx);
      out.v(x, y) = static_cast<float>(f.v(xs, ys) * sy);
    }
  }
  return out;
}

DatasetIndex index_dataset(const fs::path& root, bool check_dimensions) {
  if (!fs::is_directory(root)) throw IoError("dataset root '" + root.string() + "' not found");
  DatasetIndex index;
  const bool has_splits = fs::is_directory(root / "train") || fs::is_directory(root / "test");
  if (has_splits) {
    const std::pair<const char*, Split> splits[] = {{"train", Split::train}, {"test", Split::test}};
    for (const auto& [name, split] : splits) {
      if (!fs::is_directory(root / name)) continue;
      for (const fs::path& v : list_dirs(root / name)) index_video(v, split, check_dimensions, index);
    }
  } else {
    for (const fs::path& v : list_dirs(root)) index_video(v, Split::train, check_dimensions, index);
  }
  if (index.videos == 0) index.warnings.push_back("no videos under '" + root.string() + "'");
  return index;
}

}  // namespace omniflow
