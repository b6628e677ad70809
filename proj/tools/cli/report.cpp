#include "report.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>

#include "omniflow/error.hpp"

namespace omniflow::cli {

namespace {

std::string num(double v) {
  std::array<char, 32> buf;
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

void put_u32(std::string& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<char>((v >> s) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string file_sha256(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json to_json(const ErrorMeans& m) { return {{"count", m.count}, {"epe", m.epe}, {"ae", m.ae}}; }

json to_json(const MetricReport& r) {
  json speed = json::object();
  for (SpeedRegion s : kSpeedRegions) {
    const auto& v = r.region(s);
    speed[std::string(speed_region_label(s))] = v ? to_json(*v) : json(nullptr);
  }
  json density = json::array();
  for (const auto& b : r.density) {
    density.push_back({{"lower", b.lower},
                       {"upper", b.upper},
                       {"stats", b.stats ? to_json(*b.stats) : json(nullptr)}});
  }
  return {{"valid_pixels", r.valid_pixels},
          {"epe", r.epe},
          {"ae", r.ae},
          {"epe_d", opt(r.epe_d)},
          {"ae_d", opt(r.ae_d)},
          {"speed", speed},
          {"density", density}};
}

json to_json(const Histogram& h) {
  return {{"edges", h.edges()},
          {"counts", h.counts()},
          {"normalized", h.normalized()},
          {"total", h.total()},
          {"invalid", h.invalid()}};
}

json to_json(const PowerSpectrum& ps) {
  return {{"crop_size", ps.crop_size}, {"frames", ps.frames},
          {"fit_low", ps.fit_low},     {"fit_high", ps.fit_high},
          {"slope", ps.slope},         {"intercept", ps.intercept},
          {"frequency", ps.frequency}, {"power", ps.power}};
}

json to_json(const DerivativeStats& s) {
  const int mode = s.histogram.mode_bin();
  const auto& e = s.histogram.edges();
  return {{"count", s.moments.count()},
          {"mean", s.moments.mean()},
          {"variance", s.moments.variance()},
          {"kurtosis", opt(s.kurtosis())},
          {"degenerate", !s.kurtosis().has_value()},
          {"mode_center", s.histogram.total() ? json(0.5 * (e[mode] + e[mode + 1])) : json(nullptr)},
          {"histogram", to_json(s.histogram)}};
}

json to_json(const FlowStats& s) {
  return {{"u", to_json(s.u)},
          {"speed", to_json(s.speed)},
          {"direction", to_json(s.direction)},
          {"du", to_json(s.du)},
          {"dv", to_json(s.dv)},
          {"undefined_direction", s.undefined_direction},
          {"invalid", s.invalid}};
}

std::string metric_csv(const MetricReport& r, std::size_t files) {
  std::string head = "files,valid_pixels,epe,ae,epe_d,ae_d";
  std::string row = std::to_string(files) + "," + std::to_string(r.valid_pixels) + "," +
                    num(r.epe) + "," + num(r.ae) + "," + (r.epe_d ? num(*r.epe_d) : "") + "," +
                    (r.ae_d ? num(*r.ae_d) : "");
  for (SpeedRegion s : kSpeedRegions) {
    const std::string label(speed_region_label(s));
    head += ",count_" + label + ",epe_" + label + ",ae_" + label;
    const auto& v = r.region(s);
    row += v ? "," + std::to_string(v->count) + "," + num(v->epe) + "," + num(v->ae) : ",,,";
  }
  for (const auto& b : r.density) {
    const std::string label = "d[" + num(b.lower) + ":" + num(b.upper) + ")";
    head += ",count_" + label + ",epe_" + label + ",ae_" + label;
    row += b.stats ? "," + std::to_string(b.stats->count) + "," + num(b.stats->epe) + "," +
                         num(b.stats->ae)
                   : ",,,";
  }
  return head + "\n" + row + "\n";
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "lower,upper,count,fraction\n";
  const auto n = h.normalized();
  for (std::size_t i = 0; i < h.bins(); ++i) {
    out += num(h.edges()[i]) + "," + num(h.edges()[i + 1]) + "," + std::to_string(h.counts()[i]) +
           "," + num(n[i]) + "\n";
  }
  return out;
}

std::string spectrum_csv(const PowerSpectrum& ps) {
  std::string out = "frequency,power\n";
  for (std::size_t i = 0; i < ps.frequency.size(); ++i) {
    out += num(ps.frequency[i]) + "," + num(ps.power[i]) + "\n";
  }
  return out;
}

std::string encode_density_raw(const DensityMap& d) {
  std::string out;
  out.reserve(8 + d.values().size() * 4);
  put_u32(out, static_cast<std::uint32_t>(d.width()));
  put_u32(out, static_cast<std::uint32_t>(d.height()));
  for (double v : d.values()) put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  return out;
}

DensityMap decode_density_raw(std::string_view bytes, const std::string& what) {
  if (bytes.size() < 8) throw FormatError("'" + what + "': truncated density header");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const auto w = static_cast<std::int32_t>(get_u32(p));
  const auto h = static_cast<std::int32_t>(get_u32(p + 4));
  if (w <= 0 || h <= 0 || w > 65536 || h > 65536) {
    throw FormatError("'" + what + "': bad density dimensions");
  }
  const std::size_t n = static_cast<std::size_t>(w) * h;
  if (bytes.size() != 8 + 4 * n) throw FormatError("'" + what + "': density payload size mismatch");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = std::bit_cast<float>(get_u32(p + 8 + 4 * i));
  return DensityMap(w, h, std::move(v));
}

}  // namespace omniflow::cli
