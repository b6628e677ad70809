#include "commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <set>
#include <span>
#include <utility>

#include "omniflow/dataset_stats.hpp"
#include "omniflow/distortion.hpp"
#include "omniflow/equirect_warp.hpp"
#include "omniflow/error.hpp"
#include "omniflow/flow_io.hpp"
#include "omniflow/metrics.hpp"
#include "omniflow/png_io.hpp"
#include "omniflow/siamese.hpp"
#include "omniflow/version.hpp"
#include "plot.hpp"
#include "report.hpp"

namespace omniflow::cli {

namespace {

double parse_number(std::string_view s, std::string_view what) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [end, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || end != last || first == last || !std::isfinite(v)) {
    throw ArgumentError("invalid " + std::string(what) + " '" + std::string(s) + "'");
  }
  return v;
}

json header(std::string_view command, json config) {
  json j;
  j["tool"] = "omniflow";
  j["version"] = kVersion;
  j["command"] = command;
  j["config"] = std::move(config);
  return j;
}

std::string lower_ext(const fs::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e;
}

/// Regular files below root with the given extension, as sorted relative paths.
std::vector<fs::path> list_files(const fs::path& root, std::string_view ext) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw IoError("'" + root.string() + "' is not a directory");
  std::vector<fs::path> out;
  for (fs::recursive_directory_iterator it(root, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file() && lower_ext(it->path()) == ext) {
      out.push_back(it->path().lexically_relative(root));
    }
  }
  if (ec) throw IoError("cannot list '" + root.string() + "': " + ec.message());
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
  return out;
}

void warn(json& warnings, const std::string& msg) {
  std::cerr << "warning: " << msg << "\n";
  warnings.push_back(msg);
}

/// Sibling of `report` named <stem>.<suffix>.
fs::path beside(const fs::path& report, const std::string& suffix) {
  return report.parent_path() / (report.stem().string() + "." + suffix);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

Interp parse_interp(std::string_view s) {
  if (s == "nearest") return Interp::nearest;
  if (s == "bilinear") return Interp::bilinear;
  throw ArgumentError("unknown interpolation '" + std::string(s) + "'");
}

std::vector<double> bin_centres(const Histogram& h) {
  std::vector<double> c(h.bins());
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (h.edges()[i] + h.edges()[i + 1]);
  return c;
}

}  // namespace

double parse_angle(std::string_view text) {
  constexpr std::string_view kDeg = "deg";
  if (text.size() > kDeg.size() && text.substr(text.size() - kDeg.size()) == kDeg) {
    return parse_number(text.substr(0, text.size() - kDeg.size()), "angle") * kPi / 180.0;
  }
  return parse_number(text, "angle");
}

std::vector<double> parse_edges(std::string_view text) {
  std::vector<double> edges;
  while (true) {
    const std::size_t comma = text.find(',');
    edges.push_back(parse_number(text.substr(0, comma), "bin edge"));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (edges.size() < 2) throw ArgumentError("at least two bin edges are required");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw ArgumentError("bin edges must be strictly increasing");
  }
  return edges;
}

void run_warp(const WarpConfig& c) {
  std::string kind = c.kind;
  if (kind == "auto") {
    const std::string e = lower_ext(c.in);
    if (e == ".flo") {
      kind = "flow";
    } else if (e == ".png") {
      kind = "image";
    } else {
      throw ArgumentError("cannot infer --kind from '" + c.in.string() + "'");
    }
  }
  if (kind != "image" && kind != "flow") throw ArgumentError("unknown kind '" + kind + "'");
  const Interp interp = parse_interp(c.interp);
  Rotation3 r = rotation_from_euler(parse_angle(c.pitch), parse_angle(c.roll), parse_angle(c.yaw));
  if (c.inverse) r = r.inverse();

  if (kind == "flow") {
    const FlowField f = read_flo(c.in);
    write_flo(warp_flow(f, build_warp_map(r, f.width(), f.height()), r, interp), c.out);
    return;
  }
  const PngInfo info = read_png_info(c.in);
  const Image img = read_png(c.in);
  const Image out = warp_image(img, build_warp_map(r, img.width(), img.height()), interp);
  if (info.bit_depth == 16) {
    Raster16 r16(out.width(), out.height(), out.channels());
    for (std::size_t i = 0; i < r16.samples.size(); ++i) {
      const long v = std::lround(static_cast<double>(out.samples()[i]) * 257.0);
      r16.samples[i] = static_cast<std::uint16_t>(std::clamp(v, 0L, 65535L));
    }
    write_png(r16, c.out);
  } else {
    write_png(to_raster8(out), c.out);
  }
}

void run_eval(const EvalConfig& c) {
  const std::vector<fs::path> preds = list_files(c.pred_dir, ".flo");
  const std::vector<fs::path> gts = list_files(c.gt_dir, ".flo");
  const std::set<fs::path> pred_set(preds.begin(), preds.end());
  const std::set<fs::path> gt_set(gts.begin(), gts.end());

  json warnings = json::array();
  std::vector<fs::path> matched;
  for (const auto& p : gts) {
    if (pred_set.count(p)) {
      matched.push_back(p);
    } else {
      warn(warnings, "no prediction for ground truth '" + p.generic_string() + "'");
    }
  }
  for (const auto& p : preds) {
    if (!gt_set.count(p)) warn(warnings, "no ground truth for prediction '" + p.generic_string() + "'");
  }
  if (matched.empty()) throw EmptyInputError("no prediction matches a ground-truth file");

  const std::vector<double> edges = c.bins.empty() ? default_density_edges() : parse_edges(c.bins);
  const fs::path csv_path = c.csv ? *c.csv : fs::path(c.report).replace_extension(".csv");

  json inputs;
  std::optional<DensityMap> fixed;
  if (c.density != "auto" && c.density != "none") {
    const std::string bytes = read_file(c.density);
    fixed = decode_density_raw(bytes, c.density);
    inputs["density_sha256"] = sha256_hex(bytes);
  }
  std::map<std::pair<int, int>, DensityMap> cache;

  MetricAccumulator total(edges);
  json files = json::array();
  json per_file = json::array();
  for (const auto& rel : matched) {
    const fs::path pp = c.pred_dir / rel, gp = c.gt_dir / rel;
    const FlowField pred = read_flo(pp), gt = read_flo(gp);
    if (pred.width() != gt.width() || pred.height() != gt.height()) {
      throw ShapeError("'" + rel.generic_string() + "': prediction and ground truth differ in size");
    }
    const DensityMap* d = nullptr;
    if (fixed) {
      if (fixed->width() != gt.width() || fixed->height() != gt.height()) {
        throw ShapeError("density map does not match '" + rel.generic_string() + "'");
      }
      d = &*fixed;
    } else if (c.density == "auto") {
      const auto key = std::make_pair(gt.width(), gt.height());
      auto it = cache.find(key);
      if (it == cache.end()) it = cache.emplace(key, build_density_map(key.first, key.second)).first;
      d = &it->second;
    }
    MetricAccumulator one(edges);
    one.add(pred, gt, d);
    total.merge(one);
    files.push_back({{"file", rel.generic_string()},
                     {"pred_sha256", file_sha256(pp)},
                     {"gt_sha256", file_sha256(gp)}});
    json entry{{"file", rel.generic_string()}};
    if (one.valid_pixels() > 0) {
      const MetricReport r = one.report();
      entry["valid_pixels"] = r.valid_pixels;
      entry["epe"] = r.epe;
      entry["ae"] = r.ae;
      entry["epe_d"] = r.epe_d ? json(*r.epe_d) : json(nullptr);
      entry["ae_d"] = r.ae_d ? json(*r.ae_d) : json(nullptr);
    } else {
      warn(warnings, "'" + rel.generic_string() + "' has no valid ground-truth pixel");
      entry["valid_pixels"] = 0;
    }
    per_file.push_back(std::move(entry));
  }
  const MetricReport report = total.report();
  inputs["files"] = std::move(files);

  json j = header("eval", {{"pred_dir", c.pred_dir.generic_string()},
                           {"gt_dir", c.gt_dir.generic_string()},
                           {"density", c.density},
                           {"bins", edges},
                           {"report", c.report.generic_string()},
                           {"csv", csv_path.generic_string()}});
  j["inputs"] = std::move(inputs);
  j["warnings"] = warnings;
  j["files_evaluated"] = matched.size();
  j["metrics"] = to_json(report);
  j["per_file"] = std::move(per_file);

  const std::string csv = metric_csv(report, matched.size());
  write_file_atomic(c.report, dump(j));
  write_file_atomic(csv_path, csv);
  std::cout << "evaluated " << matched.size() << " file(s), " << report.valid_pixels
            << " pixels: EPE " << fmt(report.epe) << " AE " << fmt(report.ae);
  if (report.epe_d) std::cout << " EPE_d " << fmt(*report.epe_d) << " AE_d " << fmt(*report.ae_d);
  std::cout << "\n";
}

void run_stats(const StatsConfig& c) {
  const std::vector<fs::path> frames = list_files(c.frames_dir, ".png");
  if (frames.empty()) throw EmptyInputError("no PNG frame under '" + c.frames_dir.string() + "'");

  json warnings = json::array();
  int min_w = 0, min_h = 0;
  for (const auto& rel : frames) {
    const PngInfo info = read_png_info(c.frames_dir / rel);
    min_w = min_w ? std::min(min_w, info.width) : info.width;
    min_h = min_h ? std::min(min_h, info.height) : info.height;
  }
  const int crop = spectrum_crop_size(min_w, min_h);
  std::optional<SpectrumAccumulator> spectrum;
  if (crop >= 16) {
    spectrum.emplace(crop);
  } else {
    warn(warnings, "frames are too small for a power spectrum");
  }

  Histogram lum = make_luminance_histogram();
  DerivativeStats dx = make_frame_derivative_stats(), dy = dx, dt = dx;
  bool have_dt = false;
  Image prev;
  fs::path prev_dir;
  json frame_inputs = json::array();
  for (const auto& rel : frames) {
    const fs::path path = c.frames_dir / rel;
    const Image gray = to_gray(read_png(path));
    frame_inputs.push_back({{"file", rel.generic_string()}, {"sha256", file_sha256(path)}});
    lum.merge(luminance_histogram(std::span(&gray, 1)));
    accumulate_spatial_derivatives(gray, DerivativeAxis::spatial_x, dx);
    accumulate_spatial_derivatives(gray, DerivativeAxis::spatial_y, dy);
    if (!prev.empty() && prev_dir == rel.parent_path() && prev.width() == gray.width() &&
        prev.height() == gray.height()) {
      accumulate_temporal_derivatives(prev, gray, dt);
      have_dt = true;
    }
    if (spectrum) spectrum->add(gray);
    prev = gray;
    prev_dir = rel.parent_path();
  }
  if (!have_dt) warn(warnings, "no consecutive frame pair for temporal derivatives");

  std::optional<FlowStats> flow_stats;
  json flow_inputs = json::array();
  if (c.flows_dir) {
    const std::vector<fs::path> flows = list_files(*c.flows_dir, ".flo");
    if (flows.empty()) warn(warnings, "no .flo file under '" + c.flows_dir->string() + "'");
    for (const auto& rel : flows) {
      const fs::path path = *c.flows_dir / rel;
      if (!flow_stats) flow_stats = make_flow_stats();
      accumulate_flow_statistics(read_flo(path), *flow_stats);
      flow_inputs.push_back({{"file", rel.generic_string()}, {"sha256", file_sha256(path)}});
    }
  }

  const std::optional<PowerSpectrum> ps =
      spectrum ? std::optional<PowerSpectrum>(spectrum->result()) : std::nullopt;

  json config{{"frames_dir", c.frames_dir.generic_string()},
              {"flows_dir", c.flows_dir ? json(c.flows_dir->generic_string()) : json(nullptr)},
              {"report", c.report.generic_string()},
              {"plots", c.plots ? json(c.plots->generic_string()) : json(nullptr)}};
  json j = header("stats", std::move(config));
  j["inputs"] = {{"frames", std::move(frame_inputs)}, {"flows", std::move(flow_inputs)}};
  j["warnings"] = warnings;
  j["frames"] = {{"count", frames.size()},
                 {"luminance", to_json(lum)},
                 {"spectrum", ps ? to_json(*ps) : json(nullptr)},
                 {"derivatives",
                  {{"spatial_x", to_json(dx)},
                   {"spatial_y", to_json(dy)},
                   {"temporal", have_dt ? to_json(dt) : json(nullptr)}}}};
  j["flows"] = flow_stats ? to_json(*flow_stats) : json(nullptr);

  std::vector<std::pair<std::string, std::string>> csvs{
      {"luminance", histogram_csv(lum)}, {"dx", histogram_csv(dx.histogram)},
      {"dy", histogram_csv(dy.histogram)}};
  if (have_dt) csvs.emplace_back("dt", histogram_csv(dt.histogram));
  if (ps) csvs.emplace_back("spectrum", spectrum_csv(*ps));
  if (flow_stats) {
    csvs.emplace_back("flow_u", histogram_csv(flow_stats->u));
    csvs.emplace_back("flow_speed", histogram_csv(flow_stats->speed));
    csvs.emplace_back("flow_direction", histogram_csv(flow_stats->direction));
    csvs.emplace_back("flow_du", histogram_csv(flow_stats->du.histogram));
    csvs.emplace_back("flow_dv", histogram_csv(flow_stats->dv.histogram));
  }

  std::vector<std::pair<std::string, Raster8>> plots;
  if (c.plots) {
    auto hist_plot = [&](const std::string& name, const Histogram& h, PlotOptions o) {
      const std::vector<double> x = bin_centres(h), y = h.normalized();
      plots.emplace_back(name, line_plot(x, y, o));
    };
    hist_plot("luminance", lum, {});
    hist_plot("dx", dx.histogram, {.log_y = true});
    hist_plot("dy", dy.histogram, {.log_y = true});
    if (have_dt) hist_plot("dt", dt.histogram, {.log_y = true});
    if (ps) plots.emplace_back("spectrum", line_plot(ps->frequency, ps->power, {.log_x = true, .log_y = true}));
    if (flow_stats) {
      hist_plot("flow_u", flow_stats->u, {.log_y = true});
      hist_plot("flow_speed", flow_stats->speed, {.log_y = true});
      hist_plot("flow_direction", flow_stats->direction, {});
    }
  }

  write_file_atomic(c.report, dump(j));
  for (const auto& [name, text] : csvs) write_file_atomic(beside(c.report, name + ".csv"), text);
  if (c.plots) {
    std::error_code ec;
    fs::create_directories(*c.plots, ec);
    if (ec) throw IoError("cannot create '" + c.plots->string() + "': " + ec.message());
    for (const auto& [name, img] : plots) write_png(img, *c.plots / (name + ".png"));
  }

  std::cout << "stats over " << frames.size() << " frame(s)";
  if (ps) std::cout << ": spectrum slope " << fmt(ps->slope);
  if (const auto k = dx.kurtosis()) std::cout << ", d/dx kurtosis " << fmt(*k);
  std::cout << "\n";
}

void run_distortion_map(const DistortionMapConfig& c) {
  require_equirect(c.width, c.height);
  const DensityMap d = build_density_map(c.width, c.height, c.face_size);
  if (c.out_img) write_png(density_to_raster16(d), *c.out_img);
  if (c.out_raw) write_file_atomic(*c.out_raw, encode_density_raw(d));
  const auto [lo, hi] = std::minmax_element(d.values().begin(), d.values().end());
  std::cout << c.width << "x" << c.height << " density in [" << fmt(*lo) << ", " << fmt(*hi) << "]\n";
}

void run_augment_pairs(const AugmentConfig& c) {
  const Strategy strategy = parse_strategy(c.strategy);
  if (c.epochs < 1) throw ArgumentError("--epochs must be at least 1");
  const DatasetIndex idx = index_dataset(c.dataset);
  json warnings = json::array();
  for (const auto& w : idx.warnings) warn(warnings, w);
  if (idx.samples.empty()) throw EmptyInputError("dataset '" + c.dataset.string() + "' has no sample");

  auto rel = [&](const fs::path& p) { return p.lexically_relative(c.dataset).generic_string(); };
  std::string listing;
  for (const auto& s : idx.samples) {
    listing += rel(s.frame_t) + "\t" + rel(s.frame_t1) + "\t" + rel(s.forward_flow) + "\n";
  }

  auto angles = [](const EulerAngles& e) {
    return json{{"pitch", e.pitch}, {"roll", e.roll}, {"yaw", e.yaw}};
  };
  json samples = json::array();
  std::size_t left_identity = 0;
  const std::size_t n = idx.samples.size();
  for (int epoch = 0; epoch < c.epochs; ++epoch) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::uint64_t id = static_cast<std::uint64_t>(epoch) * n + i;
      const AugmentationPair a = sample_augmentation(strategy, derive_seed(c.seed, id));
      const DatasetSample& s = idx.samples[i];
      left_identity += a.left.is_zero();
      samples.push_back({{"id", id},
                         {"epoch", epoch},
                         {"video", s.video},
                         {"split", s.split == Split::train ? "train" : "test"},
                         {"frame_t", rel(s.frame_t)},
                         {"frame_t1", rel(s.frame_t1)},
                         {"forward_flow", rel(s.forward_flow)},
                         {"left", angles(a.left)},
                         {"right", angles(a.right)}});
    }
  }

  json j = header("augment-pairs", {{"dataset", c.dataset.generic_string()},
                                    {"strategy", strategy_name(strategy)},
                                    {"seed", c.seed},
                                    {"epochs", c.epochs},
                                    {"out_manifest", c.out_manifest.generic_string()}});
  j["inputs"] = {{"videos", idx.videos},
                 {"frames", idx.frames},
                 {"samples", n},
                 {"listing_sha256", sha256_hex(listing)}};
  j["warnings"] = warnings;
  j["summary"] = {{"pairs", samples.size()},
                  {"left_identity", left_identity},
                  {"right_identity", samples.size() - left_identity}};
  j["samples"] = std::move(samples);
  write_file_atomic(c.out_manifest, dump(j));
  std::cout << "wrote " << n * static_cast<std::size_t>(c.epochs) << " pair(s) to "
            << c.out_manifest.string() << "\n";
}

int exit_code_for(const std::exception_ptr& e) {
  try {
    std::rethrow_exception(e);
  } catch (const IoError&) {
    return kExitIo;
  } catch (const fs::filesystem_error&) {
    return kExitIo;
  } catch (const ShapeError&) {
    return kExitShape;
  } catch (const FormatError&) {
    return kExitShape;
  } catch (const EmptyInputError&) {
    return kExitEmpty;
  } catch (...) {
    return kExitUsage;
  }
}

}  // namespace omniflow::cli
