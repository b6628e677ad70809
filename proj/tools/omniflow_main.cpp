#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "cli/commands.hpp"
#include "omniflow/version.hpp"

namespace cli = omniflow::cli;

int main(int argc, char** argv) {
  CLI::App app{"Omnidirectional optical flow toolkit"};
  app.set_version_flag("--version", omniflow::kVersion);
  app.require_subcommand(1);

  cli::WarpConfig warp;
  auto* w = app.add_subcommand("warp", "Rotate an equirectangular image or flow field");
  w->add_option("--in", warp.in, "Input .png or .flo")->required();
  w->add_option("--out", warp.out, "Output path")->required();
  w->add_option("--pitch", warp.pitch, "Radians, or degrees with a 'deg' suffix")->capture_default_str();
  w->add_option("--roll", warp.roll, "Radians, or degrees with a 'deg' suffix")->capture_default_str();
  w->add_option("--yaw", warp.yaw, "Radians, or degrees with a 'deg' suffix")->capture_default_str();
  w->add_option("--kind", warp.kind, "auto, image or flow")->capture_default_str();
  w->add_option("--interp", warp.interp, "nearest or bilinear")->capture_default_str();
  w->add_flag("--inverse", warp.inverse, "Apply the reverse rotation");

  cli::EvalConfig eval;
  std::string csv;
  auto* e = app.add_subcommand("eval", "Evaluate predicted flows against ground truth");
  e->add_option("--pred-dir", eval.pred_dir, "Directory of predicted .flo files")->required();
  e->add_option("--gt-dir", eval.gt_dir, "Directory of ground-truth .flo files")->required();
  e->add_option("--density", eval.density, "auto, none, or a raw density grid")->capture_default_str();
  e->add_option("--bins", eval.bins, "Comma-separated density bin edges");
  e->add_option("--report", eval.report, "JSON report path")->required();
  e->add_option("--csv", csv, "CSV path (default: report path with .csv)");

  cli::StatsConfig stats;
  std::string flows_dir, plots;
  auto* s = app.add_subcommand("stats", "Frame and flow statistics of a corpus");
  s->add_option("--frames-dir", stats.frames_dir, "Directory of PNG frames")->required();
  s->add_option("--flows-dir", flows_dir, "Directory of .flo files");
  s->add_option("--report", stats.report, "JSON report path")->required();
  s->add_option("--plots", plots, "Directory for PNG curve renderings");

  cli::DistortionMapConfig dmap;
  std::string out_img, out_raw;
  auto* d = app.add_subcommand("distortion-map", "Equirectangular distortion density map");
  d->add_option("--width", dmap.width, "Map width")->required();
  d->add_option("--height", dmap.height, "Map height (width / 2)")->required();
  d->add_option("--face-size", dmap.face_size, "Cube face resolution")->capture_default_str();
  d->add_option("--out-img", out_img, "16-bit grayscale PNG");
  d->add_option("--out-raw", out_raw, "Raw float32 grid with an 8-byte size header");

  cli::AugmentConfig aug;
  auto* a = app.add_subcommand("augment-pairs", "Rotation manifest for siamese training");
  a->add_option("--dataset", aug.dataset, "Dataset root")->required();
  a->add_option("--strategy", aug.strategy, "v1 or v2")->capture_default_str();
  a->add_option("--seed", aug.seed, "Seed")->capture_default_str();
  a->add_option("--epochs", aug.epochs, "Passes over the dataset")->capture_default_str();
  a->add_option("--out-manifest", aug.out_manifest, "JSON manifest path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    if (*w) {
      cli::run_warp(warp);
    } else if (*e) {
      if (!csv.empty()) eval.csv = csv;
      cli::run_eval(eval);
    } else if (*s) {
      if (!flows_dir.empty()) stats.flows_dir = flows_dir;
      if (!plots.empty()) stats.plots = plots;
      cli::run_stats(stats);
    } else if (*d) {
      if (!out_img.empty()) dmap.out_img = out_img;
      if (!out_raw.empty()) dmap.out_raw = out_raw;
      cli::run_distortion_map(dmap);
    } else if (*a) {
      cli::run_augment_pairs(aug);
    }
  } catch (const std::exception& ex) {
    std::cerr << "omniflow: " << ex.what() << "\n";
    return cli::exit_code_for(std::current_exception());
  }
  return cli::kExitOk;
}
