#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace omniflow::cli {

namespace fs = std::filesystem;

/// Radians, or degrees with a trailing "deg" ("30deg", "-12.5deg").
/// Throws ArgumentError on anything else.
double parse_angle(std::string_view text);

/// Comma-separated, strictly increasing list of at least two numbers.
std::vector<double> parse_edges(std::string_view text);

struct WarpConfig {
  fs::path in;
  fs::path out;
  std::string pitch = "0";
  std::string roll = "0";
  std::string yaw = "0";
  std::string kind = "auto";  // auto | image | flow
  std::string interp = "bilinear";
  bool inverse = false;
};

struct EvalConfig {
  fs::path pred_dir;
  fs::path gt_dir;
  std::string density = "auto";  // auto | none | path to a raw density grid
  std::string bins;              // empty: library defaults
  fs::path report;
  std::optional<fs::path> csv;   // defaults to the report path with .csv
};

struct StatsConfig {
  fs::path frames_dir;
  std::optional<fs::path> flows_dir;
  fs::path report;
  std::optional<fs::path> plots;  // directory for PNG renderings
};

struct DistortionMapConfig {
  int width = 0;
  int height = 0;
  int face_size = 256;
  std::optional<fs::path> out_img;
  std::optional<fs::path> out_raw;
};

struct AugmentConfig {
  fs::path dataset;
  std::string strategy = "v2";
  std::uint64_t seed = 0;
  int epochs = 1;
  fs::path out_manifest;
};

// Each command throws the library's error types; main() turns them into
// exit codes with exit_code_for().
void run_warp(const WarpConfig& c);
void run_eval(const EvalConfig& c);
void run_stats(const StatsConfig& c);
void run_distortion_map(const DistortionMapConfig& c);
void run_augment_pairs(const AugmentConfig& c);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitIo = 2;
inline constexpr int kExitShape = 3;
inline constexpr int kExitEmpty = 4;

/// Maps the in-flight exception to an exit code.
int exit_code_for(const std::exception_ptr& e);

}  // namespace omniflow::cli
