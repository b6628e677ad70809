#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "omniflow/dataset_stats.hpp"
#include "omniflow/distortion.hpp"
#include "omniflow/metrics.hpp"

namespace omniflow::cli {

using json = nlohmann::ordered_json;

std::string sha256_hex(std::string_view bytes);
/// Throws IoError if the file cannot be read.
std::string file_sha256(const std::filesystem::path& path);

/// Pretty JSON with a trailing newline; key order is insertion order.
std::string dump(const json& j);

json to_json(const ErrorMeans& m);
json to_json(const MetricReport& r);
json to_json(const Histogram& h);
json to_json(const PowerSpectrum& ps);
json to_json(const DerivativeStats& s);
json to_json(const FlowStats& s);

/// Header line plus one row; speed columns follow kSpeedRegions, then the
/// density bins. Absent bins are empty cells.
std::string metric_csv(const MetricReport& r, std::size_t files);

/// lower,upper,count,fraction per bin.
std::string histogram_csv(const Histogram& h);
std::string spectrum_csv(const PowerSpectrum& ps);

/// Little-endian int32 width and height, then width*height float32 values.
std::string encode_density_raw(const DensityMap& d);
DensityMap decode_density_raw(std::string_view bytes, const std::string& what);

/// Reads a whole file; IoError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace omniflow::cli
