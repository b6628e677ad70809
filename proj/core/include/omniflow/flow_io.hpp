#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "omniflow/raster.hpp"

namespace omniflow {

/// Writes `bytes` to `path` through a sibling temporary file and renames it
/// into place. Throws IoError; the destination is untouched on failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// First four bytes of a .flo file, read as a little-endian float.
inline constexpr float kFloMagic = 202021.25f;

/// Reads a Middlebury .flo file. Throws IoError if the file cannot be
/// opened and FormatError on bad magic, absurd dimensions or a truncated
/// payload. Nothing partial is ever returned.
FlowField read_flo(const std::filesystem::path& path);

/// Writes through a temporary file and renames it into place.
void write_flo(const FlowField& f, const std::filesystem::path& path);

struct DepthMap {
  Image depth;  // single channel, row 0 at the top
  Mask valid;   // zero where the stored depth is NaN
};

/// Grayscale PFM ("Pf"). A negative scale means a little-endian payload.
/// Rows are stored bottom-to-top on disk and flipped on load.
DepthMap read_depth_pfm(const std::filesystem::path& path);
void write_depth_pfm(const Image& depth, const std::filesystem::path& path);

/// Multiplies u by new_width/width and v by new_height/height. Sampling is
/// nearest-neighbour; only the units change for equal sizes.
FlowField rescale_flow(const FlowField& f, int new_width, int new_height);

enum class Split { train, test };

struct DatasetSample {
  std::string video;
  std::filesystem::path frame_t;
  std::filesystem::path frame_t1;
  std::filesystem::path forward_flow;
  std::optional<std::filesystem::path> backward_flow;
  std::optional<std::filesystem::path> depth;
  Split split = Split::train;
};

struct DatasetIndex {
  std::vector<DatasetSample> samples;
  std::vector<std::string> warnings;
  std::size_t videos = 0;
  std::size_t frames = 0;
};

/// Indexes the canonical layout
///
///   root/[train|test/]<video>/frames/*.png
///                            /flow_fw/*.flo
///                            /flow_bw/*.flo   (optional)
///                            /depth/*.pfm     (optional)
///
/// Frame i pairs with frame i+1 and the i-th forward flow (lexicographic
/// order). Throws FormatError when frames/ or flow_fw/ is missing and
/// ShapeError when paired files disagree in size. With check_dimensions
/// false only the file headers of flows are inspected, not PNGs.
DatasetIndex index_dataset(const std::filesystem::path& root, bool check_dimensions = true);

}  // namespace omniflow
