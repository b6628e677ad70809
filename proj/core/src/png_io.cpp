#include "omniflow/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "omniflow/error.hpp"
#include "omniflow/flow_io.hpp"

namespace omniflow {

namespace {

// libpng reports errors through longjmp; everything touched between setjmp
// and the jump is plain C state owned by this struct.
struct Decoded {
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int channels = 0;
  int bit_depth = 0;
  std::size_t rowbytes = 0;
  unsigned char* data = nullptr;
  png_bytep* rows = nullptr;
  char message[256] = {};

  ~Decoded() {
    std::free(rows);
    std::free(data);
  }
};

void on_error(png_structp png, png_const_charp msg) {
  auto* buf = static_cast<char*>(png_get_error_ptr(png));
  std::snprintf(buf, 256, "%s", msg);
  png_longjmp(png, 1);
}

void on_warning(png_structp, png_const_charp) {}

bool decode(std::FILE* fp, Decoded* d, bool header_only) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, d->message, on_error, on_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);
  if (header_only) {
    d->width = png_get_image_width(png, info);
    d->height = png_get_image_height(png, info);
    d->channels = png_get_channels(png, info);
    d->bit_depth = depth;
    png_destroy_read_struct(&png, &info, nullptr);
    return true;
  }
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (depth == 16) png_set_swap(png);  // host order on little-endian machines
  png_read_update_info(png, info);
  d->width = png_get_image_width(png, info);
  d->height = png_get_image_height(png, info);
  d->channels = png_get_channels(png, info);
  d->bit_depth = png_get_bit_depth(png, info);
  d->rowbytes = png_get_rowbytes(png, info);
  d->data = static_cast<unsigned char*>(std::malloc(d->rowbytes * d->height));
  d->rows = static_cast<png_bytep*>(std::malloc(sizeof(png_bytep) * d->height));
  if (d->data == nullptr || d->rows == nullptr) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::snprintf(d->message, sizeof d->message, "out of memory");
    return false;
  }
  for (png_uint_32 y = 0; y < d->height; ++y) d->rows[y] = d->data + y * d->rowbytes;
  png_read_image(png, d->rows);
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};

void run_decode(const std::filesystem::path& path, Decoded& d, bool header_only) {
  std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open '" + path.string() + "'");
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError("'" + path.string() + "' is not a PNG file");
  }
  std::rewind(fp.get());
  if (!decode(fp.get(), &d, header_only)) {
    throw FormatError("'" + path.string() + "': " + d.message);
  }
}

struct WriteBuffer {
  std::string bytes;
};

void on_write(png_structp png, png_bytep data, png_size_t n) {
  auto* buf = static_cast<WriteBuffer*>(png_get_io_ptr(png));
  buf->bytes.append(reinterpret_cast<const char*>(data), n);
}

void on_flush(png_structp) {}

int color_type_for(int channels) {
  switch (channels) {
    case 1: return PNG_COLOR_TYPE_GRAY;
    case 2: return PNG_COLOR_TYPE_GRAY_ALPHA;
    case 3: return PNG_COLOR_TYPE_RGB;
    case 4: return PNG_COLOR_TYPE_RGBA;
    default: throw ShapeError("PNG rasters need 1 to 4 channels");
  }
}

bool encode(WriteBuffer* out, const unsigned char* data, int width, int height, int channels,
            int bit_depth, char* message) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, message, on_error, on_warning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_write_struct(&png, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, out, on_write, on_flush);
  png_set_IHDR(png, info, width, height, bit_depth, color_type_for(channels), PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);
  const std::size_t stride = static_cast<std::size_t>(width) * channels * (bit_depth / 8);
  for (int y = 0; y < height; ++y) {
    png_write_row(png, const_cast<png_bytep>(data + y * stride));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  return true;
}

template <typename T>
void write_raster(const BasicRaster<T>& r, const std::filesystem::path& path) {
  if (r.width <= 0 || r.height <= 0) throw ShapeError("cannot write an empty raster");
  color_type_for(r.channels);
  if (r.samples.size() != static_cast<std::size_t>(r.width) * r.height * r.channels) {
    throw ShapeError("raster sample count does not match its dimensions");
  }
  WriteBuffer buf;
  char message[256] = {};
  if (!encode(&buf, reinterpret_cast<const unsigned char*>(r.samples.data()), r.width, r.height,
              r.channels, 8 * static_cast<int>(sizeof(T)), message)) {
    throw FormatError("PNG encoding failed: " + std::string(message));
  }
  write_file_atomic(path, buf.bytes);
}

}  // namespace

PngInfo read_png_info(const std::filesystem::path& path) {
  Decoded d;
  run_decode(path, d, true);
  return {static_cast<int>(d.width), static_cast<int>(d.height), d.channels, d.bit_depth};
}

Image read_png(const std::filesystem::path& path) {
  Decoded d;
  run_decode(path, d, false);
  Image img(static_cast<int>(d.width), static_cast<int>(d.height), d.channels);
  auto out = img.samples();
  const std::size_t per_row = static_cast<std::size_t>(d.width) * d.channels;
  for (png_uint_32 y = 0; y < d.height; ++y) {
    const unsigned char* row = d.rows[y];
    for (std::size_t i = 0; i < per_row; ++i) {
      float v;
      if (d.bit_depth == 16) {
        std::uint16_t s;
        std::memcpy(&s, row + 2 * i, 2);
        v = static_cast<float>(s / 257.0);
      } else {
        v = row[i];
      }
      out[y * per_row + i] = v;
    }
  }
  return img;
}

void write_png(const Raster8& r, const std::filesystem::path& path) { write_raster(r, path); }
void write_png(const Raster16& r, const std::filesystem::path& path) { write_raster(r, path); }

Raster8 to_raster8(const Image& img) {
  Raster8 r(img.width(), img.height(), img.channels());
  const auto s = img.samples();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const float v = std::isfinite(s[i]) ? s[i] : 0.0f;
    r.samples[i] = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  }
  return r;
}

}  // namespace omniflow
