#pragma once

// Uncompressed 24-bit BMP (BITMAPINFOHEADER) reader/writer plus synthetic
// test images. Everything before the pixel array is kept verbatim as the
// header, anything after it as the trailer, so serialize(parse(f)) == f.

#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rlab/errors.hpp"

namespace rlab::bmp {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t kFileHeaderBytes = 14;
inline constexpr std::size_t kInfoHeaderBytes = 40;
inline constexpr std::size_t kHeaderBytes = kFileHeaderBytes + kInfoHeaderBytes;

constexpr std::size_t row_stride_for(std::size_t width) noexcept {
  return (width * 3 + 3) / 4 * 4;
}

struct BmpImage {
  Bytes header;
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t row_stride = 0;
  Bytes pixels;   // height * row_stride bytes, rows as stored in the file
  Bytes trailer;

  std::size_t file_size() const noexcept {
    return header.size() + pixels.size() + trailer.size();
  }

  // Pixel (x, row) in storage order, bytes B, G, R.
  std::uint8_t* pixel(std::size_t x, std::size_t row) noexcept {
    return pixels.data() + row * row_stride + x * 3;
  }
  const std::uint8_t* pixel(std::size_t x, std::size_t row) const noexcept {
    return pixels.data() + row * row_stride + x * 3;
  }

  friend bool operator==(const BmpImage&, const BmpImage&) = default;
};

namespace detail {

inline std::uint32_t le32(std::span<const std::uint8_t> d, std::size_t off) noexcept {
  return static_cast<std::uint32_t>(d[off]) | static_cast<std::uint32_t>(d[off + 1]) << 8 |
         static_cast<std::uint32_t>(d[off + 2]) << 16 |
         static_cast<std::uint32_t>(d[off + 3]) << 24;
}

inline std::uint16_t le16(std::span<const std::uint8_t> d, std::size_t off) noexcept {
  return static_cast<std::uint16_t>(d[off] | d[off + 1] << 8);
}

inline void put32(Bytes& d, std::size_t off, std::uint32_t v) noexcept {
  for (int i = 0; i < 4; ++i) d[off + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

inline void put16(Bytes& d, std::size_t off, std::uint16_t v) noexcept {
  d[off] = static_cast<std::uint8_t>(v);
  d[off + 1] = static_cast<std::uint8_t>(v >> 8);
}

}  // namespace detail

inline BmpImage parse_bmp(std::span<const std::uint8_t> file) {
  using detail::le16;
  using detail::le32;
  if (file.size() < 2 || file[0] != 'B' || file[1] != 'M')
    throw BmpMagicError("not a BMP file (missing 'BM' magic)");
  if (file.size() < kHeaderBytes)
    throw BmpTruncatedError("BMP header truncated: " + std::to_string(file.size()) + " bytes");

  const std::uint32_t pixel_offset = le32(file, 10);
  const std::uint32_t info_size = le32(file, 14);
  const auto width = static_cast<std::int32_t>(le32(file, 18));
  const auto height = static_cast<std::int32_t>(le32(file, 22));
  const std::uint16_t bpp = le16(file, 28);
  const std::uint32_t compression = le32(file, 30);

  if (info_size != kInfoHeaderBytes)
    throw BmpUnsupportedError("only BITMAPINFOHEADER bitmaps are supported (header size " +
                              std::to_string(info_size) + ")");
  if (bpp != 24)
    throw BmpUnsupportedError("only 24-bit bitmaps are supported, got " +
                              std::to_string(bpp) + "-bit");
  if (compression != 0) throw BmpUnsupportedError("compressed bitmaps are not supported");
  if (width <= 0 || height == 0) throw BmpUnsupportedError("bitmap has no pixels");
  if (pixel_offset < kHeaderBytes)
    throw BmpUnsupportedError("pixel data offset overlaps the header");

  BmpImage img;
  img.width = static_cast<std::size_t>(width);
  img.height = static_cast<std::size_t>(std::abs(static_cast<long>(height)));
  img.row_stride = row_stride_for(img.width);
  const std::size_t pixel_bytes = img.height * img.row_stride;
  if (file.size() < pixel_offset || file.size() - pixel_offset < pixel_bytes)
    throw BmpTruncatedError("pixel array truncated: need " + std::to_string(pixel_bytes) +
                            " bytes at offset " + std::to_string(pixel_offset) +
                            ", file has " + std::to_string(file.size()));

  const auto begin = file.begin();
  img.header.assign(begin, begin + pixel_offset);
  img.pixels.assign(begin + pixel_offset,
                    begin + static_cast<std::ptrdiff_t>(pixel_offset + pixel_bytes));
  img.trailer.assign(begin + static_cast<std::ptrdiff_t>(pixel_offset + pixel_bytes),
                     file.end());
  return img;
}

inline Bytes serialize_bmp(const BmpImage& img) {
  Bytes out;
  out.reserve(img.file_size());
  out.insert(out.end(), img.header.begin(), img.header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  out.insert(out.end(), img.trailer.begin(), img.trailer.end());
  return out;
}

// Blank bottom-up image with a standard 54-byte header.
inline BmpImage make_blank(std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) throw std::invalid_argument("image dimensions must be positive");
  BmpImage img;
  img.width = width;
  img.height = height;
  img.row_stride = row_stride_for(width);
  img.pixels.assign(height * img.row_stride, 0);
  img.header.assign(kHeaderBytes, 0);
  auto& h = img.header;
  h[0] = 'B';
  h[1] = 'M';
  detail::put32(h, 2, static_cast<std::uint32_t>(kHeaderBytes + img.pixels.size()));
  detail::put32(h, 10, kHeaderBytes);
  detail::put32(h, 14, kInfoHeaderBytes);
  detail::put32(h, 18, static_cast<std::uint32_t>(width));
  detail::put32(h, 22, static_cast<std::uint32_t>(height));
  detail::put16(h, 26, 1);
  detail::put16(h, 28, 24);
  detail::put32(h, 34, static_cast<std::uint32_t>(img.pixels.size()));
  detail::put32(h, 38, 2835);  // 72 dpi
  detail::put32(h, 42, 2835);
  return img;
}

enum class Pattern { ConstantColor, TwoZone, Gradient, SingleObject };

inline Pattern parse_pattern(std::string_view name) {
  if (name == "constant") return Pattern::ConstantColor;
  if (name == "two-zone") return Pattern::TwoZone;
  if (name == "gradient") return Pattern::Gradient;
  if (name == "object") return Pattern::SingleObject;
  throw std::invalid_argument("unknown pattern '" + std::string(name) +
                              "' (expected constant, two-zone, gradient or object)");
}

// Deterministic synthetic images.
//   constant  every pixel byte 0xC0
//   two-zone  lower half bytes 0x20, upper half bytes 0xE0 (split by rows)
//   gradient  B = x mod 256, G = row mod 256, R = (x + row) mod 256
//   object    plain 0xF0 background with a filled disk in (B,G,R) = (0x30,0x60,0xC8)
inline BmpImage make_test_image(Pattern pattern, std::size_t width, std::size_t height) {
  BmpImage img = make_blank(width, height);
  for (std::size_t row = 0; row < height; ++row) {
    for (std::size_t x = 0; x < width; ++x) {
      std::uint8_t* px = img.pixel(x, row);
      switch (pattern) {
        case Pattern::ConstantColor:
          px[0] = px[1] = px[2] = 0xC0;
          break;
        case Pattern::TwoZone:
          px[0] = px[1] = px[2] = row < height / 2 ? 0x20 : 0xE0;
          break;
        case Pattern::Gradient:
          px[0] = static_cast<std::uint8_t>(x);
          px[1] = static_cast<std::uint8_t>(row);
          px[2] = static_cast<std::uint8_t>(x + row);
          break;
        case Pattern::SingleObject: {
          const double cx = (width - 1) / 2.0, cy = (height - 1) / 2.0;
          const double r = 0.3 * static_cast<double>(width < height ? width : height);
          const double dx = static_cast<double>(x) - cx, dy = static_cast<double>(row) - cy;
          const bool inside = dx * dx + dy * dy <= r * r;
          px[0] = inside ? 0x30 : 0xF0;
          px[1] = inside ? 0x60 : 0xF0;
          px[2] = inside ? 0xC8 : 0xF0;
          break;
        }
      }
    }
  }
  return img;
}

}  // namespace rlab::bmp
