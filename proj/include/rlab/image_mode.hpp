#pragma once

// Header-preserving image encryption: header and trailer stay in the clear,
// the pixel array (row padding included) is encrypted as one byte stream of
// whole blocks and the sub-block tail is left as is. Output file size always
// equals input file size.

#include <optional>

#include "rlab/block_modes.hpp"
#include "rlab/bmp_codec.hpp"

namespace rlab {

inline ModeConfig image_mode_config(Mode mode, std::optional<Block> iv) {
  return ModeConfig{mode, mode == Mode::CBC ? iv : std::nullopt, Padding::NoneWithResidual};
}

inline bmp::BmpImage encrypt_image(const bmp::BmpImage& img, const VariantCipher& cipher,
                                   Mode mode, std::optional<Block> iv = std::nullopt) {
  bmp::BmpImage out = img;
  out.pixels = encrypt(img.pixels, cipher, image_mode_config(mode, iv));
  return out;
}

inline bmp::BmpImage decrypt_image(const bmp::BmpImage& img, const VariantCipher& cipher,
                                   Mode mode, std::optional<Block> iv = std::nullopt) {
  bmp::BmpImage out = img;
  out.pixels = decrypt(img.pixels, cipher, image_mode_config(mode, iv));
  return out;
}

}  // namespace rlab
