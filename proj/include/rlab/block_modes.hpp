#pragma once

// ECB and CBC over any VariantCipher, PKCS#7 padding, and IV generation.
//
// Raw file layout:
//   ECB  ciphertext
//   CBC  IV (16 bytes) || ciphertext

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/opt_variants.hpp"
#include "rlab/rijndael_core.hpp"

namespace rlab {

using Bytes = std::vector<std::uint8_t>;

enum class Mode { ECB, CBC };

// NoneWithResidual leaves a tail shorter than one block in the clear so the
// output has exactly the input length.
enum class Padding { PKCS7, NoneWithResidual };

struct ModeConfig {
  Mode mode = Mode::CBC;
  std::optional<Block> iv;
  Padding padding = Padding::PKCS7;

  void validate() const {
    if (mode == Mode::CBC && !iv) throw std::invalid_argument("CBC requires an IV");
    if (mode == Mode::ECB && iv) throw std::invalid_argument("ECB does not take an IV");
  }
};

inline Bytes pkcs7_pad(std::span<const std::uint8_t> data) {
  const std::size_t pad = kBlockBytes - data.size() % kBlockBytes;
  Bytes out(data.begin(), data.end());
  out.insert(out.end(), pad, static_cast<std::uint8_t>(pad));
  return out;
}

inline Bytes pkcs7_unpad(std::span<const std::uint8_t> data) {
  if (data.empty() || data.size() % kBlockBytes != 0)
    throw LengthError("padded data length " + std::to_string(data.size()) +
                      " is not a positive multiple of 16");
  const std::uint8_t pad = data.back();
  if (pad == 0 || pad > kBlockBytes) throw PaddingError("invalid PKCS#7 pad length");
  for (std::size_t i = data.size() - pad; i < data.size(); ++i)
    if (data[i] != pad) throw PaddingError("inconsistent PKCS#7 pad bytes");
  return Bytes(data.begin(), data.end() - pad);
}

namespace detail {

inline void require_whole_blocks(std::size_t n) {
  if (n % kBlockBytes != 0)
    throw LengthError("data length " + std::to_string(n) + " is not a multiple of 16");
}

inline Block block_at(std::span<const std::uint8_t> data, std::size_t offset) noexcept {
  Block b;
  std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(offset), kBlockBytes, b.begin());
  return b;
}

}  // namespace detail

// The block-level routines below take whole blocks only.

inline Bytes ecb_encrypt(std::span<const std::uint8_t> data, const VariantCipher& cipher) {
  detail::require_whole_blocks(data.size());
  Bytes out(data.size());
  for (std::size_t off = 0; off < data.size(); off += kBlockBytes) {
    const Block c = cipher.encrypt(detail::block_at(data, off));
    std::copy(c.begin(), c.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
  }
  return out;
}

inline Bytes ecb_decrypt(std::span<const std::uint8_t> data, const VariantCipher& cipher) {
  detail::require_whole_blocks(data.size());
  Bytes out(data.size());
  for (std::size_t off = 0; off < data.size(); off += kBlockBytes) {
    const Block p = cipher.decrypt(detail::block_at(data, off));
    std::copy(p.begin(), p.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
  }
  return out;
}

// C_i = E(M_i ^ C_{i-1}), C_0 = iv.
inline Bytes cbc_encrypt(std::span<const std::uint8_t> data, const VariantCipher& cipher,
                         const Block& iv) {
  detail::require_whole_blocks(data.size());
  Bytes out(data.size());
  Block chain = iv;
  for (std::size_t off = 0; off < data.size(); off += kBlockBytes) {
    Block m = detail::block_at(data, off);
    for (std::size_t i = 0; i < kBlockBytes; ++i) m[i] ^= chain[i];
    chain = cipher.encrypt(m);
    std::copy(chain.begin(), chain.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
  }
  return out;
}

inline Bytes cbc_decrypt(std::span<const std::uint8_t> data, const VariantCipher& cipher,
                         const Block& iv) {
  detail::require_whole_blocks(data.size());
  Bytes out(data.size());
  Block chain = iv;
  for (std::size_t off = 0; off < data.size(); off += kBlockBytes) {
    const Block c = detail::block_at(data, off);
    Block m = cipher.decrypt(c);
    for (std::size_t i = 0; i < kBlockBytes; ++i) m[i] ^= chain[i];
    chain = c;
    std::copy(m.begin(), m.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
  }
  return out;
}

inline Bytes ecb_encrypt(std::span<const std::uint8_t> data, const KeySchedule& ks,
                         const VariantPlan& plan) {
  return ecb_encrypt(data, VariantCipher(ks, plan));
}
inline Bytes ecb_decrypt(std::span<const std::uint8_t> data, const KeySchedule& ks,
                         const VariantPlan& plan) {
  return ecb_decrypt(data, VariantCipher(ks, plan));
}
inline Bytes cbc_encrypt(std::span<const std::uint8_t> data, const KeySchedule& ks,
                         const VariantPlan& plan, const Block& iv) {
  return cbc_encrypt(data, VariantCipher(ks, plan), iv);
}
inline Bytes cbc_decrypt(std::span<const std::uint8_t> data, const KeySchedule& ks,
                         const VariantPlan& plan, const Block& iv) {
  return cbc_decrypt(data, VariantCipher(ks, plan), iv);
}

// Applies the configured padding and mode. The IV is not part of the output.
inline Bytes encrypt(std::span<const std::uint8_t> data, const VariantCipher& cipher,
                     const ModeConfig& cfg) {
  cfg.validate();
  Bytes body;
  std::size_t full = data.size();
  if (cfg.padding == Padding::PKCS7) {
    body = pkcs7_pad(data);
    full = body.size();
  } else {
    full = data.size() - data.size() % kBlockBytes;
    body.assign(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(full));
  }
  Bytes out = cfg.mode == Mode::ECB ? ecb_encrypt(body, cipher)
                                    : cbc_encrypt(body, cipher, *cfg.iv);
  if (cfg.padding == Padding::NoneWithResidual)
    out.insert(out.end(), data.begin() + static_cast<std::ptrdiff_t>(full), data.end());
  return out;
}

inline Bytes decrypt(std::span<const std::uint8_t> data, const VariantCipher& cipher,
                     const ModeConfig& cfg) {
  cfg.validate();
  const std::size_t full = cfg.padding == Padding::PKCS7
                               ? data.size()
                               : data.size() - data.size() % kBlockBytes;
  const auto body = data.first(full);
  Bytes out = cfg.mode == Mode::ECB ? ecb_decrypt(body, cipher)
                                    : cbc_decrypt(body, cipher, *cfg.iv);
  if (cfg.padding == Padding::PKCS7) return pkcs7_unpad(out);
  out.insert(out.end(), data.begin() + static_cast<std::ptrdiff_t>(full), data.end());
  return out;
}

// Fills an IV from `gen`. Any failure of the generator becomes EntropyError.
template <class Generator>
Block random_iv(Generator& gen) {
  Block iv;
  try {
    std::uniform_int_distribution<unsigned> byte(0, 255);
    for (auto& b : iv) b = static_cast<std::uint8_t>(byte(gen));
  } catch (const std::exception& e) {
    throw EntropyError(std::string("entropy source failed: ") + e.what());
  }
  return iv;
}

inline Block random_iv() {
  try {
    std::random_device rd;
    return random_iv(rd);
  } catch (const EntropyError&) {
    throw;
  } catch (const std::exception& e) {
    throw EntropyError(std::string("cannot open entropy source: ") + e.what());
  }
}

// Raw-file framing.
inline Bytes frame_ciphertext(Mode mode, const std::optional<Block>& iv, Bytes ciphertext) {
  if (mode == Mode::ECB) return ciphertext;
  if (!iv) throw std::invalid_argument("CBC framing requires an IV");
  Bytes out(iv->begin(), iv->end());
  out.insert(out.end(), ciphertext.begin(), ciphertext.end());
  return out;
}

struct FramedCiphertext {
  std::optional<Block> iv;
  std::span<const std::uint8_t> body;
};

inline FramedCiphertext unframe_ciphertext(Mode mode, std::span<const std::uint8_t> file) {
  if (mode == Mode::ECB) return {std::nullopt, file};
  if (file.size() < kBlockBytes) throw LengthError("CBC file shorter than its IV prefix");
  return {detail::block_at(file, 0), file.subspan(kBlockBytes)};
}

}  // namespace rlab
