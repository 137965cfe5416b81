#pragma once

// Test-only oracles. Shares no code with include/rlab: field products are
// computed as carry-less polynomial products reduced by long division, the
// S-box is the published constant table, and the cipher works on a flat
// 16-byte array in FIPS-197 byte order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace oracle {

// Carry-less product of two bytes (degree <= 14), then remainder modulo
// 0x11B by polynomial long division.
inline std::uint8_t poly_mul(std::uint8_t a, std::uint8_t b) {
  std::uint32_t product = 0;
  for (int i = 0; i < 8; ++i)
    if ((b >> i) & 1) product ^= static_cast<std::uint32_t>(a) << i;
  for (int deg = 14; deg >= 8; --deg)
    if ((product >> deg) & 1) product ^= 0x11Bu << (deg - 8);
  return static_cast<std::uint8_t>(product);
}

// Exhaustive search; 0 for 0.
inline std::uint8_t search_inverse(std::uint8_t a) {
  for (unsigned c = 1; c < 256; ++c)
    if (poly_mul(a, static_cast<std::uint8_t>(c)) == 1) return static_cast<std::uint8_t>(c);
  return 0;
}

// Affine map as the explicit 8x8 bit matrix plus 0x63.
inline std::uint8_t bit_matrix_affine(std::uint8_t b) {
  std::uint8_t out = 0;
  for (int i = 0; i < 8; ++i) {
    int bit = ((b >> i) ^ (b >> ((i + 4) % 8)) ^ (b >> ((i + 5) % 8)) ^ (b >> ((i + 6) % 8)) ^
               (b >> ((i + 7) % 8)) ^ (0x63 >> i)) &
              1;
    out |= static_cast<std::uint8_t>(bit << i);
  }
  return out;
}

// FIPS-197 figure 7.
inline constexpr std::array<std::uint8_t, 256> kSBox = {
    0x63, 0x7c, 0x77, 0x7b, 0xf2, 0x6b, 0x6f, 0xc5, 0x30, 0x01, 0x67, 0x2b, 0xfe, 0xd7, 0xab, 0x76,
    0xca, 0x82, 0xc9, 0x7d, 0xfa, 0x59, 0x47, 0xf0, 0xad, 0xd4, 0xa2, 0xaf, 0x9c, 0xa4, 0x72, 0xc0,
    0xb7, 0xfd, 0x93, 0x26, 0x36, 0x3f, 0xf7, 0xcc, 0x34, 0xa5, 0xe5, 0xf1, 0x71, 0xd8, 0x31, 0x15,
    0x04, 0xc7, 0x23, 0xc3, 0x18, 0x96, 0x05, 0x9a, 0x07, 0x12, 0x80, 0xe2, 0xeb, 0x27, 0xb2, 0x75,
    0x09, 0x83, 0x2c, 0x1a, 0x1b, 0x6e, 0x5a, 0xa0, 0x52, 0x3b, 0xd6, 0xb3, 0x29, 0xe3, 0x2f, 0x84,
    0x53, 0xd1, 0x00, 0xed, 0x20, 0xfc, 0xb1, 0x5b, 0x6a, 0xcb, 0xbe, 0x39, 0x4a, 0x4c, 0x58, 0xcf,
    0xd0, 0xef, 0xaa, 0xfb, 0x43, 0x4d, 0x33, 0x85, 0x45, 0xf9, 0x02, 0x7f, 0x50, 0x3c, 0x9f, 0xa8,
    0x51, 0xa3, 0x40, 0x8f, 0x92, 0x9d, 0x38, 0xf5, 0xbc, 0xb6, 0xda, 0x21, 0x10, 0xff, 0xf3, 0xd2,
    0xcd, 0x0c, 0x13, 0xec, 0x5f, 0x97, 0x44, 0x17, 0xc4, 0xa7, 0x7e, 0x3d, 0x64, 0x5d, 0x19, 0x73,
    0x60, 0x81, 0x4f, 0xdc, 0x22, 0x2a, 0x90, 0x88, 0x46, 0xee, 0xb8, 0x14, 0xde, 0x5e, 0x0b, 0xdb,
    0xe0, 0x32, 0x3a, 0x0a, 0x49, 0x06, 0x24, 0x5c, 0xc2, 0xd3, 0xac, 0x62, 0x91, 0x95, 0xe4, 0x79,
    0xe7, 0xc8, 0x37, 0x6d, 0x8d, 0xd5, 0x4e, 0xa9, 0x6c, 0x56, 0xf4, 0xea, 0x65, 0x7a, 0xae, 0x08,
    0xba, 0x78, 0x25, 0x2e, 0x1c, 0xa6, 0xb4, 0xc6, 0xe8, 0xdd, 0x74, 0x1f, 0x4b, 0xbd, 0x8b, 0x8a,
    0x70, 0x3e, 0xb5, 0x66, 0x48, 0x03, 0xf6, 0x0e, 0x61, 0x35, 0x57, 0xb9, 0x86, 0xc1, 0x1d, 0x9e,
    0xe1, 0xf8, 0x98, 0x11, 0x69, 0xd9, 0x8e, 0x94, 0x9b, 0x1e, 0x87, 0xe9, 0xce, 0x55, 0x28, 0xdf,
    0x8c, 0xa1, 0x89, 0x0d, 0xbf, 0xe6, 0x42, 0x68, 0x41, 0x99, 0x2d, 0x0f, 0xb0, 0x54, 0xbb, 0x16};

inline std::array<std::uint8_t, 256> inverse_sbox() {
  std::array<std::uint8_t, 256> inv{};
  for (unsigned x = 0; x < 256; ++x) inv[kSBox[x]] = static_cast<std::uint8_t>(x);
  return inv;
}

using Bytes16 = std::array<std::uint8_t, 16>;

// Flat expanded key, 16 * (rounds + 1) bytes.
inline std::vector<std::uint8_t> expand(const std::vector<std::uint8_t>& key, int rounds) {
  const std::size_t nk = key.size() / 4;
  const std::size_t words = 4 * static_cast<std::size_t>(rounds + 1);
  std::vector<std::uint8_t> w(4 * std::max(words, nk));
  std::copy(key.begin(), key.end(), w.begin());
  std::uint8_t rcon = 1;
  for (std::size_t i = nk; i < words; ++i) {
    std::uint8_t t[4] = {w[4 * i - 4], w[4 * i - 3], w[4 * i - 2], w[4 * i - 1]};
    if (i % nk == 0) {
      const std::uint8_t first = t[0];
      t[0] = kSBox[t[1]] ^ rcon;
      t[1] = kSBox[t[2]];
      t[2] = kSBox[t[3]];
      t[3] = kSBox[first];
      rcon = poly_mul(rcon, 2);
    } else if (nk > 6 && i % nk == 4) {
      for (auto& b : t) b = kSBox[b];
    }
    for (int j = 0; j < 4; ++j) w[4 * i + j] = w[4 * (i - nk) + j] ^ t[j];
  }
  w.resize(4 * words);
  return w;
}

inline void add_key(Bytes16& s, const std::vector<std::uint8_t>& w, int round) {
  for (int i = 0; i < 16; ++i) s[i] ^= w[16 * round + i];
}

// Byte index 4*c + r is row r, column c.
inline Bytes16 shift(const Bytes16& s, bool inverse) {
  Bytes16 out{};
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) {
      const int src = inverse ? (c - r + 4) % 4 : (c + r) % 4;
      out[4 * c + r] = s[4 * src + r];
    }
  return out;
}

inline void mix(Bytes16& s, const std::uint8_t (&coeff)[4]) {
  for (int c = 0; c < 4; ++c) {
    std::uint8_t col[4] = {s[4 * c], s[4 * c + 1], s[4 * c + 2], s[4 * c + 3]};
    for (int r = 0; r < 4; ++r) {
      std::uint8_t acc = 0;
      for (int k = 0; k < 4; ++k) acc ^= poly_mul(coeff[(k - r + 4) % 4], col[k]);
      s[4 * c + r] = acc;
    }
  }
}

inline constexpr std::uint8_t kMix[4] = {0x02, 0x03, 0x01, 0x01};
inline constexpr std::uint8_t kInvMix[4] = {0x0E, 0x0B, 0x0D, 0x09};

inline Bytes16 encrypt(Bytes16 s, const std::vector<std::uint8_t>& key, int rounds) {
  const auto w = expand(key, rounds);
  add_key(s, w, 0);
  for (int r = 1; r <= rounds; ++r) {
    for (auto& b : s) b = kSBox[b];
    s = shift(s, false);
    if (r != rounds) mix(s, kMix);
    add_key(s, w, r);
  }
  return s;
}

inline Bytes16 decrypt(Bytes16 s, const std::vector<std::uint8_t>& key, int rounds) {
  static const auto inv = inverse_sbox();
  const auto w = expand(key, rounds);
  for (int r = rounds; r >= 1; --r) {
    add_key(s, w, r);
    if (r != rounds) mix(s, kInvMix);
    s = shift(s, true);
    for (auto& b : s) b = inv[b];
  }
  add_key(s, w, 0);
  return s;
}

}  // namespace oracle
