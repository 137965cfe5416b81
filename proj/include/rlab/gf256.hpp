#pragma once

// Arithmetic in GF(2^8) modulo the Rijndael polynomial x^8 + x^4 + x^3 + x + 1,
// and the tables derived from it: the S-box pair and the fixed-multiplicand
// table used by the table-driven MixColumns / InvMixColumns.

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>

namespace rlab::gf256 {

// Low byte of the reduction polynomial (0x11B).
inline constexpr std::uint8_t kReduction = 0x1B;

constexpr std::uint8_t xtime(std::uint8_t a) noexcept {
  return static_cast<std::uint8_t>((a << 1) ^ ((a & 0x80) ? kReduction : 0));
}

// Shift-and-xor multiply. The loop runs once per significant bit of `b`.
constexpr std::uint8_t gf_mul(std::uint8_t a, std::uint8_t b) noexcept {
  std::uint8_t product = 0;
  while (b != 0) {
    if (b & 1) product ^= a;
    a = xtime(a);
    b >>= 1;
  }
  return product;
}

// gf_mul with the coefficient fixed at compile time: one step per bit of B,
// nothing for the leading zeros.
template <std::uint8_t B>
constexpr std::uint8_t gf_mul_const(std::uint8_t a) noexcept {
  if constexpr (B == 0) {
    return 0;
  } else {
    const std::uint8_t rest = gf_mul_const<(B >> 1)>(xtime(a));
    return (B & 1) ? static_cast<std::uint8_t>(a ^ rest) : rest;
  }
}

// a^254 by square-and-multiply; maps 0 to 0.
constexpr std::uint8_t gf_inverse(std::uint8_t a) noexcept {
  std::uint8_t result = 1;
  std::uint8_t base = a;
  unsigned exponent = 254;
  while (exponent != 0) {
    if (exponent & 1) result = gf_mul(result, base);
    base = gf_mul(base, base);
    exponent >>= 1;
  }
  return a == 0 ? 0 : result;
}

// b_i' = b_i ^ b_{i+4} ^ b_{i+5} ^ b_{i+6} ^ b_{i+7} ^ c_i with c = 0x63.
constexpr std::uint8_t affine(std::uint8_t b) noexcept {
  auto rotl = [](std::uint8_t x, int n) {
    return static_cast<std::uint8_t>((x << n) | (x >> (8 - n)));
  };
  return static_cast<std::uint8_t>(b ^ rotl(b, 1) ^ rotl(b, 2) ^ rotl(b, 3) ^
                                   rotl(b, 4) ^ 0x63);
}

struct SBoxPair {
  std::array<std::uint8_t, 256> forward{};
  std::array<std::uint8_t, 256> inverse{};

  static constexpr std::size_t footprint_bytes() noexcept { return 512; }
};

constexpr SBoxPair build_sbox() noexcept {
  SBoxPair boxes;
  for (unsigned x = 0; x < 256; ++x) {
    const auto y = affine(gf_inverse(static_cast<std::uint8_t>(x)));
    boxes.forward[x] = y;
    boxes.inverse[y] = static_cast<std::uint8_t>(x);
  }
  return boxes;
}

// Products c*x for the six non-identity MixColumns/InvMixColumns
// coefficients. Rows are stored in the order of kCoefficients; callers
// index by coefficient through row(), never by row number.
class MulTable {
 public:
  static constexpr std::array<std::uint8_t, 6> kCoefficients{0x02, 0x03, 0x09,
                                                             0x0B, 0x0D, 0x0E};

  constexpr MulTable() noexcept {
    for (std::size_t r = 0; r < kCoefficients.size(); ++r)
      for (unsigned x = 0; x < 256; ++x)
        rows_[r][x] = gf_mul(kCoefficients[r], static_cast<std::uint8_t>(x));
  }

  static constexpr std::size_t row_index(std::uint8_t coefficient) {
    for (std::size_t r = 0; r < kCoefficients.size(); ++r)
      if (kCoefficients[r] == coefficient) return r;
    throw std::invalid_argument("MulTable: coefficient has no row");
  }

  constexpr const std::array<std::uint8_t, 256>& row(
      std::uint8_t coefficient) const {
    return rows_[row_index(coefficient)];
  }

  constexpr std::uint8_t mul(std::uint8_t coefficient, std::uint8_t x) const {
    return row(coefficient)[x];
  }

  static constexpr std::size_t footprint_bytes() noexcept {
    return sizeof(rows_);
  }

 private:
  std::array<std::array<std::uint8_t, 256>, 6> rows_{};
};

static_assert(MulTable::footprint_bytes() == 6 * 256);

inline MulTable build_mul_table() { return MulTable{}; }

// Shared immutable instances, built on first use.
inline const SBoxPair& sbox() {
  static const SBoxPair boxes = build_sbox();
  return boxes;
}

inline const MulTable& mul_table() {
  static const MulTable table = build_mul_table();
  return table;
}

}  // namespace rlab::gf256
