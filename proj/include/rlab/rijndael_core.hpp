#pragma once

// Reference ("unoptimized") Rijndael with a 128-bit block. The round
// transformations are written as the plain nested loops that the optimized
// variants in opt_variants.hpp are measured against; keep them that way.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/gf256.hpp"

namespace rlab {

inline constexpr std::size_t kBlockBytes = 16;
inline constexpr int kNb = 4;

using Block = std::array<std::uint8_t, kBlockBytes>;

// 4x4 byte matrix indexed [row][column]. Byte i of a block lives at
// row i % 4, column i / 4.
struct State {
  std::array<std::array<std::uint8_t, 4>, 4> bytes{};

  static State load(std::span<const std::uint8_t, kBlockBytes> block) noexcept {
    State s;
    for (std::size_t i = 0; i < kBlockBytes; ++i) s.bytes[i % 4][i / 4] = block[i];
    return s;
  }

  Block store() const noexcept {
    Block out;
    for (std::size_t i = 0; i < kBlockBytes; ++i) out[i] = bytes[i % 4][i / 4];
    return out;
  }

  friend bool operator==(const State&, const State&) = default;
};

using RoundKey = State;
using Word = std::array<std::uint8_t, 4>;

inline constexpr int standard_rounds(int key_size_bits) {
  switch (key_size_bits) {
    case 128: return 10;
    case 192: return 12;
    case 256: return 14;
    default: throw LengthError("key size must be 128, 192 or 256 bits");
  }
}

class KeySchedule {
 public:
  KeySchedule(std::vector<RoundKey> round_keys, int key_size_bits)
      : round_keys_(std::move(round_keys)), key_size_bits_(key_size_bits) {}

  int rounds() const noexcept { return static_cast<int>(round_keys_.size()) - 1; }
  int key_size_bits() const noexcept { return key_size_bits_; }
  bool is_standard() const { return rounds() == standard_rounds(key_size_bits_); }

  const RoundKey& round_key(int r) const { return round_keys_.at(static_cast<std::size_t>(r)); }
  std::span<const RoundKey> round_keys() const noexcept { return round_keys_; }

  // Expanded-key word i, i.e. column i % 4 of round key i / 4.
  Word word(std::size_t i) const {
    const auto& rk = round_keys_.at(i / 4);
    return {rk.bytes[0][i % 4], rk.bytes[1][i % 4], rk.bytes[2][i % 4],
            rk.bytes[3][i % 4]};
  }

 private:
  std::vector<RoundKey> round_keys_;
  int key_size_bits_;
};

// Standard expansion, run for as many words as `rounds` needs. Nonstandard
// round counts just stop early or keep going with the same recurrence.
inline KeySchedule key_expansion(std::span<const std::uint8_t> key, int rounds) {
  if (key.size() != 16 && key.size() != 24 && key.size() != 32)
    throw LengthError("key must be 16, 24 or 32 bytes, got " +
                      std::to_string(key.size()));
  if (rounds < 1) throw LengthError("round count must be at least 1");

  const auto& sbox = gf256::sbox().forward;
  const std::size_t nk = key.size() / 4;
  const std::size_t total = static_cast<std::size_t>(kNb) * (rounds + 1);
  std::vector<Word> w(std::max(total, nk));

  for (std::size_t i = 0; i < nk; ++i)
    w[i] = {key[4 * i], key[4 * i + 1], key[4 * i + 2], key[4 * i + 3]};

  std::uint8_t rcon = 0x01;
  for (std::size_t i = nk; i < total; ++i) {
    Word temp = w[i - 1];
    if (i % nk == 0) {
      std::rotate(temp.begin(), temp.begin() + 1, temp.end());
      for (auto& b : temp) b = sbox[b];
      temp[0] ^= rcon;
      rcon = gf256::xtime(rcon);
    } else if (nk > 6 && i % nk == 4) {
      for (auto& b : temp) b = sbox[b];
    }
    for (std::size_t j = 0; j < 4; ++j) w[i][j] = w[i - nk][j] ^ temp[j];
  }

  std::vector<RoundKey> round_keys(static_cast<std::size_t>(rounds) + 1);
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t row = 0; row < 4; ++row)
      round_keys[i / 4].bytes[row][i % 4] = w[i][row];
  return KeySchedule(std::move(round_keys), static_cast<int>(key.size()) * 8);
}

inline void add_round_key(State& s, const RoundKey& rk) noexcept {
  for (int i = 0; i < 4; i++)
    for (int j = 0; j < kNb; j++) s.bytes[i][j] ^= rk.bytes[i][j];
}

inline void substitute(State& s, const std::array<std::uint8_t, 256>& box) noexcept {
  for (int i = 0; i < 4; i++)
    for (int j = 0; j < kNb; j++) s.bytes[i][j] = box[s.bytes[i][j]];
}

inline void sub_bytes(State& s) noexcept { substitute(s, gf256::sbox().forward); }
inline void inv_sub_bytes(State& s) noexcept { substitute(s, gf256::sbox().inverse); }

namespace detail {

inline constexpr int kShifts[4] = {0, 1, 2, 3};

inline void rotate_rows(State& s, bool inverse) noexcept {
  std::uint8_t tmp[kNb];
  for (int i = 0; i < 4; i++) {
    const int shift = inverse ? kNb - kShifts[i] : kShifts[i];
    for (int j = 0; j < kNb; j++) tmp[j] = s.bytes[i][(j + shift) % kNb];
    for (int j = 0; j < kNb; j++) s.bytes[i][j] = tmp[j];
  }
}

inline constexpr std::uint8_t kMixMatrix[4][4] = {
    {0x02, 0x03, 0x01, 0x01},
    {0x01, 0x02, 0x03, 0x01},
    {0x01, 0x01, 0x02, 0x03},
    {0x03, 0x01, 0x01, 0x02}};

inline constexpr std::uint8_t kInvMixMatrix[4][4] = {
    {0x0E, 0x0B, 0x0D, 0x09},
    {0x09, 0x0E, 0x0B, 0x0D},
    {0x0D, 0x09, 0x0E, 0x0B},
    {0x0B, 0x0D, 0x09, 0x0E}};

// The matrix is a template argument so each product is a constant multiply
// paying only for that coefficient's bits.
template <const std::uint8_t (&M)[4][4]>
inline void mix_with(State& s) noexcept {
  using gf256::gf_mul_const;
  for (int j = 0; j < kNb; j++) {
    const std::uint8_t a0 = s.bytes[0][j], a1 = s.bytes[1][j], a2 = s.bytes[2][j],
                       a3 = s.bytes[3][j];
    s.bytes[0][j] = gf_mul_const<M[0][0]>(a0) ^ gf_mul_const<M[0][1]>(a1) ^
                    gf_mul_const<M[0][2]>(a2) ^ gf_mul_const<M[0][3]>(a3);
    s.bytes[1][j] = gf_mul_const<M[1][0]>(a0) ^ gf_mul_const<M[1][1]>(a1) ^
                    gf_mul_const<M[1][2]>(a2) ^ gf_mul_const<M[1][3]>(a3);
    s.bytes[2][j] = gf_mul_const<M[2][0]>(a0) ^ gf_mul_const<M[2][1]>(a1) ^
                    gf_mul_const<M[2][2]>(a2) ^ gf_mul_const<M[2][3]>(a3);
    s.bytes[3][j] = gf_mul_const<M[3][0]>(a0) ^ gf_mul_const<M[3][1]>(a1) ^
                    gf_mul_const<M[3][2]>(a2) ^ gf_mul_const<M[3][3]>(a3);
  }
}

}  // namespace detail

// Row r rotates left by r.
inline void shift_rows(State& s) noexcept { detail::rotate_rows(s, false); }
inline void inv_shift_rows(State& s) noexcept { detail::rotate_rows(s, true); }

inline void mix_columns(State& s) noexcept { detail::mix_with<detail::kMixMatrix>(s); }
inline void inv_mix_columns(State& s) noexcept { detail::mix_with<detail::kInvMixMatrix>(s); }

// One full encryption round (1 .. Nr-1).
inline void encrypt_round(State& s, const RoundKey& rk) noexcept {
  sub_bytes(s);
  shift_rows(s);
  mix_columns(s);
  add_round_key(s, rk);
}

inline void encrypt_final_round(State& s, const RoundKey& rk) noexcept {
  sub_bytes(s);
  shift_rows(s);
  add_round_key(s, rk);
}

// Undoes the SubBytes/ShiftRows of round r+1 and the MixColumns of round r.
inline void decrypt_round(State& s, const RoundKey& rk) noexcept {
  inv_shift_rows(s);
  inv_sub_bytes(s);
  add_round_key(s, rk);
  inv_mix_columns(s);
}

inline void decrypt_final_round(State& s, const RoundKey& rk0) noexcept {
  inv_shift_rows(s);
  inv_sub_bytes(s);
  add_round_key(s, rk0);
}

inline Block encrypt_block(const Block& in, const KeySchedule& ks) {
  const int nr = ks.rounds();
  State s = State::load(in);
  add_round_key(s, ks.round_key(0));
  for (int r = 1; r < nr; ++r) encrypt_round(s, ks.round_key(r));
  encrypt_final_round(s, ks.round_key(nr));
  return s.store();
}

inline Block decrypt_block(const Block& in, const KeySchedule& ks) {
  const int nr = ks.rounds();
  State s = State::load(in);
  add_round_key(s, ks.round_key(nr));
  for (int r = nr - 1; r >= 1; --r) decrypt_round(s, ks.round_key(r));
  decrypt_final_round(s, ks.round_key(0));
  return s.store();
}

}  // namespace rlab
