#pragma once

// The optimization ladder. Every path here must stay bit-identical to
// rijndael_core.hpp; tests compare them exhaustively.
//
//   Base  every round through the plain loops.
//   Opt1  odd-numbered rounds (1, 3, 5, ...) through the optimized kernel.
//   Opt2  rounds in a period-4 pattern: two optimized, two plain.
//   OptF  every round optimized.
//
// The optimized kernel is either the fused T-table round (default) or the
// unrolled transforms with table-driven MixColumns.

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rlab/errors.hpp"
#include "rlab/gf256.hpp"
#include "rlab/rijndael_core.hpp"

namespace rlab {

// ---------------------------------------------------------------------------
// T-tables

// A column packed into 32 bits, row r in bits [8r, 8r + 8).
using ColumnWord = std::uint32_t;

struct TTables {
  std::array<std::array<ColumnWord, 256>, 4> enc{};
  std::array<std::array<ColumnWord, 256>, 4> dec{};

  static constexpr std::size_t enc_footprint_bytes() noexcept { return sizeof(enc); }
  static constexpr std::size_t dec_footprint_bytes() noexcept { return sizeof(dec); }
  static constexpr std::size_t footprint_bytes() noexcept {
    return enc_footprint_bytes() + dec_footprint_bytes();
  }
};

constexpr std::array<std::uint8_t, 4> unpack_column(ColumnWord w) noexcept {
  return {static_cast<std::uint8_t>(w), static_cast<std::uint8_t>(w >> 8),
          static_cast<std::uint8_t>(w >> 16), static_cast<std::uint8_t>(w >> 24)};
}

constexpr ColumnWord pack_column(std::uint8_t r0, std::uint8_t r1, std::uint8_t r2,
                                 std::uint8_t r3) noexcept {
  return static_cast<ColumnWord>(r0) | static_cast<ColumnWord>(r1) << 8 |
         static_cast<ColumnWord>(r2) << 16 | static_cast<ColumnWord>(r3) << 24;
}

// enc[k][x] is the contribution of S(x) sitting in row k to the output
// column: byte r holds MixMatrix[r][k] * S(x). dec is the same for the
// inverse S-box and the InvMixColumns matrix.
inline TTables build_t_tables() {
  const auto& boxes = gf256::sbox();
  TTables t;
  for (unsigned x = 0; x < 256; ++x) {
    const auto s = boxes.forward[x];
    const auto si = boxes.inverse[x];
    for (int k = 0; k < 4; ++k) {
      t.enc[k][x] = pack_column(gf256::gf_mul(detail::kMixMatrix[0][k], s),
                                gf256::gf_mul(detail::kMixMatrix[1][k], s),
                                gf256::gf_mul(detail::kMixMatrix[2][k], s),
                                gf256::gf_mul(detail::kMixMatrix[3][k], s));
      t.dec[k][x] = pack_column(gf256::gf_mul(detail::kInvMixMatrix[0][k], si),
                                gf256::gf_mul(detail::kInvMixMatrix[1][k], si),
                                gf256::gf_mul(detail::kInvMixMatrix[2][k], si),
                                gf256::gf_mul(detail::kInvMixMatrix[3][k], si));
    }
  }
  return t;
}

inline const TTables& t_tables() {
  static const TTables tables = build_t_tables();
  return tables;
}

using Columns = std::array<ColumnWord, 4>;

inline Columns to_columns(const State& s) noexcept {
  Columns c;
  for (int j = 0; j < 4; ++j)
    c[j] = pack_column(s.bytes[0][j], s.bytes[1][j], s.bytes[2][j], s.bytes[3][j]);
  return c;
}

inline State from_columns(const Columns& c) noexcept {
  State s;
  for (int j = 0; j < 4; ++j) {
    const auto col = unpack_column(c[j]);
    for (int i = 0; i < 4; ++i) s.bytes[i][j] = col[i];
  }
  return s;
}

namespace detail {

constexpr unsigned byte_of(ColumnWord w, int k) noexcept { return (w >> (8 * k)) & 0xFF; }

}  // namespace detail

// SubBytes, ShiftRows, MixColumns and AddRoundKey as sixteen lookups.
inline Columns ttable_round(const Columns& in, const Columns& rk,
                            const TTables& t = t_tables()) noexcept {
  using detail::byte_of;
  Columns out;
  for (int j = 0; j < 4; ++j)
    out[j] = t.enc[0][byte_of(in[j], 0)] ^ t.enc[1][byte_of(in[(j + 1) & 3], 1)] ^
             t.enc[2][byte_of(in[(j + 2) & 3], 2)] ^
             t.enc[3][byte_of(in[(j + 3) & 3], 3)] ^ rk[j];
  return out;
}

// Final round: byte r of enc[(r + 2) % 4] carries coefficient 01, i.e. S(x)
// alone, so masking recovers SubBytes without MixColumns.
inline Columns ttable_final_round(const Columns& in, const Columns& rk,
                                  const TTables& t = t_tables()) noexcept {
  using detail::byte_of;
  Columns out;
  for (int j = 0; j < 4; ++j)
    out[j] = (t.enc[2][byte_of(in[j], 0)] & 0x000000FFu) ^
             (t.enc[3][byte_of(in[(j + 1) & 3], 1)] & 0x0000FF00u) ^
             (t.enc[0][byte_of(in[(j + 2) & 3], 2)] & 0x00FF0000u) ^
             (t.enc[1][byte_of(in[(j + 3) & 3], 3)] & 0xFF000000u) ^ rk[j];
  return out;
}

// `dk` is the round key passed through InvMixColumns.
inline Columns ttable_inv_round(const Columns& in, const Columns& dk,
                                const TTables& t = t_tables()) noexcept {
  using detail::byte_of;
  Columns out;
  for (int j = 0; j < 4; ++j)
    out[j] = t.dec[0][byte_of(in[j], 0)] ^ t.dec[1][byte_of(in[(j + 3) & 3], 1)] ^
             t.dec[2][byte_of(in[(j + 2) & 3], 2)] ^
             t.dec[3][byte_of(in[(j + 1) & 3], 3)] ^ dk[j];
  return out;
}

inline Columns ttable_inv_final_round(const Columns& in, const Columns& rk0) noexcept {
  using detail::byte_of;
  const auto& inv = gf256::sbox().inverse;
  Columns out;
  for (int j = 0; j < 4; ++j)
    out[j] = pack_column(inv[byte_of(in[j], 0)], inv[byte_of(in[(j + 3) & 3], 1)],
                         inv[byte_of(in[(j + 2) & 3], 2)],
                         inv[byte_of(in[(j + 1) & 3], 3)]) ^
             rk0[j];
  return out;
}

// ---------------------------------------------------------------------------
// Unrolled transforms. Inner loops unrolled, outer row loop kept.

inline void unrolled_add_round_key(State& s, const RoundKey& rk) noexcept {
  auto& a = s.bytes;
  const auto& k = rk.bytes;
  for (int i = 0; i < 4; i++) {
    a[i][0] ^= k[i][0];
    a[i][1] ^= k[i][1];
    a[i][2] ^= k[i][2];
    a[i][3] ^= k[i][3];
  }
}

inline void unrolled_substitute(State& s, const std::array<std::uint8_t, 256>& box) noexcept {
  auto& a = s.bytes;
  for (int i = 0; i < 4; i++) {
    a[i][0] = box[a[i][0]];
    a[i][1] = box[a[i][1]];
    a[i][2] = box[a[i][2]];
    a[i][3] = box[a[i][3]];
  }
}

inline void unrolled_sub_bytes(State& s) noexcept { unrolled_substitute(s, gf256::sbox().forward); }
inline void unrolled_inv_sub_bytes(State& s) noexcept {
  unrolled_substitute(s, gf256::sbox().inverse);
}

// Row 0 is skipped; the copy-back loop is merged into the same body.
inline void unrolled_shift_rows(State& s) noexcept {
  auto& a = s.bytes;
  std::uint8_t tmp[4];
  for (int i = 1; i < 4; i++) {
    tmp[0] = a[i][(0 + i) & 3];
    tmp[1] = a[i][(1 + i) & 3];
    tmp[2] = a[i][(2 + i) & 3];
    tmp[3] = a[i][(3 + i) & 3];
    a[i][0] = tmp[0];
    a[i][1] = tmp[1];
    a[i][2] = tmp[2];
    a[i][3] = tmp[3];
  }
}

inline void unrolled_inv_shift_rows(State& s) noexcept {
  auto& a = s.bytes;
  std::uint8_t tmp[4];
  for (int i = 1; i < 4; i++) {
    tmp[0] = a[i][(4 - i) & 3];
    tmp[1] = a[i][(5 - i) & 3];
    tmp[2] = a[i][(6 - i) & 3];
    tmp[3] = a[i][(7 - i) & 3];
    a[i][0] = tmp[0];
    a[i][1] = tmp[1];
    a[i][2] = tmp[2];
    a[i][3] = tmp[3];
  }
}

inline void table_mix_columns(State& s, const gf256::MulTable& t = gf256::mul_table()) {
  const auto& m2 = t.row(0x02);
  const auto& m3 = t.row(0x03);
  auto& a = s.bytes;
  for (int j = 0; j < 4; j++) {
    const std::uint8_t a0 = a[0][j], a1 = a[1][j], a2 = a[2][j], a3 = a[3][j];
    a[0][j] = m2[a0] ^ m3[a1] ^ a2 ^ a3;
    a[1][j] = a0 ^ m2[a1] ^ m3[a2] ^ a3;
    a[2][j] = a0 ^ a1 ^ m2[a2] ^ m3[a3];
    a[3][j] = m3[a0] ^ a1 ^ a2 ^ m2[a3];
  }
}

inline void table_inv_mix_columns(State& s, const gf256::MulTable& t = gf256::mul_table()) {
  const auto& m9 = t.row(0x09);
  const auto& mb = t.row(0x0B);
  const auto& md = t.row(0x0D);
  const auto& me = t.row(0x0E);
  auto& a = s.bytes;
  for (int j = 0; j < 4; j++) {
    const std::uint8_t a0 = a[0][j], a1 = a[1][j], a2 = a[2][j], a3 = a[3][j];
    a[0][j] = me[a0] ^ mb[a1] ^ md[a2] ^ m9[a3];
    a[1][j] = m9[a0] ^ me[a1] ^ mb[a2] ^ md[a3];
    a[2][j] = md[a0] ^ m9[a1] ^ me[a2] ^ mb[a3];
    a[3][j] = mb[a0] ^ md[a1] ^ m9[a2] ^ me[a3];
  }
}

// ---------------------------------------------------------------------------
// Plans

enum class Variant { Base, Opt1, Opt2, OptF };
enum class RoundKernel { TTable, UnrolledMulTable };

inline constexpr std::array<Variant, 4> kAllVariants{Variant::Base, Variant::Opt1,
                                                     Variant::Opt2, Variant::OptF};

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Base: return "base";
    case Variant::Opt1: return "opt1";
    case Variant::Opt2: return "opt2";
    case Variant::OptF: return "optf";
  }
  throw std::invalid_argument("unknown variant");
}

inline std::string_view to_string(RoundKernel k) {
  switch (k) {
    case RoundKernel::TTable: return "ttable";
    case RoundKernel::UnrolledMulTable: return "unrolled";
  }
  throw std::invalid_argument("unknown round kernel");
}

inline Variant parse_variant(std::string_view name) {
  for (auto v : kAllVariants)
    if (to_string(v) == name) return v;
  throw std::invalid_argument("unknown variant '" + std::string(name) +
                              "' (expected base, opt1, opt2 or optf)");
}

inline RoundKernel parse_kernel(std::string_view name) {
  if (name == "ttable") return RoundKernel::TTable;
  if (name == "unrolled") return RoundKernel::UnrolledMulTable;
  throw std::invalid_argument("unknown round kernel '" + std::string(name) +
                              "' (expected ttable or unrolled)");
}

struct VariantPlan {
  Variant variant = Variant::Base;
  RoundKernel kernel = RoundKernel::TTable;
  // round_flags[r - 1] is true when encryption round r takes the optimized path.
  std::vector<bool> round_flags;

  int rounds() const noexcept { return static_cast<int>(round_flags.size()); }
  std::size_t optimized_rounds() const noexcept {
    std::size_t n = 0;
    for (bool f : round_flags) n += f;
    return n;
  }
};

inline VariantPlan make_plan(Variant variant, int rounds,
                             RoundKernel kernel = RoundKernel::TTable) {
  if (rounds < 1) throw std::invalid_argument("round count must be at least 1");
  VariantPlan plan{variant, kernel, std::vector<bool>(static_cast<std::size_t>(rounds))};
  for (int i = 0; i < rounds; ++i) {
    switch (variant) {
      case Variant::Base: plan.round_flags[i] = false; break;
      case Variant::Opt1: plan.round_flags[i] = (i % 2 == 0); break;
      case Variant::Opt2: plan.round_flags[i] = (i % 4 < 2); break;
      case Variant::OptF: plan.round_flags[i] = true; break;
      default: throw std::invalid_argument("unknown variant");
    }
  }
  return plan;
}

// Static lookup-table bytes a configuration touches.
struct Footprint {
  std::size_t sbox = 0;
  std::size_t mul_table = 0;
  std::size_t t_tables = 0;

  std::size_t total() const noexcept { return sbox + mul_table + t_tables; }
  friend bool operator==(const Footprint&, const Footprint&) = default;
};

inline Footprint static_footprint(Variant variant,
                                  RoundKernel kernel = RoundKernel::TTable) {
  Footprint f{gf256::SBoxPair::footprint_bytes(), 0, 0};
  if (variant == Variant::Base) return f;
  if (kernel == RoundKernel::TTable)
    f.t_tables = TTables::footprint_bytes();
  else
    f.mul_table = gf256::MulTable::footprint_bytes();
  return f;
}

// ---------------------------------------------------------------------------
// Variant cipher

// A schedule bound to a plan, with the word-form round keys the T-table
// kernel needs precomputed.
class VariantCipher {
 public:
  VariantCipher(KeySchedule schedule, VariantPlan plan)
      : ks_(std::move(schedule)), plan_(std::move(plan)) {
    if (plan_.rounds() != ks_.rounds())
      throw std::invalid_argument("plan covers " + std::to_string(plan_.rounds()) +
                                  " rounds but schedule has " +
                                  std::to_string(ks_.rounds()));
    const int nr = ks_.rounds();
    enc_keys_.reserve(static_cast<std::size_t>(nr) + 1);
    dec_keys_.reserve(static_cast<std::size_t>(nr) + 1);
    for (int r = 0; r <= nr; ++r) {
      enc_keys_.push_back(to_columns(ks_.round_key(r)));
      State k = ks_.round_key(r);
      if (r != 0 && r != nr) inv_mix_columns(k);
      dec_keys_.push_back(to_columns(k));
    }
    fast_path_ = plan_.optimized_rounds() == static_cast<std::size_t>(nr) &&
                 plan_.kernel == RoundKernel::TTable;
  }

  const KeySchedule& schedule() const noexcept { return ks_; }
  const VariantPlan& plan() const noexcept { return plan_; }

  Block encrypt(const Block& in) const {
    if (fast_path_) return encrypt_all_ttable(in);
    const int nr = ks_.rounds();
    Lane lane(in);
    if (uses_ttable(1))
      lane.xor_columns(enc_keys_[0]);
    else
      add_round_key(lane.state(), ks_.round_key(0));
    for (int r = 1; r <= nr; ++r) {
      const bool last = r == nr;
      if (uses_ttable(r)) {
        auto& c = lane.columns();
        c = last ? ttable_final_round(c, enc_keys_[r]) : ttable_round(c, enc_keys_[r]);
      } else if (optimized(r)) {
        auto& s = lane.state();
        unrolled_sub_bytes(s);
        unrolled_shift_rows(s);
        if (!last) table_mix_columns(s);
        unrolled_add_round_key(s, ks_.round_key(r));
      } else if (last) {
        encrypt_final_round(lane.state(), ks_.round_key(r));
      } else {
        encrypt_round(lane.state(), ks_.round_key(r));
      }
    }
    return lane.store();
  }

  // Decryption step k (k = 0 first) undoes the SubBytes/ShiftRows of
  // encryption round nr - k and follows that round's plan flag.
  Block decrypt(const Block& in) const {
    if (fast_path_) return decrypt_all_ttable(in);
    const int nr = ks_.rounds();
    Lane lane(in);
    if (uses_ttable(nr))
      lane.xor_columns(enc_keys_[nr]);
    else
      add_round_key(lane.state(), ks_.round_key(nr));
    for (int r = nr; r >= 1; --r) {
      const bool last = r == 1;
      // round key index applied in this step
      const int k = r - 1;
      if (uses_ttable(r)) {
        auto& c = lane.columns();
        c = last ? ttable_inv_final_round(c, enc_keys_[0]) : ttable_inv_round(c, dec_keys_[k]);
      } else if (optimized(r)) {
        auto& s = lane.state();
        unrolled_inv_shift_rows(s);
        unrolled_inv_sub_bytes(s);
        unrolled_add_round_key(s, ks_.round_key(k));
        if (!last) table_inv_mix_columns(s);
      } else if (last) {
        decrypt_final_round(lane.state(), ks_.round_key(0));
      } else {
        decrypt_round(lane.state(), ks_.round_key(k));
      }
    }
    return lane.store();
  }

 private:
  // Holds the block either as a State or as column words and converts
  // lazily when consecutive rounds switch representation.
  class Lane {
   public:
    explicit Lane(const Block& b) : state_(State::load(b)) {}

    State& state() {
      if (words_) {
        state_ = from_columns(cols_);
        words_ = false;
      }
      return state_;
    }
    Columns& columns() {
      if (!words_) {
        cols_ = to_columns(state_);
        words_ = true;
      }
      return cols_;
    }
    void xor_columns(const Columns& k) {
      auto& c = columns();
      for (int j = 0; j < 4; ++j) c[j] ^= k[j];
    }
    Block store() { return state().store(); }

   private:
    State state_;
    Columns cols_{};
    bool words_ = false;
  };

  bool optimized(int round) const { return plan_.round_flags[static_cast<std::size_t>(round - 1)]; }
  bool uses_ttable(int round) const {
    return optimized(round) && plan_.kernel == RoundKernel::TTable;
  }

  static Columns load_words(const Block& in) noexcept {
    Columns c;
    for (int j = 0; j < 4; ++j)
      c[j] = pack_column(in[4 * j], in[4 * j + 1], in[4 * j + 2], in[4 * j + 3]);
    return c;
  }

  static Block store_words(const Columns& c) noexcept {
    Block out;
    for (int j = 0; j < 4; ++j) {
      const auto col = unpack_column(c[j]);
      for (int i = 0; i < 4; ++i) out[4 * j + i] = col[i];
    }
    return out;
  }

  Block encrypt_all_ttable(const Block& in) const noexcept {
    const TTables& t = t_tables();
    const int nr = ks_.rounds();
    Columns c = load_words(in);
    for (int j = 0; j < 4; ++j) c[j] ^= enc_keys_[0][j];
    for (int r = 1; r < nr; ++r) c = ttable_round(c, enc_keys_[r], t);
    return store_words(ttable_final_round(c, enc_keys_[nr], t));
  }

  Block decrypt_all_ttable(const Block& in) const noexcept {
    const TTables& t = t_tables();
    const int nr = ks_.rounds();
    Columns c = load_words(in);
    for (int j = 0; j < 4; ++j) c[j] ^= enc_keys_[nr][j];
    for (int r = nr - 1; r >= 1; --r) c = ttable_inv_round(c, dec_keys_[r], t);
    return store_words(ttable_inv_final_round(c, enc_keys_[0]));
  }

  KeySchedule ks_;
  VariantPlan plan_;
  std::vector<Columns> enc_keys_;
  std::vector<Columns> dec_keys_;
  bool fast_path_ = false;
};

inline Block encrypt_block_variant(const Block& in, const KeySchedule& ks,
                                   const VariantPlan& plan) {
  return VariantCipher(ks, plan).encrypt(in);
}

inline Block decrypt_block_variant(const Block& in, const KeySchedule& ks,
                                   const VariantPlan& plan) {
  return VariantCipher(ks, plan).decrypt(in);
}

}  // namespace rlab
