#pragma once

// Analytic operation-cost model for one Rijndael block. Counts and totals
// are the published closed forms taken as given; nothing here is derived
// from the code in this library.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rlab::cost {

struct CostParams {
  int n_b = 4;       // block length / 32
  int n_r = 10;      // rounds
  double t_a = 1.0;  // cycles per bitwise AND
  double t_o = 1.0;  // cycles per bitwise OR
  double t_s = 1.0;  // cycles per shift

  void validate() const {
    if (n_b < 1) throw std::invalid_argument("n_b must be at least 1");
    if (n_r < 1) throw std::invalid_argument("n_r must be at least 1");
    if (t_a < 0 || t_o < 0 || t_s < 0)
      throw std::invalid_argument("unit costs must be nonnegative");
  }
};

struct OpCounts {
  std::int64_t ands = 0;
  std::int64_t ors = 0;
  std::int64_t xors = 0;
  std::int64_t shifts = 0;

  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

// The round cost is published in two alternative forms; both are kept.
enum class Transform { AddRoundKey, SubBytes, ShiftRows, RoundXORForm, RoundANDForm };

inline Transform parse_transform(std::string_view name) {
  if (name == "AddRoundKey") return Transform::AddRoundKey;
  if (name == "SubBytes") return Transform::SubBytes;
  if (name == "ShiftRows") return Transform::ShiftRows;
  if (name == "RoundXORForm") return Transform::RoundXORForm;
  if (name == "RoundANDForm") return Transform::RoundANDForm;
  throw std::invalid_argument("unknown transform '" + std::string(name) + "'");
}

inline OpCounts transform_counts(Transform t, int n_b) {
  if (n_b < 1) throw std::invalid_argument("n_b must be at least 1");
  const std::int64_t nb = n_b;
  switch (t) {
    case Transform::AddRoundKey: return {.ands = 8 * nb, .ors = 4 * nb};
    case Transform::SubBytes: return {.ands = 3 * nb, .ors = 2 * nb};
    case Transform::ShiftRows: return {.ors = 3 * nb, .shifts = 3 * nb};
    case Transform::RoundXORForm: return {.ors = 8 * nb, .xors = 19 * nb, .shifts = 64 * nb};
    case Transform::RoundANDForm: return {.ands = 38 * nb, .ors = 27 * nb, .shifts = 64 * nb};
  }
  throw std::invalid_argument("unknown transform");
}

// Multipliers of t_a, t_o and t_s in the encryption total.
struct Coefficients {
  std::int64_t and_coeff = 0;
  std::int64_t or_coeff = 0;
  std::int64_t shift_coeff = 0;

  friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

inline Coefficients encrypt_coefficients(int n_b, int n_r) {
  const std::int64_t nb = n_b, nr = n_r;
  return {46 * nb * nr - 30 * nb,
          31 * nb * nr + 12 * (nr - 1) - 20 * nb,
          64 * nb * nr + 96 * (nr - 1) - 61 * nb};
}

inline double encrypt_cycles(const CostParams& p) {
  p.validate();
  const auto c = encrypt_coefficients(p.n_b, p.n_r);
  return static_cast<double>(c.and_coeff) * p.t_a + static_cast<double>(c.or_coeff) * p.t_o +
         static_cast<double>(c.shift_coeff) * p.t_s;
}

// Extra cost of one InvMixColumns over one MixColumns. Negative when shifts
// dominate; the formula allows it.
inline double mixcol_delta(const CostParams& p) {
  p.validate();
  const double nb = p.n_b;
  return 96 * nb * p.t_a + 72 * nb * p.t_o - 32 * nb * p.t_s;
}

inline double decrypt_cycles(const CostParams& p) {
  return encrypt_cycles(p) + mixcol_delta(p) * (p.n_r - 1);
}

}  // namespace rlab::cost
