#pragma once

// Plaintext/ciphertext statistics: channel histograms, byte entropy,
// histogram flatness and the distinct-block count that exposes ECB.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>

#include "rlab/bmp_codec.hpp"

namespace rlab::analysis {

// 99.9th percentile of the chi-square distribution with 255 degrees of freedom.
inline constexpr double kChiSquare255Critical999 = 330.51974363400586;

struct HistogramReport {
  // counts[c][v], channel c in file order: 0 = B, 1 = G, 2 = R.
  std::array<std::array<std::uint64_t, 256>, 3> counts{};
  std::uint64_t total_pixels = 0;
};

struct LeakageReport {
  std::uint64_t total_blocks = 0;
  std::uint64_t distinct_blocks = 0;
  double distinct_ratio = 0.0;
  double entropy_bits_per_byte = 0.0;
};

// Row padding bytes are not pixels and are skipped.
inline HistogramReport histogram(const bmp::BmpImage& img) {
  HistogramReport h;
  for (std::size_t row = 0; row < img.height; ++row)
    for (std::size_t x = 0; x < img.width; ++x) {
      const std::uint8_t* px = img.pixel(x, row);
      for (int c = 0; c < 3; ++c) ++h.counts[c][px[c]];
    }
  h.total_pixels = static_cast<std::uint64_t>(img.width) * img.height;
  return h;
}

inline double shannon_entropy(std::span<const std::uint8_t> data) {
  if (data.empty()) throw std::invalid_argument("entropy of an empty buffer is undefined");
  std::array<std::uint64_t, 256> freq{};
  for (auto b : data) ++freq[b];
  const double n = static_cast<double>(data.size());
  double h = 0.0;
  for (auto f : freq) {
    if (f == 0) continue;
    const double p = static_cast<double>(f) / n;
    h -= p * std::log2(p);
  }
  return h;
}

// A trailing partial block is ignored.
inline LeakageReport duplicate_block_ratio(std::span<const std::uint8_t> data,
                                           std::size_t block_size = 16) {
  if (block_size == 0) throw std::invalid_argument("block size must be positive");
  if (data.size() < block_size)
    throw std::invalid_argument("need at least one " + std::to_string(block_size) +
                                "-byte block, got " + std::to_string(data.size()) + " bytes");
  const std::size_t blocks = data.size() / block_size;
  std::unordered_set<std::string_view> seen;
  seen.reserve(blocks);
  const auto* base = reinterpret_cast<const char*>(data.data());
  for (std::size_t i = 0; i < blocks; ++i) seen.emplace(base + i * block_size, block_size);

  LeakageReport r;
  r.total_blocks = blocks;
  r.distinct_blocks = seen.size();
  r.distinct_ratio = static_cast<double>(r.distinct_blocks) / static_cast<double>(blocks);
  r.entropy_bits_per_byte = shannon_entropy(data);
  return r;
}

// Chi-square of each channel against a uniform spread over 256 bins.
inline std::array<double, 3> flatness_chi_square(const HistogramReport& h) {
  if (h.total_pixels == 0) throw std::invalid_argument("histogram is empty");
  const double expected = static_cast<double>(h.total_pixels) / 256.0;
  std::array<double, 3> chi{};
  for (int c = 0; c < 3; ++c)
    for (auto observed : h.counts[c]) {
      const double d = static_cast<double>(observed) - expected;
      chi[c] += d * d / expected;
    }
  return chi;
}

}  // namespace rlab::analysis
