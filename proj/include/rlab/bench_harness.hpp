#pragma once

// Timing harness: encryption/decryption time versus payload size, key size,
// variant and mode; round-count sweeps; per-transform microbenchmarks.
//
// Key expansion and padding are timed separately from bulk processing.
// Each variant's output is checked against the Base variant before it is
// timed, so a fast but wrong path fails loudly instead of winning.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <future>
#include <memory>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "rlab/block_modes.hpp"
#include "rlab/errors.hpp"
#include "rlab/opt_variants.hpp"
#include "rlab/rijndael_core.hpp"

namespace rlab::bench {

enum class Direction { Encrypt, Decrypt };

inline std::string_view to_string(Direction d) {
  return d == Direction::Encrypt ? "encrypt" : "decrypt";
}
inline std::string_view to_string(Mode m) { return m == Mode::ECB ? "ecb" : "cbc"; }

// Image workload sizes, in KiB as file sizes are usually quoted.
inline const std::vector<std::size_t> kDefaultPayloadSizes{117 * 1024, 263 * 1024,
                                                           468 * 1024};

struct BenchConfig {
  std::vector<std::size_t> payload_sizes = kDefaultPayloadSizes;
  std::vector<int> key_sizes{128, 192, 256};
  // Empty: the standard round count of each key size.
  std::vector<int> rounds;
  std::vector<Variant> variants{kAllVariants.begin(), kAllVariants.end()};
  RoundKernel kernel = RoundKernel::TTable;
  std::vector<Mode> modes{Mode::ECB, Mode::CBC};
  std::vector<Direction> directions{Direction::Encrypt, Direction::Decrypt};
  int repetitions = 5;
  int warmup = 1;
  std::uint64_t seed = 1;
  bool parallel_cells = false;

  void validate() const {
    if (repetitions < 3) throw std::invalid_argument("repetitions must be at least 3");
    if (warmup < 0) throw std::invalid_argument("warmup must be nonnegative");
    if (payload_sizes.empty() || key_sizes.empty() || variants.empty() || modes.empty() ||
        directions.empty())
      throw std::invalid_argument("every benchmark dimension needs at least one value");
    for (auto s : payload_sizes)
      if (s == 0) throw std::invalid_argument("payload sizes must be positive");
    for (auto k : key_sizes) (void)standard_rounds(k);
    for (auto r : rounds)
      if (r < 1) throw std::invalid_argument("round counts must be at least 1");
  }
};

struct Stats {
  double median = 0, mean = 0, stddev = 0, min = 0, max = 0;
};

inline Stats summarize(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("no samples");
  std::sort(samples.begin(), samples.end());
  Stats s;
  const std::size_t n = samples.size();
  s.min = samples.front();
  s.max = samples.back();
  s.median = n % 2 ? samples[n / 2] : (samples[n / 2 - 1] + samples[n / 2]) / 2;
  s.mean = std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
  double ss = 0;
  for (double x : samples) ss += (x - s.mean) * (x - s.mean);
  s.stddev = n > 1 ? std::sqrt(ss / static_cast<double>(n - 1)) : 0.0;
  return s;
}

struct BenchResult {
  std::string kind = "bulk";  // bulk | micro
  std::string transform;      // micro only
  std::size_t payload_bytes = 0;
  int key_size = 128;
  int rounds = 10;
  Variant variant = Variant::Base;
  RoundKernel kernel = RoundKernel::TTable;
  Mode mode = Mode::ECB;
  Direction direction = Direction::Encrypt;
  int repetitions = 0;
  int warmup = 0;
  Stats seconds;
  double throughput_bytes_per_s = 0;
  double key_expansion_seconds = 0;
  double padding_seconds = 0;
  std::uint64_t seed = 0;
};

// Deterministic bytes for a given (size, seed); the same arguments always
// produce the same payload.
inline Bytes make_payload(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 gen(seed * 0x9E3779B97F4A7C15ull + size);
  Bytes out(size);
  std::size_t i = 0;
  while (i < size) {
    auto word = gen();
    for (int k = 0; k < 8 && i < size; ++k, ++i) out[i] = static_cast<std::uint8_t>(word >> (8 * k));
  }
  return out;
}

namespace detail {

template <class T>
inline void escape(const T& value) {
  asm volatile("" : : "g"(&value) : "memory");
}

template <class F>
double time_once(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

template <class F>
std::vector<double> time_repeated(int warmup, int reps, F&& f) {
  for (int i = 0; i < warmup; ++i) f();
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i) samples.push_back(time_once(f));
  return samples;
}

struct Cell {
  std::size_t payload_bytes;
  int key_size;
  int rounds;
  Mode mode;
};

// One timed workload. Slots are sampled round-robin, one repetition of every
// slot per pass, so slow periods on a shared machine hit all of them alike.
struct Slot {
  BenchResult meta;
  std::function<void()> body;
  std::size_t processed_bytes = 0;  // input size after padding
  std::vector<double> samples;
};

inline std::vector<Slot> prepare_cell(const BenchConfig& cfg, const Cell& cell) {
  struct Context {
    Bytes padded, expected_ct;
    Block iv;
    std::vector<VariantCipher> ciphers;
  };
  auto ctx = std::make_shared<Context>();
  const Bytes payload = make_payload(cell.payload_bytes, cfg.seed);
  const Bytes key = make_payload(static_cast<std::size_t>(cell.key_size / 8), cfg.seed + 1);
  const Bytes iv_bytes = make_payload(kBlockBytes, cfg.seed + 2);
  std::copy(iv_bytes.begin(), iv_bytes.end(), ctx->iv.begin());

  const double pad_s = summarize(time_repeated(0, cfg.repetitions, [&] {
                         ctx->padded = pkcs7_pad(payload);
                       })).median;

  constexpr int kExpansionBatch = 200;
  const double expand_s = summarize(time_repeated(0, cfg.repetitions, [&] {
                            for (int i = 0; i < kExpansionBatch; ++i) {
                              auto ks = key_expansion(key, cell.rounds);
                              escape(ks);
                            }
                          })).median /
                          kExpansionBatch;

  const KeySchedule ks = key_expansion(key, cell.rounds);
  const Mode mode = cell.mode;
  auto run = [mode](const VariantCipher& c, Direction d, std::span<const std::uint8_t> in,
                    const Block& iv) {
    if (d == Direction::Encrypt)
      return mode == Mode::ECB ? ecb_encrypt(in, c) : cbc_encrypt(in, c, iv);
    return mode == Mode::ECB ? ecb_decrypt(in, c) : cbc_decrypt(in, c, iv);
  };

  const VariantCipher reference(ks, make_plan(Variant::Base, cell.rounds));
  ctx->expected_ct = run(reference, Direction::Encrypt, ctx->padded, ctx->iv);

  std::vector<Slot> slots;
  ctx->ciphers.reserve(cfg.variants.size());
  for (auto variant : cfg.variants) {
    const auto& cipher =
        ctx->ciphers.emplace_back(ks, make_plan(variant, cell.rounds, cfg.kernel));
    if (run(cipher, Direction::Encrypt, ctx->padded, ctx->iv) != ctx->expected_ct ||
        run(cipher, Direction::Decrypt, ctx->expected_ct, ctx->iv) != ctx->padded)
      throw Error("variant " + std::string(rlab::to_string(variant)) +
                  " disagrees with the baseline cipher");
    for (auto dir : cfg.directions) {
      Slot slot;
      BenchResult& r = slot.meta;
      r.payload_bytes = cell.payload_bytes;
      r.key_size = cell.key_size;
      r.rounds = cell.rounds;
      r.variant = variant;
      r.kernel = cfg.kernel;
      r.mode = cell.mode;
      r.direction = dir;
      r.repetitions = cfg.repetitions;
      r.warmup = cfg.warmup;
      r.key_expansion_seconds = expand_s;
      r.padding_seconds = pad_s;
      r.seed = cfg.seed;
      slot.processed_bytes = ctx->padded.size();
      slot.body = [ctx, &cipher, dir, run] {
        const Bytes& input = dir == Direction::Encrypt ? ctx->padded : ctx->expected_ct;
        auto out = run(cipher, dir, input, ctx->iv);
        escape(out);
      };
      slots.push_back(std::move(slot));
    }
  }
  return slots;
}

inline std::vector<BenchResult> measure(std::vector<Slot> slots, int warmup, int reps) {
  for (int i = 0; i < warmup; ++i)
    for (auto& s : slots) s.body();
  for (auto& s : slots) s.samples.reserve(static_cast<std::size_t>(reps));
  for (int i = 0; i < reps; ++i)
    for (auto& s : slots) s.samples.push_back(time_once(s.body));

  std::vector<BenchResult> results;
  results.reserve(slots.size());
  for (auto& s : slots) {
    BenchResult r = std::move(s.meta);
    r.seconds = summarize(std::move(s.samples));
    r.throughput_bytes_per_s = static_cast<double>(s.processed_bytes) / r.seconds.median;
    results.push_back(std::move(r));
  }
  return results;
}

inline std::vector<BenchResult> run_cell(const BenchConfig& cfg, const Cell& cell) {
  return measure(prepare_cell(cfg, cell), cfg.warmup, cfg.repetitions);
}

}  // namespace detail

// One result per (size x key size x rounds x mode x variant x direction).
inline std::vector<BenchResult> run_matrix(const BenchConfig& cfg) {
  cfg.validate();
  std::vector<detail::Cell> cells;
  for (auto size : cfg.payload_sizes)
    for (auto key_size : cfg.key_sizes) {
      std::vector<int> rounds = cfg.rounds;
      if (rounds.empty()) rounds.push_back(standard_rounds(key_size));
      for (auto nr : rounds)
        for (auto mode : cfg.modes) cells.push_back({size, key_size, nr, mode});
    }

  std::vector<std::vector<BenchResult>> per_cell(cells.size());
  if (cfg.parallel_cells) {
    const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
    for (std::size_t start = 0; start < cells.size(); start += width) {
      std::vector<std::future<std::vector<BenchResult>>> batch;
      for (std::size_t i = start; i < std::min(cells.size(), start + width); ++i)
        batch.push_back(std::async(std::launch::async, detail::run_cell, std::cref(cfg),
                                   std::cref(cells[i])));
      for (std::size_t i = 0; i < batch.size(); ++i) per_cell[start + i] = batch[i].get();
    }
  } else {
    // Serial runs interleave every cell, so cells compared with each other
    // (sizes, round counts) share the same noise.
    std::vector<detail::Slot> all;
    for (const auto& c : cells)
      for (auto& slot : detail::prepare_cell(cfg, c)) all.push_back(std::move(slot));
    return detail::measure(std::move(all), cfg.warmup, cfg.repetitions);
  }

  std::vector<BenchResult> results;
  for (auto& v : per_cell)
    for (auto& r : v) results.push_back(std::move(r));
  return results;
}

inline std::vector<BenchResult> round_sweep(std::vector<std::size_t> sizes,
                                            std::vector<int> rounds,
                                            Variant variant = Variant::Base,
                                            int repetitions = 5, int warmup = 1,
                                            std::uint64_t seed = 1, Mode mode = Mode::ECB) {
  BenchConfig cfg;
  cfg.payload_sizes = std::move(sizes);
  cfg.key_sizes = {128};
  cfg.rounds = std::move(rounds);
  cfg.variants = {variant};
  cfg.modes = {mode};
  cfg.repetitions = repetitions;
  cfg.warmup = warmup;
  cfg.seed = seed;
  return run_matrix(cfg);
}

// ---------------------------------------------------------------------------
// Microbenchmarks

enum class RoundTransform {
  AddRoundKey,
  SubBytes,
  ShiftRows,
  MixColumns,
  InvSubBytes,
  InvShiftRows,
  InvMixColumns
};

inline constexpr std::array<RoundTransform, 7> kAllTransforms{
    RoundTransform::AddRoundKey,  RoundTransform::SubBytes,    RoundTransform::ShiftRows,
    RoundTransform::MixColumns,   RoundTransform::InvSubBytes, RoundTransform::InvShiftRows,
    RoundTransform::InvMixColumns};

inline std::string_view to_string(RoundTransform t) {
  switch (t) {
    case RoundTransform::AddRoundKey: return "AddRoundKey";
    case RoundTransform::SubBytes: return "SubBytes";
    case RoundTransform::ShiftRows: return "ShiftRows";
    case RoundTransform::MixColumns: return "MixColumns";
    case RoundTransform::InvSubBytes: return "InvSubBytes";
    case RoundTransform::InvShiftRows: return "InvShiftRows";
    case RoundTransform::InvMixColumns: return "InvMixColumns";
  }
  return "?";
}

inline RoundTransform parse_transform(std::string_view name) {
  for (auto t : kAllTransforms)
    if (to_string(t) == name) return t;
  throw std::invalid_argument("unknown transform '" + std::string(name) + "'");
}

namespace detail {

// Calls body(op) with a transform-specific lambda, so the loop inside body
// is instantiated, and inlined, once per transform.
template <bool Optimized, class Body>
inline void with_transform(RoundTransform t, Body&& body) {
  using RK = const RoundKey&;
  if constexpr (Optimized) {
    switch (t) {
      case RoundTransform::AddRoundKey: return body([](State& s, RK k) { unrolled_add_round_key(s, k); });
      case RoundTransform::SubBytes: return body([](State& s, RK) { unrolled_sub_bytes(s); });
      case RoundTransform::ShiftRows: return body([](State& s, RK) { unrolled_shift_rows(s); });
      case RoundTransform::MixColumns: return body([](State& s, RK) { table_mix_columns(s); });
      case RoundTransform::InvSubBytes: return body([](State& s, RK) { unrolled_inv_sub_bytes(s); });
      case RoundTransform::InvShiftRows: return body([](State& s, RK) { unrolled_inv_shift_rows(s); });
      case RoundTransform::InvMixColumns: return body([](State& s, RK) { table_inv_mix_columns(s); });
    }
  } else {
    switch (t) {
      case RoundTransform::AddRoundKey: return body([](State& s, RK k) { add_round_key(s, k); });
      case RoundTransform::SubBytes: return body([](State& s, RK) { sub_bytes(s); });
      case RoundTransform::ShiftRows: return body([](State& s, RK) { shift_rows(s); });
      case RoundTransform::MixColumns: return body([](State& s, RK) { mix_columns(s); });
      case RoundTransform::InvSubBytes: return body([](State& s, RK) { inv_sub_bytes(s); });
      case RoundTransform::InvShiftRows: return body([](State& s, RK) { inv_shift_rows(s); });
      case RoundTransform::InvMixColumns: return body([](State& s, RK) { inv_mix_columns(s); });
    }
  }
  throw std::invalid_argument("unknown transform");
}

template <bool Optimized>
inline void transform_loop(RoundTransform t, State& s, std::span<const RoundKey> keys,
                           std::size_t applications) {
  with_transform<Optimized>(t, [&](auto op) {
    std::size_t k = 0;
    for (std::size_t i = 0; i < applications; ++i) {
      op(s, keys[k]);
      if (++k == keys.size()) k = 0;
    }
  });
}

}  // namespace detail

// Base runs the plain loops; any other variant runs the unrolled /
// table-driven transform. payload_bytes records applications * 16.
inline BenchResult microbench_transform(RoundTransform t, Variant variant,
                                        std::size_t applications = 1'000'000,
                                        int repetitions = 5, int warmup = 1,
                                        std::uint64_t seed = 1) {
  if (repetitions < 3) throw std::invalid_argument("repetitions must be at least 3");
  const Bytes seed_bytes = make_payload(32, seed);
  Block b;
  std::copy_n(seed_bytes.begin(), kBlockBytes, b.begin());
  const KeySchedule ks =
      key_expansion(std::span<const std::uint8_t>(seed_bytes).subspan(16, 16), 10);
  State s = State::load(b);
  const bool optimized = variant != Variant::Base;

  const auto keys = ks.round_keys();
  auto samples = detail::time_repeated(warmup, repetitions, [&] {
    if (optimized)
      detail::transform_loop<true>(t, s, keys, applications);
    else
      detail::transform_loop<false>(t, s, keys, applications);
    detail::escape(s);
  });

  BenchResult r;
  r.kind = "micro";
  r.transform = std::string(to_string(t));
  r.payload_bytes = applications * kBlockBytes;
  r.variant = optimized ? Variant::OptF : Variant::Base;
  r.kernel = RoundKernel::UnrolledMulTable;
  r.seed = seed;
  r.repetitions = repetitions;
  r.warmup = warmup;
  r.seconds = summarize(std::move(samples));
  r.throughput_bytes_per_s = static_cast<double>(r.payload_bytes) / r.seconds.median;
  return r;
}

// ---------------------------------------------------------------------------
// Reports

enum class ReportFormat { CSV, Text };

inline ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::CSV;
  if (name == "text") return ReportFormat::Text;
  throw std::invalid_argument("unknown report format '" + std::string(name) + "'");
}

inline constexpr std::array<std::string_view, 20> kReportColumns{
    "kind",       "transform", "payload_bytes", "key_size",   "rounds",
    "variant",    "kernel",    "mode",          "direction",  "repetitions",
    "warmup",     "median_s",  "mean_s",        "stddev_s",   "min_s",
    "max_s",      "throughput_Bps", "key_expansion_s", "padding_s", "seed"};

namespace detail {

inline std::vector<std::string> row_values(const BenchResult& r) {
  auto num = [](double v) {
    std::ostringstream os;
    os.precision(9);
    os << v;
    return os.str();
  };
  const bool micro = r.kind == "micro";
  return {r.kind,
          micro ? r.transform : std::string("-"),
          std::to_string(r.payload_bytes),
          micro ? std::string("-") : std::to_string(r.key_size),
          micro ? std::string("-") : std::to_string(r.rounds),
          std::string(rlab::to_string(r.variant)),
          std::string(rlab::to_string(r.kernel)),
          micro ? std::string("-") : std::string(to_string(r.mode)),
          micro ? std::string("-") : std::string(to_string(r.direction)),
          std::to_string(r.repetitions),
          std::to_string(r.warmup),
          num(r.seconds.median),
          num(r.seconds.mean),
          num(r.seconds.stddev),
          num(r.seconds.min),
          num(r.seconds.max),
          num(r.throughput_bytes_per_s),
          num(r.key_expansion_seconds),
          num(r.padding_seconds),
          std::to_string(r.seed)};
}

}  // namespace detail

inline void emit_report(const std::vector<BenchResult>& results, ReportFormat format,
                        std::ostream& os) {
  if (results.empty()) throw std::invalid_argument("no results to report");
  if (format == ReportFormat::CSV) {
    for (std::size_t i = 0; i < kReportColumns.size(); ++i)
      os << (i ? "," : "") << kReportColumns[i];
    os << '\n';
    for (const auto& r : results) {
      const auto values = detail::row_values(r);
      for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
      os << '\n';
    }
  } else {
    for (const auto& r : results) {
      const auto values = detail::row_values(r);
      for (std::size_t i = 0; i < values.size(); ++i)
        os << (i ? " " : "") << kReportColumns[i] << '=' << values[i];
      os << '\n';
    }
  }
  if (!os) throw Error("failed to write benchmark report");
}

inline void emit_report(const std::vector<BenchResult>& results, ReportFormat format,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open report file '" + path + "'");
  emit_report(results, format, out);
  out.flush();
  if (!out) throw Error("failed to write report file '" + path + "'");
}

// ---------------------------------------------------------------------------
// Comparison with the published figures (informational only)

// 1 - optimized / baseline: the fraction of time saved.
inline double time_reduction(double baseline_s, double optimized_s) {
  return 1.0 - optimized_s / baseline_s;
}

inline const BenchResult* find_result(const std::vector<BenchResult>& results,
                                      std::size_t size, int key_size, int rounds,
                                      Variant v, Mode m, Direction d) {
  for (const auto& r : results)
    if (r.kind == "bulk" && r.payload_bytes == size && r.key_size == key_size &&
        r.rounds == rounds && r.variant == v && r.mode == m && r.direction == d)
      return &r;
  return nullptr;
}

// Lines comparing measured 128/10 ECB encryption savings per variant with the
// published ones (Opt1 13%, Opt2 12%, OptF 20%). Cells missing from the
// results are skipped.
inline std::vector<std::string> compare_with_published(const std::vector<BenchResult>& results) {
  struct Claim {
    Variant v;
    const char* band;
  };
  const Claim claims[] = {{Variant::Opt1, "13%"}, {Variant::Opt2, "12%"}, {Variant::OptF, "20%"}};
  std::vector<std::string> lines;
  std::vector<std::size_t> sizes;
  for (const auto& r : results)
    if (r.kind == "bulk" && std::find(sizes.begin(), sizes.end(), r.payload_bytes) == sizes.end())
      sizes.push_back(r.payload_bytes);
  for (const auto& c : claims)
    for (auto size : sizes) {
      const auto* base = find_result(results, size, 128, 10, Variant::Base, Mode::ECB,
                                     Direction::Encrypt);
      const auto* opt = find_result(results, size, 128, 10, c.v, Mode::ECB, Direction::Encrypt);
      if (!base || !opt) continue;
      std::ostringstream os;
      os.precision(3);
      os << rlab::to_string(c.v) << " vs base, ECB 128/10 encrypt, " << size
         << " B: " << 100.0 * time_reduction(base->seconds.median, opt->seconds.median)
         << "% less time (published: " << c.band << ")";
      lines.push_back(os.str());
    }
  return lines;
}

}  // namespace rlab::bench
