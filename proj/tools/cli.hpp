#pragma once

// Command-line front end. dispatch() is kept separate from main() so the
// tests can drive every subcommand in-process.
//
//   rlab encrypt  --key-hex K [--key-size 128] [--rounds N] [--mode cbc]
//                 [--variant optf] [--iv-hex IV] [--format raw] --in F --out G
//   rlab decrypt  (same flags)
//   rlab genimage --pattern constant --width 200 --height 200 --out F
//   rlab analyze  --in PLAIN [--cipher ENC] [--format bmp-image-mode] [--report csv]
//   rlab cost     [--nb 4 --nr 10 --ta 1 --to 1 --ts 1] [--report csv]
//   rlab bench    [--sizes ...] [--variants ...] [--modes ...] [--rounds ...] ...
//
// Exit status: 0 ok, 2 usage error, 3 input error, 4 integrity error.

#include <CLI11.hpp>

#include <array>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rlab/analysis.hpp"
#include "rlab/bench_harness.hpp"
#include "rlab/block_modes.hpp"
#include "rlab/bmp_codec.hpp"
#include "rlab/cost_model.hpp"
#include "rlab/image_mode.hpp"
#include "rlab/opt_variants.hpp"
#include "rlab/rijndael_core.hpp"

namespace rlab::cli {

enum ExitCode : int { kOk = 0, kUsage = 2, kInput = 3, kIntegrity = 4 };

class UsageError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

inline Bytes parse_hex(const std::string& text, const char* what) {
  auto nibble = [&](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw UsageError(std::string(what) + ": '" + c + "' is not a hex digit");
  };
  std::string digits;
  for (char c : text)
    if (c != ' ' && c != '\n' && c != '\r' && c != '\t') digits.push_back(c);
  if (digits.size() % 2 != 0)
    throw UsageError(std::string(what) + ": odd number of hex digits");
  Bytes out;
  out.reserve(digits.size() / 2);
  for (std::size_t i = 0; i < digits.size(); i += 2)
    out.push_back(static_cast<std::uint8_t>(nibble(digits[i]) << 4 | nibble(digits[i + 1])));
  return out;
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  std::ostringstream os;
  os << std::hex << std::setfill('0');
  for (auto b : bytes) os << std::setw(2) << static_cast<int>(b);
  return os.str();
}

inline Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  return Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open output file '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw InputError("failed writing '" + path + "'");
}

struct CommandConfig {
  std::string key_hex;
  std::string key_file;
  int key_size = 128;
  int rounds = 0;  // 0: standard for key size
  std::string mode = "cbc";
  std::string variant = "optf";
  std::string kernel = "ttable";
  std::string iv_hex;
  std::string format = "raw";
  std::string in;
  std::string out;
  std::optional<std::uint64_t> seed;
};

inline Block block_from(const Bytes& b) {
  Block out;
  std::copy(b.begin(), b.end(), out.begin());
  return out;
}

struct PreparedCipher {
  VariantCipher cipher;
  Mode mode;
  std::optional<Block> iv;  // only when given on the command line
};

inline PreparedCipher prepare(const CommandConfig& c) {
  if (c.key_hex.empty() == c.key_file.empty())
    throw UsageError("give exactly one of --key-hex or --key-file");
  std::string hex = c.key_hex;
  if (!c.key_file.empty()) {
    const Bytes text = read_file(c.key_file);
    hex.assign(text.begin(), text.end());
  }
  const Bytes key = parse_hex(hex, "key");
  if (key.size() * 8 != static_cast<std::size_t>(c.key_size))
    throw UsageError("key has " + std::to_string(key.size() * 8) + " bits but --key-size is " +
                     std::to_string(c.key_size));
  const int rounds = c.rounds > 0 ? c.rounds : standard_rounds(c.key_size);
  const Mode mode = c.mode == "ecb" ? Mode::ECB : Mode::CBC;

  std::optional<Block> iv;
  if (!c.iv_hex.empty()) {
    if (mode == Mode::ECB) throw UsageError("--iv-hex is not allowed with --mode ecb");
    const Bytes ivb = parse_hex(c.iv_hex, "iv");
    if (ivb.size() != kBlockBytes)
      throw UsageError("IV must be 16 bytes (32 hex digits), got " + std::to_string(ivb.size()));
    iv = block_from(ivb);
  }
  const auto plan = make_plan(parse_variant(c.variant), rounds, parse_kernel(c.kernel));
  return {VariantCipher(key_expansion(key, rounds), plan), mode, iv};
}

inline Block fresh_iv(const CommandConfig& c) {
  if (c.seed) {
    std::mt19937_64 gen(*c.seed);
    return random_iv(gen);
  }
  return random_iv();
}

inline void run_encrypt(const CommandConfig& c, std::ostream& out) {
  auto p = prepare(c);
  const Bytes input = read_file(c.in);
  if (p.mode == Mode::CBC && !p.iv) p.iv = fresh_iv(c);
  if (c.format == "bmp-image-mode") {
    const auto img = bmp::parse_bmp(input);
    write_file(c.out, bmp::serialize_bmp(encrypt_image(img, p.cipher, p.mode, p.iv)));
  } else {
    const ModeConfig cfg{p.mode, p.iv, Padding::PKCS7};
    write_file(c.out, frame_ciphertext(p.mode, p.iv, encrypt(input, p.cipher, cfg)));
  }
  if (p.iv) out << "iv=" << to_hex(*p.iv) << '\n';
}

inline void run_decrypt(const CommandConfig& c, std::ostream&) {
  auto p = prepare(c);
  const Bytes input = read_file(c.in);
  if (c.format == "bmp-image-mode") {
    if (p.mode == Mode::CBC && !p.iv)
      throw UsageError("image-mode CBC decryption needs --iv-hex (printed by encrypt)");
    const auto img = bmp::parse_bmp(input);
    write_file(c.out, bmp::serialize_bmp(decrypt_image(img, p.cipher, p.mode, p.iv)));
    return;
  }
  const auto framed = unframe_ciphertext(p.mode, input);
  if (p.iv && framed.iv && *p.iv != *framed.iv)
    throw InputError("--iv-hex does not match the IV stored in the file");
  const ModeConfig cfg{p.mode, framed.iv, Padding::PKCS7};
  write_file(c.out, decrypt(framed.body, p.cipher, cfg));
}

// ---------------------------------------------------------------------------

struct ImageStats {
  analysis::LeakageReport leakage;
  std::optional<analysis::HistogramReport> histogram;
  std::array<double, 3> chi{};
};

inline ImageStats image_stats(const Bytes& file, const std::string& format) {
  ImageStats s;
  if (format == "bmp-image-mode") {
    const auto img = bmp::parse_bmp(file);
    s.leakage = analysis::duplicate_block_ratio(img.pixels);
    s.histogram = analysis::histogram(img);
    s.chi = analysis::flatness_chi_square(*s.histogram);
  } else {
    s.leakage = analysis::duplicate_block_ratio(file);
  }
  return s;
}

inline std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

inline void run_analyze(const std::string& in, const std::string& cipher,
                        const std::string& format, const std::string& report,
                        const std::string& out_path, const std::string& hist_path,
                        std::ostream& out) {
  std::vector<std::pair<std::string, ImageStats>> rows;
  rows.emplace_back("before", image_stats(read_file(in), format));
  if (!cipher.empty()) rows.emplace_back("after", image_stats(read_file(cipher), format));

  std::ostringstream rep;
  const bool images = format == "bmp-image-mode";
  if (report == "csv") {
    rep << "image,total_blocks,distinct_blocks,distinct_ratio,entropy_bits_per_byte";
    if (images) rep << ",total_pixels,chi2_b,chi2_g,chi2_r,chi2_critical_999";
    rep << '\n';
    for (const auto& [label, s] : rows) {
      rep << label << ',' << s.leakage.total_blocks << ',' << s.leakage.distinct_blocks << ','
          << num(s.leakage.distinct_ratio) << ',' << num(s.leakage.entropy_bits_per_byte);
      if (images)
        rep << ',' << s.histogram->total_pixels << ',' << num(s.chi[0]) << ',' << num(s.chi[1])
            << ',' << num(s.chi[2]) << ',' << num(analysis::kChiSquare255Critical999);
      rep << '\n';
    }
  } else {
    for (const auto& [label, s] : rows) {
      rep << "image=" << label << " total_blocks=" << s.leakage.total_blocks
          << " distinct_blocks=" << s.leakage.distinct_blocks
          << " distinct_ratio=" << num(s.leakage.distinct_ratio)
          << " entropy_bits_per_byte=" << num(s.leakage.entropy_bits_per_byte);
      if (images)
        rep << " total_pixels=" << s.histogram->total_pixels << " chi2_b=" << num(s.chi[0])
            << " chi2_g=" << num(s.chi[1]) << " chi2_r=" << num(s.chi[2]);
      rep << '\n';
    }
    // Reference levels chosen for this tool, not published thresholds.
    rep << "reference ecb_leak_max_distinct_blocks=2 entropy_target_bits_per_byte=7.98"
        << " chi2_critical_999=" << num(analysis::kChiSquare255Critical999) << '\n';
  }

  if (out_path.empty()) {
    out << rep.str();
  } else {
    const std::string text = rep.str();
    write_file(out_path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
  }

  if (!hist_path.empty()) {
    if (!images) throw UsageError("--histogram-out needs --format bmp-image-mode");
    std::ofstream h(hist_path);
    if (!h) throw InputError("cannot open histogram file '" + hist_path + "'");
    h << "# bin";
    for (const auto& [label, s] : rows) h << ' ' << label << "_b " << label << "_g " << label << "_r";
    h << '\n';
    for (int bin = 0; bin < 256; ++bin) {
      h << bin;
      for (const auto& [label, s] : rows)
        for (int ch = 0; ch < 3; ++ch) h << ' ' << s.histogram->counts[ch][bin];
      h << '\n';
    }
    if (!h) throw InputError("failed writing '" + hist_path + "'");
  }
}

// ---------------------------------------------------------------------------

inline void run_cost(std::optional<int> nb, std::optional<int> nr, std::optional<int> key_size,
                     double ta, double to, double ts, const std::string& report,
                     std::ostream& out) {
  struct Row {
    int n_b, n_r;
    std::string key_size;
  };
  std::vector<Row> rows;
  if (nb || nr) {
    const int n_b = nb.value_or(4);
    const int n_r = nr.value_or(key_size ? standard_rounds(*key_size) : 10);
    std::string ks = "-";
    if (key_size)
      ks = std::to_string(*key_size);
    else if (n_b == 4 && (n_r == 10 || n_r == 12 || n_r == 14))
      ks = std::to_string(128 + 64 * (n_r - 10) / 2);
    rows.push_back({n_b, n_r, ks});
  } else {
    for (int n_b : {4, 6, 8})
      for (int k : {128, 192, 256}) rows.push_back({n_b, std::max(k / 32, n_b) + 6, std::to_string(k)});
  }

  if (report == "csv")
    out << "n_b,n_r,key_size,t_a,t_o,t_s,encrypt_cycles,decrypt_cycles,mixcol_delta\n";
  for (const auto& r : rows) {
    const cost::CostParams p{r.n_b, r.n_r, ta, to, ts};
    const double enc = cost::encrypt_cycles(p), dec = cost::decrypt_cycles(p),
                 delta = cost::mixcol_delta(p);
    if (report == "csv")
      out << r.n_b << ',' << r.n_r << ',' << r.key_size << ',' << num(ta) << ',' << num(to) << ','
          << num(ts) << ',' << num(enc) << ',' << num(dec) << ',' << num(delta) << '\n';
    else
      out << "n_b=" << r.n_b << " n_r=" << r.n_r << " key_size=" << r.key_size
          << " t_a=" << num(ta) << " t_o=" << num(to) << " t_s=" << num(ts)
          << " encrypt_cycles=" << num(enc) << " decrypt_cycles=" << num(dec)
          << " mixcol_delta=" << num(delta) << '\n';
  }
}

// ---------------------------------------------------------------------------

inline int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rijndael/AES laboratory: ciphers, modes, cost model, benchmarks"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  CommandConfig enc_cfg, dec_cfg;
  auto add_crypto = [](CLI::App* sub, CommandConfig& c) {
    sub->add_option("--key-hex", c.key_hex, "Key as hex digits");
    sub->add_option("--key-file", c.key_file, "File holding the key as hex digits");
    sub->add_option("--key-size", c.key_size, "Key size in bits")
        ->check(CLI::IsMember({128, 192, 256}));
    sub->add_option("--rounds", c.rounds, "Round count (default: standard for key size)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--mode", c.mode, "Block mode")->check(CLI::IsMember({"ecb", "cbc"}));
    sub->add_option("--variant", c.variant, "Implementation variant")
        ->check(CLI::IsMember({"base", "opt1", "opt2", "optf"}));
    sub->add_option("--kernel", c.kernel, "Optimized round kernel")
        ->check(CLI::IsMember({"ttable", "unrolled"}));
    sub->add_option("--iv-hex", c.iv_hex, "CBC IV as 32 hex digits");
    sub->add_option("--format", c.format, "raw file or header-preserving BMP")
        ->check(CLI::IsMember({"raw", "bmp-image-mode"}));
    sub->add_option("--in", c.in, "Input file")->required();
    sub->add_option("--out", c.out, "Output file")->required();
    sub->add_option("--seed", c.seed, "Seed for IV generation (reproducible runs)");
  };
  auto* enc = app.add_subcommand("encrypt", "Encrypt a file");
  add_crypto(enc, enc_cfg);
  auto* dec = app.add_subcommand("decrypt", "Decrypt a file");
  add_crypto(dec, dec_cfg);

  std::string pattern = "constant", gen_out;
  std::size_t gen_w = 200, gen_h = 200;
  auto* gen = app.add_subcommand("genimage", "Write a synthetic 24-bit BMP test image");
  gen->add_option("--pattern", pattern)->check(CLI::IsMember({"constant", "two-zone", "gradient", "object"}));
  gen->add_option("--width", gen_w)->check(CLI::PositiveNumber);
  gen->add_option("--height", gen_h)->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out)->required();

  std::string an_in, an_cipher, an_format = "bmp-image-mode", an_report = "csv", an_out, an_hist;
  auto* ana = app.add_subcommand("analyze", "Histogram, entropy and duplicate-block report");
  ana->add_option("--in", an_in, "Plain (or any) input")->required();
  ana->add_option("--cipher", an_cipher, "Encrypted counterpart, reported as 'after'");
  ana->add_option("--format", an_format)->check(CLI::IsMember({"raw", "bmp-image-mode"}));
  ana->add_option("--report", an_report)->check(CLI::IsMember({"csv", "text"}));
  ana->add_option("--out", an_out, "Report path (default stdout)");
  ana->add_option("--histogram-out", an_hist, "gnuplot data: bin then counts per channel");

  std::optional<int> cost_nb, cost_nr, cost_key;
  double ta = 1, to = 1, ts = 1;
  std::string cost_report = "csv";
  auto* cst = app.add_subcommand("cost", "Analytic cycle estimates");
  cst->add_option("--nb", cost_nb, "Block length / 32")->check(CLI::PositiveNumber);
  cst->add_option("--nr", cost_nr, "Rounds")->check(CLI::PositiveNumber);
  cst->add_option("--key-size", cost_key)->check(CLI::IsMember({128, 192, 256}));
  cst->add_option("--ta", ta, "Cycles per AND")->check(CLI::NonNegativeNumber);
  cst->add_option("--to", to, "Cycles per OR")->check(CLI::NonNegativeNumber);
  cst->add_option("--ts", ts, "Cycles per shift")->check(CLI::NonNegativeNumber);
  cst->add_option("--report", cost_report)->check(CLI::IsMember({"csv", "text"}));

  bench::BenchConfig bcfg;
  std::vector<std::string> b_variants, b_modes;
  std::string b_kernel = "ttable", b_report = "csv", b_out;
  bool micro = false;
  std::size_t applications = 1'000'000;
  auto* bch = app.add_subcommand("bench", "Timing experiments");
  bch->add_option("--sizes", bcfg.payload_sizes, "Payload sizes in bytes");
  bch->add_option("--key-sizes", bcfg.key_sizes)->check(CLI::IsMember({128, 192, 256}));
  bch->add_option("--rounds", bcfg.rounds, "Round counts (sweep); default standard");
  bch->add_option("--variants", b_variants)->check(CLI::IsMember({"base", "opt1", "opt2", "optf"}));
  bch->add_option("--modes", b_modes)->check(CLI::IsMember({"ecb", "cbc"}));
  bch->add_option("--kernel", b_kernel)->check(CLI::IsMember({"ttable", "unrolled"}));
  bch->add_option("--reps", bcfg.repetitions)->check(CLI::Range(3, 1000000));
  bch->add_option("--warmup", bcfg.warmup)->check(CLI::NonNegativeNumber);
  bch->add_option("--seed", bcfg.seed);
  bch->add_flag("--parallel-cells", bcfg.parallel_cells, "Run matrix cells concurrently");
  bch->add_flag("--micro", micro, "Per-transform microbenchmarks instead of bulk runs");
  bch->add_option("--applications", applications, "Transform applications per micro run");
  bch->add_option("--report", b_report)->check(CLI::IsMember({"csv", "text"}));
  bch->add_option("--out", b_out, "Report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*enc) {
      run_encrypt(enc_cfg, out);
    } else if (*dec) {
      run_decrypt(dec_cfg, out);
    } else if (*gen) {
      write_file(gen_out, bmp::serialize_bmp(bmp::make_test_image(bmp::parse_pattern(pattern), gen_w, gen_h)));
    } else if (*ana) {
      run_analyze(an_in, an_cipher, an_format, an_report, an_out, an_hist, out);
    } else if (*cst) {
      run_cost(cost_nb, cost_nr, cost_key, ta, to, ts, cost_report, out);
    } else if (*bch) {
      if (!b_variants.empty()) {
        bcfg.variants.clear();
        for (const auto& v : b_variants) bcfg.variants.push_back(parse_variant(v));
      }
      if (!b_modes.empty()) {
        bcfg.modes.clear();
        for (const auto& m : b_modes) bcfg.modes.push_back(m == "ecb" ? Mode::ECB : Mode::CBC);
      }
      bcfg.kernel = parse_kernel(b_kernel);
      std::vector<bench::BenchResult> results;
      if (micro) {
        for (auto t : bench::kAllTransforms)
          for (auto v : {Variant::Base, Variant::OptF})
            results.push_back(bench::microbench_transform(t, v, applications, bcfg.repetitions,
                                                          bcfg.warmup, bcfg.seed));
      } else {
        results = bench::run_matrix(bcfg);
        for (const auto& line : bench::compare_with_published(results)) err << line << '\n';
      }
      const auto format = bench::parse_report_format(b_report);
      if (b_out.empty())
        bench::emit_report(results, format, out);
      else
        bench::emit_report(results, format, b_out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const PaddingError& e) {
    err << "integrity error: " << e.what() << " (wrong key, IV or mode?)\n";
    return kIntegrity;
  } catch (const std::exception& e) {
    err << "input error: " << e.what() << '\n';
    return kInput;
  }
  return kOk;
}

}  // namespace rlab::cli
