#pragma once

// Maurer's universal statistical test on a bit sequence.
//
// The sequence is cut into non-overlapping L-bit blocks. The first Q blocks
// seed a last-occurrence table; for each of the next K blocks the test
// accumulates log2 of the distance (in blocks) back to the previous occurrence
// of the same pattern, or of the block index itself if the pattern is new. The
// mean is compared against its expectation for a uniform source and mapped to
// a two-sided p-value with erfc.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "labelscape/errors.hpp"

namespace labelscape {

inline constexpr int kMinBlockLength = 6;
inline constexpr int kMaxBlockLength = 16;

namespace maurer_tables {

// Expected value and variance of log2(A_n) for a uniform source, L = 6..16.
// Source: NIST SP 800-22 Rev. 1a, section 2.9.4 (and sts-2.1.2 universal.c),
// reproducing the table of Maurer (1992).
inline constexpr std::array<double, 11> expected_value = {
    5.2177052, 6.1962507, 7.1836656, 8.1764248, 9.1723243, 10.170032,
    11.168765, 12.168070, 13.167693, 14.167488, 15.167379};
inline constexpr std::array<double, 11> variance = {
    2.954, 3.125, 3.238, 3.311, 3.356, 3.384, 3.401, 3.410, 3.416, 3.419, 3.421};

inline constexpr const char* provenance =
    "expectedValue(L), variance(L) for L=6..16 from NIST SP 800-22 Rev. 1a sec. 2.9 "
    "(Maurer 1992 table); sigma uses the finite-K correction "
    "c(L,K) = 0.7 - 0.8/L + (4 + 32/L) K^(-3/L) / 15";

}  // namespace maurer_tables

inline double maurer_expected_value(int block_length) {
  if (block_length < kMinBlockLength || block_length > kMaxBlockLength)
    throw unsupported_parameter_error("no tabulated constants for L=" + std::to_string(block_length));
  return maurer_tables::expected_value[static_cast<std::size_t>(block_length - kMinBlockLength)];
}

inline double maurer_variance(int block_length) {
  if (block_length < kMinBlockLength || block_length > kMaxBlockLength)
    throw unsupported_parameter_error("no tabulated constants for L=" + std::to_string(block_length));
  return maurer_tables::variance[static_cast<std::size_t>(block_length - kMinBlockLength)];
}

/// Test configuration {L, Q, K}.
struct MaurerParams {
  int block_length = 0;             ///< L, bits per block
  std::uint64_t init_blocks = 0;    ///< Q
  std::uint64_t test_blocks = 0;    ///< K

  std::uint64_t required_bits() const noexcept {
    return (init_blocks + test_blocks) * static_cast<std::uint64_t>(block_length);
  }
  std::uint64_t recommended_init_blocks() const noexcept {
    return std::uint64_t{10} << block_length;
  }
  std::uint64_t recommended_test_blocks() const noexcept {
    return std::uint64_t{1000} << block_length;
  }
  /// Q < 10 * 2^L: the table is seeded with too few blocks for the tabulated constants.
  bool init_below_recommended() const noexcept { return init_blocks < recommended_init_blocks(); }
  /// K < 1000 * 2^L: permitted, but the p-value is less reliable.
  bool test_below_recommended() const noexcept { return test_blocks < recommended_test_blocks(); }

  friend bool operator==(const MaurerParams&, const MaurerParams&) = default;
};

/// Throws unless L is tabulated and Q, K are positive.
inline MaurerParams make_maurer_params(int block_length, std::uint64_t init_blocks,
                                       std::uint64_t test_blocks) {
  if (block_length < kMinBlockLength || block_length > kMaxBlockLength)
    throw unsupported_parameter_error("block length L=" + std::to_string(block_length) +
                                      " outside supported range [6, 16]");
  if (init_blocks < 1) throw parameter_error("Q must be at least 1");
  if (test_blocks < 1) throw parameter_error("K must be at least 1");
  return {block_length, init_blocks, test_blocks};
}

/// Minimum input length for block length L under Q = 10*2^L, K = 1000*2^L.
constexpr std::uint64_t maurer_min_bits(int block_length) noexcept {
  return std::uint64_t{1010} * (std::uint64_t{1} << block_length) *
         static_cast<std::uint64_t>(block_length);
}

/// Picks the largest L in [6, 16] whose minimum length n_bits meets, with
/// Q = 10*2^L and K = floor(n_bits / L) - Q.
inline MaurerParams select_maurer_params(std::uint64_t n_bits) {
  if (n_bits < maurer_min_bits(kMinBlockLength))
    throw insufficient_data_error("Maurer's test needs at least " +
                                  std::to_string(maurer_min_bits(kMinBlockLength)) +
                                  " bits, got " + std::to_string(n_bits));
  int L = kMinBlockLength;
  while (L < kMaxBlockLength && n_bits >= maurer_min_bits(L + 1)) ++L;
  const std::uint64_t Q = std::uint64_t{10} << L;
  return {L, Q, n_bits / static_cast<std::uint64_t>(L) - Q};
}

/// Complementary error function. Backed by the C library's erfc, which is
/// accurate to a few ulp and underflows to 0 for x > ~26.5.
inline double erfc(double x) noexcept { return std::erfc(x); }

/// Per-bit entropy statistic f_TU: the mean of log2(A_n) over the K test
/// blocks. Linear in the block count via a 2^L last-occurrence table.
inline double maurer_statistic(std::span<const std::uint8_t> bits, const MaurerParams& params) {
  const auto checked = make_maurer_params(params.block_length, params.init_blocks, params.test_blocks);
  if (bits.size() < checked.required_bits())
    throw insufficient_data_error("need " + std::to_string(checked.required_bits()) +
                                  " bits for L=" + std::to_string(checked.block_length) +
                                  ", Q=" + std::to_string(checked.init_blocks) +
                                  ", K=" + std::to_string(checked.test_blocks) + ", got " +
                                  std::to_string(bits.size()));
  const int L = checked.block_length;
  const std::uint64_t Q = checked.init_blocks;
  const std::uint64_t K = checked.test_blocks;

  // last_seen[pattern] = 1-based index of its latest block, 0 if never seen.
  std::vector<std::uint64_t> last_seen(std::size_t{1} << L, 0);
  const std::uint8_t* p = bits.data();
  auto next_block = [&p, L]() {
    std::uint32_t value = 0;
    for (int b = 0; b < L; ++b) value = (value << 1) | (*p++ != 0 ? 1u : 0u);
    return value;
  };

  for (std::uint64_t n = 1; n <= Q; ++n) last_seen[next_block()] = n;
  double sum = 0.0;
  for (std::uint64_t n = Q + 1; n <= Q + K; ++n) {
    const std::uint32_t block = next_block();
    sum += std::log2(static_cast<double>(n - last_seen[block]));
    last_seen[block] = n;
  }
  return sum / static_cast<double>(K);
}

enum class VarianceModel {
  /// sigma = c(L,K) * sqrt(variance(L) / K)
  corrected,
  /// sigma = sqrt(variance(L) / K), Maurer's asymptotic form
  asymptotic,
};

inline const char* to_string(VarianceModel m) noexcept {
  return m == VarianceModel::corrected ? "corrected" : "asymptotic";
}

/// Standard deviation of f_TU under the null hypothesis.
inline double maurer_sigma(const MaurerParams& params,
                           VarianceModel model = VarianceModel::corrected) {
  const double L = params.block_length;
  const double K = static_cast<double>(params.test_blocks);
  const double base = std::sqrt(maurer_variance(params.block_length) / K);
  if (model == VarianceModel::asymptotic) return base;
  const double c = 0.7 - 0.8 / L + (4.0 + 32.0 / L) * std::pow(K, -3.0 / L) / 15.0;
  return c * base;
}

struct MaurerResult {
  double f_tu = 0.0;
  double expected_value = 0.0;
  double sigma = 0.0;
  double p_value = 0.0;
  MaurerParams params;
  VarianceModel variance_model = VarianceModel::corrected;
  /// Input bits beyond (Q + K) * L, ignored by the test.
  std::uint64_t discarded_bits = 0;
};

inline MaurerResult maurer_p_value(double f_tu, const MaurerParams& params,
                                   VarianceModel model = VarianceModel::corrected) {
  MaurerResult r;
  r.params = params;
  r.f_tu = f_tu;
  r.expected_value = maurer_expected_value(params.block_length);
  r.sigma = maurer_sigma(params, model);
  r.variance_model = model;
  const double z = std::fabs((f_tu - r.expected_value) / (std::sqrt(2.0) * r.sigma));
  r.p_value = std::clamp(erfc(z), 0.0, 1.0);
  return r;
}

/// Statistic and p-value in one call.
inline MaurerResult maurer_test(std::span<const std::uint8_t> bits, const MaurerParams& params,
                                VarianceModel model = VarianceModel::corrected) {
  auto r = maurer_p_value(maurer_statistic(bits, params), params, model);
  r.discarded_bits = bits.size() - params.required_bits();
  return r;
}

/// Same, with parameters chosen from the input length.
inline MaurerResult maurer_test(std::span<const std::uint8_t> bits,
                                VarianceModel model = VarianceModel::corrected) {
  return maurer_test(bits, select_maurer_params(bits.size()), model);
}

}  // namespace labelscape
