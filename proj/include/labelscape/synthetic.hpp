#pragma once

// Synthetic d-bit classification landscapes on the Hamming-1 hypercube, and
// label corruption.
//
// Node id <-> input vector: x_j (1-based) is bit j-1 of the id, least
// significant first, so x_1 = id & 1 and x_2 = (id >> 1) & 1.

#include <bit>
#include <span>
#include <cstdint>
#include <string>
#include <vector>

#include "labelscape/errors.hpp"
#include "labelscape/landscape.hpp"
#include "labelscape/rng.hpp"

namespace labelscape {

inline constexpr int kMinHypercubeBits = 2;
inline constexpr int kMaxHypercubeBits = 24;

enum class Problem { xor_first_two, majority, parity, first_bits };

inline const char* to_string(Problem p) noexcept {
  switch (p) {
    case Problem::xor_first_two: return "xor";
    case Problem::majority: return "majority";
    case Problem::parity: return "parity";
    case Problem::first_bits: return "first-bits";
  }
  return "?";
}

inline Problem parse_problem(std::string_view name) {
  if (name == "xor") return Problem::xor_first_two;
  if (name == "majority") return Problem::majority;
  if (name == "parity") return Problem::parity;
  if (name == "first-bits") return Problem::first_bits;
  throw parameter_error("unknown problem '" + std::string(name) +
                        "' (expected xor, majority, parity or first-bits)");
}

struct HypercubeSpec {
  int d = 11;
  Problem problem = Problem::parity;
  /// Class count; only first-bits uses more than two.
  int classes = 2;
  double corruption_v = 0.0;
  seed_t corruption_seed = 0;
};

namespace detail {

inline void check_bits(int d) {
  if (d < kMinHypercubeBits || d > kMaxHypercubeBits)
    throw parameter_error("d=" + std::to_string(d) + " outside [2, 24]");
}

template <typename LabelFn>
Landscape hypercube_landscape(int d, int classes, LabelFn&& fn, std::string id) {
  const std::size_t n = std::size_t{1} << d;
  std::vector<class_id> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = fn(static_cast<std::uint32_t>(i));
  return Landscape(std::move(labels), classes, HypercubeNeighborhood(d), std::move(id));
}

}  // namespace detail

/// Label 1 iff x_1 == x_2.
inline Landscape gen_xor(int d) {
  detail::check_bits(d);
  return detail::hypercube_landscape(
      d, 2, [](std::uint32_t x) { return class_id((x & 1u) == ((x >> 1) & 1u)); },
      "xor-d" + std::to_string(d));
}

/// Label 1 iff at least (d+1)/2 of the bits are set. d must be odd.
inline Landscape gen_majority(int d) {
  detail::check_bits(d);
  if (d % 2 == 0) throw parameter_error("majority requires odd d (got " + std::to_string(d) + ")");
  const int threshold = (d + 1) / 2;
  return detail::hypercube_landscape(
      d, 2, [threshold](std::uint32_t x) { return class_id(std::popcount(x) >= threshold); },
      "majority-d" + std::to_string(d));
}

/// Label 1 iff the number of set bits is even.
inline Landscape gen_parity(int d) {
  detail::check_bits(d);
  return detail::hypercube_landscape(
      d, 2, [](std::uint32_t x) { return class_id(std::popcount(x) % 2 == 0); },
      "parity-d" + std::to_string(d));
}

/// Multi-class landscape: the first m = ceil(log2 c) bits, read as an
/// integer with x_1 least significant, taken modulo c. For c = 2 the label is x_1.
inline Landscape gen_first_bits(int d, int classes) {
  detail::check_bits(d);
  if (classes < 2 || classes > kMaxClasses) throw parameter_error("classes must be in [2, 256]");
  const int m = std::bit_width(static_cast<unsigned>(classes - 1));
  if (m > d) throw parameter_error("d too small for " + std::to_string(classes) + " classes");
  const std::uint32_t mask = (1u << m) - 1u;
  return detail::hypercube_landscape(
      d, classes,
      [mask, classes](std::uint32_t x) {
        return static_cast<class_id>((x & mask) % static_cast<std::uint32_t>(classes));
      },
      "first-bits-d" + std::to_string(d) + "-c" + std::to_string(classes));
}

/// Replaces each label, independently with probability v, by a class drawn
/// uniformly from all classes (possibly the original one). One uniform draw per
/// label in index order, plus one class draw per replaced label.
inline std::vector<class_id> corrupt_label_vector(std::span<const class_id> labels, int num_classes,
                                                  double v, seed_t seed) {
  if (!(v >= 0.0 && v <= 1.0)) throw parameter_error("corruption level v must be in [0, 1]");
  Rng rng(seed);
  std::vector<class_id> out(labels.begin(), labels.end());
  const auto classes = static_cast<std::uint64_t>(num_classes);
  for (auto& label : out)
    if (rng.uniform() < v) label = static_cast<class_id>(rng.bounded(classes));
  return out;
}

inline Landscape corrupt_labels(const Landscape& landscape, double v, seed_t seed) {
  return landscape.with_labels(corrupt_label_vector(landscape.labels(), landscape.num_classes(), v, seed));
}

inline Landscape generate(const HypercubeSpec& cube) {
  Landscape base = [&] {
    switch (cube.problem) {
      case Problem::xor_first_two: return gen_xor(cube.d);
      case Problem::majority: return gen_majority(cube.d);
      case Problem::parity: return gen_parity(cube.d);
      case Problem::first_bits: return gen_first_bits(cube.d, cube.classes);
    }
    throw parameter_error("unknown problem");
  }();
  if (cube.problem != Problem::first_bits && cube.classes != 2)
    throw parameter_error(std::string(to_string(cube.problem)) + " is a binary problem");
  return cube.corruption_v > 0.0 ? corrupt_labels(base, cube.corruption_v, cube.corruption_seed)
                                 : base;
}

}  // namespace labelscape
