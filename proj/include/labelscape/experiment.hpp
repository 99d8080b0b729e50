#pragma once

// Repeated-walk measurement protocol: corrupt labels at each level v, run
// independent walks, score each label sequence with Maurer's test, aggregate
// (1 - p) per level, and optionally correlate against external
// generalization errors.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "labelscape/embedding.hpp"
#include "labelscape/errors.hpp"
#include "labelscape/knn.hpp"
#include "labelscape/landscape.hpp"
#include "labelscape/landscape_io.hpp"
#include "labelscape/maurer.hpp"
#include "labelscape/parallel.hpp"
#include "labelscape/rng.hpp"
#include "labelscape/stats.hpp"
#include "labelscape/synthetic.hpp"

namespace labelscape {

/// bit_0 = 0; bit_i flips whenever label_i differs from label_{i-1}.
inline BitArray alternation_encode(std::span<const class_id> labels) {
  if (labels.empty()) throw parameter_error("alternation_encode: empty sequence");
  BitArray bits(labels.size());
  bits[0] = 0;
  for (std::size_t i = 1; i < labels.size(); ++i)
    bits[i] = static_cast<std::uint8_t>(bits[i - 1] ^ (labels[i] != labels[i - 1] ? 1u : 0u));
  return bits;
}

enum class Encoding {
  /// binary for two classes, alternation otherwise
  automatic,
  binary,
  alternation,
};

enum class PearsonMode {
  /// g_err against the per-v mean of (1 - p)
  aggregate,
  /// g_err repeated against every walk's (1 - p)
  per_run,
};

struct GeneratorSource {
  Problem problem = Problem::parity;
  int d = 11;
  int classes = 2;
};

struct LandscapeFileSource {
  std::filesystem::path path;
};

struct EmbeddingSource {
  std::filesystem::path path;
  std::optional<MatrixFormat> format;
  std::size_t k = 10;
  bool symmetrize = false;
};

using LandscapeSource = std::variant<GeneratorSource, LandscapeFileSource, EmbeddingSource>;

inline std::vector<double> default_v_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

struct ExperimentConfig {
  LandscapeSource source = GeneratorSource{};
  std::size_t walks = 30;
  std::uint64_t steps = 1'000'000;
  std::vector<double> v_grid = default_v_grid();
  seed_t base_seed = 0;
  /// Explicit {L, Q, K}; chosen from the sequence length when unset.
  std::optional<MaurerParams> maurer;
  VarianceModel variance_model = VarianceModel::corrected;
  Encoding encoding = Encoding::automatic;
  WalkPolicy walk_policy = WalkPolicy::memoryless;
  PearsonMode pearson_mode = PearsonMode::aggregate;
  unsigned threads = 0;
};

struct WalkRecord {
  std::size_t v_index = 0;
  double v = 0.0;
  std::size_t walk = 0;
  seed_t seed = 0;
  double f_tu = 0.0;
  double p_value = 0.0;
};

struct LevelAggregate {
  double v = 0.0;
  seed_t corruption_seed = 0;
  double mean_one_minus_p = 0.0;
  double std_one_minus_p = 0.0;
  double mean_f_tu = 0.0;
  std::optional<double> g_err;
};

struct ExperimentResult {
  std::vector<WalkRecord> records;       ///< ordered by (v_index, walk)
  std::vector<LevelAggregate> levels;    ///< one per v_grid entry
  MaurerParams params;
  Encoding encoding = Encoding::binary;  ///< resolved encoding
  std::string landscape_id;
  std::optional<double> pearson_r;
  PearsonMode pearson_mode = PearsonMode::aggregate;
};

// Stream tags for seed derivation: seeds are derive_seed(base, tag, v_index[, walk]).
inline constexpr std::uint64_t kCorruptionStream = 0x636f7272;  // "corr"
inline constexpr std::uint64_t kWalkStream = 0x77616c6b;        // "walk"

inline seed_t corruption_seed(seed_t base, std::size_t v_index) {
  return derive_seed(base, kCorruptionStream, v_index);
}

inline seed_t walk_seed(seed_t base, std::size_t v_index, std::size_t walk) {
  return derive_seed(base, kWalkStream, v_index, walk);
}

inline Landscape make_landscape(const LandscapeSource& source, unsigned threads = 0) {
  return std::visit(
      [threads](const auto& s) -> Landscape {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, GeneratorSource>) {
          return generate(HypercubeSpec{s.d, s.problem, s.classes, 0.0, 0});
        } else if constexpr (std::is_same_v<S, LandscapeFileSource>) {
          return load_landscape(s.path);
        } else {
          const auto emb = load_embeddings(s.path, s.format.value_or(guess_matrix_format(s.path)));
          return build_knn(emb, s.k, KnnOptions{KnnAlgorithm::kd_tree, s.symmetrize, threads},
                           s.path.filename().string() + "-knn" + std::to_string(s.k));
        }
      },
      source);
}

namespace detail {

[[noreturn]] inline void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const insufficient_data_error& e) {
    throw insufficient_data_error(std::string(e.what()) + " " + context);
  } catch (const not_binary_error& e) {
    throw not_binary_error(std::string(e.what()) + " " + context);
  } catch (const structural_error& e) {
    throw structural_error(std::string(e.what()) + " " + context);
  } catch (const unsupported_parameter_error& e) {
    throw unsupported_parameter_error(std::string(e.what()) + " " + context);
  } catch (const parameter_error& e) {
    throw parameter_error(std::string(e.what()) + " " + context);
  } catch (const error& e) {
    throw error(std::string(e.what()) + " " + context);
  }
}

inline std::string level_context(double v, std::optional<std::size_t> walk = std::nullopt) {
  std::string s = "[v=" + io::format_double(v);
  if (walk) s += ", walk=" + std::to_string(*walk);
  return s + "]";
}

}  // namespace detail

inline void validate(const ExperimentConfig& config) {
  if (config.walks < 1) throw parameter_error("walks must be at least 1");
  if (config.steps < 1) throw parameter_error("steps must be at least 1");
  if (config.v_grid.empty()) throw parameter_error("v_grid must not be empty");
  for (double v : config.v_grid)
    if (!(v >= 0.0 && v <= 1.0)) throw parameter_error("v_grid entries must be in [0, 1]");
}

/// Maurer parameters the experiment will use for sequences of steps + 1 bits.
inline MaurerParams resolve_maurer_params(const ExperimentConfig& config) {
  const std::uint64_t n_bits = config.steps + 1;
  if (!config.maurer) return select_maurer_params(n_bits);
  const auto& m = *config.maurer;
  const auto params = make_maurer_params(m.block_length, m.init_blocks, m.test_blocks);
  if (params.required_bits() > n_bits)
    throw insufficient_data_error("explicit Maurer parameters need " + std::to_string(params.required_bits()) +
                                  " bits but walks produce " + std::to_string(n_bits));
  return params;
}

/// Runs the protocol on an already-built landscape. Deterministic in
/// (landscape, config) and independent of thread count.
inline ExperimentResult run_experiment(const ExperimentConfig& config, const Landscape& base) {
  validate(config);
  const MaurerParams params = resolve_maurer_params(config);
  Encoding encoding = config.encoding;
  if (encoding == Encoding::automatic)
    encoding = base.num_classes() == 2 ? Encoding::binary : Encoding::alternation;
  if (encoding == Encoding::binary && base.num_classes() != 2)
    throw not_binary_error("binary encoding requested for a " + std::to_string(base.num_classes()) +
                           "-class landscape; use alternation encoding");

  const std::size_t levels = config.v_grid.size();
  std::vector<std::optional<Landscape>> corrupted(levels);
  parallel_for(levels, config.threads, [&](std::size_t vi) {
    try {
      corrupted[vi] = corrupt_labels(base, config.v_grid[vi], corruption_seed(config.base_seed, vi));
    } catch (...) {
      detail::rethrow_with_context(detail::level_context(config.v_grid[vi]));
    }
  });

  ExperimentResult result;
  result.params = params;
  result.encoding = encoding;
  result.landscape_id = base.id();
  result.pearson_mode = config.pearson_mode;
  result.records.resize(levels * config.walks);
  const WalkOptions walk_options{config.walk_policy, std::nullopt, nullptr};

  parallel_for(result.records.size(), config.threads, [&](std::size_t slot) {
    const std::size_t vi = slot / config.walks;
    const std::size_t w = slot % config.walks;
    WalkRecord& rec = result.records[slot];
    rec.v_index = vi;
    rec.v = config.v_grid[vi];
    rec.walk = w;
    rec.seed = walk_seed(config.base_seed, vi, w);
    try {
      const LabelSequence seq = random_walk(*corrupted[vi], config.steps, rec.seed, walk_options);
      const BitArray bits = encoding == Encoding::binary ? as_bits(seq) : alternation_encode(seq.labels);
      const MaurerResult m = maurer_p_value(maurer_statistic(bits, params), params, config.variance_model);
      rec.f_tu = m.f_tu;
      rec.p_value = m.p_value;
    } catch (...) {
      detail::rethrow_with_context(detail::level_context(rec.v, w));
    }
  });

  result.levels.resize(levels);
  for (std::size_t vi = 0; vi < levels; ++vi) {
    std::vector<double> one_minus_p, f_tu;
    double p_sum = 0.0;
    for (std::size_t w = 0; w < config.walks; ++w) {
      const auto& rec = result.records[vi * config.walks + w];
      p_sum += rec.p_value;
      one_minus_p.push_back(1.0 - rec.p_value);
      f_tu.push_back(rec.f_tu);
    }
    LevelAggregate& agg = result.levels[vi];
    agg.v = config.v_grid[vi];
    agg.corruption_seed = corruption_seed(config.base_seed, vi);
    agg.mean_one_minus_p = std::clamp(1.0 - p_sum / static_cast<double>(config.walks), 0.0, 1.0);
    agg.std_one_minus_p = sample_stddev(one_minus_p);
    agg.mean_f_tu = mean(f_tu);
  }
  return result;
}

inline ExperimentResult run_experiment(const ExperimentConfig& config) {
  validate(config);
  return run_experiment(config, make_landscape(config.source, config.threads));
}

/// Generalization error per randomization level.
struct GeneralizationEntry {
  double v;
  double g_err;
};

inline constexpr double kVMatchTolerance = 1e-9;

/// Attaches g_err to every level and computes Pearson's r between g_err and
/// (1 - p), per the result's PearsonMode.
inline ExperimentResult join_generalization(ExperimentResult result,
                                            std::span<const GeneralizationEntry> table) {
  for (auto& level : result.levels) {
    const auto it = std::find_if(table.begin(), table.end(), [&](const GeneralizationEntry& e) {
      return std::fabs(e.v - level.v) <= kVMatchTolerance;
    });
    if (it == table.end())
      throw join_error("no generalization error for v=" + io::format_double(level.v));
    level.g_err = it->g_err;
  }
  std::vector<double> xs, ys;
  if (result.pearson_mode == PearsonMode::aggregate) {
    for (const auto& level : result.levels) {
      xs.push_back(*level.g_err);
      ys.push_back(level.mean_one_minus_p);
    }
  } else {
    for (const auto& rec : result.records) {
      xs.push_back(*result.levels[rec.v_index].g_err);
      ys.push_back(1.0 - rec.p_value);
    }
  }
  result.pearson_r = pearson_r(xs, ys);
  return result;
}

}  // namespace labelscape
