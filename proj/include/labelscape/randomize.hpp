#pragma once

// Input randomizations of a feature matrix. Every transform is deterministic
// for a given seed; row-wise draws use per-row derived seeds, so results do not
// depend on evaluation order.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "labelscape/embedding.hpp"
#include "labelscape/errors.hpp"
#include "labelscape/rng.hpp"
#include "labelscape/synthetic.hpp"

namespace labelscape {

enum class RandomizeMode { permut_global, permut_ind, gaussian_ind, noise_ind };

inline RandomizeMode parse_randomize_mode(std::string_view name) {
  if (name == "permut-global") return RandomizeMode::permut_global;
  if (name == "permut-ind") return RandomizeMode::permut_ind;
  if (name == "gaussian-ind") return RandomizeMode::gaussian_ind;
  if (name == "noise-ind") return RandomizeMode::noise_ind;
  throw parameter_error("unknown randomization mode '" + std::string(name) + "'");
}

inline const char* to_string(RandomizeMode m) noexcept {
  switch (m) {
    case RandomizeMode::permut_global: return "permut-global";
    case RandomizeMode::permut_ind: return "permut-ind";
    case RandomizeMode::gaussian_ind: return "gaussian-ind";
    case RandomizeMode::noise_ind: return "noise-ind";
  }
  return "?";
}

/// A uniformly random permutation of 0..n-1.
inline std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

/// One column permutation pi, shared by every row: out[i][j] = in[i][pi(j)].
inline FeatureMatrix permut_global(const FeatureMatrix& x, seed_t seed) {
  Rng rng(seed);
  const auto perm = random_permutation(x.cols(), rng);
  FeatureMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, perm[j]);
  return out;
}

/// An independent column permutation per row.
inline FeatureMatrix permut_ind(const FeatureMatrix& x, seed_t seed) {
  FeatureMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    Rng rng(derive_seed(seed, i));
    const auto perm = random_permutation(x.cols(), rng);
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = x(i, perm[j]);
  }
  return out;
}

enum class GaussianStats {
  /// mean and deviation estimated per column
  per_feature,
  /// one mean and deviation pooled over all values
  pooled,
};

struct ColumnMoments {
  std::vector<double> mean;
  std::vector<double> stddev;
};

/// Population moments. The mean is accumulated as an offset from the first
/// value, so a constant column yields exactly that constant and zero deviation.
inline ColumnMoments column_moments(const FeatureMatrix& x, GaussianStats stats = GaussianStats::per_feature) {
  ColumnMoments m{std::vector<double>(x.cols(), 0.0), std::vector<double>(x.cols(), 0.0)};
  if (x.rows() == 0 || x.cols() == 0) return m;
  if (stats == GaussianStats::pooled) {
    const auto v = x.values();
    const double origin = v[0];
    double shift = 0.0;
    for (double a : v) shift += a - origin;
    const double mu = origin + shift / static_cast<double>(v.size());
    double ss = 0.0;
    for (double a : v) ss += (a - mu) * (a - mu);
    const double sd = std::sqrt(ss / static_cast<double>(v.size()));
    std::fill(m.mean.begin(), m.mean.end(), mu);
    std::fill(m.stddev.begin(), m.stddev.end(), sd);
    return m;
  }
  const auto n = static_cast<double>(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const double origin = x(0, j);
    double shift = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) shift += x(i, j) - origin;
    const double mu = origin + shift / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) ss += (x(i, j) - mu) * (x(i, j) - mu);
    m.mean[j] = mu;
    m.stddev[j] = std::sqrt(ss / n);
  }
  return m;
}

/// Each value resampled from Normal(mean_j, stddev_j^2) of its column.
/// Zero-deviation columns are emitted as their constant mean.
inline FeatureMatrix gaussian_ind(const FeatureMatrix& x, seed_t seed,
                                  GaussianStats stats = GaussianStats::per_feature) {
  const auto moments = column_moments(x, stats);
  FeatureMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    Rng rng(derive_seed(seed, i));
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double z = rng.normal();
      out(i, j) = moments.stddev[j] > 0.0 ? moments.mean[j] + moments.stddev[j] * z : moments.mean[j];
    }
  }
  return out;
}

/// Each value drawn uniformly from [lo, hi].
inline FeatureMatrix noise_ind(const FeatureMatrix& x, seed_t seed, double lo = 0.0, double hi = 1.0) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
    throw parameter_error("noise range requires finite lo < hi");
  FeatureMatrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    Rng rng(derive_seed(seed, i));
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = std::min(hi, lo + (hi - lo) * rng.uniform());
  }
  return out;
}

/// Label corruption for ingested data; geometry is untouched.
inline EmbeddingMatrix corrupt_labels(const EmbeddingMatrix& m, double v, seed_t seed) {
  return {m.features, corrupt_label_vector(m.labels, m.num_classes, v, seed), m.num_classes};
}

struct RandomizeOptions {
  double lo = 0.0;
  double hi = 1.0;
  GaussianStats gaussian_stats = GaussianStats::per_feature;
};

inline FeatureMatrix randomize(const FeatureMatrix& x, RandomizeMode mode, seed_t seed,
                               const RandomizeOptions& options = {}) {
  switch (mode) {
    case RandomizeMode::permut_global: return permut_global(x, seed);
    case RandomizeMode::permut_ind: return permut_ind(x, seed);
    case RandomizeMode::gaussian_ind: return gaussian_ind(x, seed, options.gaussian_stats);
    case RandomizeMode::noise_ind: return noise_ind(x, seed, options.lo, options.hi);
  }
  throw parameter_error("unknown randomization mode");
}

}  // namespace labelscape
