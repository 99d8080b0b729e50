#pragma once

// Feature and embedding matrices with their CSV and packed-binary formats.
//
// CSV: one row per instance, `dim` real columns followed by one integer label
// column. A first line whose first cell is not numeric is taken as a header.
//
// Packed binary (little-endian): int64 n, int64 dim, int64 num_classes, then
// n*dim float32 values row-major, then n int32 labels.

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "labelscape/errors.hpp"
#include "labelscape/io.hpp"
#include "labelscape/landscape.hpp"

namespace labelscape {

/// Dense row-major n x dim matrix of finite reals.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) throw parameter_error("matrix size does not match shape");
    for (std::size_t k = 0; k < values_.size(); ++k)
      if (!std::isfinite(values_[k]))
        throw parameter_error("non-finite value at row " + std::to_string(k / cols_));
  }
  FeatureMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), values_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> row(std::size_t i) const noexcept { return {values_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * cols_, cols_}; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * cols_ + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * cols_ + j]; }
  std::span<const double> values() const noexcept { return values_; }

  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Labeled points; row order defines node ids.
struct EmbeddingMatrix {
  FeatureMatrix features;
  std::vector<class_id> labels;
  int num_classes = 2;

  std::size_t n() const noexcept { return features.rows(); }
  std::size_t dim() const noexcept { return features.cols(); }
};

enum class MatrixFormat { csv, packed_binary };

inline MatrixFormat parse_matrix_format(std::string_view name) {
  if (name == "csv") return MatrixFormat::csv;
  if (name == "bin" || name == "binary" || name == "packed-binary") return MatrixFormat::packed_binary;
  throw parameter_error("unknown matrix format '" + std::string(name) + "' (expected csv or bin)");
}

/// csv unless the extension is .bin.
inline MatrixFormat guess_matrix_format(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? MatrixFormat::packed_binary : MatrixFormat::csv;
}

inline EmbeddingMatrix parse_embeddings_csv(std::string_view text,
                                            std::optional<int> num_classes = std::nullopt) {
  const auto rows = io::lines(text);
  std::vector<double> values;
  std::vector<class_id> labels;
  std::size_t dim = 0;
  bool first = true;
  int max_label = -1;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const long line_no = static_cast<long>(r + 1);
    if (io::trim(rows[r]).empty()) continue;
    const auto cells = io::split(rows[r], ',');
    if (first) {
      double probe;
      first = false;
      if (cells.size() < 2) throw load_error("need at least one value column and a label column", line_no);
      dim = cells.size() - 1;
      if (!io::parse_double(cells[0], probe)) continue;  // header
    }
    if (cells.size() != dim + 1)
      throw load_error("expected " + std::to_string(dim + 1) + " columns, found " +
                           std::to_string(cells.size()),
                       line_no);
    for (std::size_t j = 0; j < dim; ++j) {
      double x;
      if (!io::parse_double(cells[j], x)) throw load_error("unparseable value '" + std::string(cells[j]) + "'", line_no);
      if (!std::isfinite(x)) throw load_error("non-finite value", line_no);
      values.push_back(x);
    }
    long label;
    if (!io::parse_int(cells[dim], label) || label < 0 || label >= kMaxClasses ||
        (num_classes && label >= *num_classes))
      throw load_error("unknown label '" + std::string(cells[dim]) + "'", line_no);
    labels.push_back(static_cast<class_id>(label));
    max_label = std::max(max_label, static_cast<int>(label));
  }
  if (labels.empty()) throw load_error("no data rows");
  EmbeddingMatrix m;
  m.features = FeatureMatrix(labels.size(), dim, std::move(values));
  m.labels = std::move(labels);
  m.num_classes = num_classes.value_or(std::max(2, max_label + 1));
  return m;
}

namespace detail {

template <typename T>
T read_le(const unsigned char* p) {
  using U = std::make_unsigned_t<T>;
  U u = 0;
  for (std::size_t b = 0; b < sizeof(T); ++b) u |= static_cast<U>(U(p[b]) << (8 * b));
  return static_cast<T>(u);
}

template <typename T>
void write_le(std::string& out, T value) {
  using U = std::make_unsigned_t<T>;
  const auto u = static_cast<U>(value);
  for (std::size_t b = 0; b < sizeof(T); ++b) out.push_back(static_cast<char>((u >> (8 * b)) & 0xffu));
}

}  // namespace detail

inline EmbeddingMatrix parse_embeddings_binary(std::string_view bytes) {
  constexpr std::size_t header = 24;
  if (bytes.size() < header) throw load_error("packed embedding file shorter than its header");
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const auto n = detail::read_le<std::int64_t>(p);
  const auto dim = detail::read_le<std::int64_t>(p + 8);
  const auto classes = detail::read_le<std::int64_t>(p + 16);
  if (n <= 0 || dim <= 0) throw load_error("packed embedding header has non-positive shape");
  if (classes < 2 || classes > kMaxClasses) throw load_error("packed embedding header: classes must be in [2, 256]");
  const auto un = static_cast<std::uint64_t>(n);
  const auto udim = static_cast<std::uint64_t>(dim);
  if ((bytes.size() - header) / 4 != un * udim + un || (bytes.size() - header) % 4 != 0)
    throw load_error("packed embedding size does not match header");

  std::vector<double> values(un * udim);
  const unsigned char* cur = p + header;
  for (std::size_t k = 0; k < values.size(); ++k, cur += 4) {
    const float f = std::bit_cast<float>(detail::read_le<std::uint32_t>(cur));
    if (!std::isfinite(f)) throw load_error("non-finite value", static_cast<long>(k / udim + 1));
    values[k] = f;
  }
  std::vector<class_id> labels(un);
  for (std::size_t i = 0; i < un; ++i, cur += 4) {
    const auto label = detail::read_le<std::int32_t>(cur);
    if (label < 0 || label >= classes) throw load_error("unknown label " + std::to_string(label), static_cast<long>(i + 1));
    labels[i] = static_cast<class_id>(label);
  }
  return {FeatureMatrix(un, udim, std::move(values)), std::move(labels), static_cast<int>(classes)};
}

inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path, MatrixFormat format) {
  const std::string data = io::read_file(path);
  if (data.empty()) throw load_error("empty file " + path.string());
  return format == MatrixFormat::csv ? parse_embeddings_csv(data) : parse_embeddings_binary(data);
}

inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  return load_embeddings(path, guess_matrix_format(path));
}

inline std::string serialize_embeddings_csv(const EmbeddingMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.n(); ++i) {
    for (double x : m.features.row(i)) {
      out += io::format_double(x);
      out += ',';
    }
    out += std::to_string(m.labels[i]);
    out += '\n';
  }
  return out;
}

/// Values are narrowed to float32.
inline std::string serialize_embeddings_binary(const EmbeddingMatrix& m) {
  std::string out;
  out.reserve(24 + 4 * (m.n() * m.dim() + m.n()));
  detail::write_le<std::int64_t>(out, static_cast<std::int64_t>(m.n()));
  detail::write_le<std::int64_t>(out, static_cast<std::int64_t>(m.dim()));
  detail::write_le<std::int64_t>(out, m.num_classes);
  for (double x : m.features.values()) detail::write_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
  for (auto label : m.labels) detail::write_le<std::int32_t>(out, label);
  return out;
}

inline void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& m,
                            MatrixFormat format) {
  io::atomic_write(path, format == MatrixFormat::csv ? serialize_embeddings_csv(m)
                                                     : serialize_embeddings_binary(m));
}

}  // namespace labelscape
