#pragma once

// Directed k-nearest-neighbor graphs under Euclidean distance.
//
// Neighbors are ordered by (squared distance, node id); squared distance is
// accumulated in dimension order by one function shared by every search path,
// so all paths agree exactly, ties included.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "labelscape/embedding.hpp"
#include "labelscape/errors.hpp"
#include "labelscape/landscape.hpp"
#include "labelscape/parallel.hpp"

namespace labelscape {

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double diff = a[j] - b[j];
    sum += diff * diff;
  }
  return sum;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw parameter_error("euclidean_distance: dimensions differ (" + std::to_string(a.size()) +
                          " vs " + std::to_string(b.size()) + ")");
  return std::sqrt(squared_distance(a, b));
}

enum class KnnAlgorithm { brute_force, kd_tree };

struct KnnOptions {
  KnnAlgorithm algorithm = KnnAlgorithm::kd_tree;
  /// Add reverse edges so the relation becomes symmetric (degree may exceed k).
  bool symmetrize = false;
  unsigned threads = 0;
};

/// k nearest neighbors of every row, flattened: entries [i*k, (i+1)*k).
using NeighborTable = std::vector<node_id>;

namespace detail {

struct Candidate {
  double dist;
  node_id id;
  friend bool operator<(const Candidate& a, const Candidate& b) noexcept {
    return a.dist < b.dist || (a.dist == b.dist && a.id < b.id);
  }
};

/// Keeps the k smallest candidates as a max-heap.
class BoundedHeap {
 public:
  explicit BoundedHeap(std::size_t k) : k_(k) { items_.reserve(k + 1); }

  bool full() const noexcept { return items_.size() == k_; }
  const Candidate& worst() const noexcept { return items_.front(); }

  void offer(Candidate c) {
    if (!full()) {
      items_.push_back(c);
      std::push_heap(items_.begin(), items_.end());
    } else if (c < items_.front()) {
      std::pop_heap(items_.begin(), items_.end());
      items_.back() = c;
      std::push_heap(items_.begin(), items_.end());
    }
  }

  void drain_sorted(node_id* out) {
    std::sort_heap(items_.begin(), items_.end());
    for (std::size_t j = 0; j < items_.size(); ++j) out[j] = items_[j].id;
    items_.clear();
  }

 private:
  std::size_t k_;
  std::vector<Candidate> items_;
};

inline void check_knn_args(const FeatureMatrix& points, std::size_t k) {
  if (k < 1) throw parameter_error("k must be at least 1");
  if (k >= points.rows())
    throw parameter_error("k=" + std::to_string(k) + " requires more than k points (have " +
                          std::to_string(points.rows()) + ")");
}

/// Exact kd-tree over row indices. Splits on the widest dimension at the median.
class KdTree {
 public:
  explicit KdTree(const FeatureMatrix& points) : points_(points), order_(points.rows()) {
    std::iota(order_.begin(), order_.end(), node_id{0});
    nodes_.reserve(2 * points.rows() / kLeafSize + 2);
    build(0, order_.size());
  }

  void query(node_id self, std::size_t k, node_id* out) const {
    BoundedHeap heap(k);
    search(0, points_.row(self), self, heap);
    heap.drain_sorted(out);
  }

 private:
  static constexpr std::size_t kLeafSize = 16;

  struct Node {
    std::size_t begin, end;
    std::size_t split_dim = 0;
    double split = 0.0;
    std::int64_t left = -1, right = -1;
  };

  std::int64_t build(std::size_t begin, std::size_t end) {
    const auto index = static_cast<std::int64_t>(nodes_.size());
    nodes_.push_back({begin, end});
    if (end - begin <= kLeafSize) return index;

    std::size_t best_dim = 0;
    double best_spread = -1.0;
    for (std::size_t d = 0; d < points_.cols(); ++d) {
      double lo = points_(order_[begin], d), hi = lo;
      for (std::size_t i = begin + 1; i < end; ++i) {
        const double x = points_(order_[i], d);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
      if (hi - lo > best_spread) {
        best_spread = hi - lo;
        best_dim = d;
      }
    }
    if (best_spread <= 0.0) return index;  // all points identical

    const std::size_t mid = begin + (end - begin) / 2;
    std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                     order_.begin() + static_cast<std::ptrdiff_t>(mid),
                     order_.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](node_id a, node_id b) { return points_(a, best_dim) < points_(b, best_dim); });
    const double split = points_(order_[mid], best_dim);
    const auto left = build(begin, mid);
    const auto right = build(mid, end);
    nodes_[static_cast<std::size_t>(index)].split_dim = best_dim;
    nodes_[static_cast<std::size_t>(index)].split = split;
    nodes_[static_cast<std::size_t>(index)].left = left;
    nodes_[static_cast<std::size_t>(index)].right = right;
    return index;
  }

  // Left subtree coordinates are <= split, right subtree coordinates >= split.
  void search(std::int64_t index, std::span<const double> q, node_id self, BoundedHeap& heap) const {
    const Node& node = nodes_[static_cast<std::size_t>(index)];
    if (node.left < 0) {
      for (std::size_t i = node.begin; i < node.end; ++i) {
        const node_id id = order_[i];
        if (id != self) heap.offer({squared_distance(q, points_.row(id)), id});
      }
      return;
    }
    const double diff = q[node.split_dim] - node.split;
    const auto near = diff < 0.0 ? node.left : node.right;
    const auto far = diff < 0.0 ? node.right : node.left;
    search(near, q, self, heap);
    // Equality still descends: an equal-distance point with a smaller id may be there.
    if (!heap.full() || diff * diff <= heap.worst().dist) search(far, q, self, heap);
  }

  const FeatureMatrix& points_;
  std::vector<node_id> order_;
  std::vector<Node> nodes_;
};

}  // namespace detail

/// Reference O(n^2 dim) search.
inline NeighborTable knn_brute_force(const FeatureMatrix& points, std::size_t k, unsigned threads = 1) {
  detail::check_knn_args(points, k);
  const std::size_t n = points.rows();
  NeighborTable table(n * k);
  parallel_for(n, threads, [&](std::size_t i) {
    detail::BoundedHeap heap(k);
    const auto q = points.row(i);
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) heap.offer({squared_distance(q, points.row(j)), static_cast<node_id>(j)});
    heap.drain_sorted(table.data() + i * k);
  });
  return table;
}

inline NeighborTable knn_kd_tree(const FeatureMatrix& points, std::size_t k, unsigned threads = 1) {
  detail::check_knn_args(points, k);
  const detail::KdTree tree(points);
  NeighborTable table(points.rows() * k);
  parallel_for(points.rows(), threads, [&](std::size_t i) {
    tree.query(static_cast<node_id>(i), k, table.data() + i * k);
  });
  return table;
}

inline NeighborTable knn_table(const FeatureMatrix& points, std::size_t k, const KnnOptions& options = {}) {
  return options.algorithm == KnnAlgorithm::brute_force ? knn_brute_force(points, k, options.threads)
                                                        : knn_kd_tree(points, k, options.threads);
}

/// Landscape whose neighborhood is the k-NN graph of the embeddings.
inline Landscape build_knn(const EmbeddingMatrix& embeddings, std::size_t k, const KnnOptions& options = {},
                           std::string id = {}) {
  if (embeddings.labels.size() != embeddings.n()) throw parameter_error("label count does not match rows");
  const NeighborTable table = knn_table(embeddings.features, k, options);
  const std::size_t n = embeddings.n();
  std::vector<std::vector<node_id>> lists(n);
  for (std::size_t i = 0; i < n; ++i) lists[i].assign(table.begin() + static_cast<std::ptrdiff_t>(i * k),
                                                      table.begin() + static_cast<std::ptrdiff_t>((i + 1) * k));
  if (options.symmetrize) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) lists[table[i * k + j]].push_back(static_cast<node_id>(i));
    for (std::size_t i = 0; i < n; ++i) {
      std::sort(lists[i].begin(), lists[i].end());
      lists[i].erase(std::unique(lists[i].begin(), lists[i].end()), lists[i].end());
    }
  }
  return Landscape(embeddings.labels, embeddings.num_classes, AdjacencyNeighborhood::from_lists(lists),
                   id.empty() ? "knn-k" + std::to_string(k) : std::move(id));
}

}  // namespace labelscape
