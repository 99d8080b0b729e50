#pragma once

// Label landscapes (X, f, N) and the random walk over them.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "labelscape/errors.hpp"
#include "labelscape/rng.hpp"

namespace labelscape {

using node_id = std::uint32_t;
using class_id = std::uint8_t;

/// One value per element, each 0 or 1.
using BitArray = std::vector<std::uint8_t>;

inline constexpr int kMaxClasses = 256;

/// Implicit Hamming-1 neighborhood on {0,1}^d. Neighbor j of node i flips bit j.
class HypercubeNeighborhood {
 public:
  explicit HypercubeNeighborhood(int dimensions) : d_(dimensions) {
    if (dimensions < 1 || dimensions > 31) throw parameter_error("hypercube dimension out of range");
  }
  int dimensions() const noexcept { return d_; }
  std::size_t node_count() const noexcept { return std::size_t{1} << d_; }
  std::size_t degree(node_id) const noexcept { return static_cast<std::size_t>(d_); }
  node_id neighbor(node_id i, std::size_t j) const noexcept { return i ^ (node_id{1} << j); }

  /// Position of `other` in the neighbor list of `i`, if adjacent.
  std::optional<std::size_t> index_of(node_id i, node_id other) const noexcept {
    const node_id diff = i ^ other;
    if (diff == 0 || (diff & (diff - 1)) != 0) return std::nullopt;
    return static_cast<std::size_t>(__builtin_ctz(diff));
  }

 private:
  int d_;
};

/// Explicit neighbor lists stored in compressed-row form.
class AdjacencyNeighborhood {
 public:
  AdjacencyNeighborhood() = default;

  AdjacencyNeighborhood(std::vector<std::size_t> offsets, std::vector<node_id> targets)
      : offsets_(std::move(offsets)), targets_(std::move(targets)) {
    if (offsets_.empty() || offsets_.front() != 0 || offsets_.back() != targets_.size())
      throw structural_error("malformed adjacency offsets");
    for (std::size_t i = 1; i < offsets_.size(); ++i)
      if (offsets_[i] < offsets_[i - 1]) throw structural_error("malformed adjacency offsets");
  }

  static AdjacencyNeighborhood from_lists(const std::vector<std::vector<node_id>>& lists) {
    std::vector<std::size_t> offsets;
    offsets.reserve(lists.size() + 1);
    offsets.push_back(0);
    std::vector<node_id> targets;
    for (const auto& list : lists) {
      targets.insert(targets.end(), list.begin(), list.end());
      offsets.push_back(targets.size());
    }
    return AdjacencyNeighborhood(std::move(offsets), std::move(targets));
  }

  std::size_t node_count() const noexcept { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t degree(node_id i) const noexcept { return offsets_[i + 1] - offsets_[i]; }
  node_id neighbor(node_id i, std::size_t j) const noexcept { return targets_[offsets_[i] + j]; }
  std::span<const node_id> neighbors(node_id i) const noexcept {
    return {targets_.data() + offsets_[i], degree(i)};
  }

  std::optional<std::size_t> index_of(node_id i, node_id other) const noexcept {
    const auto list = neighbors(i);
    const auto it = std::find(list.begin(), list.end(), other);
    if (it == list.end()) return std::nullopt;
    return static_cast<std::size_t>(it - list.begin());
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<node_id> targets_;
};

using Neighborhood = std::variant<HypercubeNeighborhood, AdjacencyNeighborhood>;

inline std::size_t node_count(const Neighborhood& nb) {
  return std::visit([](const auto& n) { return n.node_count(); }, nb);
}

/// Immutable label landscape: per-node labels plus a neighborhood relation.
/// Copies share the neighborhood.
class Landscape {
 public:
  Landscape(std::vector<class_id> labels, int num_classes, Neighborhood neighborhood,
            std::string id = {})
      : Landscape(std::move(labels), num_classes,
                  std::make_shared<const Neighborhood>(std::move(neighborhood)), std::move(id)) {}

  Landscape(std::vector<class_id> labels, int num_classes,
            std::shared_ptr<const Neighborhood> neighborhood, std::string id = {})
      : labels_(std::move(labels)),
        num_classes_(num_classes),
        neighborhood_(std::move(neighborhood)),
        id_(std::move(id)) {
    validate();
  }

  std::size_t node_count() const noexcept { return labels_.size(); }
  int num_classes() const noexcept { return num_classes_; }
  std::span<const class_id> labels() const noexcept { return labels_; }
  class_id label(node_id i) const noexcept { return labels_[i]; }
  const Neighborhood& neighborhood() const noexcept { return *neighborhood_; }
  const std::shared_ptr<const Neighborhood>& shared_neighborhood() const noexcept {
    return neighborhood_;
  }
  const std::string& id() const noexcept { return id_; }

  std::size_t degree(node_id i) const {
    return std::visit([i](const auto& n) { return n.degree(i); }, *neighborhood_);
  }
  node_id neighbor(node_id i, std::size_t j) const {
    return std::visit([i, j](const auto& n) { return n.neighbor(i, j); }, *neighborhood_);
  }

  /// Same neighborhood, new labels.
  Landscape with_labels(std::vector<class_id> labels, std::string id = {}) const {
    return Landscape(std::move(labels), num_classes_, neighborhood_,
                     id.empty() ? id_ : std::move(id));
  }

 private:
  void validate() const {
    if (num_classes_ < 2 || num_classes_ > kMaxClasses)
      throw parameter_error("num_classes must be in [2, 256]");
    if (labels_.empty()) throw structural_error("landscape has no nodes");
    if (!neighborhood_) throw structural_error("landscape has no neighborhood");
    if (labelscape::node_count(*neighborhood_) != labels_.size())
      throw structural_error("neighborhood size does not match label count");
    for (std::size_t i = 0; i < labels_.size(); ++i)
      if (labels_[i] >= num_classes_)
        throw structural_error("label out of range at node " + std::to_string(i));
    if (const auto* adj = std::get_if<AdjacencyNeighborhood>(neighborhood_.get()))
      validate_adjacency(*adj);
  }

  void validate_adjacency(const AdjacencyNeighborhood& adj) const {
    const auto n = static_cast<node_id>(labels_.size());
    std::vector<node_id> scratch;
    for (node_id i = 0; i < n; ++i) {
      const auto list = adj.neighbors(i);
      if (list.empty()) throw structural_error("node " + std::to_string(i) + " has no neighbors");
      scratch.assign(list.begin(), list.end());
      std::sort(scratch.begin(), scratch.end());
      for (std::size_t j = 0; j < scratch.size(); ++j) {
        if (scratch[j] >= n)
          throw structural_error("node " + std::to_string(i) + " has an invalid neighbor id");
        if (scratch[j] == i)
          throw structural_error("node " + std::to_string(i) + " lists itself as a neighbor");
        if (j > 0 && scratch[j] == scratch[j - 1])
          throw structural_error("node " + std::to_string(i) + " has duplicate neighbors");
      }
    }
  }

  std::vector<class_id> labels_;
  int num_classes_;
  std::shared_ptr<const Neighborhood> neighborhood_;
  std::string id_;
};

/// Incremental construction of an explicit-neighborhood landscape.
class LandscapeBuilder {
 public:
  LandscapeBuilder(std::size_t node_count, int num_classes)
      : labels_(node_count, 0), lists_(node_count), num_classes_(num_classes) {}

  LandscapeBuilder& label(node_id i, class_id c) {
    labels_.at(i) = c;
    return *this;
  }
  LandscapeBuilder& neighbor(node_id i, node_id j) {
    lists_.at(i).push_back(j);
    return *this;
  }
  LandscapeBuilder& id(std::string value) {
    id_ = std::move(value);
    return *this;
  }

  Landscape build() const {
    return Landscape(labels_, num_classes_, AdjacencyNeighborhood::from_lists(lists_), id_);
  }

 private:
  std::vector<class_id> labels_;
  std::vector<std::vector<node_id>> lists_;
  int num_classes_;
  std::string id_;
};

/// Labels visited by one walk: the start label followed by one label per step.
struct LabelSequence {
  std::vector<class_id> labels;
  int num_classes = 2;
  seed_t walk_seed = 0;
  std::string source_landscape_id;
};

enum class WalkPolicy {
  /// Each step picks uniformly among all neighbors of the current node.
  memoryless,
  /// Each step excludes the node just left, unless it is the only neighbor.
  non_backtracking,
};

struct WalkOptions {
  WalkPolicy policy = WalkPolicy::memoryless;
  /// Fixed start node; drawn uniformly over all nodes when unset.
  std::optional<node_id> start;
  /// Debug trace of visited node ids (steps + 1 entries) when non-null.
  std::vector<node_id>* trace = nullptr;
};

namespace detail {

template <typename Nb>
void walk_on(const Nb& nb, std::span<const class_id> labels, node_id current,
             std::uint64_t steps, Rng& rng, const WalkOptions& options,
             std::vector<class_id>& out) {
  out.push_back(labels[current]);
  if (options.trace) options.trace->push_back(current);
  std::optional<node_id> previous;
  for (std::uint64_t z = 0; z < steps; ++z) {
    const std::size_t deg = nb.degree(current);
    if (deg == 0) throw structural_error("empty neighborhood at node " + std::to_string(current));
    std::size_t pick;
    if (options.policy == WalkPolicy::non_backtracking && previous && deg > 1) {
      const auto back = nb.index_of(current, *previous);
      if (back) {
        pick = rng.bounded(deg - 1);
        if (pick >= *back) ++pick;
      } else {
        pick = rng.bounded(deg);
      }
    } else {
      pick = rng.bounded(deg);
    }
    previous = current;
    current = nb.neighbor(current, pick);
    out.push_back(labels[current]);
    if (options.trace) options.trace->push_back(current);
  }
}

}  // namespace detail

/// Random walk of `steps` steps. The result holds steps + 1 labels and depends
/// only on (landscape, steps, seed, options).
inline LabelSequence random_walk(const Landscape& landscape, std::uint64_t steps, seed_t seed,
                                 const WalkOptions& options = {}) {
  if (steps < 1) throw parameter_error("steps must be at least 1");
  Rng rng(seed);
  node_id start;
  if (options.start) {
    if (*options.start >= landscape.node_count()) throw parameter_error("start node out of range");
    start = *options.start;
  } else {
    start = static_cast<node_id>(rng.bounded(landscape.node_count()));
  }

  LabelSequence seq;
  seq.num_classes = landscape.num_classes();
  seq.walk_seed = seed;
  seq.source_landscape_id = landscape.id();
  seq.labels.reserve(steps + 1);
  if (options.trace) {
    options.trace->clear();
    options.trace->reserve(steps + 1);
  }
  std::visit(
      [&](const auto& nb) {
        detail::walk_on(nb, landscape.labels(), start, steps, rng, options, seq.labels);
      },
      landscape.neighborhood());
  return seq;
}

/// Binary view of a two-class sequence: bit i equals label i.
inline BitArray as_bits(const LabelSequence& seq) {
  if (seq.num_classes != 2)
    throw not_binary_error("as_bits requires a binary landscape (got " +
                           std::to_string(seq.num_classes) +
                           " classes); use alternation_encode for multi-class sequences");
  BitArray bits(seq.labels.begin(), seq.labels.end());
  for (auto b : bits)
    if (b > 1) throw not_binary_error("label outside {0,1} in a binary sequence");
  return bits;
}

}  // namespace labelscape
