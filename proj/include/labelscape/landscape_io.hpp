#pragma once

// Text serialization of landscapes:
//
//   nodes,<n>,classes,<c>
//   <id>,<label>,<neighbor;neighbor;...>
//
// one line per node, ids 0..n-1 in order. Neighbor order is preserved.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "labelscape/io.hpp"
#include "labelscape/landscape.hpp"

namespace labelscape {

inline std::string serialize_landscape(const Landscape& landscape) {
  std::string out;
  const std::size_t n = landscape.node_count();
  out.reserve(n * 16);
  out += "nodes," + std::to_string(n) + ",classes," + std::to_string(landscape.num_classes()) + "\n";
  for (node_id i = 0; i < n; ++i) {
    out += std::to_string(i);
    out += ',';
    out += std::to_string(landscape.label(i));
    out += ',';
    const std::size_t deg = landscape.degree(i);
    for (std::size_t j = 0; j < deg; ++j) {
      if (j) out += ';';
      out += std::to_string(landscape.neighbor(i, j));
    }
    out += '\n';
  }
  return out;
}

inline Landscape parse_landscape(std::string_view text, std::string id = {}) {
  const auto rows = io::lines(text);
  if (rows.empty()) throw load_error("empty landscape file");
  const auto header = io::split(rows[0], ',');
  std::size_t n = 0;
  int classes = 0;
  if (header.size() != 4 || header[0] != "nodes" || header[2] != "classes" ||
      !io::parse_int(header[1], n) || !io::parse_int(header[3], classes))
    throw load_error("expected header 'nodes,<n>,classes,<c>'", 1);
  if (n == 0) throw load_error("landscape must have at least one node", 1);
  if (classes < 2 || classes > kMaxClasses) throw load_error("classes must be in [2, 256]", 1);

  std::vector<class_id> labels(n);
  std::vector<std::size_t> offsets{0};
  offsets.reserve(n + 1);
  std::vector<node_id> targets;
  std::size_t row = 1;
  std::size_t expected = 0;
  for (; row < rows.size(); ++row) {
    if (io::trim(rows[row]).empty()) continue;
    const long line_no = static_cast<long>(row + 1);
    const auto cells = io::split(rows[row], ',');
    std::size_t id_value = 0;
    int label = 0;
    if (cells.size() != 3 || !io::parse_int(cells[0], id_value) || !io::parse_int(cells[1], label))
      throw load_error("expected '<id>,<label>,<neighbors>'", line_no);
    if (id_value != expected) throw load_error("node ids must be consecutive from 0", line_no);
    if (id_value >= n) throw load_error("more node lines than declared", line_no);
    if (label < 0 || label >= classes) throw load_error("label out of range", line_no);
    labels[id_value] = static_cast<class_id>(label);
    if (!cells[2].empty()) {
      for (auto tok : io::split(cells[2], ';')) {
        std::uint64_t target = 0;
        if (!io::parse_int(tok, target) || target >= n)
          throw load_error("invalid neighbor id '" + std::string(tok) + "'", line_no);
        targets.push_back(static_cast<node_id>(target));
      }
    }
    offsets.push_back(targets.size());
    ++expected;
  }
  if (expected != n)
    throw load_error("declared " + std::to_string(n) + " nodes but found " + std::to_string(expected));
  try {
    return Landscape(std::move(labels), classes,
                     AdjacencyNeighborhood(std::move(offsets), std::move(targets)), std::move(id));
  } catch (const structural_error& e) {
    throw load_error(e.what());
  }
}

inline Landscape load_landscape(const std::filesystem::path& path) {
  return parse_landscape(io::read_file(path), path.filename().string());
}

inline void save_landscape(const std::filesystem::path& path, const Landscape& landscape) {
  io::atomic_write(path, serialize_landscape(landscape));
}

}  // namespace labelscape
