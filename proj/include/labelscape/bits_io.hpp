#pragma once

// Packed bit files: bits stored most-significant-bit first within each byte,
// with the exact bit count in a sidecar text file "<path>.len".

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "labelscape/io.hpp"
#include "labelscape/landscape.hpp"

namespace labelscape {

inline std::string pack_bits(std::span<const std::uint8_t> bits) {
  std::string out((bits.size() + 7) / 8, '\0');
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i]) out[i / 8] = static_cast<char>(out[i / 8] | (0x80u >> (i % 8)));
  return out;
}

inline BitArray unpack_bits(std::string_view bytes, std::uint64_t bit_count) {
  if (bit_count > bytes.size() * std::uint64_t{8})
    throw load_error("bit length " + std::to_string(bit_count) + " exceeds packed data (" +
                     std::to_string(bytes.size()) + " bytes)");
  BitArray bits(bit_count);
  for (std::uint64_t i = 0; i < bit_count; ++i)
    bits[i] = (static_cast<unsigned char>(bytes[i / 8]) >> (7 - i % 8)) & 1u;
  return bits;
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  auto p = path;
  p += ".len";
  return p;
}

inline void save_packed_bits(const std::filesystem::path& path, std::span<const std::uint8_t> bits) {
  io::atomic_write(path, pack_bits(bits));
  io::atomic_write(sidecar_path(path), std::to_string(bits.size()) + "\n");
}

/// Reads a packed bit file. The length comes from `length` if given, else the
/// sidecar, else 8 * file size.
inline BitArray load_packed_bits(const std::filesystem::path& path,
                                 std::optional<std::uint64_t> length = std::nullopt) {
  const std::string bytes = io::read_file(path);
  if (!length) {
    const auto side = sidecar_path(path);
    if (std::filesystem::exists(side)) {
      std::uint64_t n = 0;
      if (!io::parse_int(io::trim(io::read_file(side)), n))
        throw load_error("malformed bit length in " + side.string());
      length = n;
    } else {
      length = bytes.size() * std::uint64_t{8};
    }
  }
  return unpack_bits(bytes, *length);
}

}  // namespace labelscape
