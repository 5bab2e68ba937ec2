/// @file field_io.hpp
/// @brief RDF1 snapshot format.
///
/// Layout (all little-endian):
///   bytes 0-3    "RDF1"
///   bytes 4-11   reserved, zero
///   bytes 12-15  uint32 format version (1)
///   int32 N, int32 P, int32 n, float64 L, float64 nu, float64 t
///   P row-major float64 arrays of n^N values each

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rdlab/grid.hpp"

namespace rdlab {

inline constexpr std::uint32_t kRdf1Version = 1;

struct Snapshot {
  SpeciesField field;
  double nu = 0.0;
};

std::vector<std::uint8_t> encode_rdf1(const SpeciesField& field, double nu);
/// Throws std::runtime_error on bad magic, version, header or truncated payload.
Snapshot decode_rdf1(const std::vector<std::uint8_t>& bytes);

/// Writes through a temporary file and renames it into place.
void write_rdf1(const std::filesystem::path& path, const SpeciesField& field, double nu);
Snapshot read_rdf1(const std::filesystem::path& path);

/// Reads every snap_*.rdf1 file of a directory in name order.
std::vector<Snapshot> read_rdf1_directory(const std::filesystem::path& dir);
SpaceTimeSlab slab_from_snapshots(const std::vector<Snapshot>& snaps);

/// Byte-level helpers shared by the artifact writers.
void write_bytes_atomic(const std::filesystem::path& path, const std::string& bytes);
std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path);
std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size);
std::string hex64(std::uint64_t v);

}  // namespace rdlab
