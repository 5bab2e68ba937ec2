#include "rdlab/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

namespace rdlab {

static_assert(std::endian::native == std::endian::little, "RDF1 codec assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'R', 'D', 'F', '1'};
constexpr std::size_t kPreamble = 16;
constexpr std::size_t kHeader = 3 * 4 + 3 * 8;

template <class T>
void put(std::vector<std::uint8_t>& out, T v) {
  std::uint8_t b[sizeof(T)];
  std::memcpy(b, &v, sizeof(T));
  out.insert(out.end(), b, b + sizeof(T));
}

template <class T>
T get(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw std::runtime_error("RDF1: truncated header");
  T v;
  std::memcpy(&v, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_rdf1(const SpeciesField& field, double nu) {
  const auto& g = field.grid;
  std::vector<std::uint8_t> out;
  out.reserve(kPreamble + kHeader + field.species.size() * g.cells() * sizeof(double));
  out.insert(out.end(), kMagic, kMagic + 4);
  out.insert(out.end(), 8, std::uint8_t{0});
  put<std::uint32_t>(out, kRdf1Version);
  put<std::int32_t>(out, g.dim());
  put<std::int32_t>(out, field.count());
  put<std::int32_t>(out, g.n());
  put<double>(out, g.length());
  put<double>(out, nu);
  put<double>(out, field.time);
  for (const auto& a : field.species) {
    if (a.size() != g.cells()) throw std::invalid_argument("RDF1: species array has wrong size");
    const auto* p = reinterpret_cast<const std::uint8_t*>(a.data());
    out.insert(out.end(), p, p + a.size() * sizeof(double));
  }
  return out;
}

Snapshot decode_rdf1(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kPreamble + kHeader || !std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw std::runtime_error("RDF1: bad magic");
  }
  std::size_t pos = 12;
  const auto version = get<std::uint32_t>(bytes, pos);
  if (version != kRdf1Version) {
    throw std::runtime_error("RDF1: unsupported version " + std::to_string(version));
  }
  const auto dim = get<std::int32_t>(bytes, pos);
  const auto count = get<std::int32_t>(bytes, pos);
  const auto n = get<std::int32_t>(bytes, pos);
  const auto length = get<double>(bytes, pos);
  const auto nu = get<double>(bytes, pos);
  const auto t = get<double>(bytes, pos);
  if (count < 1) throw std::runtime_error("RDF1: species count must be positive");
  GridSpec grid;
  try {
    grid = GridSpec(dim, n, length);
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("RDF1: bad grid header: ") + e.what());
  }
  const std::size_t payload = static_cast<std::size_t>(count) * grid.cells() * sizeof(double);
  if (bytes.size() != pos + payload) throw std::runtime_error("RDF1: payload size mismatch");
  Snapshot s{SpeciesField(grid, count, t), nu};
  for (auto& a : s.field.species) {
    std::memcpy(a.data(), bytes.data() + pos, a.size() * sizeof(double));
    pos += a.size() * sizeof(double);
  }
  return s;
}

void write_bytes_atomic(const std::filesystem::path& path, const std::string& bytes) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path.string());
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(is), {});
}

void write_rdf1(const std::filesystem::path& path, const SpeciesField& field, double nu) {
  const auto bytes = encode_rdf1(field, nu);
  write_bytes_atomic(path, std::string(bytes.begin(), bytes.end()));
}

Snapshot read_rdf1(const std::filesystem::path& path) { return decode_rdf1(read_bytes(path)); }

std::vector<Snapshot> read_rdf1_directory(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("not a directory: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && name.rfind("snap_", 0) == 0 && e.path().extension() == ".rdf1") {
      files.push_back(e.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::runtime_error("no snap_*.rdf1 files in " + dir.string());
  std::vector<Snapshot> out;
  out.reserve(files.size());
  for (const auto& f : files) out.push_back(read_rdf1(f));
  return out;
}

SpaceTimeSlab slab_from_snapshots(const std::vector<Snapshot>& snaps) {
  SpaceTimeSlab slab;
  slab.snapshots.reserve(snaps.size());
  for (const auto& s : snaps) slab.snapshots.push_back(s.field);
  slab.validate();
  return slab;
}

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace rdlab
