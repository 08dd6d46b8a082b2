#ifndef HELMNS_SNAPSHOT_HPP
#define HELMNS_SNAPSHOT_HPP

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "helmns/field.hpp"

// Snapshot file layout (little endian, no padding, no compression):
//   magic "HNSF" | u32 version=1 | u8 boundary | u32 nx,ny,nz
//   | f64 Lx,Ly,Lz | u8 ncomp (1|3) | ncomp * nx*ny*nz raw f64 samples,
//   x-fastest row-major. Round trips are bit-exact.

namespace helmns {

namespace snapshot_detail {

inline constexpr char kMagic[4] = {'H', 'N', 'S', 'F'};
inline constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void get(std::istream& is, T& v, const std::string& path) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!is)
        throw std::runtime_error("read_snapshot: " + path +
                                 ": truncated file (length mismatch)");
}

inline void write_header(std::ostream& os, const Grid3& grid, std::uint8_t ncomp) {
    os.write(kMagic, 4);
    put(os, kVersion);
    put(os, static_cast<std::uint8_t>(grid.boundary));
    for (int a = 0; a < 3; ++a) put(os, static_cast<std::uint32_t>(grid.n[a]));
    for (int a = 0; a < 3; ++a) put(os, grid.length[a]);
    put(os, ncomp);
}

inline Grid3 read_header(std::istream& is, const std::string& path, std::uint8_t& ncomp) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("read_snapshot: " + path + ": bad magic bytes");
    std::uint32_t version = 0;
    get(is, version, path);
    if (version != kVersion)
        throw std::runtime_error("read_snapshot: " + path + ": unsupported format version " +
                                 std::to_string(version));
    std::uint8_t boundary = 0;
    get(is, boundary, path);
    if (boundary > 1)
        throw std::runtime_error("read_snapshot: " + path + ": bad boundary mode byte");
    Grid3 grid;
    grid.boundary = static_cast<Boundary>(boundary);
    for (int a = 0; a < 3; ++a) {
        std::uint32_t n = 0;
        get(is, n, path);
        grid.n[a] = static_cast<int>(n);
    }
    for (int a = 0; a < 3; ++a) get(is, grid.length[a], path);
    get(is, ncomp, path);
    if (ncomp != 1 && ncomp != 3)
        throw std::runtime_error("read_snapshot: " + path + ": component count " +
                                 std::to_string(int(ncomp)) + " not in {1,3}");
    if (grid.n[0] < 4 || grid.n[1] < 4 || grid.n[2] < 4 || grid.length[0] <= 0 ||
        grid.length[1] <= 0 || grid.length[2] <= 0)
        throw std::runtime_error("read_snapshot: " + path + ": invalid grid header");
    return grid;
}

inline void write_samples(std::ostream& os, const std::vector<double>& d) {
    os.write(reinterpret_cast<const char*>(d.data()),
             static_cast<std::streamsize>(d.size() * sizeof(double)));
}

inline void read_samples(std::istream& is, std::vector<double>& d, const std::string& path) {
    is.read(reinterpret_cast<char*>(d.data()),
            static_cast<std::streamsize>(d.size() * sizeof(double)));
    if (!is)
        throw std::runtime_error("read_snapshot: " + path +
                                 ": truncated file (length mismatch)");
}

inline void check_no_trailing(std::istream& is, const std::string& path) {
    char extra;
    is.read(&extra, 1);
    if (!is.eof())
        throw std::runtime_error("read_snapshot: " + path + ": trailing bytes (length mismatch)");
}

}  // namespace snapshot_detail

inline void write_snapshot(const ScalarField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("write_snapshot: cannot open " + path);
    snapshot_detail::write_header(os, f.grid, 1);
    snapshot_detail::write_samples(os, f.data);
    if (!os) throw std::runtime_error("write_snapshot: write failed for " + path);
}

inline void write_snapshot(const VectorField& f, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("write_snapshot: cannot open " + path);
    snapshot_detail::write_header(os, f.grid, 3);
    for (int c = 0; c < 3; ++c) snapshot_detail::write_samples(os, f.comp[c].data);
    if (!os) throw std::runtime_error("write_snapshot: write failed for " + path);
}

inline ScalarField read_snapshot_scalar(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);
    std::uint8_t ncomp = 0;
    Grid3 grid = snapshot_detail::read_header(is, path, ncomp);
    if (ncomp != 1)
        throw std::runtime_error("read_snapshot: " + path + ": expected 1 component, found " +
                                 std::to_string(int(ncomp)));
    ScalarField f(grid);
    snapshot_detail::read_samples(is, f.data, path);
    snapshot_detail::check_no_trailing(is, path);
    return f;
}

inline VectorField read_snapshot_vector(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_snapshot: cannot open " + path);
    std::uint8_t ncomp = 0;
    Grid3 grid = snapshot_detail::read_header(is, path, ncomp);
    if (ncomp != 3)
        throw std::runtime_error("read_snapshot: " + path + ": expected 3 components, found " +
                                 std::to_string(int(ncomp)));
    VectorField f(grid);
    for (int c = 0; c < 3; ++c) snapshot_detail::read_samples(is, f.comp[c].data, path);
    snapshot_detail::check_no_trailing(is, path);
    return f;
}

}  // namespace helmns

#endif  // HELMNS_SNAPSHOT_HPP
