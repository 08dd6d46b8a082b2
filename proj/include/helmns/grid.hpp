#ifndef HELMNS_GRID_HPP
#define HELMNS_GRID_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace helmns {

/// Boundary handling of the sampling box.
/// Periodic: nodes x_i = i*h, index n wraps to 0 (exact for band-limited
/// fields). TruncatedWindow: cell centers x_i = (i+1/2)*h, used for the
/// direct free-space quadratures on decaying fields.
enum class Boundary : std::uint8_t { Periodic = 0, TruncatedWindow = 1 };

inline const char* to_string(Boundary b) {
    return b == Boundary::Periodic ? "periodic" : "window";
}

/// Rectangular 3-D sampling lattice. Samples are stored x-fastest
/// row-major: flat index = (k*ny + j)*nx + i.
struct Grid3 {
    std::array<int, 3> n{};
    std::array<double, 3> length{};
    Boundary boundary = Boundary::Periodic;

    std::size_t size() const {
        return static_cast<std::size_t>(n[0]) * n[1] * n[2];
    }

    double spacing(int axis) const { return length[axis] / n[axis]; }

    std::array<double, 3> spacing() const {
        return {spacing(0), spacing(1), spacing(2)};
    }

    double min_spacing() const {
        double m = spacing(0);
        for (int a = 1; a < 3; ++a) m = m < spacing(a) ? m : spacing(a);
        return m;
    }

    double cell_volume() const { return spacing(0) * spacing(1) * spacing(2); }

    double volume() const { return length[0] * length[1] * length[2]; }

    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * n[1] + j) * n[0] + i;
    }

    /// Physical coordinate of sample idx along axis.
    double coord(int axis, int idx) const {
        const double h = spacing(axis);
        return boundary == Boundary::Periodic ? idx * h : (idx + 0.5) * h;
    }

    std::array<double, 3> point(int i, int j, int k) const {
        return {coord(0, i), coord(1, j), coord(2, k)};
    }

    bool operator==(const Grid3& o) const {
        return n == o.n && length == o.length && boundary == o.boundary;
    }
    bool operator!=(const Grid3& o) const { return !(*this == o); }
};

inline Grid3 make_grid(std::array<int, 3> n, std::array<double, 3> length,
                       Boundary boundary) {
    for (int a = 0; a < 3; ++a) {
        if (n[a] < 4)
            throw std::invalid_argument(
                "make_grid: n[" + std::to_string(a) + "] = " + std::to_string(n[a]) +
                " but every direction needs at least 4 samples");
        if (!(length[a] > 0.0))
            throw std::invalid_argument(
                "make_grid: length[" + std::to_string(a) + "] = " +
                std::to_string(length[a]) + " must be positive");
    }
    return Grid3{n, length, boundary};
}

}  // namespace helmns

#endif  // HELMNS_GRID_HPP
