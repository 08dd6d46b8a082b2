#ifndef HELMNS_FIELD_HPP
#define HELMNS_FIELD_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "helmns/grid.hpp"
#include "helmns/parallel.hpp"

namespace helmns {

/// Real samples on a Grid3, x-fastest row-major. Operations treat fields
/// as values; nothing mutates an argument.
struct ScalarField {
    Grid3 grid;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(const Grid3& g) : grid(g), data(g.size(), 0.0) {}
    ScalarField(const Grid3& g, std::vector<double> d) : grid(g), data(std::move(d)) {
        if (data.size() != grid.size())
            throw std::invalid_argument("ScalarField: data length " +
                                        std::to_string(data.size()) +
                                        " does not match grid cell count " +
                                        std::to_string(grid.size()));
    }

    double& operator()(int i, int j, int k) { return data[grid.index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data[grid.index(i, j, k)]; }
    std::size_t size() const { return data.size(); }
};

/// Three scalar components on one shared grid.
struct VectorField {
    Grid3 grid;
    std::array<ScalarField, 3> comp;

    VectorField() = default;
    explicit VectorField(const Grid3& g)
        : grid(g), comp{ScalarField(g), ScalarField(g), ScalarField(g)} {}
    VectorField(ScalarField cx, ScalarField cy, ScalarField cz)
        : grid(cx.grid), comp{std::move(cx), std::move(cy), std::move(cz)} {
        if (comp[1].grid != grid || comp[2].grid != grid)
            throw std::invalid_argument("VectorField: components on different grids");
    }

    const ScalarField& operator[](int c) const { return comp[c]; }
    ScalarField& operator[](int c) { return comp[c]; }
    std::size_t size() const { return grid.size(); }
};

struct FieldNormSet {
    double sup = 0.0;
    double l2 = 0.0;      // grid-weighted: sqrt(sum f^2 * hx*hy*hz)
    double energy = 0.0;  // l2 squared
};

template <typename Fn>
ScalarField sample_function(const Grid3& grid, Fn&& f) {
    ScalarField out(grid);
    const int nx = grid.n[0], ny = grid.n[1], nz = grid.n[2];
    par::parallel_for(
        0, static_cast<std::size_t>(nz),
        [&](std::size_t kz) {
            const int k = static_cast<int>(kz);
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i) {
                    const auto p = grid.point(i, j, k);
                    out(i, j, k) = f(p[0], p[1], p[2]);
                }
        },
        static_cast<std::size_t>(nx) * ny * 16);
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (!std::isfinite(out(i, j, k)))
                    throw std::invalid_argument(
                        "sample_function: non-finite sample at index (" +
                        std::to_string(i) + "," + std::to_string(j) + "," +
                        std::to_string(k) + ")");
    return out;
}

template <typename Fn>
VectorField sample_vector_function(const Grid3& grid, Fn&& f) {
    VectorField out(grid);
    for (int c = 0; c < 3; ++c)
        out.comp[c] = sample_function(
            grid, [&f, c](double x, double y, double z) { return f(x, y, z)[c]; });
    return out;
}

inline void require_same_grid(const Grid3& a, const Grid3& b, const char* who) {
    if (a != b) throw std::invalid_argument(std::string(who) + ": grid mismatch");
}

// -- elementwise arithmetic ------------------------------------------------

inline ScalarField add(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "add");
    ScalarField out(a.grid);
    par::parallel_for(0, out.size(), [&](std::size_t i) { out.data[i] = a.data[i] + b.data[i]; });
    return out;
}

inline ScalarField sub(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "sub");
    ScalarField out(a.grid);
    par::parallel_for(0, out.size(), [&](std::size_t i) { out.data[i] = a.data[i] - b.data[i]; });
    return out;
}

inline ScalarField scale(const ScalarField& a, double c) {
    ScalarField out(a.grid);
    par::parallel_for(0, out.size(), [&](std::size_t i) { out.data[i] = c * a.data[i]; });
    return out;
}

/// a + c*b
inline ScalarField axpy(const ScalarField& a, double c, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "axpy");
    ScalarField out(a.grid);
    par::parallel_for(0, out.size(), [&](std::size_t i) { out.data[i] = a.data[i] + c * b.data[i]; });
    return out;
}

inline VectorField add(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid, "add");
    return {add(a.comp[0], b.comp[0]), add(a.comp[1], b.comp[1]), add(a.comp[2], b.comp[2])};
}

inline VectorField sub(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid, "sub");
    return {sub(a.comp[0], b.comp[0]), sub(a.comp[1], b.comp[1]), sub(a.comp[2], b.comp[2])};
}

inline VectorField scale(const VectorField& a, double c) {
    return {scale(a.comp[0], c), scale(a.comp[1], c), scale(a.comp[2], c)};
}

inline VectorField axpy(const VectorField& a, double c, const VectorField& b) {
    require_same_grid(a.grid, b.grid, "axpy");
    return {axpy(a.comp[0], c, b.comp[0]), axpy(a.comp[1], c, b.comp[1]),
            axpy(a.comp[2], c, b.comp[2])};
}

inline double mean(const ScalarField& f) {
    return par::block_reduce_sum(f.size(), [&](std::size_t i) { return f.data[i]; }) /
           static_cast<double>(f.size());
}

inline std::array<double, 3> mean(const VectorField& f) {
    return {mean(f.comp[0]), mean(f.comp[1]), mean(f.comp[2])};
}

/// Grid inner product <a,b> = sum a*b * cell_volume.
inline double inner(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "inner");
    return a.grid.cell_volume() *
           par::block_reduce_sum(a.size(), [&](std::size_t i) { return a.data[i] * b.data[i]; });
}

inline double inner(const VectorField& a, const VectorField& b) {
    require_same_grid(a.grid, b.grid, "inner");
    double s = 0.0;
    for (int c = 0; c < 3; ++c) s += inner(a.comp[c], b.comp[c]);
    return s;
}

// -- norms -------------------------------------------------------------------

inline FieldNormSet norms(const ScalarField& f) {
    FieldNormSet out;
    out.sup = par::block_reduce_max(f.size(), [&](std::size_t i) { return std::abs(f.data[i]); });
    const double s =
        par::block_reduce_sum(f.size(), [&](std::size_t i) { return f.data[i] * f.data[i]; });
    out.energy = s * f.grid.cell_volume();
    out.l2 = std::sqrt(out.energy);
    return out;
}

/// Vector norms use the pointwise Euclidean magnitude.
inline FieldNormSet norms(const VectorField& f) {
    FieldNormSet out;
    auto mag2 = [&](std::size_t i) {
        const double x = f.comp[0].data[i], y = f.comp[1].data[i], z = f.comp[2].data[i];
        return x * x + y * y + z * z;
    };
    out.sup = std::sqrt(par::block_reduce_max(f.size(), mag2));
    const double s = par::block_reduce_sum(f.size(), mag2);
    out.energy = s * f.grid.cell_volume();
    out.l2 = std::sqrt(out.energy);
    return out;
}

inline bool all_finite(const ScalarField& f) {
    for (double v : f.data)
        if (!std::isfinite(v)) return false;
    return true;
}

inline bool all_finite(const VectorField& f) {
    return all_finite(f.comp[0]) && all_finite(f.comp[1]) && all_finite(f.comp[2]);
}

}  // namespace helmns

#endif  // HELMNS_FIELD_HPP
