#ifndef HELMNS_STENCIL_HPP
#define HELMNS_STENCIL_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "helmns/field.hpp"

namespace helmns::fd {

/// Fornberg's algorithm: weights of the m-th derivative at x0 given nodes
/// xs (returned per node, highest derivative order requested only).
inline std::vector<double> fornberg_weights(double x0, const std::vector<double>& xs, int m) {
    const int nd = static_cast<int>(xs.size()) - 1;
    std::vector<std::vector<double>> c(nd + 1, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i <= nd; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int s = mn; s >= 1; --s)
                    c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int s = mn; s >= 1; --s)
                c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(nd + 1);
    for (int i = 0; i <= nd; ++i) w[i] = c[i][m];
    return w;
}

/// Row of a uniform-grid derivative table: sample offsets and weights
/// (weights already divided by h^m).
struct StencilRow {
    std::vector<int> offsets;  // relative to the output index
    std::vector<double> weights;
};

/// Per-row stencils for d^m/dx^m of nominal order `order` on an n-point
/// axis with spacing h. Periodic axes use the centered row everywhere
/// (with wraparound); window axes switch to shifted same-width rows near
/// the faces, keeping the nominal order one-sided.
inline std::vector<StencilRow> derivative_rows(int n, double h, int m, int order,
                                               bool periodic) {
    if (order != 2 && order != 4)
        throw std::invalid_argument("finite-difference order must be 2 or 4");
    if (m != 1 && m != 2) throw std::invalid_argument("derivative order must be 1 or 2");
    const int width = order + m;  // nodes per one-sided row

    auto build = [&](int firstOffset, int nnodes) {
        std::vector<double> xs(nnodes);
        for (int i = 0; i < nnodes; ++i) xs[i] = (firstOffset + i) * h;
        auto w = fornberg_weights(0.0, xs, m);
        StencilRow row;
        for (int i = 0; i < nnodes; ++i) {
            row.offsets.push_back(firstOffset + i);
            row.weights.push_back(w[i]);
        }
        return row;
    };

    // Centered row: symmetric window of order+1 points (odd count).
    const int cwidth = order + 1;
    const int chalf = cwidth / 2;
    StencilRow centered = build(-chalf, cwidth);

    std::vector<StencilRow> rows(n);
    if (periodic) {
        for (int r = 0; r < n; ++r) rows[r] = centered;
        return rows;
    }
    for (int r = 0; r < n; ++r) {
        if (r >= chalf && r < n - chalf) {
            rows[r] = centered;
        } else if (r < chalf) {
            rows[r] = build(-r, width);  // row's node window starts at the face
        } else {
            rows[r] = build(n - 1 - r - (width - 1), width);  // window ends at the face
        }
    }
    return rows;
}

/// Apply d^m along `axis` with the given nominal order.
inline ScalarField derivative_axis(const ScalarField& f, int axis, int m, int order) {
    const Grid3& g = f.grid;
    const int n = g.n[axis];
    const bool periodic = g.boundary == Boundary::Periodic;
    const int width = order + m;
    if (n < width)
        throw std::invalid_argument("derivative_axis: axis too short for requested order");
    const auto rows = derivative_rows(n, g.spacing(axis), m, order, periodic);

    ScalarField out(g);
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    const std::ptrdiff_t stride = axis == 0 ? 1
                                : axis == 1 ? static_cast<std::ptrdiff_t>(nx)
                                            : static_cast<std::ptrdiff_t>(nx) * ny;
    const std::size_t slab_cost = static_cast<std::size_t>(nx) * ny * (width + 2);
    par::parallel_for(0, static_cast<std::size_t>(nz), [&](std::size_t kz) {
        const int k = static_cast<int>(kz);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const int r = axis == 0 ? i : axis == 1 ? j : k;
                const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(g.index(i, j, k));
                const StencilRow& row = rows[r];
                double acc = 0.0;
                for (std::size_t s = 0; s < row.offsets.size(); ++s) {
                    int q = r + row.offsets[s];
                    if (periodic) q = (q % n + n) % n;
                    acc += row.weights[s] * f.data[base + (q - r) * stride];
                }
                out.data[base] = acc;
            }
    }, slab_cost);
    return out;
}

}  // namespace helmns::fd

#endif  // HELMNS_STENCIL_HPP
