#ifndef HELMNS_CALCULUS_HPP
#define HELMNS_CALCULUS_HPP

#include <stdexcept>
#include <string>

#include "helmns/fft.hpp"
#include "helmns/stencil.hpp"

namespace helmns::calculus {

enum class DiffMethod { Spectral, FiniteDifference };

struct DiffBackend {
    DiffMethod method = DiffMethod::Spectral;
    int fd_order = 4;

    static DiffBackend spectral() { return {DiffMethod::Spectral, 0}; }
    static DiffBackend fd(int order) {
        if (order != 2 && order != 4)
            throw std::invalid_argument("DiffBackend: finite-difference order must be 2 or 4");
        return {DiffMethod::FiniteDifference, order};
    }
    bool is_spectral() const { return method == DiffMethod::Spectral; }
};

inline void require_valid(const DiffBackend& b, const Grid3& g, const char* who) {
    if (b.is_spectral() && g.boundary != Boundary::Periodic)
        throw std::invalid_argument(std::string(who) +
                                    ": spectral backend requires a periodic grid");
}

namespace detail {

/// d f / d axis, spectral: multiply by i*k (Nyquist zeroed).
inline ScalarField spectral_partial(const spectral::Modes& m, int axis) {
    spectral::Modes dm(m.grid);
    spectral::for_each_mode(m.grid, [&](std::size_t f, double kx, double ky, double kz) {
        const double k = axis == 0 ? kx : axis == 1 ? ky : kz;
        const auto c = m.coef[f];
        dm.coef[f] = spectral::Complex{-k * c.imag(), k * c.real()};
    });
    return spectral::inverse(dm);
}

inline ScalarField partial(const ScalarField& f, int axis, const DiffBackend& b) {
    if (b.is_spectral()) return spectral_partial(spectral::forward(f), axis);
    return fd::derivative_axis(f, axis, 1, b.fd_order);
}

}  // namespace detail

inline VectorField grad(const ScalarField& f, const DiffBackend& b) {
    require_valid(b, f.grid, "grad");
    if (b.is_spectral()) {
        auto m = spectral::forward(f);
        return {detail::spectral_partial(m, 0), detail::spectral_partial(m, 1),
                detail::spectral_partial(m, 2)};
    }
    return {detail::partial(f, 0, b), detail::partial(f, 1, b), detail::partial(f, 2, b)};
}

inline ScalarField div(const VectorField& F, const DiffBackend& b) {
    require_valid(b, F.grid, "div");
    ScalarField out = detail::partial(F.comp[0], 0, b);
    out = add(out, detail::partial(F.comp[1], 1, b));
    out = add(out, detail::partial(F.comp[2], 2, b));
    return out;
}

inline VectorField curl(const VectorField& F, const DiffBackend& b) {
    require_valid(b, F.grid, "curl");
    ScalarField cx = sub(detail::partial(F.comp[2], 1, b), detail::partial(F.comp[1], 2, b));
    ScalarField cy = sub(detail::partial(F.comp[0], 2, b), detail::partial(F.comp[2], 0, b));
    ScalarField cz = sub(detail::partial(F.comp[1], 0, b), detail::partial(F.comp[0], 1, b));
    return {std::move(cx), std::move(cy), std::move(cz)};
}

inline ScalarField laplacian(const ScalarField& f, const DiffBackend& b) {
    require_valid(b, f.grid, "laplacian");
    if (b.is_spectral()) {
        auto m = spectral::forward(f);
        spectral::for_each_mode_full(f.grid, [&](std::size_t i, double kx, double ky, double kz) {
            m.coef[i] *= -(kx * kx + ky * ky + kz * kz);
        });
        return spectral::inverse(m);
    }
    ScalarField out = fd::derivative_axis(f, 0, 2, b.fd_order);
    out = add(out, fd::derivative_axis(f, 1, 2, b.fd_order));
    out = add(out, fd::derivative_axis(f, 2, 2, b.fd_order));
    return out;
}

inline VectorField laplacian(const VectorField& f, const DiffBackend& b) {
    return {laplacian(f.comp[0], b), laplacian(f.comp[1], b), laplacian(f.comp[2], b)};
}

/// k-fold composition of curl, computed by literal iteration.
inline VectorField curl_k(const VectorField& F, int k, const DiffBackend& b) {
    if (k < 1) throw std::invalid_argument("curl_k: k must be >= 1 (identity is not a curl)");
    VectorField out = curl(F, b);
    for (int i = 1; i < k; ++i) out = curl(out, b);
    return out;
}

/// (u . grad) F. The spectral path differentiates in Fourier space,
/// multiplies pointwise, and applies the 2/3-rule to the product.
inline VectorField advect(const VectorField& u, const VectorField& F, const DiffBackend& b) {
    require_valid(b, u.grid, "advect");
    require_same_grid(u.grid, F.grid, "advect");
    VectorField out(u.grid);
    spectral::VectorModes Fm;
    if (b.is_spectral()) Fm = spectral::forward(F);
    for (int i = 0; i < 3; ++i) {
        ScalarField acc(u.grid);
        for (int j = 0; j < 3; ++j) {
            const ScalarField dFi = b.is_spectral()
                                        ? detail::spectral_partial(Fm.comp[i], j)
                                        : fd::derivative_axis(F.comp[i], j, 1, b.fd_order);
            par::parallel_for(0, acc.size(), [&](std::size_t s) {
                acc.data[s] += u.comp[j].data[s] * dFi.data[s];
            });
        }
        if (b.is_spectral()) {
            auto m = spectral::forward(acc);
            spectral::dealias_23(m);
            out.comp[i] = spectral::inverse(m);
        } else {
            out.comp[i] = std::move(acc);
        }
    }
    return out;
}

/// advect(u,u) - nu * laplacian(u): the field split by the Helmholtz
/// decomposition into grad(phi) + curl(psi).
inline VectorField nonlinear_term(const VectorField& u, double nu, const DiffBackend& b) {
    VectorField adv = advect(u, u, b);
    if (nu == 0.0) return adv;
    return axpy(adv, -nu, laplacian(u, b));
}

}  // namespace helmns::calculus

#endif  // HELMNS_CALCULUS_HPP
