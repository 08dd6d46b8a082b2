#ifndef HELMNS_HELMHOLTZ_HPP
#define HELMNS_HELMHOLTZ_HPP

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "helmns/calculus.hpp"
#include "helmns/fft.hpp"
#include "helmns/report.hpp"

// Helmholtz decomposition f = grad(phi) + curl(psi) and the operators built
// on it. Two backends:
//   SpectralPoisson  - periodic grids; solves lap(phi) = div f and
//                      lap(psi) = -curl f modewise. Exact for band-limited
//                      fields; potentials are mean-zero (gauge), and the
//                      zero mode of f (its mean) belongs to neither part -
//                      it is returned separately as a constant remainder.
//   DirectQuadrature - truncated-window grids; evaluates the free-space
//                      Newtonian-potential integrals by midpoint quadrature
//                      with the singular self-cell dropped (the omitted
//                      ball contributes O(h^2), the quadrature's own order).
//
// Sign convention: reconstruction f = +grad(phi) + curl(psi) is the
// invariant. The free-space integral (1/4pi) int div f / |x-x'| dV' yields
// the potential entering with a minus sign, so the quadrature path negates
// it to keep both backends on one convention.

namespace helmns::helmholtz {

enum class PoissonBackend { SpectralPoisson, DirectQuadrature };

struct HelmholtzParts {
    ScalarField phi;                        // scalar potential
    VectorField psi;                        // vector potential (solenoidal gauge)
    VectorField gradPart;                   // grad(phi)
    VectorField curlPart;                   // curl(psi)
    std::array<double, 3> meanRemainder{};  // zero mode of f (periodic only)
    bool decayWarning = false;
};

inline void require_backend_grid(PoissonBackend b, const Grid3& g, const char* who) {
    if (b == PoissonBackend::SpectralPoisson && g.boundary != Boundary::Periodic)
        throw std::invalid_argument(std::string(who) +
                                    ": SpectralPoisson requires a periodic grid");
    if (b == PoissonBackend::DirectQuadrature && g.boundary != Boundary::TruncatedWindow)
        throw std::invalid_argument(std::string(who) +
                                    ": DirectQuadrature requires a truncated-window grid");
}

namespace detail {

using spectral::Complex;
using spectral::Modes;
using spectral::VectorModes;

/// psi_hat = i k x f_hat / |k|^2 (zero mode dropped): lap(psi) = -curl f.
inline VectorModes vector_potential_modes(const VectorModes& f) {
    VectorModes psi(f.grid);
    spectral::for_each_mode(f.grid, [&](std::size_t s, double kx, double ky, double kz) {
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) return;
        const Complex fx = f.comp[0].coef[s], fy = f.comp[1].coef[s], fz = f.comp[2].coef[s];
        const Complex cx = ky * fz - kz * fy;
        const Complex cy = kz * fx - kx * fz;
        const Complex cz = kx * fy - ky * fx;
        const Complex i_over_k2{0.0, 1.0 / k2};
        psi.comp[0].coef[s] = i_over_k2 * cx;
        psi.comp[1].coef[s] = i_over_k2 * cy;
        psi.comp[2].coef[s] = i_over_k2 * cz;
    });
    return psi;
}

inline VectorModes curl_modes(const VectorModes& a) {
    VectorModes out(a.grid);
    spectral::for_each_mode(a.grid, [&](std::size_t s, double kx, double ky, double kz) {
        const Complex ax = a.comp[0].coef[s], ay = a.comp[1].coef[s], az = a.comp[2].coef[s];
        const Complex i{0.0, 1.0};
        out.comp[0].coef[s] = i * (ky * az - kz * ay);
        out.comp[1].coef[s] = i * (kz * ax - kx * az);
        out.comp[2].coef[s] = i * (kx * ay - ky * ax);
    });
    return out;
}

/// Midpoint quadrature of the Newtonian potential
/// (1/4pi) sum_{x' != x} src(x')/|x-x'| * cell_volume, evaluated at the
/// node box [lo, hi) (inclusive lo, exclusive hi per axis).
inline ScalarField newtonian_potential_box(const ScalarField& src, std::array<int, 3> lo,
                                           std::array<int, 3> hi) {
    const Grid3& g = src.grid;
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    const std::array<int, 3> nb{hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]};
    Grid3 sub = g;
    sub.n = nb;
    for (int a = 0; a < 3; ++a) sub.length[a] = nb[a] * g.spacing(a);
    ScalarField out(sub);
    const double w = g.cell_volume() / (4.0 * std::numbers::pi);
    const double hx = g.spacing(0), hy = g.spacing(1), hz = g.spacing(2);
    const std::size_t rows = static_cast<std::size_t>(nb[1]) * nb[2];
    const std::size_t row_cost = static_cast<std::size_t>(nb[0]) * g.size() * 8;
    par::parallel_for(0, rows, [&](std::size_t row) {
        const int oj = static_cast<int>(row % nb[1]);
        const int ok = static_cast<int>(row / nb[1]);
        const int j0 = lo[1] + oj, k0 = lo[2] + ok;
        for (int oi = 0; oi < nb[0]; ++oi) {
            const int i0 = lo[0] + oi;
            double acc = 0.0;
            std::size_t s = 0;
            for (int k = 0; k < nz; ++k) {
                const double dz = (k - k0) * hz;
                for (int j = 0; j < ny; ++j) {
                    const double dy = (j - j0) * hy;
                    const double d2yz = dy * dy + dz * dz;
                    for (int i = 0; i < nx; ++i, ++s) {
                        if (i == i0 && j == j0 && k == k0) continue;  // singular cell dropped
                        const double dx = (i - i0) * hx;
                        acc += src.data[s] / std::sqrt(dx * dx + d2yz);
                    }
                }
            }
            out.data[sub.index(oi, oj, ok)] = w * acc;
        }
    }, row_cost);
    return out;
}

inline ScalarField newtonian_potential(const ScalarField& src) {
    return newtonian_potential_box(src, {0, 0, 0}, {src.grid.n[0], src.grid.n[1], src.grid.n[2]});
}

inline VectorField newtonian_potential(const VectorField& src) {
    return {newtonian_potential(src.comp[0]), newtonian_potential(src.comp[1]),
            newtonian_potential(src.comp[2])};
}

}  // namespace detail

/// Boundary-shell decay check: warn when the outermost cell layer carries
/// more than 5% of the interior sup.
inline bool decay_warning(const VectorField& f) {
    const Grid3& g = f.grid;
    double shell = 0.0, interior = 0.0;
    for (int k = 0; k < g.n[2]; ++k)
        for (int j = 0; j < g.n[1]; ++j)
            for (int i = 0; i < g.n[0]; ++i) {
                const bool edge = i == 0 || j == 0 || k == 0 || i == g.n[0] - 1 ||
                                  j == g.n[1] - 1 || k == g.n[2] - 1;
                const std::size_t s = g.index(i, j, k);
                double m2 = 0.0;
                for (int c = 0; c < 3; ++c) m2 += f.comp[c].data[s] * f.comp[c].data[s];
                (edge ? shell : interior) = std::max(edge ? shell : interior, m2);
            }
    return std::sqrt(shell) > 0.05 * std::sqrt(interior);
}

inline HelmholtzParts decompose(const VectorField& f, PoissonBackend backend) {
    require_backend_grid(backend, f.grid, "decompose");
    HelmholtzParts parts;
    if (backend == PoissonBackend::SpectralPoisson) {
        auto fm = spectral::forward(f);
        const double N = static_cast<double>(f.grid.size());
        for (int c = 0; c < 3; ++c) parts.meanRemainder[c] = fm.comp[c].coef[0].real() / N;
        // lap(phi) = div f  =>  phi_hat = -i (k . f_hat)/|k|^2
        spectral::Modes phim(f.grid);
        spectral::for_each_mode(f.grid, [&](std::size_t s, double kx, double ky, double kz) {
            const double k2 = kx * kx + ky * ky + kz * kz;
            if (k2 == 0.0) return;
            const auto dot = kx * fm.comp[0].coef[s] + ky * fm.comp[1].coef[s] +
                             kz * fm.comp[2].coef[s];
            phim.coef[s] = spectral::Complex{0.0, -1.0 / k2} * dot;
        });
        auto psim = detail::vector_potential_modes(fm);
        // gradPart/curlPart from the potentials themselves
        spectral::VectorModes gradm(f.grid);
        spectral::for_each_mode(f.grid, [&](std::size_t s, double kx, double ky, double kz) {
            const spectral::Complex i{0.0, 1.0};
            gradm.comp[0].coef[s] = i * kx * phim.coef[s];
            gradm.comp[1].coef[s] = i * ky * phim.coef[s];
            gradm.comp[2].coef[s] = i * kz * phim.coef[s];
        });
        auto curlm = detail::curl_modes(psim);
        parts.phi = spectral::inverse(phim);
        parts.psi = spectral::inverse(psim);
        parts.gradPart = spectral::inverse(gradm);
        parts.curlPart = spectral::inverse(curlm);
        return parts;
    }
    const auto fd = calculus::DiffBackend::fd(4);
    parts.decayWarning = decay_warning(f);
    const ScalarField divf = calculus::div(f, fd);
    const VectorField curlf = calculus::curl(f, fd);
    // free-space integral gives the minus-convention potential; negate
    parts.phi = scale(detail::newtonian_potential(divf), -1.0);
    parts.psi = detail::newtonian_potential(curlf);
    parts.gradPart = calculus::grad(parts.phi, fd);
    parts.curlPart = calculus::curl(parts.psi, fd);
    parts.meanRemainder = {0.0, 0.0, 0.0};
    return parts;
}

/// Solenoidal projection: curl of the vector potential of v,
/// H(v) = curl( (1/4pi) int curl v / |x-x'| dV' ). Fixed point on decaying
/// solenoidal fields, annihilates gradients, drops the mean.
inline VectorField h_operator(const VectorField& v, PoissonBackend backend) {
    require_backend_grid(backend, v.grid, "h_operator");
    if (backend == PoissonBackend::SpectralPoisson) {
        auto vm = spectral::forward(v);
        return spectral::inverse(detail::curl_modes(detail::vector_potential_modes(vm)));
    }
    const auto fd = calculus::DiffBackend::fd(4);
    return calculus::curl(detail::newtonian_potential(calculus::curl(v, fd)), fd);
}

/// k-fold composition of h_operator.
inline VectorField h_k(const VectorField& v, int k, PoissonBackend backend) {
    if (k < 1) throw std::invalid_argument("h_k: k must be >= 1");
    VectorField out = h_operator(v, backend);
    for (int i = 1; i < k; ++i) out = h_operator(out, backend);
    return out;
}

/// Inverse-curl reconstruction: curl of the Newtonian potential of v,
/// curl( (1/4pi) int v / |x-x'| dV' ). Recovers w from v = curl w for
/// decaying solenoidal w (velocity from vorticity).
inline VectorField biot_savart(const VectorField& v, PoissonBackend backend) {
    require_backend_grid(backend, v.grid, "biot_savart");
    if (backend == PoissonBackend::SpectralPoisson) {
        auto vm = spectral::forward(v);
        spectral::VectorModes am(v.grid);
        spectral::for_each_mode(v.grid, [&](std::size_t s, double kx, double ky, double kz) {
            const double k2 = kx * kx + ky * ky + kz * kz;
            if (k2 == 0.0) return;
            for (int c = 0; c < 3; ++c) am.comp[c].coef[s] = vm.comp[c].coef[s] / k2;
        });
        return spectral::inverse(detail::curl_modes(am));
    }
    const auto fd = calculus::DiffBackend::fd(4);
    return calculus::curl(detail::newtonian_potential(v), fd);
}

/// Pointwise samples of an analytic vector field.
using VectorFieldFn = std::function<std::array<double, 3>(double, double, double)>;

struct BackendCompareOptions {
    double probe_halfwidth = 1.0;   // physical half-width of the probe cube about the center
    double tolerance = 5e-2;        // relative interior discrepancy gate
};

/// Cross-validates the two backends: samples the same analytic field on a
/// window grid and a periodic grid, applies h_operator through both, and
/// compares at the window's interior probe points (spectral side evaluated
/// there by trigonometric interpolation).
inline CheckReport quadrature_vs_spectral_report(const VectorFieldFn& fn, const Grid3& windowGrid,
                                                 const Grid3& periodicGrid,
                                                 BackendCompareOptions opt = {}) {
    require_backend_grid(PoissonBackend::DirectQuadrature, windowGrid,
                         "quadrature_vs_spectral_report");
    require_backend_grid(PoissonBackend::SpectralPoisson, periodicGrid,
                         "quadrature_vs_spectral_report");
    using clock = std::chrono::steady_clock;
    CheckReport rep;
    rep.name = "quadrature_vs_spectral";
    rep.tolerance = opt.tolerance;

    auto wrap = [&fn](double x, double y, double z) { return fn(x, y, z); };
    const VectorField fw = sample_vector_function(windowGrid, wrap);
    const VectorField fp = sample_vector_function(periodicGrid, wrap);
    const bool warn = decay_warning(fw);

    // probe box: indices of window cells within the probe cube
    std::array<int, 3> plo{}, phi_{};
    for (int a = 0; a < 3; ++a) {
        const double c = windowGrid.length[a] / 2;
        const double h = windowGrid.spacing(a);
        plo[a] = std::max(0, static_cast<int>(std::floor((c - opt.probe_halfwidth) / h)));
        phi_[a] = std::min(windowGrid.n[a],
                           static_cast<int>(std::ceil((c + opt.probe_halfwidth) / h)));
        if (phi_[a] - plo[a] < 1)
            throw std::invalid_argument("quadrature_vs_spectral_report: empty probe box");
    }
    const int halo = 2;  // FD(4) curl needs two neighbors; one-sided rows cover the rest
    std::array<int, 3> blo{}, bhi{};
    for (int a = 0; a < 3; ++a) {
        blo[a] = std::max(0, plo[a] - halo);
        bhi[a] = std::min(windowGrid.n[a], phi_[a] + halo);
    }

    // quadrature route, restricted to the probe box plus halo
    const auto t0 = clock::now();
    const auto fd4 = calculus::DiffBackend::fd(4);
    const VectorField curlW = calculus::curl(fw, fd4);
    VectorField psiBox{detail::newtonian_potential_box(curlW.comp[0], blo, bhi),
                       detail::newtonian_potential_box(curlW.comp[1], blo, bhi),
                       detail::newtonian_potential_box(curlW.comp[2], blo, bhi)};
    const VectorField hQuadBox = calculus::curl(psiBox, fd4);
    const double quadSeconds = std::chrono::duration<double>(clock::now() - t0).count();

    // spectral route on the periodic twin
    const auto t1 = clock::now();
    const VectorField hSpec = h_operator(fp, PoissonBackend::SpectralPoisson);
    const auto hSpecModes = spectral::forward(hSpec);
    const double specSeconds = std::chrono::duration<double>(clock::now() - t1).count();

    double supDiff = 0.0, sumSq = 0.0, supRef = 0.0;
    std::size_t count = 0;
    for (int k = plo[2]; k < phi_[2]; ++k)
        for (int j = plo[1]; j < phi_[1]; ++j)
            for (int i = plo[0]; i < phi_[0]; ++i) {
                const auto x = windowGrid.point(i, j, k);
                double d2 = 0.0, r2 = 0.0;
                for (int c = 0; c < 3; ++c) {
                    const double spec = spectral::interpolate(hSpecModes.comp[c], x);
                    const double quad =
                        hQuadBox.comp[c](i - blo[0], j - blo[1], k - blo[2]);
                    d2 += (quad - spec) * (quad - spec);
                    r2 += spec * spec;
                }
                supDiff = std::max(supDiff, std::sqrt(d2));
                supRef = std::max(supRef, std::sqrt(r2));
                sumSq += d2;
                ++count;
            }
    const double rel = supRef > 0 ? supDiff / supRef : supDiff;
    rep.record(0.0, rel, count ? std::sqrt(sumSq / count) : 0.0);
    rep.settle();
    std::ostringstream os;
    os << "interior sup discrepancy " << supDiff << " (relative " << rel << ") over " << count
       << " probe points; quadrature " << quadSeconds << " s, spectral " << specSeconds << " s";
    rep.note(os.str());
    if (warn) rep.note("decay warning: field is not small on the window boundary shell");
    return rep;
}

}  // namespace helmns::helmholtz

#endif  // HELMNS_HELMHOLTZ_HPP
