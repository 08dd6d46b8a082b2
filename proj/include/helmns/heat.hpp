#ifndef HELMNS_HEAT_HPP
#define HELMNS_HEAT_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "helmns/calculus.hpp"
#include "helmns/fft.hpp"

// Heat-kernel propagation. The diffusion equation d/dt w = nu lap(w) is
// solved spectrally (mode k decays by exp(-nu |k|^2 t)) on periodic grids,
// or by direct quadrature convolution with the Gaussian kernel
// alpha(., nu*t) on truncated windows. The kernel's product structure makes
// the window convolution separable: one 1-D pass per axis, identical to the
// full 3-D midpoint sum up to summation order.

namespace helmns::heat {

struct HeatParams {
    double nu;  // diffusion coefficient
    double t;   // elapsed time

    HeatParams(double nu_, double t_) : nu(nu_), t(t_) {
        if (!(nu > 0.0)) throw std::invalid_argument("HeatParams: nu must be positive");
        if (!(t >= 0.0)) throw std::invalid_argument("HeatParams: t must be non-negative");
    }
};

enum class HeatBackend { Spectral, DirectConvolution };

/// Gaussian fundamental solution (4 pi t)^(-3/2) exp(-|x|^2 / 4t), t > 0.
inline double kernel_alpha(std::array<double, 3> x, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("kernel_alpha: t must be positive");
    const double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return std::pow(4.0 * std::numbers::pi * t, -1.5) * std::exp(-r2 / (4.0 * t));
}

inline void require_backend_grid(HeatBackend b, const Grid3& g, const char* who) {
    if (b == HeatBackend::Spectral && g.boundary != Boundary::Periodic)
        throw std::invalid_argument(std::string(who) +
                                    ": spectral heat backend requires a periodic grid");
    if (b == HeatBackend::DirectConvolution && g.boundary != Boundary::TruncatedWindow)
        throw std::invalid_argument(std::string(who) +
                                    ": direct heat backend requires a truncated-window grid");
}

namespace detail {

/// One separable pass: convolve along `axis` with the 1-D kernel
/// (4 pi s)^(-1/2) exp(-d^2/4s) by midpoint quadrature over the window.
inline ScalarField convolve_axis(const ScalarField& f, int axis, double s) {
    const Grid3& g = f.grid;
    const int n = g.n[axis];
    const double h = g.spacing(axis);
    std::vector<double> w(n);
    for (int d = 0; d < n; ++d)
        w[d] = h * std::exp(-(d * h) * (d * h) / (4.0 * s)) /
               std::sqrt(4.0 * std::numbers::pi * s);
    ScalarField out(g);
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    const std::size_t slab_cost = static_cast<std::size_t>(nx) * ny * n * 4;
    par::parallel_for(0, static_cast<std::size_t>(nz), [&](std::size_t kz) {
        const int k = static_cast<int>(kz);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const int r = axis == 0 ? i : axis == 1 ? j : k;
                double acc = 0.0;
                for (int q = 0; q < n; ++q) {
                    int ii = i, jj = j, kk = k;
                    (axis == 0 ? ii : axis == 1 ? jj : kk) = q;
                    acc += w[std::abs(q - r)] * f(ii, jj, kk);
                }
                out(i, j, k) = acc;
            }
    }, slab_cost);
    return out;
}

}  // namespace detail

/// Solution at time params.t of d/dt w = nu lap(w), w(.,0) = f0.
inline ScalarField heat_propagate(const ScalarField& f0, const HeatParams& params,
                                  HeatBackend backend) {
    require_backend_grid(backend, f0.grid, "heat_propagate");
    if (params.t == 0.0) return f0;
    if (backend == HeatBackend::Spectral) {
        auto m = spectral::forward(f0);
        const double nut = params.nu * params.t;
        spectral::for_each_mode_full(f0.grid, [&](std::size_t s, double kx, double ky, double kz) {
            m.coef[s] *= std::exp(-nut * (kx * kx + ky * ky + kz * kz));
        });
        return spectral::inverse(m);
    }
    const double s = params.nu * params.t;  // kernel time argument
    ScalarField out = detail::convolve_axis(f0, 0, s);
    out = detail::convolve_axis(out, 1, s);
    out = detail::convolve_axis(out, 2, s);
    return out;
}

inline VectorField heat_propagate(const VectorField& f0, const HeatParams& params,
                                  HeatBackend backend) {
    return {heat_propagate(f0.comp[0], params, backend),
            heat_propagate(f0.comp[1], params, backend),
            heat_propagate(f0.comp[2], params, backend)};
}

/// Gamma(., t) = heat_propagate(p0 - rho*phi0): the heat image of the
/// initial pressure-potential combination.
inline ScalarField gamma(const ScalarField& pressure0, const ScalarField& phi0, double rho,
                         const HeatParams& params, HeatBackend backend) {
    if (!(rho > 0.0)) throw std::invalid_argument("gamma: rho must be positive");
    require_same_grid(pressure0.grid, phi0.grid, "gamma");
    return heat_propagate(axpy(pressure0, -rho, phi0), params, backend);
}

/// xi = componentwise heat image of curl^k(u0).
inline VectorField xi(const VectorField& u0, int k, const HeatParams& params,
                      HeatBackend backend) {
    const auto diff = backend == HeatBackend::Spectral ? calculus::DiffBackend::spectral()
                                                       : calculus::DiffBackend::fd(4);
    return heat_propagate(calculus::curl_k(u0, k, diff), params, backend);
}

}  // namespace helmns::heat

#endif  // HELMNS_HEAT_HPP
