#ifndef HELMNS_FLOW_HPP
#define HELMNS_FLOW_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "helmns/calculus.hpp"
#include "helmns/fft.hpp"

// Incompressible Navier-Stokes on a periodic box, pseudo-spectral:
// integrating-factor RK4 (diffusion handled exactly by exp(-nu|k|^2 dt)
// mode factors) on the Leray-projected advection term, 2/3-rule dealiasing
// on the quadratic product. Pressure is recovered from the velocity by a
// spectral Poisson solve in the mean-zero gauge.

namespace helmns::flow {

struct FlowState {
    VectorField u;
    ScalarField p;
    double t = 0.0;
};

struct SimParams {
    double nu = 0.1;
    double rho = 1.0;
    double dt = 5e-3;
    int steps = 0;
    bool dealias = true;

    void validate() const {
        if (!(nu > 0.0)) throw std::invalid_argument("SimParams: nu must be positive");
        if (!(rho > 0.0)) throw std::invalid_argument("SimParams: rho must be positive");
        if (!(dt > 0.0)) throw std::invalid_argument("SimParams: dt must be positive");
        if (steps < 0) throw std::invalid_argument("SimParams: steps must be >= 0");
    }
};

struct Trajectory {
    SimParams params;
    std::vector<FlowState> states;

    /// Time between recorded frames (uniform by construction).
    double frame_dt() const {
        return states.size() > 1 ? states[1].t - states[0].t : params.dt;
    }
};

class SimulationError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// -- initial conditions -------------------------------------------------------

inline VectorField ic_taylor_green(const Grid3& grid) {
    return sample_vector_function(grid, [](double x, double y, double) {
        return std::array<double, 3>{std::cos(x) * std::sin(y), -std::sin(x) * std::cos(y), 0.0};
    });
}

inline VectorField ic_abc(const Grid3& grid, double A, double B, double C) {
    return sample_vector_function(grid, [A, B, C](double x, double y, double z) {
        return std::array<double, 3>{A * std::sin(z) + C * std::cos(y),
                                     B * std::sin(x) + A * std::cos(z),
                                     C * std::sin(y) + B * std::cos(x)};
    });
}

/// Curl of the Gaussian stream vector (0, 0, s*exp(-|x-c|^2/(2 sigma^2))),
/// solenoidal by construction. On periodic grids the stream is summed over
/// the 27 neighbouring box images so the sampled field is periodic.
inline VectorField ic_gaussian_vortex(const Grid3& grid, std::array<double, 3> center,
                                      double scale, double strength) {
    if (!(scale > 0.0)) throw std::invalid_argument("ic_gaussian_vortex: scale must be positive");
    const bool periodic = grid.boundary == Boundary::Periodic;
    const int images = periodic ? 1 : 0;
    const auto L = grid.length;
    return sample_vector_function(grid, [=](double x, double y, double z) {
        double ux = 0.0, uy = 0.0;
        for (int mx = -images; mx <= images; ++mx)
            for (int my = -images; my <= images; ++my)
                for (int mz = -images; mz <= images; ++mz) {
                    const double dx = x - center[0] - mx * L[0];
                    const double dy = y - center[1] - my * L[1];
                    const double dz = z - center[2] - mz * L[2];
                    const double e = strength * std::exp(-(dx * dx + dy * dy + dz * dz) /
                                                         (2.0 * scale * scale));
                    // curl of (0,0,psi): (d psi/dy, -d psi/dx, 0)
                    ux += -dy / (scale * scale) * e;
                    uy += dx / (scale * scale) * e;
                }
        return std::array<double, 3>{ux, uy, 0.0};
    });
}

/// Band-limited random field, modes with |m_axis| <= kmax (zero mode
/// excluded), projected solenoidal, sup-normalized to `amplitude`.
/// Identical seeds give identical fields.
inline VectorField ic_random_solenoidal(const Grid3& grid, std::uint64_t seed, int kmax,
                                        double amplitude) {
    spectral::require_periodic(grid, "ic_random_solenoidal");
    if (kmax < 1 || kmax > grid.n[0] / 2 - 1 || kmax > grid.n[1] / 2 - 1 ||
        kmax > grid.n[2] / 2 - 1)
        throw std::invalid_argument("ic_random_solenoidal: kmax out of range for grid");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    spectral::VectorModes m(grid);
    auto idx_of = [&](int mx, int my, int mz) {
        const int i = (mx % grid.n[0] + grid.n[0]) % grid.n[0];
        const int j = (my % grid.n[1] + grid.n[1]) % grid.n[1];
        const int k = (mz % grid.n[2] + grid.n[2]) % grid.n[2];
        return grid.index(i, j, k);
    };
    for (int mz = -kmax; mz <= kmax; ++mz)
        for (int my = -kmax; my <= kmax; ++my)
            for (int mx = -kmax; mx <= kmax; ++mx) {
                if (mx == 0 && my == 0 && mz == 0) continue;
                for (int c = 0; c < 3; ++c) {
                    const spectral::Complex a{unit(rng), unit(rng)};
                    m.comp[c].coef[idx_of(mx, my, mz)] += a;
                    m.comp[c].coef[idx_of(-mx, -my, -mz)] += std::conj(a);
                }
            }
    // solenoidal projection
    spectral::for_each_mode(grid, [&](std::size_t s, double kx, double ky, double kz) {
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) {
            for (int c = 0; c < 3; ++c) m.comp[c].coef[s] = {};
            return;
        }
        const auto dot =
            kx * m.comp[0].coef[s] + ky * m.comp[1].coef[s] + kz * m.comp[2].coef[s];
        m.comp[0].coef[s] -= kx * dot / k2;
        m.comp[1].coef[s] -= ky * dot / k2;
        m.comp[2].coef[s] -= kz * dot / k2;
    });
    VectorField u = spectral::inverse(m);
    const double sup = norms(u).sup;
    return sup > 0 ? scale(u, amplitude / sup) : u;
}

// -- internals ----------------------------------------------------------------

namespace detail {

using spectral::VectorModes;

inline void leray_project(VectorModes& m) {
    spectral::for_each_mode(m.grid, [&](std::size_t s, double kx, double ky, double kz) {
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) return;  // constants are divergence-free; mean kept
        const auto dot =
            kx * m.comp[0].coef[s] + ky * m.comp[1].coef[s] + kz * m.comp[2].coef[s];
        m.comp[0].coef[s] -= kx * dot / k2;
        m.comp[1].coef[s] -= ky * dot / k2;
        m.comp[2].coef[s] -= kz * dot / k2;
    });
}

/// Modes of advect(u,u) from the velocity modes; optionally dealiased.
inline VectorModes advection_modes(const VectorModes& um, bool dealias) {
    const Grid3& g = um.grid;
    std::array<ScalarField, 3> u_phys;
    for (int c = 0; c < 3; ++c) u_phys[c] = spectral::inverse(um.comp[c]);
    VectorModes out(g);
    for (int i = 0; i < 3; ++i) {
        ScalarField acc(g);
        for (int j = 0; j < 3; ++j) {
            spectral::Modes dm(g);
            spectral::for_each_mode(g, [&](std::size_t s, double kx, double ky, double kz) {
                const double k = j == 0 ? kx : j == 1 ? ky : kz;
                const auto c = um.comp[i].coef[s];
                dm.coef[s] = spectral::Complex{-k * c.imag(), k * c.real()};
            });
            const ScalarField dj = spectral::inverse(dm);
            par::parallel_for(0, acc.size(), [&](std::size_t s) {
                acc.data[s] += u_phys[j].data[s] * dj.data[s];
            });
        }
        out.comp[i] = spectral::forward(acc);
        if (dealias) spectral::dealias_23(out.comp[i]);
    }
    return out;
}

/// Stage evaluation: g = -P[dealias(omega x u)] with omega = curl u. For the
/// projected, dealiased stage this equals -P[dealias((u.grad)u)] - the two
/// forms differ by the gradient of |u|^2/2, which the projection removes -
/// and costs 9 transforms per stage instead of 15. Mean mode pinned to zero.
inline VectorModes stage_rhs(const VectorModes& um, bool dealias) {
    const Grid3& grid = um.grid;
    VectorModes wm(grid);
    spectral::for_each_mode(grid, [&](std::size_t s, double kx, double ky, double kz) {
        const spectral::Complex i{0.0, 1.0};
        const auto ux = um.comp[0].coef[s], uy = um.comp[1].coef[s], uz = um.comp[2].coef[s];
        wm.comp[0].coef[s] = i * (ky * uz - kz * uy);
        wm.comp[1].coef[s] = i * (kz * ux - kx * uz);
        wm.comp[2].coef[s] = i * (kx * uy - ky * ux);
    });
    std::array<ScalarField, 3> u, w;
    for (int c = 0; c < 3; ++c) {
        u[c] = spectral::inverse(um.comp[c]);
        w[c] = spectral::inverse(wm.comp[c]);
    }
    VectorModes g(grid);
    for (int c = 0; c < 3; ++c) {
        const int a = (c + 1) % 3, b = (c + 2) % 3;
        ScalarField cross(grid);
        par::parallel_for(0, cross.size(), [&](std::size_t s) {
            cross.data[s] = w[a].data[s] * u[b].data[s] - w[b].data[s] * u[a].data[s];
        });
        g.comp[c] = spectral::forward(cross);
        if (dealias) spectral::dealias_23(g.comp[c]);
    }
    // project, negate, pin the mean mode
    spectral::for_each_mode(grid, [&](std::size_t s, double kx, double ky, double kz) {
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) {
            for (int c = 0; c < 3; ++c) g.comp[c].coef[s] = {};
            return;
        }
        const auto dot =
            kx * g.comp[0].coef[s] + ky * g.comp[1].coef[s] + kz * g.comp[2].coef[s];
        g.comp[0].coef[s] = -(g.comp[0].coef[s] - kx * dot / k2);
        g.comp[1].coef[s] = -(g.comp[1].coef[s] - ky * dot / k2);
        g.comp[2].coef[s] = -(g.comp[2].coef[s] - kz * dot / k2);
    });
    return g;
}

struct DiffusionTables {
    Grid3 grid;
    double nu_dt = -1.0;
    std::vector<double> e1, e2;  // exp(-nu |k|^2 dt), exp(-nu |k|^2 dt/2)
};

inline const DiffusionTables& diffusion_tables(const Grid3& g, double nu, double dt) {
    thread_local DiffusionTables cache;
    if (cache.grid == g && cache.nu_dt == nu * dt) return cache;
    // fill locals first: the sweep may run on pool threads, which must not
    // touch this thread's cache object
    std::vector<double> e1(g.size()), e2(g.size());
    spectral::for_each_mode_full(g, [&](std::size_t s, double kx, double ky, double kz) {
        const double k2 = kx * kx + ky * ky + kz * kz;
        e1[s] = std::exp(-nu * k2 * dt);
        e2[s] = std::exp(-nu * k2 * dt * 0.5);
    });
    cache.grid = g;
    cache.nu_dt = nu * dt;
    cache.e1 = std::move(e1);
    cache.e2 = std::move(e2);
    return cache;
}

/// Advance velocity modes one dt by integrating-factor RK4.
inline VectorModes ifrk4_advance(const VectorModes& um, const SimParams& p) {
    const Grid3& g = um.grid;
    const DiffusionTables& tables = diffusion_tables(g, p.nu, p.dt);
    const std::vector<double>& e1 = tables.e1;
    const std::vector<double>& e2 = tables.e2;
    auto apply = [&](const VectorModes& a, const std::vector<double>& e) {
        VectorModes out(g);
        for (int c = 0; c < 3; ++c)
            par::parallel_for(0, a.comp[c].coef.size(),
                              [&](std::size_t s) { out.comp[c].coef[s] = e[s] * a.comp[c].coef[s]; });
        return out;
    };
    auto axpy_modes = [&](const VectorModes& a, double c, const VectorModes& b) {
        VectorModes out(g);
        for (int q = 0; q < 3; ++q)
            par::parallel_for(0, a.comp[q].coef.size(), [&](std::size_t s) {
                out.comp[q].coef[s] = a.comp[q].coef[s] + c * b.comp[q].coef[s];
            });
        return out;
    };
    const double h = p.dt;
    const VectorModes a = stage_rhs(um, p.dealias);
    const VectorModes b = stage_rhs(apply(axpy_modes(um, h / 2, a), e2), p.dealias);
    const VectorModes c = stage_rhs(axpy_modes(apply(um, e2), h / 2, b), p.dealias);
    const VectorModes d = stage_rhs(axpy_modes(apply(um, e1), h, apply(c, e2)), p.dealias);

    VectorModes next = apply(um, e1);
    next = axpy_modes(next, h / 6, apply(a, e1));
    {
        VectorModes bc = axpy_modes(b, 1.0, c);
        next = axpy_modes(next, h / 3, apply(bc, e2));
    }
    next = axpy_modes(next, h / 6, d);
    return next;
}

}  // namespace detail

/// Pressure consistent with div u = 0: solves lap(p) = -rho div(advect(u,u))
/// spectrally in the mean-zero gauge.
inline ScalarField pressure_solve(const VectorField& u, double rho) {
    spectral::require_periodic(u.grid, "pressure_solve");
    auto adv = detail::advection_modes(spectral::forward(u), true);
    spectral::Modes pm(u.grid);
    spectral::for_each_mode(u.grid, [&](std::size_t s, double kx, double ky, double kz) {
        const double k2 = kx * kx + ky * ky + kz * kz;
        if (k2 == 0.0) return;
        const auto dot =
            kx * adv.comp[0].coef[s] + ky * adv.comp[1].coef[s] + kz * adv.comp[2].coef[s];
        pm.coef[s] = rho * spectral::Complex{0.0, 1.0} * dot / k2;
    });
    return spectral::inverse(pm);
}

namespace detail {

/// One step of the velocity only (no pressure attach): CFL guard,
/// projection of the incoming state, IF-RK4 advance, NaN guard.
inline VectorField advance_velocity(const VectorField& u, const SimParams& params, double t) {
    params.validate();
    spectral::require_periodic(u.grid, "step");
    const double cfl = params.dt * norms(u).sup / u.grid.min_spacing();
    if (cfl > 0.5)
        throw SimulationError("CFL violation at t = " + std::to_string(t) +
                              ": dt*sup|u|/min_h = " + std::to_string(cfl) + " > 0.5");
    auto um = spectral::forward(u);
    leray_project(um);
    auto next = ifrk4_advance(um, params);
    VectorField out = spectral::inverse(next);
    if (!all_finite(out))
        throw SimulationError("non-finite velocity sample after step at t = " +
                              std::to_string(t));
    return out;
}

}  // namespace detail

inline FlowState step(const FlowState& state, const SimParams& params) {
    VectorField u = detail::advance_velocity(state.u, params, state.t);
    ScalarField p = pressure_solve(u, params.rho);
    return {std::move(u), std::move(p), state.t + params.dt};
}

/// Runs params.steps steps, recording every snapshotEvery-th state
/// (including t = 0 and the final state; steps must divide evenly).
inline Trajectory simulate(const VectorField& u0, const SimParams& params, int snapshotEvery) {
    params.validate();
    spectral::require_periodic(u0.grid, "simulate");
    if (snapshotEvery < 1)
        throw std::invalid_argument("simulate: snapshotEvery must be >= 1");
    if (params.steps % snapshotEvery != 0)
        throw std::invalid_argument(
            "simulate: steps must be a multiple of snapshotEvery so recorded "
            "frames are uniformly spaced");

    // start from the solenoidal projection of the initial data
    auto u0m = spectral::forward(u0);
    detail::leray_project(u0m);
    VectorField u = spectral::inverse(u0m);

    Trajectory traj;
    traj.params = params;
    const auto div_guard = [&](const VectorField& v, int stepIdx) {
        const double ds = norms(calculus::div(v, calculus::DiffBackend::spectral())).sup;
        if (ds > 1e-10)
            throw SimulationError("divergence " + std::to_string(ds) +
                                  " exceeds 1e-10 at step " + std::to_string(stepIdx));
    };
    div_guard(u, 0);
    traj.states.push_back({u, pressure_solve(u, params.rho), 0.0});
    for (int i = 1; i <= params.steps; ++i) {
        const double t_prev = (i - 1) * params.dt;
        try {
            u = detail::advance_velocity(u, params, t_prev);
        } catch (const SimulationError& e) {
            throw SimulationError("step " + std::to_string(i) + ": " + e.what());
        }
        if (i % snapshotEvery == 0) {
            div_guard(u, i);
            traj.states.push_back({u, pressure_solve(u, params.rho), i * params.dt});
        }
    }
    return traj;
}

}  // namespace helmns::flow

#endif  // HELMNS_FLOW_HPP
