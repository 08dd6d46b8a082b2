#ifndef HELMNS_FFT_HPP
#define HELMNS_FFT_HPP

#include <fftw3.h>

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "helmns/field.hpp"

// Discrete Fourier layer for periodic grids. Mode index m along an axis of
// n samples carries the signed integer wavenumber m <= n/2 ? m : m - n
// (physical wavenumber 2*pi*k/L). Odd-derivative multipliers zero the
// Nyquist mode. Forward transform is unnormalized; the inverse divides by
// the sample count.

namespace helmns::spectral {

using Complex = std::complex<double>;

/// Spectral coefficients of one scalar field, same x-fastest layout as the
/// physical samples.
struct Modes {
    Grid3 grid;
    std::vector<Complex> coef;

    Modes() = default;
    explicit Modes(const Grid3& g) : grid(g), coef(g.size(), Complex{0.0, 0.0}) {}
};

struct VectorModes {
    Grid3 grid;
    std::array<Modes, 3> comp;

    VectorModes() = default;
    explicit VectorModes(const Grid3& g) : grid(g), comp{Modes(g), Modes(g), Modes(g)} {}
};

inline void require_periodic(const Grid3& g, const char* who) {
    if (g.boundary != Boundary::Periodic)
        throw std::invalid_argument(std::string(who) +
                                    ": spectral backend requires a periodic grid");
}

/// Signed integer mode number for index idx on an n-sample axis.
inline int mode_number(int n, int idx) { return idx <= n / 2 ? idx : idx - n; }

/// Physical wavenumber 2*pi*m/L.
inline double wavenumber(const Grid3& g, int axis, int idx) {
    return 2.0 * std::numbers::pi * mode_number(g.n[axis], idx) / g.length[axis];
}

/// Wavenumber used in odd-derivative multipliers: Nyquist mode zeroed.
inline double deriv_wavenumber(const Grid3& g, int axis, int idx) {
    const int n = g.n[axis];
    if (n % 2 == 0 && idx == n / 2) return 0.0;
    return wavenumber(g, axis, idx);
}

namespace detail {

// FFTW planning is not thread safe; execution through the new-array
// interface is. Plans are cached per (dims, direction), created against
// scratch buffers with FFTW_UNALIGNED so they accept any caller arrays.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    void execute(const Grid3& g, int sign, const Complex* in, Complex* out) {
        fftw_plan plan = nullptr;
        {
            std::lock_guard<std::mutex> lock(mutex_);
            const Key key{g.n[0], g.n[1], g.n[2], sign};
            auto it = plans_.find(key);
            if (it == plans_.end()) {
                scratch_in_.assign(g.size(), Complex{});
                scratch_out_.assign(g.size(), Complex{});
                // x is the contiguous axis, so FFTW's row-major dims are (nz, ny, nx)
                plan = fftw_plan_dft_3d(
                    g.n[2], g.n[1], g.n[0],
                    reinterpret_cast<fftw_complex*>(scratch_in_.data()),
                    reinterpret_cast<fftw_complex*>(scratch_out_.data()), sign,
                    FFTW_ESTIMATE | FFTW_UNALIGNED);
                if (!plan) throw std::runtime_error("fft: plan creation failed");
                plans_.emplace(key, plan);
            } else {
                plan = it->second;
            }
        }
        fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                         reinterpret_cast<fftw_complex*>(out));
    }

  private:
    using Key = std::array<int, 4>;
    std::mutex mutex_;
    std::map<Key, fftw_plan> plans_;
    std::vector<Complex> scratch_in_, scratch_out_;
};

}  // namespace detail

inline Modes forward(const ScalarField& f) {
    require_periodic(f.grid, "fft forward");
    std::vector<Complex> in(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) in[i] = Complex{f.data[i], 0.0};
    Modes out(f.grid);
    detail::PlanCache::instance().execute(f.grid, FFTW_FORWARD, in.data(), out.coef.data());
    return out;
}

inline ScalarField inverse(const Modes& m) {
    std::vector<Complex> out(m.coef.size());
    detail::PlanCache::instance().execute(m.grid, FFTW_BACKWARD, m.coef.data(), out.data());
    ScalarField f(m.grid);
    const double inv_n = 1.0 / static_cast<double>(m.grid.size());
    par::parallel_for(0, f.size(), [&](std::size_t i) { f.data[i] = out[i].real() * inv_n; });
    return f;
}

inline VectorModes forward(const VectorField& f) {
    VectorModes out(f.grid);
    for (int c = 0; c < 3; ++c) out.comp[c] = forward(f.comp[c]);
    return out;
}

inline VectorField inverse(const VectorModes& m) {
    return {inverse(m.comp[0]), inverse(m.comp[1]), inverse(m.comp[2])};
}

/// Visit every mode: fn(flat, kx, ky, kz) with deriv-convention wavenumbers
/// (Nyquist zeroed; right for odd-derivative multipliers and the
/// projections built from them).
template <typename Fn>
void for_each_mode(const Grid3& g, Fn&& fn) {
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    std::vector<double> kxs(nx), kys(ny), kzs(nz);
    for (int i = 0; i < nx; ++i) kxs[i] = deriv_wavenumber(g, 0, i);
    for (int j = 0; j < ny; ++j) kys[j] = deriv_wavenumber(g, 1, j);
    for (int k = 0; k < nz; ++k) kzs[k] = deriv_wavenumber(g, 2, k);
    par::parallel_for(
        0, static_cast<std::size_t>(nz),
        [&](std::size_t kz) {
            const int k = static_cast<int>(kz);
            std::size_t flat = static_cast<std::size_t>(k) * ny * nx;
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i, ++flat) fn(flat, kxs[i], kys[j], kzs[k]);
        },
        static_cast<std::size_t>(nx) * ny * 4);
}

/// Same sweep with the full signed wavenumbers (Nyquist kept): for even
/// multipliers such as |k|^2 in the Laplacian and diffusion factors.
template <typename Fn>
void for_each_mode_full(const Grid3& g, Fn&& fn) {
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    std::vector<double> kxs(nx), kys(ny), kzs(nz);
    for (int i = 0; i < nx; ++i) kxs[i] = wavenumber(g, 0, i);
    for (int j = 0; j < ny; ++j) kys[j] = wavenumber(g, 1, j);
    for (int k = 0; k < nz; ++k) kzs[k] = wavenumber(g, 2, k);
    par::parallel_for(
        0, static_cast<std::size_t>(nz),
        [&](std::size_t kz) {
            const int k = static_cast<int>(kz);
            std::size_t flat = static_cast<std::size_t>(k) * ny * nx;
            for (int j = 0; j < ny; ++j)
                for (int i = 0; i < nx; ++i, ++flat) fn(flat, kxs[i], kys[j], kzs[k]);
        },
        static_cast<std::size_t>(nx) * ny * 4);
}

/// 2/3-rule mask: zero every mode with |m| > floor(n/3) on any axis.
inline void dealias_23(Modes& m) {
    const Grid3& g = m.grid;
    const int cut[3] = {g.n[0] / 3, g.n[1] / 3, g.n[2] / 3};
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    par::parallel_for(0, static_cast<std::size_t>(nz), [&](std::size_t kz) {
        const int k = static_cast<int>(kz);
        const bool killz = std::abs(mode_number(nz, k)) > cut[2];
        std::size_t flat = static_cast<std::size_t>(k) * ny * nx;
        for (int j = 0; j < ny; ++j) {
            const bool killy = killz || std::abs(mode_number(ny, j)) > cut[1];
            for (int i = 0; i < nx; ++i, ++flat)
                if (killy || std::abs(mode_number(nx, i)) > cut[0]) m.coef[flat] = Complex{};
        }
    });
}

inline void dealias_23(VectorModes& m) {
    for (int c = 0; c < 3; ++c) dealias_23(m.comp[c]);
}

/// Trigonometric interpolation at an arbitrary physical point:
/// (1/N) Re sum_m c_m exp(i k_m . x) over the signed modes. Taking the
/// real part realizes the cosine-Nyquist convention for real fields.
/// O(N) per point; intended for small probe sets.
inline double interpolate(const Modes& m, std::array<double, 3> x) {
    const Grid3& g = m.grid;
    const int nx = g.n[0], ny = g.n[1], nz = g.n[2];
    std::vector<Complex> ex(nx), ey(ny), ez(nz);
    for (int i = 0; i < nx; ++i) ex[i] = std::polar(1.0, wavenumber(g, 0, i) * x[0]);
    for (int j = 0; j < ny; ++j) ey[j] = std::polar(1.0, wavenumber(g, 1, j) * x[1]);
    for (int k = 0; k < nz; ++k) ez[k] = std::polar(1.0, wavenumber(g, 2, k) * x[2]);
    Complex acc{0.0, 0.0};
    std::size_t flat = 0;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j) {
            Complex row{0.0, 0.0};
            for (int i = 0; i < nx; ++i, ++flat) row += m.coef[flat] * ex[i];
            acc += row * ey[j] * ez[k];
        }
    return acc.real() / static_cast<double>(g.size());
}

}  // namespace helmns::spectral

#endif  // HELMNS_FFT_HPP
