#pragma once

// Forward DFT of arbitrary length: iterative radix-2 for powers of two,
// Bluestein's chirp-z reduction to radix-2 otherwise.

#include <complex>
#include <cstddef>
#include <vector>

#include "rgan/error.hpp"
#include "rgan/fdtd/sim_config.hpp"

namespace rgan {

using cplx = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n && !(n & (n - 1)); }

inline std::size_t next_power_of_two(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place radix-2 transform; sign -1 forward, +1 inverse (unscaled).
inline void fft_radix2(std::vector<cplx>& a, int sign)
{
    const std::size_t n = a.size();
    if (!is_power_of_two(n)) fail(ErrorCategory::dimension, "radix-2 FFT length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * phys::pi / static_cast<double>(len);
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < half; ++k) {
                const cplx w = std::polar(1.0, ang * static_cast<double>(k));
                const cplx u = a[i + k];
                const cplx v = a[i + k + half] * w;
                a[i + k] = u + v;
                a[i + k + half] = u - v;
            }
        }
    }
}

/// Reusable forward transform of one fixed length.
class FftPlan {
public:
    explicit FftPlan(std::size_t n) : n_(n)
    {
        if (n == 0) fail(ErrorCategory::dimension, "FFT length must be >= 1");
        if (is_power_of_two(n)) return;
        m_ = next_power_of_two(2 * n - 1);
        chirp_.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            // k^2 mod 2n keeps the phase argument small for large k.
            const auto k2 = static_cast<double>((k * k) % (2 * n));
            chirp_[k] = std::polar(1.0, -phys::pi * k2 / static_cast<double>(n));
        }
        kernel_.assign(m_, cplx{});
        kernel_[0] = std::conj(chirp_[0]);
        for (std::size_t k = 1; k < n; ++k) kernel_[k] = kernel_[m_ - k] = std::conj(chirp_[k]);
        fft_radix2(kernel_, -1);
    }

    std::size_t size() const { return n_; }

    std::vector<cplx> forward(std::vector<cplx> x) const
    {
        if (x.size() != n_) fail(ErrorCategory::dimension, "FFT input length does not match plan");
        if (is_power_of_two(n_)) {
            fft_radix2(x, -1);
            return x;
        }
        std::vector<cplx> a(m_, cplx{});
        for (std::size_t k = 0; k < n_; ++k) a[k] = x[k] * chirp_[k];
        fft_radix2(a, -1);
        for (std::size_t k = 0; k < m_; ++k) a[k] *= kernel_[k];
        fft_radix2(a, +1);
        const double inv = 1.0 / static_cast<double>(m_);
        for (std::size_t k = 0; k < n_; ++k) x[k] = a[k] * inv * chirp_[k];
        return x;
    }

    std::vector<cplx> forward_real(const std::vector<double>& x) const
    {
        return forward(std::vector<cplx>(x.begin(), x.end()));
    }

private:
    std::size_t n_ = 0, m_ = 0;
    std::vector<cplx> chirp_, kernel_;
};

} // namespace rgan
