#pragma once

#include <bit>
#include <complex>
#include <vector>

#include "critspectra/mp.hpp"

namespace critspectra {

namespace detail {

/// In-place iterative radix-2 Cooley-Tukey, forward transform with
/// e^{+i 2 pi k n / N} convention (sign is immaterial for even inputs).
inline void fft_pow2(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * pi_const / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

/// Direct O(N^2) transform for non power-of-two lengths (desk-scale only).
inline void dft_direct(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    std::vector<std::complex<double>> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = 2.0 * pi_const * static_cast<double>(k * m % n) /
                               static_cast<double>(n);
            acc += a[m] * std::complex<double>(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    a = std::move(out);
}

}

/// Unnormalized forward DFT, radix-2 when possible.
inline void dft_inplace(std::vector<std::complex<double>>& a) {
    if (a.size() >= 2 && std::has_single_bit(a.size()))
        detail::fft_pow2(a);
    else if (a.size() > 1)
        detail::dft_direct(a);
}

}
