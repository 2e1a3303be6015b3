#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace cosaref {

/// In-place iterative radix-2 FFT. Size must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false) {
    const size_t n = a.size();
    if (n < 2) return;
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * M_PI / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0);
            for (size_t k = 0; k < len / 2; ++k) {
                std::complex<double> u = a[i + k];
                std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse)
        for (auto& x : a) x /= static_cast<double>(n);
}

/// Magnitude spectrum of a real signal, zero-padded to the next power of two
/// >= min_size. Returns n/2+1 magnitudes.
inline std::vector<double> real_magnitude_spectrum(const std::vector<float>& x, size_t min_size = 0) {
    size_t n = 1;
    while (n < std::max(x.size(), std::max<size_t>(min_size, 2))) n <<= 1;
    std::vector<std::complex<double>> a(n);
    for (size_t i = 0; i < x.size(); ++i) a[i] = x[i];
    fft_inplace(a);
    std::vector<double> mag(n / 2 + 1);
    for (size_t i = 0; i < mag.size(); ++i) mag[i] = std::abs(a[i]);
    return mag;
}

}  // namespace cosaref
