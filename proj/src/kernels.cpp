#include "cosaref/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace cosaref::kernels {

namespace {

inline double resample_one(const float* in, size_t n_in, size_t j, double ratio, int half_taps) {
    const double pos = static_cast<double>(j) / ratio;  // position in input samples
    const double cutoff = std::min(1.0, ratio);         // band-limit when downsampling
    const long center = static_cast<long>(std::floor(pos));
    const long lo = center - half_taps + 1;
    const long hi = center + half_taps;
    double acc = 0.0;
    for (long i = lo; i <= hi; ++i) {
        if (i < 0 || i >= static_cast<long>(n_in)) continue;
        const double x = pos - static_cast<double>(i);
        double sinc;
        if (std::abs(x) < 1e-12) {
            sinc = cutoff;
        } else {
            sinc = cutoff * std::sin(M_PI * cutoff * x) / (M_PI * cutoff * x);
        }
        // Hann window over the tap span
        const double u = x / half_taps;
        if (std::abs(u) >= 1.0) continue;
        const double win = 0.5 * (1.0 + std::cos(M_PI * u));
        acc += static_cast<double>(in[i]) * sinc * win;
    }
    return acc;
}

inline void conv1d_one(const double* in, int c_in, int frames, const double* w, const double* bias,
                       int k, double* out, int oc, int f) {
    const int pad = k / 2;
    double acc = bias[oc];
    for (int ic = 0; ic < c_in; ++ic) {
        const double* wrow = w + (static_cast<size_t>(oc) * c_in + ic) * k;
        const double* irow = in + static_cast<size_t>(ic) * frames;
        for (int t = 0; t < k; ++t) {
            const int src = f + t - pad;
            if (src < 0 || src >= frames) continue;
            acc += wrow[t] * irow[src];
        }
    }
    out[static_cast<size_t>(oc) * frames + f] = acc;
}

inline void transform_frame(float* x, size_t frames, int d, const double* basis, float* z,
                            bool forward, size_t f) {
    if (forward) {
        for (int c = 0; c < d; ++c) {
            double acc = 0.0;
            const double* brow = basis + static_cast<size_t>(c) * d;
            const float* frame = x + f * d;
            for (int k = 0; k < d; ++k) acc += brow[k] * frame[k];
            z[static_cast<size_t>(c) * frames + f] = static_cast<float>(acc);
        }
    } else {
        // z -> x (basis is orthonormal, inverse = transpose)
        for (int k = 0; k < d; ++k) {
            double acc = 0.0;
            for (int c = 0; c < d; ++c)
                acc += basis[static_cast<size_t>(c) * d + k] *
                       static_cast<double>(z[static_cast<size_t>(c) * frames + f]);
            x[f * d + k] = static_cast<float>(acc);
        }
    }
}

}  // namespace

void resample_sinc_serial(const float* in, size_t n_in, float* out, size_t n_out, double ratio,
                          int half_taps) {
    for (size_t j = 0; j < n_out; ++j)
        out[j] = static_cast<float>(resample_one(in, n_in, j, ratio, half_taps));
}

void resample_sinc_omp(const float* in, size_t n_in, float* out, size_t n_out, double ratio,
                       int half_taps) {
#pragma omp parallel for schedule(static)
    for (long long j = 0; j < static_cast<long long>(n_out); ++j)
        out[j] = static_cast<float>(resample_one(in, n_in, static_cast<size_t>(j), ratio, half_taps));
}

void conv1d_serial(const double* in, int c_in, int frames, const double* w, const double* bias,
                   int c_out, int k, double* out) {
    for (int oc = 0; oc < c_out; ++oc)
        for (int f = 0; f < frames; ++f) conv1d_one(in, c_in, frames, w, bias, k, out, oc, f);
}

void conv1d_omp(const double* in, int c_in, int frames, const double* w, const double* bias,
                int c_out, int k, double* out) {
#pragma omp parallel for schedule(static) collapse(2)
    for (int oc = 0; oc < c_out; ++oc)
        for (int f = 0; f < frames; ++f) conv1d_one(in, c_in, frames, w, bias, k, out, oc, f);
}

void frame_transform_serial(float* x, size_t frames, int d, const double* basis, float* z,
                            bool forward) {
    for (size_t f = 0; f < frames; ++f) transform_frame(x, frames, d, basis, z, forward, f);
}

void frame_transform_omp(float* x, size_t frames, int d, const double* basis, float* z,
                         bool forward) {
#pragma omp parallel for schedule(static)
    for (long long f = 0; f < static_cast<long long>(frames); ++f)
        transform_frame(x, frames, d, basis, z, forward, static_cast<size_t>(f));
}

}  // namespace cosaref::kernels
