#pragma once

#include <cstddef>

// Data-parallel inner loops. Each kernel comes in a serial reference
// version and an OpenMP version; both traverse the data in the same
// order per output element, so results are bit-identical and the tests
// can compare them directly.
namespace cosaref::kernels {

/// Windowed-sinc resampling. ratio = out_rate / in_rate; each output
/// sample j is interpolated at input position j / ratio with a Hann
/// windowed sinc of `half_taps` taps per side (cutoff scaled for
/// downsampling).
void resample_sinc_serial(const float* in, size_t n_in, float* out, size_t n_out, double ratio,
                          int half_taps);
void resample_sinc_omp(const float* in, size_t n_in, float* out, size_t n_out, double ratio,
                       int half_taps);

/// 1-D convolution over frames with zero padding, odd kernel size.
/// in: c_in x frames, w: c_out x c_in x k, bias: c_out, out: c_out x frames.
void conv1d_serial(const double* in, int c_in, int frames, const double* w, const double* bias,
                   int c_out, int k, double* out);
void conv1d_omp(const double* in, int c_in, int frames, const double* w, const double* bias,
                int c_out, int k, double* out);

/// Per-frame orthonormal transform: audio frames of d samples <-> d
/// coefficients. forward: z[c][f] = sum_k basis[c*d+k] * x[f*d+k];
/// inverse: x[f*d+k] = sum_c basis[c*d+k] * z[c][f].
/// x has frames*d samples, z is d x frames (row-major channels).
void frame_transform_serial(float* x, size_t frames, int d, const double* basis, float* z,
                            bool forward);
void frame_transform_omp(float* x, size_t frames, int d, const double* basis, float* z,
                         bool forward);

}  // namespace cosaref::kernels
