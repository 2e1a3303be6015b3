// Benchmark of the OpenMP kernels against their serial reference
// implementations. Also asserts that both variants agree bit-exactly.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <vector>

#include "cosaref/kernels.hpp"
#include "cosaref/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double time_ms(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = Clock::now();
    for (int r = 0; r < reps; ++r) fn();
    const auto t1 = Clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const char* name, double serial_ms, double omp_ms, bool identical) {
    std::printf("%-18s serial %8.2f ms   omp %8.2f ms   speedup %5.2fx   %s\n", name, serial_ms,
                omp_ms, serial_ms / omp_ms, identical ? "bit-identical" : "MISMATCH");
    if (!identical) std::exit(1);
}

}  // namespace

int main() {
    cosaref::Rng rng(42);
    const int reps = 5;

    {
        const size_t n_in = 1 << 20;
        const double ratio = 44100.0 / 16000.0;
        const size_t n_out = static_cast<size_t>(std::llround(n_in * ratio));
        std::vector<float> in(n_in);
        for (auto& v : in) v = static_cast<float>(rng.normal());
        std::vector<float> a(n_out), b(n_out);
        const double ts = time_ms(
            [&] { cosaref::kernels::resample_sinc_serial(in.data(), n_in, a.data(), n_out, ratio, 32); },
            reps);
        const double tp = time_ms(
            [&] { cosaref::kernels::resample_sinc_omp(in.data(), n_in, b.data(), n_out, ratio, 32); },
            reps);
        report("resample_sinc", ts, tp, a == b);
    }

    {
        const int c_in = 48, c_out = 48, frames = 8192, k = 3;
        std::vector<double> in(static_cast<size_t>(c_in) * frames), w(static_cast<size_t>(c_out) * c_in * k),
            bias(c_out);
        for (auto& v : in) v = rng.normal();
        for (auto& v : w) v = rng.normal();
        for (auto& v : bias) v = rng.normal();
        std::vector<double> a(static_cast<size_t>(c_out) * frames), b(a.size());
        const double ts = time_ms(
            [&] {
                cosaref::kernels::conv1d_serial(in.data(), c_in, frames, w.data(), bias.data(), c_out,
                                                k, a.data());
            },
            reps);
        const double tp = time_ms(
            [&] {
                cosaref::kernels::conv1d_omp(in.data(), c_in, frames, w.data(), bias.data(), c_out, k,
                                             b.data());
            },
            reps);
        report("conv1d", ts, tp, a == b);
    }

    {
        const int d = 32;
        const size_t frames = 1 << 16;
        std::vector<double> basis(static_cast<size_t>(d) * d);
        for (int c = 0; c < d; ++c)
            for (int k = 0; k < d; ++k)
                basis[static_cast<size_t>(c) * d + k] =
                    std::sqrt(2.0 / d) * std::cos(M_PI * (k + 0.5) * c / d);
        std::vector<float> x(frames * d);
        for (auto& v : x) v = static_cast<float>(rng.normal());
        std::vector<float> za(static_cast<size_t>(d) * frames), zb(za.size());
        const double ts = time_ms(
            [&] { cosaref::kernels::frame_transform_serial(x.data(), frames, d, basis.data(), za.data(), true); },
            reps);
        const double tp = time_ms(
            [&] { cosaref::kernels::frame_transform_omp(x.data(), frames, d, basis.data(), zb.data(), true); },
            reps);
        report("frame_transform", ts, tp, za == zb);
    }

    return 0;
}
