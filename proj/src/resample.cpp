#include "cosaref/resample.hpp"

#include <cmath>
#include <stdexcept>

#include "cosaref/kernels.hpp"

namespace cosaref {

namespace {
constexpr int kHalfTaps = 32;

std::vector<float> resample_channel(const std::vector<float>& in, double ratio) {
    const size_t n_out = static_cast<size_t>(std::llround(static_cast<double>(in.size()) * ratio));
    std::vector<float> out(n_out);
    if (n_out == 0 || in.empty()) return out;
#ifdef _OPENMP
    kernels::resample_sinc_omp(in.data(), in.size(), out.data(), n_out, ratio, kHalfTaps);
#else
    kernels::resample_sinc_serial(in.data(), in.size(), out.data(), n_out, ratio, kHalfTaps);
#endif
    return out;
}
}  // namespace

Waveform resample(const Waveform& audio, int to_rate) {
    if (to_rate <= 0) throw std::invalid_argument("resample: target rate must be positive");
    if (to_rate == audio.sample_rate) return audio;
    const double ratio = static_cast<double>(to_rate) / audio.sample_rate;
    Waveform out;
    out.sample_rate = to_rate;
    out.channels.reserve(audio.channels.size());
    for (const auto& ch : audio.channels) out.channels.push_back(resample_channel(ch, ratio));
    return out;
}

std::vector<float> resample_ratio(const std::vector<float>& in, double ratio) {
    if (ratio <= 0.0) throw std::invalid_argument("resample_ratio: ratio must be positive");
    if (ratio == 1.0) return in;
    return resample_channel(in, ratio);
}

}  // namespace cosaref
