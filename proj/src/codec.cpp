#include "cosaref/codec.hpp"

#include <cmath>

#include "cosaref/kernels.hpp"

namespace cosaref {

OrthonormalCodec::OrthonormalCodec(int d) : d_(d), basis_(static_cast<size_t>(d) * d) {
    // orthonormal DCT-II rows
    for (int c = 0; c < d; ++c) {
        const double scale = (c == 0) ? std::sqrt(1.0 / d) : std::sqrt(2.0 / d);
        for (int k = 0; k < d; ++k)
            basis_[static_cast<size_t>(c) * d + k] =
                scale * std::cos(M_PI * (2.0 * k + 1.0) * c / (2.0 * d));
    }
}

Latent OrthonormalCodec::encode(const Waveform& audio) const {
    if (audio.length() == 0) throw LatentError("cannot encode empty waveform");
    const auto& mono = audio.num_channels() == 1 ? audio.channels[0] : audio.to_mono().channels[0];
    const size_t frames = (mono.size() + d_ - 1) / d_;
    std::vector<float> padded(frames * d_, 0.0f);
    std::copy(mono.begin(), mono.end(), padded.begin());

    Latent z(d_, static_cast<int>(frames), d_, audio.sample_rate);
#ifdef _OPENMP
    kernels::frame_transform_omp(padded.data(), frames, d_, basis_.data(), z.values.data(), true);
#else
    kernels::frame_transform_serial(padded.data(), frames, d_, basis_.data(), z.values.data(), true);
#endif
    return z;
}

Waveform OrthonormalCodec::decode(const Latent& z) const {
    if (z.channels != d_) throw LatentError("latent channel count does not match codec");
    if (!z.all_finite()) throw LatentError("latent contains non-finite values");
    Waveform out(z.source_rate, 1, static_cast<size_t>(z.frames) * d_);
#ifdef _OPENMP
    kernels::frame_transform_omp(out.channels[0].data(), static_cast<size_t>(z.frames), d_,
                                 basis_.data(), const_cast<float*>(z.values.data()), false);
#else
    kernels::frame_transform_serial(out.channels[0].data(), static_cast<size_t>(z.frames), d_,
                                    basis_.data(), const_cast<float*>(z.values.data()), false);
#endif
    return out;
}

}  // namespace cosaref
