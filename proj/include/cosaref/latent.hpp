#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cosaref {

struct LatentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Compressed representation a diffusion model operates on: C channels by
/// ceil(T/d) frames, row-major.
struct Latent {
    int channels = 0;
    int frames = 0;
    int downsample_ratio = 32;
    int source_rate = 16000;
    std::vector<float> values;  // channels * frames

    Latent() = default;
    Latent(int c, int f, int d, int rate)
        : channels(c), frames(f), downsample_ratio(d), source_rate(rate),
          values(static_cast<size_t>(c) * f, 0.0f) {}

    float& at(int c, int f) { return values[static_cast<size_t>(c) * frames + f]; }
    float at(int c, int f) const { return values[static_cast<size_t>(c) * frames + f]; }
    size_t size() const { return values.size(); }
    bool same_shape(const Latent& o) const {
        return channels == o.channels && frames == o.frames;
    }

    double norm() const;
    bool all_finite() const;
};

/// Flat little-endian float32 binary with a small shape header, used to
/// cache latents (and embeddings) between pipeline stages.
void latent_save(const std::string& path, const Latent& z);
Latent latent_load(const std::string& path);

// elementwise helpers
Latent operator+(const Latent& a, const Latent& b);
Latent operator-(const Latent& a, const Latent& b);
Latent operator*(double s, const Latent& a);
double latent_dot(const Latent& a, const Latent& b);
double relative_l2(const Latent& a, const Latent& b);

}  // namespace cosaref
