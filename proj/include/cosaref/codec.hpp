#pragma once

#include "cosaref/latent.hpp"
#include "cosaref/wave.hpp"

namespace cosaref {

/// Waveform <-> latent map: non-overlapping frames of d samples projected
/// onto d orthonormal DCT-II basis vectors (C = d). Linear, exactly
/// invertible, energy preserving. A trained autoencoder can be slotted in
/// behind the same interface.
class OrthonormalCodec {
  public:
    explicit OrthonormalCodec(int d = 32);

    int channels() const { return d_; }
    int downsample_ratio() const { return d_; }

    /// Mono encode. frames = ceil(T/d), tail zero-padded. Zero in, zero out.
    Latent encode(const Waveform& audio) const;

    /// Inverse; output length = frames * d.
    Waveform decode(const Latent& z) const;

  private:
    int d_;
    std::vector<double> basis_;  // d x d, rows orthonormal
};

}  // namespace cosaref
