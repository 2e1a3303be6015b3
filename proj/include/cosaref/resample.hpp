#pragma once

#include "cosaref/wave.hpp"

namespace cosaref {

/// Band-limited windowed-sinc resampling. Same-rate input is returned
/// unchanged (bit-identical). Output length = round(T * to_rate / from_rate).
Waveform resample(const Waveform& audio, int to_rate);

/// Resample by an arbitrary ratio (out length = round(T * ratio)), keeping
/// the declared sample rate. Used for pitch shifting.
std::vector<float> resample_ratio(const std::vector<float>& in, double ratio);

}  // namespace cosaref
