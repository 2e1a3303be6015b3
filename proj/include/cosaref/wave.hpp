#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cosaref {

/// Multichannel PCM audio. Samples are unclipped reals; clipping to
/// [-1, 1] happens only at 16-bit export.
struct Waveform {
    int sample_rate = 16000;
    // One vector per channel, all equal length.
    std::vector<std::vector<float>> channels;

    Waveform() = default;
    Waveform(int rate, int num_channels, size_t length)
        : sample_rate(rate), channels(num_channels, std::vector<float>(length, 0.0f)) {}

    int num_channels() const { return static_cast<int>(channels.size()); }
    size_t length() const { return channels.empty() ? 0 : channels[0].size(); }
    double duration_s() const { return static_cast<double>(length()) / sample_rate; }

    float peak() const;
    /// Mix all channels down to a single channel (average).
    Waveform to_mono() const;
};

struct WavError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class WavFormat { Pcm16, Float32 };

Waveform wav_read(const std::string& path);
void wav_write(const std::string& path, const Waveform& wav, WavFormat format = WavFormat::Float32);

}  // namespace cosaref
