#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosaref/rng.hpp"
#include "cosaref/wave.hpp"

namespace cosaref {

struct CorpusError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-class rendering style. The "synthetic" class must keep vibrato and
/// tremolo at zero; the "realistic" class must have nonzero parameters.
struct ToyClassStyle {
    double vibrato_rate_hz = 0.0;
    double vibrato_depth_cents = 0.0;
    double tremolo_rate_hz = 0.0;
    double tremolo_depth = 0.0;   // fractional amplitude modulation, 0..1
    double noise_floor = 0.0;     // additive noise amplitude
    double onset_jitter_s = 0.0;  // leading silence jitter
};

struct ToyCorpusSpec {
    std::vector<std::string> instruments{"violin"};
    int clips_per_class = 100;
    double clip_seconds = 2.0;
    int sample_rate = 16000;
    int pitch_lo = 57;  // A3
    int pitch_hi = 69;  // A4
    ToyClassStyle synthetic_style;  // defaults: everything zero
    ToyClassStyle realistic_style{5.5, 60.0, 4.0, 0.35, 0.03, 0.01};
    uint64_t seed = 0;

    void validate() const;
};

/// One harmonic tone clip in the given style; deterministic in rng.
Waveform make_toy_clip(int pitch, double seconds, int rate, const ToyClassStyle& style, Rng rng);

/// Write a labeled corpus directory: WAV clips plus manifest.json with
/// {clips: [{label, file}]}. Labels come from the conditioning templates
/// ("synthetic, <instrument>" / "realistic, <instrument>"). Deterministic
/// for a fixed spec and seed.
void make_toy_corpus(const ToyCorpusSpec& spec, const std::string& out_dir);

}  // namespace cosaref
