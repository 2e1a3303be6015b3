#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cosaref/midi.hpp"
#include "cosaref/wave.hpp"

namespace cosaref {

struct SamplerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Linear attack/release amplitude envelope. Defaults: 5 ms attack,
/// full sustain, 200 ms release, no decay.
struct AdsrEnvelope {
    double attack_s = 0.005;
    double decay_s = 0.0;
    double sustain_level = 1.0;
    double release_s = 0.2;
};

struct NoteSample {
    std::string instrument;
    int pitch = 60;
    int velocity = 100;
    std::vector<float> audio;  // mono, at the library working rate
};

class SampleLibrary {
  public:
    /// Load from a JSON manifest listing {file, instrument, pitch, velocity};
    /// audio is resampled to working_rate on load.
    static SampleLibrary load(const std::string& manifest_path, int working_rate = 16000);

    void add(NoteSample sample);

    int working_rate() const { return working_rate_; }
    bool has_instrument(const std::string& instrument) const;
    size_t size() const { return samples_.size(); }

    /// Exact (pitch, velocity) match preferred; otherwise nearest pitch
    /// (ties to the lower pitch), then nearest velocity (ties lower).
    /// pitch_shift_semitones = requested - found.
    struct Selection {
        const NoteSample* sample;
        int pitch_shift_semitones;
    };
    Selection select(const std::string& instrument, int pitch, int velocity) const;

    explicit SampleLibrary(int working_rate = 16000) : working_rate_(working_rate) {}

  private:
    int working_rate_;
    std::map<std::tuple<std::string, int, int>, NoteSample> samples_;
};

struct RenderOptions {
    int working_rate = 16000;
    int out_rate = 44100;
    AdsrEnvelope envelope;
    /// When set, CC11 (expression) scales note amplitude by value/127.
    bool apply_expression = false;
    /// When set, velocity scales note amplitude by velocity/127.
    bool velocity_to_gain = false;
};

/// Apply the envelope to one note. Output length =
/// round((note_duration_s + release_s) * rate); short sources are
/// zero-padded, never looped.
std::vector<float> apply_adsr(const std::vector<float>& audio, int rate, double note_duration_s,
                              const AdsrEnvelope& env);

/// Render the score with one-shot samples from the library: each note is
/// placed at round(onset_s * working_rate), overlapping tails sum, and the
/// mix is resampled to out_rate. The mix is unclipped; clip only at export.
Waveform render_track(const Score& score, const SampleLibrary& lib, const std::string& instrument,
                      const RenderOptions& opts = {});

}  // namespace cosaref
