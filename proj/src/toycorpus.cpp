#include "cosaref/toycorpus.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "cosaref/denoiser.hpp"
#include "json.hpp"

namespace cosaref {

void ToyCorpusSpec::validate() const {
    if (instruments.empty()) throw CorpusError("corpus spec needs at least one instrument");
    if (clips_per_class <= 0) throw CorpusError("clips_per_class must be positive");
    if (clip_seconds <= 0.0 || sample_rate <= 0) throw CorpusError("invalid clip length or rate");
    if (pitch_lo < 0 || pitch_hi > 127 || pitch_lo > pitch_hi)
        throw CorpusError("invalid pitch range");
    if (synthetic_style.vibrato_depth_cents != 0.0 || synthetic_style.tremolo_depth != 0.0)
        throw CorpusError("the synthetic class must have zero vibrato and tremolo");
    if (realistic_style.vibrato_depth_cents == 0.0 && realistic_style.tremolo_depth == 0.0 &&
        realistic_style.noise_floor == 0.0)
        throw CorpusError("the realistic class must have nonzero style parameters");
}

Waveform make_toy_clip(int pitch, double seconds, int rate, const ToyClassStyle& style, Rng rng) {
    const size_t n = static_cast<size_t>(std::llround(seconds * rate));
    Waveform out(rate, 1, n);
    std::vector<float>& x = out.channels[0];

    const double f0 = 440.0 * std::pow(2.0, (pitch - 69) / 12.0);
    const double onset = style.onset_jitter_s > 0.0 ? rng.uniform() * style.onset_jitter_s : 0.0;
    const double vib_phase = rng.uniform() * 2.0 * M_PI;
    const double trem_phase = rng.uniform() * 2.0 * M_PI;
    const double vib_depth = std::pow(2.0, style.vibrato_depth_cents / 1200.0) - 1.0;

    static constexpr double kHarmonicAmp[4] = {1.0, 0.5, 0.25, 0.12};
    const double attack = 0.01, release = 0.1;
    const double note_end = seconds - release;

    double phase = 0.0;
    for (size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / rate;
        double noise = style.noise_floor > 0.0 ? style.noise_floor * rng.normal() : 0.0;
        if (t < onset) {
            x[k] = static_cast<float>(noise);
            continue;
        }
        const double tn = t - onset;
        double freq = f0;
        if (style.vibrato_rate_hz > 0.0 && vib_depth > 0.0)
            freq *= 1.0 + vib_depth * std::sin(2.0 * M_PI * style.vibrato_rate_hz * tn + vib_phase);
        phase += 2.0 * M_PI * freq / rate;

        double tone = 0.0;
        for (int h = 0; h < 4; ++h) tone += kHarmonicAmp[h] * std::sin((h + 1) * phase);
        tone *= 0.25;

        double gain = 1.0;
        if (tn < attack) gain = tn / attack;
        if (t > note_end) gain *= std::max(0.0, (seconds - t) / release);
        if (style.tremolo_rate_hz > 0.0 && style.tremolo_depth > 0.0)
            gain *= 1.0 - 0.5 * style.tremolo_depth *
                              (1.0 + std::sin(2.0 * M_PI * style.tremolo_rate_hz * tn + trem_phase));
        x[k] = static_cast<float>(gain * tone + noise);
    }
    return out;
}

void make_toy_corpus(const ToyCorpusSpec& spec, const std::string& out_dir) {
    spec.validate();
    std::filesystem::create_directories(out_dir);

    nlohmann::json manifest;
    manifest["clips"] = nlohmann::json::array();

    const Rng root(spec.seed);
    uint64_t clip_index = 0;
    for (const auto& instrument : spec.instruments) {
        for (int cls = 0; cls < 2; ++cls) {
            const bool realistic = cls == 1;
            const ToyClassStyle& style = realistic ? spec.realistic_style : spec.synthetic_style;
            const std::string label = condition_from_metadata(
                instrument, realistic ? ConditionStyle::Target : ConditionStyle::Source);
            const std::string tag = realistic ? "realistic" : "synthetic";
            for (int c = 0; c < spec.clips_per_class; ++c, ++clip_index) {
                Rng rng = root.fork("clip", clip_index);
                const int pitch = spec.pitch_lo + static_cast<int>(rng.uniform_int(
                                                     static_cast<uint64_t>(spec.pitch_hi - spec.pitch_lo + 1)));
                const Waveform clip =
                    make_toy_clip(pitch, spec.clip_seconds, spec.sample_rate, style, rng);
                const std::string file =
                    instrument + "_" + tag + "_" + std::to_string(c) + ".wav";
                wav_write((std::filesystem::path(out_dir) / file).string(), clip);
                manifest["clips"].push_back({{"label", label}, {"file", file}, {"pitch", pitch}});
            }
        }
    }

    std::ofstream f(std::filesystem::path(out_dir) / "manifest.json");
    if (!f) throw CorpusError("cannot write manifest in " + out_dir);
    f << manifest.dump(2) << "\n";
}

}  // namespace cosaref
