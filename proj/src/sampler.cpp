#include "cosaref/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "cosaref/resample.hpp"
#include "json.hpp"

namespace cosaref {

SampleLibrary SampleLibrary::load(const std::string& manifest_path, int working_rate) {
    std::ifstream f(manifest_path);
    if (!f) throw SamplerError("cannot open sample manifest: " + manifest_path);
    nlohmann::json manifest;
    try {
        f >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw SamplerError("unreadable manifest " + manifest_path + ": " + e.what());
    }
    if (!manifest.is_array()) throw SamplerError("manifest must be a JSON array: " + manifest_path);

    const auto base = std::filesystem::path(manifest_path).parent_path();
    SampleLibrary lib(working_rate);
    for (const auto& entry : manifest) {
        NoteSample s;
        try {
            s.instrument = entry.at("instrument").get<std::string>();
            s.pitch = entry.at("pitch").get<int>();
            s.velocity = entry.at("velocity").get<int>();
        } catch (const nlohmann::json::exception& e) {
            throw SamplerError("bad manifest entry in " + manifest_path + ": " + e.what());
        }
        const std::string file = entry.at("file").get<std::string>();
        const auto path = base / file;
        if (!std::filesystem::exists(path))
            throw SamplerError("missing sample file '" + path.string() + "' (entry " +
                               s.instrument + "/" + std::to_string(s.pitch) + "/" +
                               std::to_string(s.velocity) + ")");
        Waveform wav = wav_read(path.string()).to_mono();
        if (wav.length() == 0) throw SamplerError("empty sample file: " + path.string());
        if (wav.sample_rate != working_rate) wav = resample(wav, working_rate);
        s.audio = std::move(wav.channels[0]);
        lib.add(std::move(s));
    }
    return lib;
}

void SampleLibrary::add(NoteSample sample) {
    if (sample.audio.empty()) throw SamplerError("sample has no audio: " + sample.instrument);
    auto key = std::make_tuple(sample.instrument, sample.pitch, sample.velocity);
    if (samples_.count(key))
        throw SamplerError("duplicate sample key " + sample.instrument + "/" +
                           std::to_string(sample.pitch) + "/" + std::to_string(sample.velocity) +
                           " (two manifest entries collide)");
    samples_.emplace(std::move(key), std::move(sample));
}

bool SampleLibrary::has_instrument(const std::string& instrument) const {
    for (const auto& [key, s] : samples_)
        if (std::get<0>(key) == instrument) return true;
    return false;
}

SampleLibrary::Selection SampleLibrary::select(const std::string& instrument, int pitch,
                                               int velocity) const {
    auto exact = samples_.find(std::make_tuple(instrument, pitch, velocity));
    if (exact != samples_.end()) return {&exact->second, 0};

    // nearest pitch first (ties -> lower pitch)
    int best_pitch = -1;
    for (const auto& [key, s] : samples_) {
        if (std::get<0>(key) != instrument) continue;
        const int p = std::get<1>(key);
        if (best_pitch < 0 || std::abs(p - pitch) < std::abs(best_pitch - pitch) ||
            (std::abs(p - pitch) == std::abs(best_pitch - pitch) && p < best_pitch))
            best_pitch = p;
    }
    if (best_pitch < 0) throw SamplerError("unknown instrument in library: " + instrument);

    // then nearest velocity at that pitch (ties -> lower)
    const NoteSample* best = nullptr;
    for (const auto& [key, s] : samples_) {
        if (std::get<0>(key) != instrument || std::get<1>(key) != best_pitch) continue;
        const int v = std::get<2>(key);
        if (!best || std::abs(v - velocity) < std::abs(best->velocity - velocity) ||
            (std::abs(v - velocity) == std::abs(best->velocity - velocity) && v < best->velocity))
            best = &s;
    }
    return {best, pitch - best_pitch};
}

namespace {

double adsr_gain(double t, double duration_s, const AdsrEnvelope& env) {
    if (t < 0.0) return 0.0;
    if (t < duration_s) {
        double g = 1.0;
        if (env.attack_s > 0.0 && t < env.attack_s) return t / env.attack_s;
        const double after_attack = t - env.attack_s;
        if (env.decay_s > 0.0 && after_attack < env.decay_s)
            g = 1.0 + (env.sustain_level - 1.0) * (after_attack / env.decay_s);
        else
            g = env.sustain_level;
        return g;
    }
    const double into_release = t - duration_s;
    if (env.release_s > 0.0 && into_release < env.release_s)
        return env.sustain_level * (1.0 - into_release / env.release_s);
    return 0.0;
}

}  // namespace

std::vector<float> apply_adsr(const std::vector<float>& audio, int rate, double note_duration_s,
                              const AdsrEnvelope& env) {
    if (note_duration_s <= 0.0) throw SamplerError("note duration must be positive");
    const size_t n = static_cast<size_t>(std::llround((note_duration_s + env.release_s) * rate));
    std::vector<float> out(n, 0.0f);
    for (size_t k = 0; k < n; ++k) {
        const float src = (k < audio.size()) ? audio[k] : 0.0f;  // zero-pad, no looping
        const double t = (static_cast<double>(k) + 0.5) / rate;  // sample-center time
        out[k] = src * static_cast<float>(adsr_gain(t, note_duration_s, env));
    }
    return out;
}

Waveform render_track(const Score& score, const SampleLibrary& lib, const std::string& instrument,
                      const RenderOptions& opts) {
    const int rate = opts.working_rate;
    const auto notes = score.all_notes();
    if (!notes.empty() && !lib.has_instrument(instrument))
        throw SamplerError("unknown instrument in library: " + instrument);

    const size_t total =
        static_cast<size_t>(std::llround((score.end_time_s() + opts.envelope.release_s) * rate));
    std::vector<float> mix(std::max<size_t>(total, 1), 0.0f);

    // Notes are mixed in fixed blocks; blocks render in parallel into local
    // buffers and are summed in index order, so the result does not depend
    // on the thread count.
    constexpr size_t kBlock = 16;
    const size_t n_blocks = (notes.size() + kBlock - 1) / kBlock;

    struct BlockBuf {
        size_t start = 0;
        std::vector<float> samples;
    };
    std::vector<BlockBuf> blocks(n_blocks);

#pragma omp parallel for schedule(dynamic)
    for (long long b = 0; b < static_cast<long long>(n_blocks); ++b) {
        const size_t lo = static_cast<size_t>(b) * kBlock;
        const size_t hi = std::min(lo + kBlock, notes.size());
        size_t start = mix.size(), end = 0;
        for (size_t i = lo; i < hi; ++i) {
            const size_t at = static_cast<size_t>(std::llround(notes[i].onset_s * rate));
            const size_t len = static_cast<size_t>(std::llround(
                (notes[i].offset_s - notes[i].onset_s + opts.envelope.release_s) * rate));
            start = std::min(start, at);
            end = std::max(end, at + len);
        }
        if (end <= start) continue;
        BlockBuf& buf = blocks[b];
        buf.start = start;
        buf.samples.assign(end - start, 0.0f);
        for (size_t i = lo; i < hi; ++i) {
            const NoteEvent& n = notes[i];
            auto sel = lib.select(instrument, n.pitch, n.velocity);
            std::vector<float> src = sel.sample->audio;
            if (sel.pitch_shift_semitones != 0)
                src = resample_ratio(src, std::pow(2.0, -sel.pitch_shift_semitones / 12.0));
            std::vector<float> shaped = apply_adsr(src, rate, n.offset_s - n.onset_s, opts.envelope);

            float gain = 1.0f;
            if (opts.velocity_to_gain) gain *= static_cast<float>(n.velocity) / 127.0f;
            if (opts.apply_expression) {
                // last CC11 on the note's channel at or before onset
                int expr = 127;
                for (const auto& t : score.tracks)
                    for (const auto& c : t.controls)
                        if (c.controller == 11 && c.channel == n.channel && c.time_s <= n.onset_s)
                            expr = c.value;
                gain *= static_cast<float>(expr) / 127.0f;
            }

            const size_t at = static_cast<size_t>(std::llround(n.onset_s * rate));
            for (size_t k = 0; k < shaped.size(); ++k) {
                const size_t j = at + k - buf.start;
                if (j < buf.samples.size()) buf.samples[j] += shaped[k] * gain;
            }
        }
    }

    for (const auto& buf : blocks)
        for (size_t k = 0; k < buf.samples.size(); ++k)
            if (buf.start + k < mix.size()) mix[buf.start + k] += buf.samples[k];

    Waveform out;
    out.sample_rate = rate;
    out.channels.push_back(std::move(mix));
    if (opts.out_rate != rate) out = resample(out, opts.out_rate);
    return out;
}

}  // namespace cosaref
