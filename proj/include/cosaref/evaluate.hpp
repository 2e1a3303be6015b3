#pragma once

#include <string>
#include <vector>

#include "cosaref/midi.hpp"
#include "cosaref/wave.hpp"

namespace cosaref {

struct EvalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A set of fixed-dimension embedding vectors with a tag naming the audio
/// set it came from.
struct EmbeddingSet {
    int dimension = 0;
    std::vector<std::vector<double>> vectors;
    std::string source_tag;

    void add(std::vector<double> v);
    size_t size() const { return vectors.size(); }
};

/// Deterministic toy audio embedding (CLAP/Encodec stand-in): per-band
/// log-mel energy means and standard deviations plus spectral-flux
/// statistics. k = 32. Silence maps to the log floor, not an error.
std::vector<double> embed_toy(const Waveform& audio);
constexpr int kEmbeddingDim = 32;

/// Frechet distance between Gaussian fits:
/// |mu_A - mu_B|^2 + tr(S_A + S_B - 2 (S_A S_B)^{1/2}),
/// covariances regularized with +1e-6 I.
double frechet_distance(const EmbeddingSet& a, const EmbeddingSet& b);

struct TranscribedNote {
    int pitch = 0;
    double onset_s = 0.0;
    double offset_s = 0.0;
    double confidence = 1.0;
};

/// Autocorrelation pitch tracking at a 10 ms hop; voiced frames grouped
/// into notes, pitch = median f0 quantized to the nearest semitone,
/// segments under 50 ms discarded. Monophonic audio assumed.
std::vector<TranscribedNote> transcribe_mono(const Waveform& audio);

struct F1Result {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int matched = 0;
};

/// Greedy one-to-one onset+pitch matching; a hypothesis matches a
/// reference iff same semitone and |onset difference| <= onset_tol_s.
F1Result note_f1(const std::vector<NoteEvent>& reference,
                 const std::vector<TranscribedNote>& hypothesis, double onset_tol_s = 0.05);

}  // namespace cosaref
