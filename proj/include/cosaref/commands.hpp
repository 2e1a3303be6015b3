#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "cosaref/refine.hpp"

namespace cosaref {

struct CommandError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat run configuration shared by all CLI verbs. Loadable from a
/// key=value text file; command-line flags override file values. Unset
/// refinement fields fall back to the per-backend defaults.
struct RunConfig {
    // paths
    std::string midi_path;
    std::string library_path;
    std::string checkpoint_path;
    std::string init_checkpoint;
    std::string input_audio;
    std::string output_audio;
    std::string corpus_dir;
    std::string candidate_dir;
    std::string reference_dir;
    std::string concat_dir;
    std::string scores_dir;
    std::string report_path;

    std::string instrument = "violin";
    std::string backend = "sdedit";

    // refinement overrides (per-backend stock defaults when unset)
    std::optional<int> steps;
    std::optional<int> start_index;
    std::optional<double> sigma_min;
    std::optional<double> sigma_max;
    std::optional<double> guidance_scale;
    double rho = 7.0;
    double chunk_seconds = 47.0;
    int overlap_samples = 1000;

    // rates & codec
    int working_rate = 16000;
    int out_rate = 44100;
    int codec_d = 32;
    bool pcm16 = false;

    // sampler options
    bool apply_expression = false;
    bool velocity_to_gain = false;

    // training
    int train_steps = 2000;
    int batch_size = 8;
    double learning_rate = 2e-3;
    double label_drop = 0.1;
    int train_schedule_steps = 60;
    double train_sigma_min = 0.02;
    double train_sigma_max = 500.0;

    // toy corpus
    int clips_per_class = 100;
    double clip_seconds = 2.0;

    uint64_t seed = 0;

    /// Apply one key=value pair; throws CommandError on unknown keys or
    /// unparsable values.
    void apply(const std::string& key, const std::string& value);

    /// Canonical key=value dump (stable order), used for the config hash.
    std::string serialize() const;

    /// FNV-1a hash of serialize(), hex string.
    std::string hash() const;
};

/// Read key=value lines ('#' comments, blank lines ignored) into cfg.
void load_config_file(const std::string& path, RunConfig& cfg);

/// Refinement settings implied by cfg: the per-backend stock defaults with
/// explicit overrides applied, conditions from the instrument templates.
RefinementConfig refinement_from(const RunConfig& cfg);

// The CLI verbs. Each throws on error (the CLI maps that to a nonzero
// exit) and prints a short summary on stdout.
void run_render(const RunConfig& cfg);
void run_refine(const RunConfig& cfg);
void run_synth(const RunConfig& cfg);
void run_make_toy_corpus(const RunConfig& cfg);
void run_train(const RunConfig& cfg);
void run_eval(const RunConfig& cfg);

}  // namespace cosaref
