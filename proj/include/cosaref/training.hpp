#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cosaref/codec.hpp"
#include "cosaref/denoiser.hpp"
#include "cosaref/schedule.hpp"
#include "cosaref/wave.hpp"

namespace cosaref {

struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ToyClip {
    Waveform audio;
    std::string label;
};

struct ToyDataset {
    std::vector<ToyClip> clips;
};

/// Load a corpus directory written by make_toy_corpus (manifest.json +
/// WAV clips).
ToyDataset load_toy_dataset(const std::string& dir);

struct TrainingConfig {
    int steps = 2000;
    int batch_size = 8;
    double learning_rate = 2e-3;
    double label_drop_rate = 0.1;  // null-condition share, enables CFG
    uint64_t seed = 0;
    int log_every = 100;
    DenoiserConfig net;
};

struct TrainResult {
    Denoiser denoiser;
    std::vector<double> losses;  // one entry per optimizer step
};

/// Denoising score-matching training: minimize the sigma-weighted
/// E lambda(sigma_i) ||D(z0 + sigma_i w, sigma_i, c) - z0||^2 over random
/// (clip, i, noise) draws, lambda = 1 / c_out(sigma)^2 so every noise
/// level contributes at the same effective scale. With `init`, continues from the given
/// weights (annotation-free fine-tuning); zero steps returns init unchanged.
TrainResult train_toy_denoiser(const ToyDataset& dataset, const NoiseSchedule& schedule,
                               const TrainingConfig& config, const OrthonormalCodec& codec,
                               const std::optional<Denoiser>& init = std::nullopt);

/// Weighted loss and analytic parameter gradient for one (noisy, clean) pair;
/// gradient is accumulated into `grad` (sized parameter_count()).
/// Exposed so tests can check it against finite differences.
double denoiser_loss_and_grad(const Denoiser& denoiser, const Latent& z_noisy, const Latent& z0,
                              double sigma, int cond_index, std::vector<double>& grad);

}  // namespace cosaref
