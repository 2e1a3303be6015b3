#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "cosaref/latent.hpp"

namespace cosaref {

struct DenoiserError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Resolved condition label. Index 0 is the reserved null condition.
struct Condition {
    std::string label;
    int index = 0;
};

enum class ConditionStyle { Source, Target, FullTemplate };

/// Deterministic label from the conditioning templates:
///   Source       -> "synthetic, <instrument>"
///   Target       -> "realistic, <instrument>"
///   FullTemplate -> "Solo, realistic, <instrument>, classical, well-recorded, professional"
std::string condition_from_metadata(const std::string& instrument, ConditionStyle style);

struct DenoiserConfig {
    int channels = 32;  // latent channels
    int hidden = 48;
    int kernel = 3;
    int n_fourier = 8;
    double sigma_data = 0.5;
};

/// Small 1-D convolutional data-prediction denoiser over latent frames.
/// Sigma enters through Fourier features of log(sigma); the condition
/// through a learned embedding added to hidden states. Output uses the
/// usual sigma-dependent skip/output scaling, so D(z, sigma) -> z as
/// sigma -> 0. Weights are immutable during inference and safe to share
/// across threads.
class Denoiser {
  public:
    static constexpr int kNullCondition = 0;

    Denoiser() = default;
    Denoiser(const DenoiserConfig& cfg, std::vector<std::string> labels, uint64_t init_seed);

    /// z0 estimate from a noisy latent at noise level sigma.
    Latent denoise(const Latent& z, double sigma, int cond_index) const;

    /// Map a label to a vocabulary entry; unknown labels resolve to the
    /// null condition (with a one-time warning on stderr).
    Condition resolve(const std::string& label) const;

    const DenoiserConfig& config() const { return cfg_; }
    const std::vector<std::string>& vocabulary() const { return vocab_; }

    const std::vector<double>& parameters() const { return params_; }
    std::vector<double>& parameters() { return params_; }
    size_t parameter_count() const { return params_.size(); }

    void save(const std::string& path) const;
    static Denoiser load(const std::string& path);

    // Parameter layout in the flat vector (used by the trainer).
    struct Layout {
        size_t w1, b1, w2, b2, w3, b3, w_sig, b_sig, cond_emb, total;
    };
    Layout layout() const;

    /// log-sigma Fourier features, 2 * n_fourier values.
    std::vector<double> sigma_features(double sigma) const;

    /// Skip/output/input scalings (k-diffusion preconditioning).
    void scalings(double sigma, double& c_skip, double& c_out, double& c_in) const;

    /// Inner network: y = F(c_in * z, sigma, cond). Exposed for the trainer;
    /// when trace != nullptr the intermediate activations are recorded.
    struct Trace {
        std::vector<double> x, pre1, h1, pre2, h2, y, inject, feats;
    };
    std::vector<double> forward_inner(const std::vector<double>& x_scaled, int frames, double sigma,
                                      int cond_index, Trace* trace) const;

  private:
    DenoiserConfig cfg_;
    std::vector<std::string> vocab_;  // vocab_[0] = "" (null)
    std::vector<double> params_;
    std::vector<double> fourier_freqs_;
};

/// Classifier-free guidance: D_null + scale * (D_cond - D_null).
Latent denoise_cfg(const Denoiser& denoiser, const Latent& z, double sigma, const Condition& cond,
                   double scale);

}  // namespace cosaref
