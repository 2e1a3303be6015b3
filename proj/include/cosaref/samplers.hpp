#pragma once

#include <functional>

#include "cosaref/denoiser.hpp"
#include "cosaref/schedule.hpp"

namespace cosaref {

/// z0 estimate at one noise level; the guided denoiser in the pipeline,
/// an arbitrary stub in tests.
using DenoiseFn = std::function<Latent(const Latent& z, double sigma)>;

/// Deterministic DPM-Solver++(2M) in the data-prediction form, iterating
/// from schedule index n down to sigma -> 0 (the final step returns the
/// last z0 prediction exactly). Multistep updates happen in
/// lambda = -ln(sigma); the first step is first order.
Latent sample_dpmpp2m(const Latent& z_start, int start_index, const NoiseSchedule& schedule,
                      const DenoiseFn& denoise);
Latent sample_dpmpp2m(const Latent& z_start, int start_index, const NoiseSchedule& schedule,
                      const Denoiser& denoiser, const Condition& cond, double guidance_scale);

/// Mean/noise decomposition of one Euler-ancestral step from sigma_from to
/// sigma_to (variance-exploding): z_next = mean + sigma_up * w.
/// The step to sigma_to = 0 keeps a full noise slot (sigma_up = sigma_from,
/// mean = z0 prediction) so that DDPM inversion can imprint the input into
/// every step of the chain.
struct AncestralStep {
    Latent mean;
    double sigma_up = 0.0;
};

AncestralStep ancestral_step(const Latent& z, const Latent& z0_pred, double sigma_from,
                             double sigma_to);

/// Stochastic Euler-ancestral sampler from index n down to the clean state.
/// noise_source(i) must yield one latent-shaped standard-normal draw per
/// step i = n..1 (crafted noises for DDPM inversion, seeded draws
/// otherwise).
using NoiseSource = std::function<Latent(int step_index)>;

Latent sample_ancestral(const Latent& z_start, int start_index, const NoiseSchedule& schedule,
                        const DenoiseFn& denoise, const NoiseSource& noise_source);
Latent sample_ancestral(const Latent& z_start, int start_index, const NoiseSchedule& schedule,
                        const Denoiser& denoiser, const Condition& cond, double guidance_scale,
                        const NoiseSource& noise_source);

}  // namespace cosaref
