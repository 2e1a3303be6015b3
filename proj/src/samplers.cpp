#include "cosaref/samplers.hpp"

#include <cmath>

namespace cosaref {

Latent sample_dpmpp2m(const Latent& z_start, int start_index, const NoiseSchedule& schedule,
                      const DenoiseFn& denoise) {
    if (start_index < 1 || start_index > schedule.steps)
        throw ScheduleError("start index out of range");

    Latent z = z_start;
    Latent old_denoised;
    bool have_old = false;
    double h_last = 0.0;

    for (int i = start_index; i >= 1; --i) {
        const double sigma = schedule.sigma(i);
        const double sigma_next = (i > 1) ? schedule.sigma(i - 1) : 0.0;
        const Latent denoised = denoise(z, sigma);

        if (sigma_next == 0.0) {
            // limit of the data-prediction update as sigma -> 0
            z = denoised;
            break;
        }
        const double t = -std::log(sigma);
        const double t_next = -std::log(sigma_next);
        const double h = t_next - t;
        const double ratio = sigma_next / sigma;
        const double blend = -std::expm1(-h);  // 1 - e^{-h}

        if (!have_old) {
            for (size_t k = 0; k < z.values.size(); ++k)
                z.values[k] =
                    static_cast<float>(ratio * z.values[k] + blend * denoised.values[k]);
        } else {
            const double r = h_last / h;
            const double c1 = 1.0 + 1.0 / (2.0 * r);
            const double c2 = -1.0 / (2.0 * r);
            for (size_t k = 0; k < z.values.size(); ++k) {
                const double d = c1 * denoised.values[k] + c2 * old_denoised.values[k];
                z.values[k] = static_cast<float>(ratio * z.values[k] + blend * d);
            }
        }
        old_denoised = denoised;
        have_old = true;
        h_last = h;
    }
    return z;
}

Latent sample_dpmpp2m(const Latent& z_start, int start_index, const NoiseSchedule& schedule,
                      const Denoiser& denoiser, const Condition& cond, double guidance_scale) {
    return sample_dpmpp2m(z_start, start_index, schedule, [&](const Latent& z, double sigma) {
        return denoise_cfg(denoiser, z, sigma, cond, guidance_scale);
    });
}

AncestralStep ancestral_step(const Latent& z, const Latent& z0_pred, double sigma_from,
                             double sigma_to) {
    AncestralStep step;
    if (sigma_to <= 0.0) {
        // terminal step: mean is the data prediction, full noise slot
        step.mean = z0_pred;
        step.sigma_up = sigma_from;
        return step;
    }
    const double sigma_up =
        std::min(sigma_to, sigma_to * std::sqrt(std::max(0.0, 1.0 - (sigma_to * sigma_to) /
                                                                       (sigma_from * sigma_from))));
    const double sigma_down = std::sqrt(std::max(0.0, sigma_to * sigma_to - sigma_up * sigma_up));
    step.sigma_up = sigma_up;
    step.mean = z;
    const double coeff = (sigma_down - sigma_from) / sigma_from;
    for (size_t k = 0; k < step.mean.values.size(); ++k)
        step.mean.values[k] = static_cast<float>(
            z.values[k] + coeff * (double(z.values[k]) - z0_pred.values[k]));
    return step;
}

Latent sample_ancestral(const Latent& z_start, int start_index, const NoiseSchedule& schedule,
                        const DenoiseFn& denoise, const NoiseSource& noise_source) {
    if (start_index < 1 || start_index > schedule.steps)
        throw ScheduleError("start index out of range");

    Latent z = z_start;
    for (int i = start_index; i >= 1; --i) {
        const double sigma = schedule.sigma(i);
        const double sigma_next = (i > 1) ? schedule.sigma(i - 1) : 0.0;
        const Latent z0_pred = denoise(z, sigma);
        AncestralStep step = ancestral_step(z, z0_pred, sigma, sigma_next);
        if (step.sigma_up > 0.0) {
            const Latent w = noise_source(i);
            if (!w.same_shape(z)) throw LatentError("noise source shape mismatch");
            for (size_t k = 0; k < step.mean.values.size(); ++k)
                step.mean.values[k] =
                    static_cast<float>(step.mean.values[k] + step.sigma_up * w.values[k]);
        }
        z = std::move(step.mean);
    }
    return z;
}

Latent sample_ancestral(const Latent& z_start, int start_index, const NoiseSchedule& schedule,
                        const Denoiser& denoiser, const Condition& cond, double guidance_scale,
                        const NoiseSource& noise_source) {
    return sample_ancestral(
        z_start, start_index, schedule,
        [&](const Latent& z, double sigma) {
            return denoise_cfg(denoiser, z, sigma, cond, guidance_scale);
        },
        noise_source);
}

}  // namespace cosaref
