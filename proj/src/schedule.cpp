#include "cosaref/schedule.hpp"

#include <cmath>

namespace cosaref {

NoiseSchedule build_schedule(int steps, double sigma_min, double sigma_max, double rho) {
    if (steps < 2) throw ScheduleError("schedule needs at least 2 steps");
    if (!(sigma_min > 0.0) || !(sigma_min < sigma_max))
        throw ScheduleError("schedule requires 0 < sigma_min < sigma_max");

    NoiseSchedule s;
    s.steps = steps;
    s.sigma_min = sigma_min;
    s.sigma_max = sigma_max;
    s.rho = rho;
    s.sigmas.resize(static_cast<size_t>(steps));

    const double inv_max = std::pow(sigma_max, 1.0 / rho);
    const double inv_min = std::pow(sigma_min, 1.0 / rho);
    for (int i = 1; i <= steps; ++i) {
        // ascending: i = 1 -> sigma_min, i = N -> sigma_max
        const double u = static_cast<double>(steps - i) / (steps - 1);
        s.sigmas[static_cast<size_t>(i) - 1] = std::pow(inv_max + u * (inv_min - inv_max), rho);
    }
    s.sigmas.front() = sigma_min;  // endpoints exact
    s.sigmas.back() = sigma_max;
    return s;
}

Latent forward_diffuse(const Latent& z0, int i, const NoiseSchedule& schedule, const Latent& noise) {
    if (i < 1 || i > schedule.steps) throw ScheduleError("step index out of range");
    if (!z0.same_shape(noise)) throw LatentError("latent shape mismatch in forward_diffuse");
    const double a = schedule.alpha(i);
    const double sig = schedule.sigma(i);
    Latent out = z0;
    for (size_t k = 0; k < out.values.size(); ++k)
        out.values[k] = static_cast<float>(a * z0.values[k] + sig * noise.values[k]);
    return out;
}

}  // namespace cosaref
