#pragma once

#include <stdexcept>
#include <vector>

#include "cosaref/latent.hpp"

namespace cosaref {

struct ScheduleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Variance-exploding noise schedule with Karras rho-spaced sigmas,
/// ascending in the step index: sigma(1) = sigma_min, sigma(N) = sigma_max,
/// alpha = 1 everywhere.
struct NoiseSchedule {
    int steps = 0;  // N
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double rho = 7.0;
    std::vector<double> sigmas;  // sigmas[i-1] = sigma_i, i = 1..N

    double sigma(int i) const { return sigmas.at(static_cast<size_t>(i) - 1); }
    double alpha(int /*i*/) const { return 1.0; }
};

NoiseSchedule build_schedule(int steps, double sigma_min, double sigma_max, double rho = 7.0);

/// Forward process: alpha_i * z0 + sigma_i * w, elementwise.
Latent forward_diffuse(const Latent& z0, int i, const NoiseSchedule& schedule, const Latent& noise);

}  // namespace cosaref
