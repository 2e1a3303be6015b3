#include "doctest.h"

#include <cmath>

#include "cosaref/rng.hpp"
#include "cosaref/samplers.hpp"

using namespace cosaref;

namespace {

Latent random_latent(int c, int f, uint64_t seed) {
    Latent z(c, f, 32, 16000);
    Rng rng(seed);
    for (auto& v : z.values) v = static_cast<float>(rng.normal());
    return z;
}

Latent zero_like(const Latent& z) {
    Latent out = z;
    std::fill(out.values.begin(), out.values.end(), 0.0f);
    return out;
}

// smooth synthetic denoiser: pulls z halfway toward a fixed target
DenoiseFn pull_toward(const Latent& target) {
    return [target](const Latent& z, double /*sigma*/) {
        Latent out = z;
        for (size_t k = 0; k < out.values.size(); ++k)
            out.values[k] = static_cast<float>(target.values[k] + 0.5 * (z.values[k] - target.values[k]));
        return out;
    };
}

}  // namespace

TEST_CASE("single-step dpmpp returns the denoiser prediction exactly") {
    const NoiseSchedule s = build_schedule(10, 0.1, 5.0);
    const Latent z = random_latent(4, 8, 1);
    const Latent target = random_latent(4, 8, 2);
    DenoiseFn constant = [&](const Latent&, double) { return target; };
    const Latent out = sample_dpmpp2m(z, 1, s, constant);
    CHECK(out.values == target.values);
}

TEST_CASE("constant denoiser is a fixed point for any start index") {
    const NoiseSchedule s = build_schedule(25, 0.05, 16.0);
    const Latent target = random_latent(4, 8, 3);
    DenoiseFn constant = [&](const Latent&, double) { return target; };
    for (int n : {1, 5, 25}) {
        const Latent out = sample_dpmpp2m(random_latent(4, 8, 100 + n), n, s, constant);
        CHECK(relative_l2(out, target) < 1e-5);
    }
}

TEST_CASE("dpmpp converges with step count") {
    const Latent target = random_latent(8, 16, 4);
    const DenoiseFn denoise = pull_toward(target);
    const Latent z_start = random_latent(8, 16, 5);

    auto run = [&](int n) {
        const NoiseSchedule s = build_schedule(n, 0.05, 16.0);
        return sample_dpmpp2m(z_start, n, s, denoise);
    };
    const Latent reference = run(160);
    double prev_gap = -1.0;
    for (int n : {2, 5, 10, 20, 40}) {
        const Latent out = run(n);
        double gap = 0.0;
        for (size_t k = 0; k < out.size(); ++k) {
            const double d = double(out.values[k]) - reference.values[k];
            gap += d * d;
        }
        gap = std::sqrt(gap);
        if (prev_gap >= 0.0) CHECK(gap < prev_gap);
        prev_gap = gap;
    }
}

TEST_CASE("ancestral step decomposition formulas") {
    const Latent z = random_latent(4, 8, 6);
    const Latent z0 = random_latent(4, 8, 7);
    const double s_from = 2.0, s_to = 0.5;
    const AncestralStep step = ancestral_step(z, z0, s_from, s_to);

    const double expected_up =
        std::min(s_to, s_to * std::sqrt(1.0 - (s_to * s_to) / (s_from * s_from)));
    CHECK(step.sigma_up == doctest::Approx(expected_up));
    const double s_down = std::sqrt(s_to * s_to - expected_up * expected_up);
    for (size_t k = 0; k < z.size(); ++k) {
        const double mu =
            z.values[k] + (s_down - s_from) * (double(z.values[k]) - z0.values[k]) / s_from;
        CHECK(step.mean.values[k] == doctest::Approx(mu).epsilon(1e-5));
    }
}

TEST_CASE("terminal ancestral step keeps a full noise slot") {
    // the step to sigma = 0 uses mean = z0 prediction and sigma_up =
    // sigma_from, so inversion can store a noise for every step
    const Latent z = random_latent(4, 8, 8);
    const Latent z0 = random_latent(4, 8, 9);
    const AncestralStep step = ancestral_step(z, z0, 0.7, 0.0);
    CHECK(step.mean.values == z0.values);
    CHECK(step.sigma_up == 0.7);
}

TEST_CASE("ancestral sampler with zero noise is deterministic") {
    const NoiseSchedule s = build_schedule(12, 0.1, 8.0);
    const Latent target = random_latent(4, 8, 10);
    const DenoiseFn denoise = pull_toward(target);
    const Latent z_start = random_latent(4, 8, 11);
    NoiseSource zeros = [&](int) { return zero_like(z_start); };
    const Latent a = sample_ancestral(z_start, 12, s, denoise, zeros);
    const Latent b = sample_ancestral(z_start, 12, s, denoise, zeros);
    CHECK(a.values == b.values);
}

TEST_CASE("seeded ancestral runs are bit-identical") {
    const NoiseSchedule s = build_schedule(12, 0.1, 8.0);
    const Latent target = random_latent(4, 8, 12);
    const DenoiseFn denoise = pull_toward(target);
    const Latent z_start = random_latent(4, 8, 13);
    auto make_noise = [&](uint64_t seed) {
        return NoiseSource([&, seed](int i) {
            Latent w = zero_like(z_start);
            Rng rng = Rng(seed).fork("step", static_cast<uint64_t>(i));
            for (auto& v : w.values) v = static_cast<float>(rng.normal());
            return w;
        });
    };
    const Latent a = sample_ancestral(z_start, 12, s, denoise, make_noise(42));
    const Latent b = sample_ancestral(z_start, 12, s, denoise, make_noise(42));
    const Latent c = sample_ancestral(z_start, 12, s, denoise, make_noise(43));
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("start index bounds are validated") {
    const NoiseSchedule s = build_schedule(5, 0.1, 5.0);
    const Latent z = random_latent(2, 4, 14);
    DenoiseFn id = [](const Latent& x, double) { return x; };
    CHECK_THROWS(sample_dpmpp2m(z, 0, s, id));
    CHECK_THROWS(sample_dpmpp2m(z, 6, s, id));
}
