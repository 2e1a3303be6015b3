#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cosaref/codec.hpp"
#include "cosaref/denoiser.hpp"
#include "cosaref/samplers.hpp"
#include "cosaref/schedule.hpp"
#include "cosaref/wave.hpp"

namespace cosaref {

struct RefineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Backend { SDEdit, Zeta };

std::string backend_name(Backend b);
Backend backend_from_name(const std::string& name);

struct RefinementConfig {
    Backend backend = Backend::SDEdit;
    int steps = 250;        // N
    int start_index = 150;  // n, 0..N; 0 is the identity path
    double sigma_min = 0.05;
    double sigma_max = 16.0;
    double rho = 7.0;
    double guidance_scale = 7.0;
    std::string cond;      // SDEdit target condition
    std::string cond_src;  // ZETA source condition
    std::string cond_tgt;  // ZETA target condition
    uint64_t seed = 0;
    double chunk_seconds = 47.0;
    int overlap_samples = 1000;

    /// Per-backend defaults (SDEdit: N=250, n=150, sigma 0.05..16, scale 7;
    /// ZETA: N=200, n=70, sigma 0.3..500, scale 4).
    static RefinementConfig defaults(Backend backend);

    NoiseSchedule make_schedule() const { return build_schedule(steps, sigma_min, sigma_max, rho); }
    void validate() const;
};

/// States and crafted noises of an edit-friendly DDPM inversion. Replaying
/// sample_ancestral from any index with the stored noises and the source
/// condition reproduces the stored states.
struct InversionTrajectory {
    std::vector<Latent> states;  // z_0..z_N, states[0] = z_syn
    std::vector<Latent> noises;  // w_1..w_N at noises[i-1]
    Condition source;
};

/// SDEdit: noise the input to index n with a single Gaussian draw, then run
/// the deterministic DPM-Solver++(2M) back to a clean latent under the
/// target condition. n = 0 returns the input unchanged.
Latent refine_sdedit(const Latent& z_syn, const RefinementConfig& cfg,
                     const NoiseSchedule& schedule, const Denoiser& denoiser);

/// Edit-friendly noise construction: z_i = z_syn + sigma_i * eps_i with
/// independent eps_i, then w_i solved from the exposed ancestral
/// decomposition. Inversion uses the plain conditional denoiser (no CFG).
/// zero_eps forces all eps_i = 0 (degenerate fixture: z_i = z_syn).
InversionTrajectory invert_ddpm(const Latent& z_syn, const NoiseSchedule& schedule,
                                const Denoiser& denoiser, const Condition& cond_src,
                                uint64_t seed, bool zero_eps = false);

/// ZETA: invert with cond_src, then re-sample from index n with the crafted
/// noises under cond_tgt (CFG at cfg.guidance_scale). With cond_tgt =
/// cond_src and unit guidance this reconstructs the input.
Latent refine_zeta(const Latent& z_syn, const RefinementConfig& cfg, const NoiseSchedule& schedule,
                   const Denoiser& denoiser);

struct ChunkInfo {
    size_t start = 0;
    size_t length = 0;
    uint64_t seed = 0;
};

/// Chunked refinement of arbitrary-length audio: split into chunk_seconds
/// windows, refine each independently (per-chunk seeds derived from the run
/// seed and chunk index), join with a linear crossfade over
/// overlap_samples. Length preserving.
Waveform refine_long(const Waveform& audio, const RefinementConfig& cfg,
                     const NoiseSchedule& schedule, const Denoiser& denoiser,
                     const OrthonormalCodec& codec, std::vector<ChunkInfo>* chunks_out = nullptr);

}  // namespace cosaref
