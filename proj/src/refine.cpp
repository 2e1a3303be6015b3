#include "cosaref/refine.hpp"

#include <algorithm>
#include <cmath>

#include "cosaref/rng.hpp"

namespace cosaref {

std::string backend_name(Backend b) { return b == Backend::SDEdit ? "sdedit" : "zeta"; }

Backend backend_from_name(const std::string& name) {
    if (name == "sdedit" || name == "SDEdit") return Backend::SDEdit;
    if (name == "zeta" || name == "ZETA") return Backend::Zeta;
    throw RefineError("unknown refinement backend: " + name);
}

RefinementConfig RefinementConfig::defaults(Backend backend) {
    RefinementConfig cfg;
    cfg.backend = backend;
    if (backend == Backend::SDEdit) {
        cfg.steps = 250;
        cfg.start_index = 150;
        cfg.sigma_min = 0.05;
        cfg.sigma_max = 16.0;
        cfg.guidance_scale = 7.0;
    } else {
        cfg.steps = 200;
        cfg.start_index = 70;
        cfg.sigma_min = 0.3;
        cfg.sigma_max = 500.0;
        cfg.guidance_scale = 4.0;
    }
    return cfg;
}

void RefinementConfig::validate() const {
    if (start_index < 0 || start_index > steps)
        throw RefineError("start index n must satisfy 0 <= n <= N");
    if (backend == Backend::SDEdit && cond.empty())
        throw RefineError("SDEdit requires a target condition");
    if (backend == Backend::Zeta && (cond_src.empty() || cond_tgt.empty()))
        throw RefineError("ZETA requires source and target conditions");
    if (overlap_samples < 0 || chunk_seconds <= 0.0)
        throw RefineError("invalid chunk configuration");
}

namespace {

Latent gaussian_latent(const Latent& shape, Rng& rng) {
    Latent w = shape;
    for (auto& v : w.values) v = static_cast<float>(rng.normal());
    return w;
}

}  // namespace

Latent refine_sdedit(const Latent& z_syn, const RefinementConfig& cfg,
                     const NoiseSchedule& schedule, const Denoiser& denoiser) {
    if (cfg.backend != Backend::SDEdit)
        throw RefineError("refine_sdedit called with a non-SDEdit config");
    cfg.validate();
    if (cfg.start_index == 0) return z_syn;

    Rng rng = Rng(cfg.seed).fork("sdedit-noise");
    const double sigma_n = schedule.sigma(cfg.start_index);
    Latent z_n = z_syn;
    for (auto& v : z_n.values) v = static_cast<float>(v + sigma_n * rng.normal());

    const Condition cond = denoiser.resolve(cfg.cond);
    return sample_dpmpp2m(z_n, cfg.start_index, schedule, denoiser, cond, cfg.guidance_scale);
}

InversionTrajectory invert_ddpm(const Latent& z_syn, const NoiseSchedule& schedule,
                                const Denoiser& denoiser, const Condition& cond_src,
                                uint64_t seed, bool zero_eps) {
    const int N = schedule.steps;
    InversionTrajectory traj;
    traj.source = cond_src;
    traj.states.resize(static_cast<size_t>(N) + 1);
    traj.noises.resize(static_cast<size_t>(N));
    traj.states[0] = z_syn;

    Rng rng = Rng(seed).fork("ddpm-inversion");
    for (int i = 1; i <= N; ++i) {
        Latent z_i = z_syn;
        if (!zero_eps) {
            const Latent eps = gaussian_latent(z_syn, rng);
            const double sig = schedule.sigma(i);
            for (size_t k = 0; k < z_i.values.size(); ++k)
                z_i.values[k] = static_cast<float>(z_syn.values[k] + sig * eps.values[k]);
        }
        traj.states[static_cast<size_t>(i)] = std::move(z_i);
    }

    for (int i = N; i >= 1; --i) {
        const Latent& z_i = traj.states[static_cast<size_t>(i)];
        const Latent& z_prev = traj.states[static_cast<size_t>(i) - 1];
        const double sigma = schedule.sigma(i);
        const double sigma_next = (i > 1) ? schedule.sigma(i - 1) : 0.0;
        // plain conditional denoiser: guidance here would break the replay identity
        const Latent z0_pred = denoiser.denoise(z_i, sigma, cond_src.index);
        const AncestralStep step = ancestral_step(z_i, z0_pred, sigma, sigma_next);

        Latent w = z_syn;
        if (step.sigma_up > 0.0) {
            for (size_t k = 0; k < w.values.size(); ++k)
                w.values[k] = static_cast<float>(
                    (double(z_prev.values[k]) - step.mean.values[k]) / step.sigma_up);
        } else {
            if (relative_l2(z_prev, step.mean) > 1e-5)
                throw RefineError("inversion inconsistency: zero-noise step cannot reach target");
            std::fill(w.values.begin(), w.values.end(), 0.0f);
        }
        traj.noises[static_cast<size_t>(i) - 1] = std::move(w);
    }
    return traj;
}

Latent refine_zeta(const Latent& z_syn, const RefinementConfig& cfg, const NoiseSchedule& schedule,
                   const Denoiser& denoiser) {
    if (cfg.backend != Backend::Zeta) throw RefineError("refine_zeta called with a non-ZETA config");
    cfg.validate();
    if (cfg.start_index == 0) return z_syn;

    const Condition cond_src = denoiser.resolve(cfg.cond_src);
    const Condition cond_tgt = denoiser.resolve(cfg.cond_tgt);
    const InversionTrajectory traj = invert_ddpm(z_syn, schedule, denoiser, cond_src, cfg.seed);

    const Latent& z_start = traj.states[static_cast<size_t>(cfg.start_index)];
    return sample_ancestral(z_start, cfg.start_index, schedule, denoiser, cond_tgt,
                            cfg.guidance_scale,
                            [&](int i) { return traj.noises[static_cast<size_t>(i) - 1]; });
}

Waveform refine_long(const Waveform& audio, const RefinementConfig& cfg,
                     const NoiseSchedule& schedule, const Denoiser& denoiser,
                     const OrthonormalCodec& codec, std::vector<ChunkInfo>* chunks_out) {
    cfg.validate();
    if (audio.length() == 0) throw RefineError("cannot refine empty audio");

    const Waveform mono = audio.to_mono();
    const std::vector<float>& in = mono.channels[0];
    const size_t len = in.size();
    const size_t chunk_len =
        std::max<size_t>(1, static_cast<size_t>(std::llround(cfg.chunk_seconds * mono.sample_rate)));
    const size_t overlap = std::min<size_t>(cfg.overlap_samples, chunk_len - 1);
    const size_t stride = chunk_len - overlap;

    std::vector<ChunkInfo> chunks;
    if (len <= chunk_len) {
        chunks.push_back({0, len, Rng(cfg.seed).fork("chunk", 0).next_u64()});
    } else {
        size_t start = 0;
        size_t index = 0;
        while (true) {
            if (start + chunk_len >= len) {
                chunks.push_back({len - chunk_len, chunk_len,
                                  Rng(cfg.seed).fork("chunk", index).next_u64()});
                break;
            }
            chunks.push_back({start, chunk_len, Rng(cfg.seed).fork("chunk", index).next_u64()});
            start += stride;
            ++index;
        }
    }

    std::vector<std::vector<float>> refined(chunks.size());

#pragma omp parallel for schedule(dynamic)
    for (long long c = 0; c < static_cast<long long>(chunks.size()); ++c) {
        const ChunkInfo& info = chunks[static_cast<size_t>(c)];
        Waveform piece(mono.sample_rate, 1, info.length);
        std::copy(in.begin() + static_cast<long>(info.start),
                  in.begin() + static_cast<long>(info.start + info.length),
                  piece.channels[0].begin());
        const Latent z_syn = codec.encode(piece);

        RefinementConfig chunk_cfg = cfg;
        chunk_cfg.seed = info.seed;
        const Latent z_out = (cfg.backend == Backend::SDEdit)
                                 ? refine_sdedit(z_syn, chunk_cfg, schedule, denoiser)
                                 : refine_zeta(z_syn, chunk_cfg, schedule, denoiser);
        Waveform decoded = codec.decode(z_out);
        decoded.channels[0].resize(info.length);  // drop codec padding
        refined[static_cast<size_t>(c)] = std::move(decoded.channels[0]);
    }

    Waveform out(mono.sample_rate, 1, len);
    std::vector<float>& dst = out.channels[0];
    size_t written_end = 0;
    for (size_t c = 0; c < chunks.size(); ++c) {
        const ChunkInfo& info = chunks[c];
        const std::vector<float>& piece = refined[c];
        for (size_t k = 0; k < piece.size(); ++k) {
            const size_t j = info.start + k;
            if (j < written_end) {
                // linear crossfade inside the overlap with the previous chunk
                const size_t fade_len = written_end - info.start;
                const double w = static_cast<double>(k + 1) / (fade_len + 1);
                dst[j] = static_cast<float>((1.0 - w) * dst[j] + w * piece[k]);
            } else {
                dst[j] = piece[k];
            }
        }
        written_end = std::max(written_end, info.start + piece.size());
    }
    if (chunks_out) *chunks_out = std::move(chunks);
    return out;
}

}  // namespace cosaref
