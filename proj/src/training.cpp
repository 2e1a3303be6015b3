#include "cosaref/training.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cosaref/rng.hpp"
#include "json.hpp"

namespace cosaref {

ToyDataset load_toy_dataset(const std::string& dir) {
    const auto manifest_path = std::filesystem::path(dir) / "manifest.json";
    std::ifstream f(manifest_path);
    if (!f) throw TrainingError("cannot open dataset manifest: " + manifest_path.string());
    nlohmann::json manifest;
    f >> manifest;
    ToyDataset ds;
    for (const auto& entry : manifest.at("clips")) {
        ToyClip clip;
        clip.label = entry.at("label").get<std::string>();
        const auto path = std::filesystem::path(dir) / entry.at("file").get<std::string>();
        clip.audio = wav_read(path.string());
        ds.clips.push_back(std::move(clip));
    }
    if (ds.clips.empty()) throw TrainingError("dataset is empty: " + dir);
    return ds;
}

namespace {

// gradient of one conv1d layer; accumulates dW/db and writes d_in (unless null)
void conv1d_backward(const std::vector<double>& in, int c_in, int frames, const double* w,
                     int c_out, int k, const std::vector<double>& d_out, double* d_w, double* d_b,
                     std::vector<double>* d_in) {
    const int pad = k / 2;
    for (int oc = 0; oc < c_out; ++oc) {
        const double* drow = d_out.data() + static_cast<size_t>(oc) * frames;
        double db = 0.0;
        for (int f = 0; f < frames; ++f) db += drow[f];
        d_b[oc] += db;
        for (int ic = 0; ic < c_in; ++ic) {
            const double* irow = in.data() + static_cast<size_t>(ic) * frames;
            double* dwrow = d_w + (static_cast<size_t>(oc) * c_in + ic) * k;
            for (int t = 0; t < k; ++t) {
                double acc = 0.0;
                for (int f = 0; f < frames; ++f) {
                    const int src = f + t - pad;
                    if (src < 0 || src >= frames) continue;
                    acc += drow[f] * irow[src];
                }
                dwrow[t] += acc;
            }
        }
    }
    if (d_in) {
        std::fill(d_in->begin(), d_in->end(), 0.0);
        for (int ic = 0; ic < c_in; ++ic) {
            double* dst = d_in->data() + static_cast<size_t>(ic) * frames;
            for (int oc = 0; oc < c_out; ++oc) {
                const double* wrow = w + (static_cast<size_t>(oc) * c_in + ic) * k;
                const double* drow = d_out.data() + static_cast<size_t>(oc) * frames;
                for (int g = 0; g < frames; ++g) {
                    double acc = 0.0;
                    for (int t = 0; t < k; ++t) {
                        const int f = g - t + pad;
                        if (f < 0 || f >= frames) continue;
                        acc += wrow[t] * drow[f];
                    }
                    dst[g] += acc;
                }
            }
        }
    }
}

}  // namespace

double denoiser_loss_and_grad(const Denoiser& denoiser, const Latent& z_noisy, const Latent& z0,
                              double sigma, int cond_index, std::vector<double>& grad) {
    const auto& cfg = denoiser.config();
    const int C = cfg.channels, H = cfg.hidden, K = cfg.kernel;
    const int frames = z_noisy.frames;
    const auto lay = denoiser.layout();
    const double* P = denoiser.parameters().data();
    if (grad.size() != denoiser.parameter_count())
        throw TrainingError("gradient buffer size mismatch");

    double c_skip, c_out, c_in;
    denoiser.scalings(sigma, c_skip, c_out, c_in);

    std::vector<double> x(z_noisy.size());
    for (size_t i = 0; i < x.size(); ++i) x[i] = c_in * z_noisy.values[i];

    Denoiser::Trace trace;
    const auto y = denoiser.forward_inner(x, frames, sigma, cond_index, &trace);

    const size_t n = y.size();
    // lambda(sigma) = 1 / c_out^2 equalizes the effective target scale
    // across noise levels; without it small-sigma draws get almost no
    // gradient and the denoiser never beats the skip connection there
    const double weight = 1.0 / (c_out * c_out);
    double loss = 0.0;
    std::vector<double> d_y(n);
    for (size_t i = 0; i < n; ++i) {
        const double out = c_skip * z_noisy.values[i] + c_out * y[i];
        const double err = out - z0.values[i];
        loss += weight * err * err;
        d_y[i] = 2.0 * weight * err * c_out / static_cast<double>(n);
    }
    loss /= static_cast<double>(n);

    std::vector<double> d_inject(H, 0.0);

    // conv3 backward
    std::vector<double> d_h2(static_cast<size_t>(H) * frames);
    conv1d_backward(trace.h2, H, frames, P + lay.w3, C, K, d_y, grad.data() + lay.w3,
                    grad.data() + lay.b3, &d_h2);

    // tanh + injection at layer 2
    std::vector<double> d_pre2(d_h2.size());
    for (size_t i = 0; i < d_h2.size(); ++i)
        d_pre2[i] = d_h2[i] * (1.0 - trace.h2[i] * trace.h2[i]);
    for (int h = 0; h < H; ++h)
        for (int f = 0; f < frames; ++f) d_inject[h] += d_pre2[static_cast<size_t>(h) * frames + f];

    std::vector<double> d_h1(static_cast<size_t>(H) * frames);
    conv1d_backward(trace.h1, H, frames, P + lay.w2, H, K, d_pre2, grad.data() + lay.w2,
                    grad.data() + lay.b2, &d_h1);

    std::vector<double> d_pre1(d_h1.size());
    for (size_t i = 0; i < d_h1.size(); ++i)
        d_pre1[i] = d_h1[i] * (1.0 - trace.h1[i] * trace.h1[i]);
    for (int h = 0; h < H; ++h)
        for (int f = 0; f < frames; ++f) d_inject[h] += d_pre1[static_cast<size_t>(h) * frames + f];

    conv1d_backward(trace.x, C, frames, P + lay.w1, H, K, d_pre1, grad.data() + lay.w1,
                    grad.data() + lay.b1, nullptr);

    // injection = W_sig * feats + b_sig + cond_emb[cond]
    const auto& feats = trace.feats;
    for (int h = 0; h < H; ++h) {
        for (size_t j = 0; j < feats.size(); ++j)
            grad[lay.w_sig + static_cast<size_t>(h) * feats.size() + j] += d_inject[h] * feats[j];
        grad[lay.b_sig + h] += d_inject[h];
        grad[lay.cond_emb + static_cast<size_t>(cond_index) * H + h] += d_inject[h];
    }
    return loss;
}

TrainResult train_toy_denoiser(const ToyDataset& dataset, const NoiseSchedule& schedule,
                               const TrainingConfig& config, const OrthonormalCodec& codec,
                               const std::optional<Denoiser>& init) {
    if (dataset.clips.empty()) throw TrainingError("dataset is empty");

    std::vector<std::string> labels;
    for (const auto& clip : dataset.clips)
        if (std::find(labels.begin(), labels.end(), clip.label) == labels.end())
            labels.push_back(clip.label);

    Denoiser denoiser =
        init ? *init : Denoiser(config.net, labels, Rng(config.seed).fork("net-init").next_u64());
    if (init) {
        for (const auto& l : labels) {
            const auto& vocab = denoiser.vocabulary();
            if (std::find(vocab.begin(), vocab.end(), l) == vocab.end())
                throw TrainingError("dataset label '" + l +
                                    "' missing from the initial checkpoint vocabulary");
        }
    }

    // pre-encode all clips
    std::vector<Latent> latents;
    std::vector<int> cond_of_clip;
    for (const auto& clip : dataset.clips) {
        latents.push_back(codec.encode(clip.audio));
        cond_of_clip.push_back(denoiser.resolve(clip.label).index);
    }
    for (const auto& z : latents)
        if (!z.all_finite()) throw TrainingError("clip encodes to non-finite latent");

    TrainResult result;
    if (config.steps == 0) {
        result.denoiser = std::move(denoiser);
        return result;
    }

    const size_t n_params = denoiser.parameter_count();
    std::vector<double> m(n_params, 0.0), v(n_params, 0.0);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

    Rng rng = Rng(config.seed).fork("training");

    for (int step = 1; step <= config.steps; ++step) {
        struct Draw {
            int clip;
            int i;
            int cond;
            uint64_t noise_seed;
        };
        std::vector<Draw> draws(config.batch_size);
        for (auto& d : draws) {
            d.clip = static_cast<int>(rng.uniform_int(latents.size()));
            d.i = 1 + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(schedule.steps)));
            d.cond = (rng.uniform() < config.label_drop_rate) ? Denoiser::kNullCondition
                                                              : cond_of_clip[d.clip];
            d.noise_seed = rng.next_u64();
        }

        std::vector<std::vector<double>> grads(config.batch_size,
                                               std::vector<double>(n_params, 0.0));
        std::vector<double> losses(config.batch_size, 0.0);

#pragma omp parallel for schedule(dynamic)
        for (int b = 0; b < config.batch_size; ++b) {
            const Draw& d = draws[b];
            const Latent& z0 = latents[d.clip];
            Latent noise = z0;
            Rng nrng(d.noise_seed);
            for (auto& w : noise.values) w = static_cast<float>(nrng.normal());
            const Latent z_noisy = forward_diffuse(z0, d.i, schedule, noise);
            losses[b] = denoiser_loss_and_grad(denoiser, z_noisy, z0, schedule.sigma(d.i), d.cond,
                                               grads[b]);
        }

        double loss = 0.0;
        for (double l : losses) loss += l;
        loss /= config.batch_size;
        if (!std::isfinite(loss))
            throw TrainingError("training loss diverged (non-finite) at step " +
                                std::to_string(step));
        result.losses.push_back(loss);

        // deterministic reduction in batch order, then Adam
        std::vector<double>& g = grads[0];
        for (int b = 1; b < config.batch_size; ++b)
            for (size_t i = 0; i < n_params; ++i) g[i] += grads[b][i];
        const double inv_batch = 1.0 / config.batch_size;
        const double bc1 = 1.0 - std::pow(beta1, step);
        const double bc2 = 1.0 - std::pow(beta2, step);
        auto& params = denoiser.parameters();
        for (size_t i = 0; i < n_params; ++i) {
            const double gi = g[i] * inv_batch;
            m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
            v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
            params[i] -= config.learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
        }

        if (config.log_every > 0 && (step % config.log_every == 0 || step == 1))
            std::clog << "train step " << step << "/" << config.steps << "  loss " << loss << "\n";
    }

    result.denoiser = std::move(denoiser);
    return result;
}

}  // namespace cosaref
