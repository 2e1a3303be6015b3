#include "cosaref/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iostream>
#include <set>

#include "cosaref/kernels.hpp"
#include "cosaref/rng.hpp"

namespace cosaref {

std::string condition_from_metadata(const std::string& instrument, ConditionStyle style) {
    if (instrument.empty()) throw DenoiserError("instrument label must be non-empty");
    switch (style) {
        case ConditionStyle::Source:
            return "synthetic, " + instrument;
        case ConditionStyle::Target:
            return "realistic, " + instrument;
        case ConditionStyle::FullTemplate:
            return "Solo, realistic, " + instrument + ", classical, well-recorded, professional";
    }
    throw DenoiserError("unknown condition style");
}

Denoiser::Denoiser(const DenoiserConfig& cfg, std::vector<std::string> labels, uint64_t init_seed)
    : cfg_(cfg) {
    vocab_.push_back("");  // null condition
    for (auto& l : labels)
        if (!l.empty() && std::find(vocab_.begin(), vocab_.end(), l) == vocab_.end())
            vocab_.push_back(std::move(l));

    for (int j = 0; j < cfg_.n_fourier; ++j) fourier_freqs_.push_back(0.25 * std::pow(2.0, j));

    const Layout lay = layout();
    params_.assign(lay.total, 0.0);
    Rng rng = Rng(init_seed).fork("denoiser-init");
    auto init_block = [&](size_t off, size_t count, double stddev) {
        for (size_t i = 0; i < count; ++i) params_[off + i] = stddev * rng.normal();
    };
    const int C = cfg_.channels, H = cfg_.hidden, K = cfg_.kernel;
    init_block(lay.w1, static_cast<size_t>(H) * C * K, 1.0 / std::sqrt(double(C) * K));
    init_block(lay.w2, static_cast<size_t>(H) * H * K, 1.0 / std::sqrt(double(H) * K));
    init_block(lay.w3, static_cast<size_t>(C) * H * K, 1.0 / std::sqrt(double(H) * K));
    init_block(lay.w_sig, static_cast<size_t>(H) * 2 * cfg_.n_fourier,
               1.0 / std::sqrt(2.0 * cfg_.n_fourier));
    init_block(lay.cond_emb, vocab_.size() * static_cast<size_t>(H), 0.3);
}

Denoiser::Layout Denoiser::layout() const {
    const size_t C = cfg_.channels, H = cfg_.hidden, K = cfg_.kernel;
    const size_t F2 = 2 * static_cast<size_t>(cfg_.n_fourier);
    Layout l{};
    size_t off = 0;
    l.w1 = off, off += H * C * K;
    l.b1 = off, off += H;
    l.w2 = off, off += H * H * K;
    l.b2 = off, off += H;
    l.w3 = off, off += C * H * K;
    l.b3 = off, off += C;
    l.w_sig = off, off += H * F2;
    l.b_sig = off, off += H;
    l.cond_emb = off, off += vocab_.size() * H;
    l.total = off;
    return l;
}

std::vector<double> Denoiser::sigma_features(double sigma) const {
    const double s = std::log(std::max(sigma, 1e-12));
    std::vector<double> feats;
    feats.reserve(2 * fourier_freqs_.size());
    for (double f : fourier_freqs_) {
        feats.push_back(std::sin(f * s));
        feats.push_back(std::cos(f * s));
    }
    return feats;
}

void Denoiser::scalings(double sigma, double& c_skip, double& c_out, double& c_in) const {
    const double sd2 = cfg_.sigma_data * cfg_.sigma_data;
    const double denom = sigma * sigma + sd2;
    c_skip = sd2 / denom;
    c_out = sigma * cfg_.sigma_data / std::sqrt(denom);
    c_in = 1.0 / std::sqrt(denom);
}

std::vector<double> Denoiser::forward_inner(const std::vector<double>& x_scaled, int frames,
                                            double sigma, int cond_index, Trace* trace) const {
    const int C = cfg_.channels, H = cfg_.hidden, K = cfg_.kernel;
    if (cond_index < 0 || cond_index >= static_cast<int>(vocab_.size()))
        throw DenoiserError("condition index out of range");
    const Layout lay = layout();
    const double* P = params_.data();

    const auto feats = sigma_features(sigma);
    std::vector<double> inject(H);
    for (int h = 0; h < H; ++h) {
        double acc = P[lay.b_sig + h];
        for (size_t j = 0; j < feats.size(); ++j)
            acc += P[lay.w_sig + static_cast<size_t>(h) * feats.size() + j] * feats[j];
        acc += P[lay.cond_emb + static_cast<size_t>(cond_index) * H + h];
        inject[h] = acc;
    }

    auto conv = [&](const std::vector<double>& in, int c_in_n, size_t w_off, size_t b_off,
                    int c_out_n) {
        std::vector<double> out(static_cast<size_t>(c_out_n) * frames);
#ifdef _OPENMP
        kernels::conv1d_omp(in.data(), c_in_n, frames, P + w_off, P + b_off, c_out_n, K, out.data());
#else
        kernels::conv1d_serial(in.data(), c_in_n, frames, P + w_off, P + b_off, c_out_n, K,
                               out.data());
#endif
        return out;
    };

    std::vector<double> pre1 = conv(x_scaled, C, lay.w1, lay.b1, H);
    for (int h = 0; h < H; ++h)
        for (int f = 0; f < frames; ++f) pre1[static_cast<size_t>(h) * frames + f] += inject[h];
    std::vector<double> h1(pre1.size());
    for (size_t i = 0; i < pre1.size(); ++i) h1[i] = std::tanh(pre1[i]);

    std::vector<double> pre2 = conv(h1, H, lay.w2, lay.b2, H);
    for (int h = 0; h < H; ++h)
        for (int f = 0; f < frames; ++f) pre2[static_cast<size_t>(h) * frames + f] += inject[h];
    std::vector<double> h2(pre2.size());
    for (size_t i = 0; i < pre2.size(); ++i) h2[i] = std::tanh(pre2[i]);

    std::vector<double> y = conv(h2, H, lay.w3, lay.b3, C);

    if (trace) {
        trace->x = x_scaled;
        trace->pre1 = std::move(pre1);
        trace->h1 = h1;
        trace->pre2 = std::move(pre2);
        trace->h2 = h2;
        trace->inject = inject;
        trace->feats = feats;
        trace->y = y;
    }
    return y;
}

Latent Denoiser::denoise(const Latent& z, double sigma, int cond_index) const {
    if (z.channels != cfg_.channels)
        throw DenoiserError("latent channels do not match denoiser configuration");
    double c_skip, c_out, c_in;
    scalings(sigma, c_skip, c_out, c_in);

    std::vector<double> x(z.size());
    for (size_t i = 0; i < x.size(); ++i) x[i] = c_in * z.values[i];
    const auto y = forward_inner(x, z.frames, sigma, cond_index, nullptr);

    Latent out = z;
    for (size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = static_cast<float>(c_skip * z.values[i] + c_out * y[i]);
    return out;
}

Condition Denoiser::resolve(const std::string& label) const {
    for (size_t i = 0; i < vocab_.size(); ++i)
        if (vocab_[i] == label) return {label, static_cast<int>(i)};
    static std::set<std::string> warned;
    if (warned.insert(label).second)
        std::cerr << "warning: unknown condition label '" << label
                  << "', using the null condition\n";
    return {label, kNullCondition};
}

namespace {
constexpr char kMagic[4] = {'C', 'S', 'C', 'K'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ofstream& f, uint32_t v) {
    uint8_t b[4] = {uint8_t(v & 0xff), uint8_t((v >> 8) & 0xff), uint8_t((v >> 16) & 0xff),
                    uint8_t((v >> 24) & 0xff)};
    f.write(reinterpret_cast<const char*>(b), 4);
}
uint32_t read_u32(std::ifstream& f) {
    uint8_t b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    if (!f) throw DenoiserError("truncated checkpoint");
    return b[0] | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) | (uint32_t(b[3]) << 24);
}
}  // namespace

void Denoiser::save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DenoiserError("cannot write checkpoint: " + path);
    f.write(kMagic, 4);
    write_u32(f, kVersion);
    write_u32(f, static_cast<uint32_t>(cfg_.channels));
    write_u32(f, static_cast<uint32_t>(cfg_.hidden));
    write_u32(f, static_cast<uint32_t>(cfg_.kernel));
    write_u32(f, static_cast<uint32_t>(cfg_.n_fourier));
    const float sd = static_cast<float>(cfg_.sigma_data);
    f.write(reinterpret_cast<const char*>(&sd), 4);
    write_u32(f, static_cast<uint32_t>(vocab_.size()));
    for (const auto& label : vocab_) {
        write_u32(f, static_cast<uint32_t>(label.size()));
        f.write(label.data(), static_cast<std::streamsize>(label.size()));
    }
    write_u32(f, static_cast<uint32_t>(params_.size()));
    for (double p : params_) {
        const float v = static_cast<float>(p);
        f.write(reinterpret_cast<const char*>(&v), 4);
    }
}

Denoiser Denoiser::load(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DenoiserError("cannot open checkpoint: " + path);
    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kMagic, 4) != 0)
        throw DenoiserError("not a denoiser checkpoint: " + path);
    const uint32_t version = read_u32(f);
    if (version != kVersion)
        throw DenoiserError("unsupported checkpoint version " + std::to_string(version));

    Denoiser d;
    d.cfg_.channels = static_cast<int>(read_u32(f));
    d.cfg_.hidden = static_cast<int>(read_u32(f));
    d.cfg_.kernel = static_cast<int>(read_u32(f));
    d.cfg_.n_fourier = static_cast<int>(read_u32(f));
    float sd;
    f.read(reinterpret_cast<char*>(&sd), 4);
    d.cfg_.sigma_data = sd;
    const uint32_t vocab_size = read_u32(f);
    for (uint32_t i = 0; i < vocab_size; ++i) {
        const uint32_t len = read_u32(f);
        std::string label(len, '\0');
        f.read(label.data(), len);
        d.vocab_.push_back(std::move(label));
    }
    for (int j = 0; j < d.cfg_.n_fourier; ++j) d.fourier_freqs_.push_back(0.25 * std::pow(2.0, j));
    const uint32_t n_params = read_u32(f);
    if (n_params != d.layout().total)
        throw DenoiserError("checkpoint parameter count does not match its shape table");
    d.params_.resize(n_params);
    for (uint32_t i = 0; i < n_params; ++i) {
        float v;
        f.read(reinterpret_cast<char*>(&v), 4);
        d.params_[i] = v;
    }
    if (!f) throw DenoiserError("truncated checkpoint: " + path);
    return d;
}

Latent denoise_cfg(const Denoiser& denoiser, const Latent& z, double sigma, const Condition& cond,
                   double scale) {
    if (scale == 1.0) return denoiser.denoise(z, sigma, cond.index);
    const Latent d_null = denoiser.denoise(z, sigma, Denoiser::kNullCondition);
    if (scale == 0.0) return d_null;
    const Latent d_cond = denoiser.denoise(z, sigma, cond.index);
    Latent out = d_null;
    for (size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = static_cast<float>(d_null.values[i] +
                                           scale * (double(d_cond.values[i]) - d_null.values[i]));
    return out;
}

}  // namespace cosaref
