#include "cosaref/evaluate.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "cosaref/fft.hpp"

namespace cosaref {

void EmbeddingSet::add(std::vector<double> v) {
    if (dimension == 0) dimension = static_cast<int>(v.size());
    if (static_cast<int>(v.size()) != dimension)
        throw EvalError("embedding dimension mismatch in set '" + source_tag + "'");
    vectors.push_back(std::move(v));
}

namespace {

constexpr int kNumBands = 14;
constexpr int kWindow = 1024;
constexpr int kHop = 256;
constexpr double kLogFloor = 1e-10;

// triangular band filters, log-spaced between f_lo and f_hi
std::vector<std::vector<double>> band_filters(int rate, int n_bins) {
    const double f_lo = 60.0;
    const double f_hi = 0.45 * rate;
    std::vector<double> edges(kNumBands + 2);
    for (int b = 0; b < kNumBands + 2; ++b)
        edges[b] = f_lo * std::pow(f_hi / f_lo, static_cast<double>(b) / (kNumBands + 1));
    std::vector<std::vector<double>> filters(kNumBands, std::vector<double>(n_bins, 0.0));
    const double bin_hz = static_cast<double>(rate) / kWindow;
    for (int b = 0; b < kNumBands; ++b) {
        const double lo = edges[b], mid = edges[b + 1], hi = edges[b + 2];
        for (int k = 0; k < n_bins; ++k) {
            const double f = k * bin_hz;
            if (f <= lo || f >= hi) continue;
            filters[b][k] = (f < mid) ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
        }
    }
    return filters;
}

}  // namespace

std::vector<double> embed_toy(const Waveform& audio) {
    if (audio.length() == 0) throw EvalError("cannot embed empty audio");
    const Waveform mono = audio.to_mono();
    const std::vector<float>& x = mono.channels[0];

    const int n_bins = kWindow / 2 + 1;
    static thread_local int cached_rate = 0;
    static thread_local std::vector<std::vector<double>> filters;
    if (cached_rate != mono.sample_rate) {
        filters = band_filters(mono.sample_rate, n_bins);
        cached_rate = mono.sample_rate;
    }

    const size_t n_frames = (x.size() < kWindow) ? 1 : 1 + (x.size() - kWindow) / kHop;
    std::vector<std::vector<double>> log_bands(n_frames, std::vector<double>(kNumBands));

    std::vector<std::complex<double>> buf(kWindow);
    for (size_t t = 0; t < n_frames; ++t) {
        for (int k = 0; k < kWindow; ++k) {
            const size_t idx = t * kHop + k;
            const double w = 0.5 * (1.0 - std::cos(2.0 * M_PI * k / (kWindow - 1)));
            buf[static_cast<size_t>(k)] = (idx < x.size()) ? x[idx] * w : 0.0;
        }
        auto frame = buf;
        fft_inplace(frame);
        std::vector<double> power(n_bins);
        for (int k = 0; k < n_bins; ++k) power[k] = std::norm(frame[static_cast<size_t>(k)]);
        for (int b = 0; b < kNumBands; ++b) {
            double e = 0.0;
            for (int k = 0; k < n_bins; ++k) e += filters[b][k] * power[k];
            log_bands[t][b] = std::log(std::max(e, kLogFloor));
        }
    }

    std::vector<double> emb;
    emb.reserve(kEmbeddingDim);
    for (int b = 0; b < kNumBands; ++b) {
        double mean = 0.0;
        for (size_t t = 0; t < n_frames; ++t) mean += log_bands[t][b];
        mean /= static_cast<double>(n_frames);
        double var = 0.0;
        for (size_t t = 0; t < n_frames; ++t) var += (log_bands[t][b] - mean) * (log_bands[t][b] - mean);
        var /= static_cast<double>(n_frames);
        emb.push_back(mean);
        emb.push_back(std::sqrt(var));
    }
    // spectral flux over log band energies
    std::vector<double> flux;
    for (size_t t = 1; t < n_frames; ++t) {
        double acc = 0.0;
        for (int b = 0; b < kNumBands; ++b) {
            const double d = log_bands[t][b] - log_bands[t - 1][b];
            acc += d * d;
        }
        flux.push_back(std::sqrt(acc / kNumBands));
    }
    double fmean = 0.0, fstd = 0.0, fmax = 0.0, frms = 0.0;
    if (!flux.empty()) {
        for (double v : flux) {
            fmean += v;
            fmax = std::max(fmax, v);
            frms += v * v;
        }
        fmean /= static_cast<double>(flux.size());
        frms = std::sqrt(frms / static_cast<double>(flux.size()));
        for (double v : flux) fstd += (v - fmean) * (v - fmean);
        fstd = std::sqrt(fstd / static_cast<double>(flux.size()));
    }
    emb.push_back(fmean);
    emb.push_back(fstd);
    emb.push_back(fmax);
    emb.push_back(frms);
    return emb;
}

double frechet_distance(const EmbeddingSet& a, const EmbeddingSet& b) {
    if (a.dimension != b.dimension) throw EvalError("embedding sets have different dimensions");
    if (a.size() < 2 || b.size() < 2) throw EvalError("embedding sets need at least 2 vectors");
    const int k = a.dimension;

    auto moments = [k](const EmbeddingSet& s, Eigen::VectorXd& mu, Eigen::MatrixXd& cov) {
        const auto n = static_cast<Eigen::Index>(s.size());
        Eigen::MatrixXd X(n, k);
        for (Eigen::Index i = 0; i < n; ++i)
            for (int j = 0; j < k; ++j) X(i, j) = s.vectors[static_cast<size_t>(i)][static_cast<size_t>(j)];
        mu = X.colwise().mean();
        Eigen::MatrixXd centered = X.rowwise() - mu.transpose();
        cov = centered.transpose() * centered / static_cast<double>(n - 1);
        cov += 1e-6 * Eigen::MatrixXd::Identity(k, k);
    };

    Eigen::VectorXd mu_a, mu_b;
    Eigen::MatrixXd cov_a, cov_b;
    moments(a, mu_a, cov_a);
    moments(b, mu_b, cov_b);

    // tr((S_A S_B)^{1/2}) via the symmetric product S_A^{1/2} S_B S_A^{1/2}
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_a(cov_a);
    Eigen::VectorXd ev = es_a.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd sqrt_a = es_a.eigenvectors() * ev.asDiagonal() * es_a.eigenvectors().transpose();
    Eigen::MatrixXd prod = sqrt_a * cov_b * sqrt_a;
    prod = 0.5 * (prod + prod.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_p(prod);
    const double trace_sqrt = es_p.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();

    const double mean_term = (mu_a - mu_b).squaredNorm();
    const double d = mean_term + cov_a.trace() + cov_b.trace() - 2.0 * trace_sqrt;
    return std::max(0.0, d);
}

std::vector<TranscribedNote> transcribe_mono(const Waveform& audio) {
    const Waveform mono = audio.to_mono();
    const std::vector<float>& x = mono.channels[0];
    const int rate = mono.sample_rate;
    const int hop = rate / 100;          // 10 ms
    const int win = rate * 4 / 100;      // 40 ms analysis window
    const int tau_min = std::max(2, rate / 2000);
    const int tau_max = rate / 60;
    if (static_cast<int>(x.size()) < win) return {};

    float global_peak = 0.0f;
    for (float v : x) global_peak = std::max(global_peak, std::abs(v));
    if (global_peak <= 0.0f) return {};
    const double energy_gate = 0.02 * global_peak * global_peak;

    struct FramePitch {
        bool voiced;
        double midi;
        double conf;
    };
    const size_t n_frames = (x.size() - win) / hop + 1;
    std::vector<FramePitch> frames(n_frames, {false, 0.0, 0.0});

#pragma omp parallel for schedule(static)
    for (long long t = 0; t < static_cast<long long>(n_frames); ++t) {
        const float* seg = x.data() + static_cast<size_t>(t) * hop;
        double r0 = 0.0;
        for (int k = 0; k < win; ++k) r0 += static_cast<double>(seg[k]) * seg[k];
        if (r0 / win < energy_gate) continue;

        double best = 0.0;
        int best_tau = 0;
        for (int tau = tau_min; tau <= tau_max && tau < win; ++tau) {
            double acc = 0.0, norm = 0.0;
            for (int k = 0; k + tau < win; ++k) {
                acc += static_cast<double>(seg[k]) * seg[k + tau];
                norm += static_cast<double>(seg[k + tau]) * seg[k + tau];
            }
            const double r = acc / std::sqrt(std::max(1e-12, r0 * norm));
            if (r > best) {
                best = r;
                best_tau = tau;
            }
        }
        if (best < 0.5 || best_tau == 0) continue;
        const double f0 = static_cast<double>(rate) / best_tau;
        frames[static_cast<size_t>(t)] = {true, 69.0 + 12.0 * std::log2(f0 / 440.0), best};
    }

    std::vector<TranscribedNote> notes;
    const double hop_s = static_cast<double>(hop) / rate;
    size_t seg_start = 0;
    bool in_seg = false;
    double seg_ref = 0.0;  // pitch anchor of the open segment
    auto flush = [&](size_t seg_end) {  // [seg_start, seg_end)
        const double dur = static_cast<double>(seg_end - seg_start) * hop_s;
        if (dur < 0.05) return;  // segments under 50 ms discarded
        std::vector<double> pitches;
        double conf = 0.0;
        for (size_t t = seg_start; t < seg_end; ++t) {
            pitches.push_back(frames[t].midi);
            conf += frames[t].conf;
        }
        std::sort(pitches.begin(), pitches.end());
        const double median = pitches[pitches.size() / 2];
        TranscribedNote n;
        n.pitch = std::clamp(static_cast<int>(std::lround(median)), 0, 127);
        n.onset_s = static_cast<double>(seg_start) * hop_s;
        n.offset_s = static_cast<double>(seg_end) * hop_s;
        n.confidence = std::min(1.0, conf / static_cast<double>(seg_end - seg_start));
        notes.push_back(n);
    };
    for (size_t t = 0; t < n_frames; ++t) {
        if (frames[t].voiced) {
            if (!in_seg) {
                in_seg = true;
                seg_start = t;
                seg_ref = frames[t].midi;
            } else if (std::abs(frames[t].midi - seg_ref) > 0.6) {
                // anchored to the segment start so slow glides across a note
                // boundary still split
                flush(t);
                seg_start = t;
                seg_ref = frames[t].midi;
            }
        } else if (in_seg) {
            flush(t);
            in_seg = false;
        }
    }
    if (in_seg) flush(n_frames);
    return notes;
}

F1Result note_f1(const std::vector<NoteEvent>& reference,
                 const std::vector<TranscribedNote>& hypothesis, double onset_tol_s) {
    std::vector<bool> hyp_used(hypothesis.size(), false);
    auto refs = reference;
    std::sort(refs.begin(), refs.end(),
              [](const NoteEvent& a, const NoteEvent& b) { return a.onset_s < b.onset_s; });

    int matched = 0;
    for (const auto& r : refs) {
        int best = -1;
        double best_dt = onset_tol_s;
        for (size_t h = 0; h < hypothesis.size(); ++h) {
            if (hyp_used[h] || hypothesis[h].pitch != r.pitch) continue;
            const double dt = std::abs(hypothesis[h].onset_s - r.onset_s);
            if (dt <= best_dt) {
                best_dt = dt;
                best = static_cast<int>(h);
            }
        }
        if (best >= 0) {
            hyp_used[static_cast<size_t>(best)] = true;
            ++matched;
        }
    }

    F1Result res;
    res.matched = matched;
    res.precision = hypothesis.empty() ? 0.0 : static_cast<double>(matched) / hypothesis.size();
    res.recall = refs.empty() ? 0.0 : static_cast<double>(matched) / refs.size();
    res.f1 = (res.precision + res.recall > 0.0)
                 ? 2.0 * res.precision * res.recall / (res.precision + res.recall)
                 : 0.0;
    return res;
}

}  // namespace cosaref
