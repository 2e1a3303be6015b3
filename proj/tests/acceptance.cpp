// Acceptance harness: one pass/fail line per criterion, nonzero exit if
// any criterion fails. Kept separate from the doctest suite because the
// criteria are end-to-end properties with their own runtime budgets.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "cosaref/commands.hpp"
#include "cosaref/evaluate.hpp"
#include "cosaref/refine.hpp"
#include "cosaref/rng.hpp"
#include "cosaref/sampler.hpp"
#include "cosaref/toycorpus.hpp"
#include "cosaref/training.hpp"

using namespace cosaref;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int index, bool pass, const std::string& what, const std::string& detail) {
    std::printf("%s [%2d] %s (%s)\n", pass ? "PASS" : "FAIL", index, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Latent random_latent(int c, int f, uint64_t seed) {
    Latent z(c, f, c, 16000);
    Rng rng(seed);
    for (auto& v : z.values) v = static_cast<float>(rng.normal());
    return z;
}

Denoiser small_denoiser(int channels, int hidden, uint64_t seed) {
    DenoiserConfig cfg;
    cfg.channels = channels;
    cfg.hidden = hidden;
    return Denoiser(cfg, {"synthetic, violin", "realistic, violin"}, seed);
}

// ---------------------------------------------------------------- criterion 1
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    const Denoiser den = small_denoiser(32, 16, 7);
    RefinementConfig cfg = RefinementConfig::defaults(Backend::Zeta);
    cfg.steps = 50;
    cfg.start_index = 50;
    cfg.sigma_min = 0.3;
    cfg.sigma_max = 500.0;
    cfg.guidance_scale = 1.0;
    cfg.cond_src = "synthetic, violin";
    cfg.cond_tgt = "synthetic, violin";
    const NoiseSchedule sched = cfg.make_schedule();
    double worst = 0.0;
    for (uint64_t seed = 0; seed < 20; ++seed) {
        cfg.seed = seed;
        const Latent z = random_latent(32, 64, 1000 + seed);
        const Latent out = refine_zeta(z, cfg, sched, den);
        worst = std::max(worst, relative_l2(out, z));
    }
    const double secs = seconds_since(t0);
    report(1, worst <= 1e-4 && secs < 60.0, "ZETA perfect reconstruction, 20 seeds",
           "max rel L2 " + std::to_string(worst) + ", " + std::to_string(secs) + " s");
}

// ---------------------------------------------------------------- criterion 2
void criterion_2() {
    const Denoiser den = small_denoiser(32, 16, 11);
    const Condition cond = den.resolve("realistic, violin");
    const int N = 30;
    const NoiseSchedule sched = build_schedule(N, 0.05, 16.0);
    const OrthonormalCodec codec(32);

    Waveform tone(16000, 1, 2048);
    for (size_t k = 0; k < tone.length(); ++k)
        tone.channels[0][k] = 0.4f * static_cast<float>(std::sin(2.0 * M_PI * 440.0 * k / 16000.0));
    const Latent z_syn = codec.encode(tone);

    RefinementConfig cfg = RefinementConfig::defaults(Backend::SDEdit);
    cfg.steps = N;
    cfg.sigma_min = 0.05;
    cfg.sigma_max = 16.0;
    cfg.guidance_scale = 2.0;
    cfg.cond = "realistic, violin";
    cfg.start_index = 0;
    const bool identity_ok = refine_sdedit(z_syn, cfg, sched, den).values == z_syn.values;

    // n = N SDEdit vs unconditional generation: two-sample Welch t-test on
    // the embedding norms of the decoded outputs
    const int M = 24;
    std::vector<double> stat_edit, stat_uncond;
    cfg.start_index = N;
    for (int i = 0; i < M; ++i) {
        cfg.seed = static_cast<uint64_t>(i);
        const Latent out = refine_sdedit(z_syn, cfg, sched, den);
        std::vector<double> e = embed_toy(codec.decode(out));
        double norm = 0.0;
        for (double v : e) norm += v * v;
        stat_edit.push_back(std::sqrt(norm));

        Latent z = z_syn;
        Rng rng = Rng(5000 + static_cast<uint64_t>(i)).fork("uncond");
        for (auto& v : z.values) v = static_cast<float>(sched.sigma(N) * rng.normal());
        const Latent gen = sample_dpmpp2m(z, N, sched, den, cond, cfg.guidance_scale);
        e = embed_toy(codec.decode(gen));
        norm = 0.0;
        for (double v : e) norm += v * v;
        stat_uncond.push_back(std::sqrt(norm));
    }
    auto mean_var = [](const std::vector<double>& v, double& m, double& var) {
        m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        var = 0.0;
        for (double x : v) var += (x - m) * (x - m);
        var /= static_cast<double>(v.size() - 1);
    };
    double m1, v1, m2, v2;
    mean_var(stat_edit, m1, v1);
    mean_var(stat_uncond, m2, v2);
    const double t = (m1 - m2) / std::sqrt(v1 / M + v2 / M + 1e-30);
    const double p = std::erfc(std::abs(t) / std::sqrt(2.0));  // normal approximation
    report(2, identity_ok && p > 0.01, "SDEdit identity and n = N statistics",
           std::string("n=0 bit-exact ") + (identity_ok ? "yes" : "NO") + ", two-sample p = " +
               std::to_string(p));
}

// ---------------------------------------------------------------- criterion 3
void criterion_3() {
    bool endpoints = true;
    const double rows[4][3] = {{250, 0.05, 16.0}, {200, 0.3, 500.0}, {2, 0.01, 100.0}, {17, 1.0, 2.0}};
    for (const auto& r : rows) {
        const NoiseSchedule s = build_schedule(static_cast<int>(r[0]), r[1], r[2]);
        if (s.sigma(1) != r[1] || s.sigma(static_cast<int>(r[0])) != r[2]) endpoints = false;
        for (int i = 1; i <= s.steps; ++i)
            if (s.alpha(i) != 1.0) endpoints = false;
    }

    // forward process moments at 1e5 draws, 3 standard errors
    const NoiseSchedule s = build_schedule(40, 0.05, 16.0);
    const int i = 23;
    const double sigma = s.sigma(i);
    Latent z0(1, 1, 1, 16000);
    z0.values[0] = 0.7f;
    const int n = 100000;
    Rng rng(3);
    double mean = 0.0, var = 0.0;
    std::vector<double> draws(n);
    for (int d = 0; d < n; ++d) {
        Latent w = z0;
        w.values[0] = static_cast<float>(rng.normal());
        draws[static_cast<size_t>(d)] = forward_diffuse(z0, i, s, w).values[0];
        mean += draws[static_cast<size_t>(d)];
    }
    mean /= n;
    for (double d : draws) var += (d - mean) * (d - mean);
    var /= n - 1;
    const double mean_se = sigma / std::sqrt(static_cast<double>(n));
    const double var_se = sigma * sigma * std::sqrt(2.0 / n);
    const bool mean_ok = std::abs(mean - 0.7) <= 3.0 * mean_se;
    const bool var_ok = std::abs(var - sigma * sigma) <= 3.0 * var_se;
    report(3, endpoints && mean_ok && var_ok, "schedule endpoints and forward moments",
           "mean dev " + std::to_string((mean - 0.7) / mean_se) + " SE, var dev " +
               std::to_string((var - sigma * sigma) / var_se) + " SE");
}

// ---------------------------------------------------------------- criterion 4
void criterion_4() {
    const Latent target = random_latent(8, 16, 21);
    const DenoiseFn pull = [&](const Latent& z, double) {
        Latent out = z;
        for (size_t k = 0; k < out.size(); ++k)
            out.values[k] = static_cast<float>(target.values[k] + 0.5 * (z.values[k] - target.values[k]));
        return out;
    };

    // single step returns the denoiser prediction exactly
    const NoiseSchedule s1 = build_schedule(8, 0.1, 10.0);
    const Latent z = random_latent(8, 16, 22);
    const bool single_ok = sample_dpmpp2m(z, 1, s1, pull).values == pull(z, s1.sigma(1)).values;

    // convergence across N = {2, 5, 10, 20, 40} against an N = 160 reference
    const Latent eps = random_latent(8, 16, 23);
    auto run = [&](int N) {
        const NoiseSchedule s = build_schedule(N, 0.1, 10.0);
        Latent start = eps;
        for (auto& v : start.values) v = static_cast<float>(v * s.sigma(N));
        return sample_dpmpp2m(start, N, s, pull);
    };
    const Latent ref = run(160);
    bool decreasing = true;
    double prev = 1e300;
    std::string gaps;
    for (int N : {2, 5, 10, 20, 40}) {
        const double gap = relative_l2(run(N), ref);
        if (gap >= prev) decreasing = false;
        prev = gap;
        gaps += std::to_string(gap) + " ";
    }
    report(4, single_ok && decreasing, "sampler exactness and convergence",
           std::string("single-step exact ") + (single_ok ? "yes" : "NO") + ", gaps " + gaps);
}

// ---------------------------------------------------------------- criterion 5
void criterion_5() {
    // note at onset 1.0 s: first nonzero sample exactly at 16000
    SampleLibrary lib(16000);
    NoteSample s;
    s.instrument = "violin";
    s.pitch = 69;
    s.velocity = 100;
    s.audio.assign(32000, 1.0f);
    lib.add(std::move(s));
    Score score;
    score.tempo_map = {{0, 500000}};
    score.tracks.emplace_back();
    NoteEvent n;
    n.pitch = 69;
    n.onset_s = 1.0;
    n.offset_s = 2.0;
    score.tracks[0].notes.push_back(n);
    RenderOptions opts;
    opts.out_rate = 16000;
    const Waveform wav = render_track(score, lib, "violin", opts);
    size_t first_nonzero = wav.length();
    for (size_t k = 0; k < wav.length(); ++k)
        if (wav.channels[0][k] != 0.0f) {
            first_nonzero = k;
            break;
        }
    const bool onset_ok = first_nonzero == 16000;

    // ADSR breakpoints at samples {0, 80, offset, offset + 3200}
    const std::vector<float> ones(32000, 1.0f);
    const std::vector<float> env = apply_adsr(ones, 16000, 1.0, AdsrEnvelope{});
    const size_t offset = 16000;
    const bool adsr_ok = env.size() == offset + 3200 && env[0] > 0.0f && env[0] < 1.0f &&
                         env[79] < 1.0f && env[80] == 1.0f && env[offset - 1] == 1.0f &&
                         env[offset] < 1.0f && env[offset + 3199] > 0.0f;
    report(5, onset_ok && adsr_ok, "render onset timing and ADSR breakpoints",
           "first nonzero " + std::to_string(first_nonzero) + ", envelope length " +
               std::to_string(env.size()));
}

// ---------------------------------------------------------------- criterion 6
void criterion_6() {
    Rng rng(31);
    EmbeddingSet a;
    for (int i = 0; i < 50; ++i) {
        std::vector<double> v(6);
        for (auto& x : v) x = rng.normal();
        a.add(v);
    }
    const double ident = frechet_distance(a, a);

    const double m = 1.3;
    EmbeddingSet g1, g2;
    for (int i = 0; i < 100000; ++i) {
        g1.add({rng.normal()});
        g2.add({rng.normal() + m});
    }
    const double shift = frechet_distance(g1, g2);
    const bool shift_ok = std::abs(shift - m * m) <= 0.02 * m * m;

    auto diag_set = [](double sa, double sb, double m1, double m2) {
        EmbeddingSet s;
        s.add({sa + m1, m2});
        s.add({-sa + m1, m2});
        s.add({m1, sb + m2});
        s.add({m1, -sb + m2});
        return s;
    };
    const EmbeddingSet A = diag_set(1.0, 2.0, 0.0, 0.0);
    const EmbeddingSet B = diag_set(1.5, 0.5, 0.3, -0.7);
    auto var = [](double s) { return 2.0 * s * s / 3.0 + 1e-6; };
    double expected = 0.3 * 0.3 + 0.7 * 0.7;
    expected += var(1.0) + var(1.5) - 2.0 * std::sqrt(var(1.0) * var(1.5));
    expected += var(2.0) + var(0.5) - 2.0 * std::sqrt(var(2.0) * var(0.5));
    const double diag = frechet_distance(A, B);
    const bool diag_ok = std::abs(diag - expected) <= 1e-6 * std::max(1.0, expected);

    report(6, ident < 1e-6 && shift_ok && diag_ok, "Frechet metric oracles",
           "identical " + std::to_string(ident) + ", shift " + std::to_string(shift) + " vs " +
               std::to_string(m * m) + ", 2-D err " + std::to_string(std::abs(diag - expected)));
}

// helpers shared by criteria 7-9 ------------------------------------------

struct ToyNote {
    int pitch;
    double onset, dur;
};
using ToyScore = std::vector<ToyNote>;

ToyScore random_score(Rng rng, int n_notes, int pitch_lo, int pitch_span, double gap = 0.12) {
    ToyScore s;
    double t = 0.05 + 0.05 * rng.uniform();
    for (int i = 0; i < n_notes; ++i) {
        ToyNote note;
        note.pitch = pitch_lo + static_cast<int>(rng.uniform_int(static_cast<uint64_t>(pitch_span)));
        note.dur = 0.45 + 0.15 * rng.uniform();
        note.onset = t;
        t += note.dur + gap + 0.05 * rng.uniform();
        s.push_back(note);
    }
    return s;
}

std::vector<NoteEvent> score_events(const ToyScore& s) {
    std::vector<NoteEvent> out;
    for (const auto& n : s) {
        NoteEvent e;
        e.pitch = n.pitch;
        e.onset_s = n.onset;
        e.offset_s = n.onset + n.dur;
        out.push_back(e);
    }
    return out;
}

struct MicroF1 {
    long long matched = 0, hyps = 0, refs = 0;
    void add(const F1Result& r, size_t n_ref, size_t n_hyp) {
        matched += r.matched;
        refs += static_cast<long long>(n_ref);
        hyps += static_cast<long long>(n_hyp);
    }
    double f1() const {
        const double p = hyps ? static_cast<double>(matched) / hyps : 0.0;
        const double r = refs ? static_cast<double>(matched) / refs : 0.0;
        return (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
    }
};

// ---------------------------------------------------------------- criterion 7
void criterion_7() {
    const auto t0 = std::chrono::steady_clock::now();
    SampleLibrary lib(16000);
    for (int pitch = 55; pitch <= 78; ++pitch) {
        NoteSample s;
        s.instrument = "violin";
        s.pitch = pitch;
        s.velocity = 100;
        const double hz = 440.0 * std::pow(2.0, (pitch - 69) / 12.0);
        s.audio.resize(16000);
        for (size_t k = 0; k < s.audio.size(); ++k)
            s.audio[k] = 0.5f * static_cast<float>(std::sin(2.0 * M_PI * hz * k / 16000.0));
        lib.add(std::move(s));
    }
    RenderOptions opts;
    opts.out_rate = 16000;

    MicroF1 micro;
    for (int c = 0; c < 50; ++c) {
        // gaps wider than the 200 ms release so tails don't smear onsets
        const ToyScore ts = random_score(Rng(700).fork("clean", c), 5, 57, 20, 0.28);
        Score score;
        score.tempo_map = {{0, 500000}};
        score.tracks.emplace_back();
        score.tracks[0].notes = score_events(ts);
        const Waveform wav = render_track(score, lib, "violin", opts);
        const auto hyp = transcribe_mono(wav);
        const auto refs = score_events(ts);
        micro.add(note_f1(refs, hyp), refs.size(), hyp.size());
    }
    const double secs = seconds_since(t0);
    report(7, micro.f1() >= 0.95 && secs < 120.0, "transcription calibration on 50 clean renders",
           "micro F1 " + std::to_string(micro.f1()) + ", " + std::to_string(secs) + " s");
}

// ---------------------------------------------------------- criteria 8 and 9
Waveform render_style(const ToyScore& score, const ToyClassStyle& style, Rng rng, int rate) {
    double end = 0.0;
    for (const auto& n : score) end = std::max(end, n.onset + n.dur + 0.15);
    Waveform out(rate, 1, static_cast<size_t>(std::llround(end * rate)));
    for (size_t i = 0; i < score.size(); ++i) {
        const Waveform clip =
            make_toy_clip(score[i].pitch, score[i].dur + 0.1, rate, style, rng.fork("note", i));
        const size_t start = static_cast<size_t>(std::llround(score[i].onset * rate));
        for (size_t k = 0; k < clip.length() && start + k < out.length(); ++k)
            out.channels[0][start + k] += clip.channels[0][k];
    }
    return out;
}

void criteria_8_and_9() {
    const int rate = 16000;
    const fs::path dir = fs::temp_directory_path() / "cosaref_acceptance_corpus";

    // toy corpus: 2 classes x 100 clips
    ToyCorpusSpec spec;
    spec.clips_per_class = 100;
    spec.clip_seconds = 1.0;
    spec.seed = 1;
    if (!fs::exists(dir / "manifest.json")) make_toy_corpus(spec, dir.string());

    // train the toy denoiser (budget: 15 min)
    const int N = 40;
    const double smin = 0.02, smax = 16.0;
    const OrthonormalCodec codec(32);
    const NoiseSchedule sched = build_schedule(N, smin, smax);
    const auto t0 = std::chrono::steady_clock::now();
    const ToyDataset ds = load_toy_dataset(dir.string());
    TrainingConfig tc;
    tc.steps = 1200;
    tc.batch_size = 8;
    tc.learning_rate = 3e-3;
    tc.label_drop_rate = 0.1;
    tc.seed = 4;
    tc.log_every = 0;
    tc.net.hidden = 24;
    tc.net.kernel = 5;
    const TrainResult tr = train_toy_denoiser(ds, sched, tc, codec);
    const Denoiser& den = tr.denoiser;
    const double train_secs = seconds_since(t0);

    // 20 test scores rendered with the synthetic timbre (the concat
    // baseline) and 20 reference scores rendered with the realistic timbre
    std::vector<ToyScore> test_scores;
    std::vector<Waveform> concat, reference;
    for (int i = 0; i < 20; ++i) {
        test_scores.push_back(random_score(Rng(100).fork("test", i), 3, 57, 13));
        concat.push_back(
            render_style(test_scores.back(), spec.synthetic_style, Rng(300).fork("c", i), rate));
        const ToyScore rs = random_score(Rng(200).fork("ref", i), 3, 57, 13);
        reference.push_back(render_style(rs, spec.realistic_style, Rng(400).fork("r", i), rate));
    }

    auto refine_set = [&](Backend b, int n, double scale) {
        RefinementConfig cfg = RefinementConfig::defaults(b);
        cfg.steps = N;
        cfg.start_index = n;
        cfg.sigma_min = smin;
        cfg.sigma_max = smax;
        cfg.guidance_scale = scale;
        cfg.cond = "realistic, violin";
        cfg.cond_src = "synthetic, violin";
        cfg.cond_tgt = "realistic, violin";
        cfg.chunk_seconds = 60.0;
        std::vector<Waveform> out;
        for (int i = 0; i < 20; ++i) {
            cfg.seed = 1000 + static_cast<uint64_t>(i);
            out.push_back(refine_long(concat[static_cast<size_t>(i)], cfg, sched, den, codec));
        }
        return out;
    };
    const auto sdedit = refine_set(Backend::SDEdit, 6, 3.0);
    const auto zeta = refine_set(Backend::Zeta, 10, 1.5);

    auto embed_set = [](const std::vector<Waveform>& ws, const char* tag) {
        EmbeddingSet s;
        s.source_tag = tag;
        for (const auto& w : ws) s.add(embed_toy(w));
        return s;
    };
    const EmbeddingSet e_ref = embed_set(reference, "reference");
    const EmbeddingSet e_cat = embed_set(concat, "concat");
    const EmbeddingSet e_sd = embed_set(sdedit, "sdedit");
    const EmbeddingSet e_zt = embed_set(zeta, "zeta");

    const double fad_r_cat = frechet_distance(e_cat, e_ref);
    const double fad_r_sd = frechet_distance(e_sd, e_ref);
    const double fad_r_zt = frechet_distance(e_zt, e_ref);
    const double fad_t_sd = frechet_distance(e_sd, e_cat);
    const double fad_t_zt = frechet_distance(e_zt, e_cat);

    auto f1_of = [&](const std::vector<Waveform>& ws) {
        MicroF1 micro;
        for (int i = 0; i < 20; ++i) {
            const auto refs = score_events(test_scores[static_cast<size_t>(i)]);
            const auto hyp = transcribe_mono(ws[static_cast<size_t>(i)]);
            micro.add(note_f1(refs, hyp), refs.size(), hyp.size());
        }
        return micro.f1();
    };
    const double f1_cat = f1_of(concat);
    const double f1_sd = f1_of(sdedit);
    const double f1_zt = f1_of(zeta);

    const bool fad_ok = fad_r_sd <= 0.7 * fad_r_cat || fad_r_zt <= 0.7 * fad_r_cat;
    const bool f1_ok = f1_sd >= 0.8 * f1_cat && f1_zt >= 0.8 * f1_cat;
    const bool train_ok = train_secs < 900.0;

    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "train %.0f s; FAD_r concat %.3f sdedit %.3f zeta %.3f; F1 concat %.3f sdedit "
                  "%.3f zeta %.3f",
                  train_secs, fad_r_cat, fad_r_sd, fad_r_zt, f1_cat, f1_sd, f1_zt);
    report(8, fad_ok && f1_ok && train_ok, "directional FAD_r / F1 reproduction", buf);

    std::snprintf(buf, sizeof buf, "FAD_t sdedit %.3f zeta %.3f", fad_t_sd, fad_t_zt);
    report(9, fad_t_zt <= fad_t_sd, "ZETA timbre preservation (FAD_t)", buf);
}

// --------------------------------------------------------------- criterion 10
void criterion_10() {
    DenoiserConfig cfg;
    cfg.channels = 3;
    cfg.hidden = 4;
    cfg.n_fourier = 4;
    Denoiser d(cfg, {"a", "b"}, 17);
    const Latent z0 = random_latent(3, 6, 21);
    const Latent z_noisy = random_latent(3, 6, 22);
    const double sigma = 0.8;

    std::vector<double> grad(d.parameter_count(), 0.0);
    denoiser_loss_and_grad(d, z_noisy, z0, sigma, 1, grad);

    Rng pick(33);
    const double eps = 1e-6;
    int checked = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 120; ++trial) {
        const size_t p = pick.uniform_int(d.parameter_count());
        const double orig = d.parameters()[p];
        std::vector<double> scratch(d.parameter_count(), 0.0);
        d.parameters()[p] = orig + eps;
        const double lp = denoiser_loss_and_grad(d, z_noisy, z0, sigma, 1, scratch);
        std::fill(scratch.begin(), scratch.end(), 0.0);
        d.parameters()[p] = orig - eps;
        const double lm = denoiser_loss_and_grad(d, z_noisy, z0, sigma, 1, scratch);
        d.parameters()[p] = orig;
        const double numeric = (lp - lm) / (2.0 * eps);
        const double denom = std::max({std::abs(numeric), std::abs(grad[p]), 1e-8});
        worst = std::max(worst, std::abs(numeric - grad[p]) / denom);
        ++checked;
    }
    report(10, checked >= 100 && worst < 1e-4, "analytic gradient vs finite differences",
           std::to_string(checked) + " params, worst rel err " + std::to_string(worst));
}

// --------------------------------------------------------------- criterion 11
void criterion_11() {
    const int rate = 16000;
    const size_t len = 100 * static_cast<size_t>(rate);
    Waveform in(rate, 1, len);
    for (size_t k = 0; k < len; ++k)
        in.channels[0][k] = 0.3f * static_cast<float>(std::sin(2.0 * M_PI * 220.0 * k / rate));

    const Denoiser den = small_denoiser(32, 8, 19);
    const OrthonormalCodec codec(32);
    RefinementConfig cfg = RefinementConfig::defaults(Backend::SDEdit);
    cfg.steps = 4;
    cfg.start_index = 2;
    cfg.sigma_min = 0.05;
    cfg.sigma_max = 1.0;
    cfg.guidance_scale = 1.5;
    cfg.cond = "realistic, violin";
    cfg.seed = 7;
    const NoiseSchedule sched = cfg.make_schedule();

    std::vector<ChunkInfo> chunks;
    const Waveform out = refine_long(in, cfg, sched, den, codec, &chunks);
    const bool length_ok = out.length() == len;

    // seam regions: max adjacent-sample delta across each overlap must not
    // exceed 2x the larger interior delta of the two joined chunks
    bool seams_ok = chunks.size() >= 2;
    auto max_delta = [&](size_t lo, size_t hi) {  // [lo, hi)
        double m = 0.0;
        for (size_t k = lo + 1; k < hi; ++k)
            m = std::max(m, std::abs(static_cast<double>(out.channels[0][k]) - out.channels[0][k - 1]));
        return m;
    };
    for (size_t c = 1; c < chunks.size(); ++c) {
        const size_t seam_lo = chunks[c].start;
        const size_t seam_hi = chunks[c - 1].start + chunks[c - 1].length;
        if (seam_hi <= seam_lo) continue;
        const double seam = max_delta(seam_lo == 0 ? 0 : seam_lo - 1, std::min(seam_hi + 1, len));
        const double left = max_delta(chunks[c - 1].start, seam_lo);
        const double right = max_delta(seam_hi, chunks[c].start + chunks[c].length);
        if (seam > 2.0 * std::max(left, right)) seams_ok = false;
    }
    report(11, length_ok && seams_ok, "100 s chunked refinement",
           "length " + std::to_string(out.length()) + " / " + std::to_string(len) + ", " +
               std::to_string(chunks.size()) + " chunks");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criteria_8_and_9();
    criterion_10();
    criterion_11();
    if (g_failures) std::printf("%d criterion(s) failed\n", g_failures);
    else std::printf("all acceptance criteria passed\n");
    return g_failures == 0 ? 0 : 1;
}
