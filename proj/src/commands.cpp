#include "cosaref/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cosaref/evaluate.hpp"
#include "cosaref/midi.hpp"
#include "cosaref/rng.hpp"
#include "cosaref/sampler.hpp"
#include "cosaref/toycorpus.hpp"
#include "cosaref/training.hpp"
#include "json.hpp"

namespace cosaref {

namespace {

bool parse_bool(const std::string& v) {
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw CommandError("not a boolean: " + v);
}

template <typename T>
T parse_num(const std::string& v) {
    std::istringstream ss(v);
    T out;
    ss >> out;
    if (ss.fail()) throw CommandError("not a number: " + v);
    return out;
}

std::vector<std::string> list_files(const std::string& dir, const std::string& ext) {
    if (!std::filesystem::is_directory(dir)) throw CommandError("not a directory: " + dir);
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    if (out.empty()) throw CommandError("no " + ext + " files in " + dir);
    return out;
}

EmbeddingSet embed_dir(const std::string& dir, const std::string& tag) {
    const auto files = list_files(dir, ".wav");
    std::vector<std::vector<double>> embs(files.size());
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(files.size()); ++i)
        embs[static_cast<size_t>(i)] = embed_toy(wav_read(files[static_cast<size_t>(i)]));
    EmbeddingSet set;
    set.source_tag = tag;
    for (auto& e : embs) set.add(std::move(e));
    return set;
}

Waveform render_score(const RunConfig& cfg, const Score& score) {
    const SampleLibrary lib = SampleLibrary::load(cfg.library_path, cfg.working_rate);
    RenderOptions opts;
    opts.working_rate = cfg.working_rate;
    opts.out_rate = cfg.out_rate;
    opts.apply_expression = cfg.apply_expression;
    opts.velocity_to_gain = cfg.velocity_to_gain;
    return render_track(apply_sustain(score), lib, cfg.instrument, opts);
}

void write_audio(const RunConfig& cfg, const std::string& path, const Waveform& wav) {
    wav_write(path, wav, cfg.pcm16 ? WavFormat::Pcm16 : WavFormat::Float32);
}

// refine `input` with the checkpointed model and write audio + sidecar
void refine_to_output(const RunConfig& cfg, const Waveform& input) {
    if (cfg.checkpoint_path.empty()) throw CommandError("refine needs a checkpoint path");
    if (cfg.output_audio.empty()) throw CommandError("refine needs an output path");
    const Denoiser denoiser = Denoiser::load(cfg.checkpoint_path);
    const OrthonormalCodec codec(cfg.codec_d);
    const RefinementConfig rcfg = refinement_from(cfg);
    const NoiseSchedule schedule = rcfg.make_schedule();

    std::vector<ChunkInfo> chunks;
    const Waveform refined = refine_long(input, rcfg, schedule, denoiser, codec, &chunks);
    write_audio(cfg, cfg.output_audio, refined);

    nlohmann::json sidecar;
    sidecar["backend"] = backend_name(rcfg.backend);
    sidecar["steps"] = rcfg.steps;
    sidecar["start_index"] = rcfg.start_index;
    sidecar["sigma_min"] = rcfg.sigma_min;
    sidecar["sigma_max"] = rcfg.sigma_max;
    sidecar["rho"] = rcfg.rho;
    sidecar["guidance_scale"] = rcfg.guidance_scale;
    sidecar["cond"] = rcfg.cond;
    sidecar["cond_src"] = rcfg.cond_src;
    sidecar["cond_tgt"] = rcfg.cond_tgt;
    sidecar["seed"] = rcfg.seed;
    sidecar["top_seed"] = cfg.seed;
    sidecar["chunk_seconds"] = rcfg.chunk_seconds;
    sidecar["overlap_samples"] = rcfg.overlap_samples;
    sidecar["codec_d"] = cfg.codec_d;
    sidecar["sample_rate"] = input.sample_rate;
    sidecar["checkpoint"] = cfg.checkpoint_path;
    sidecar["output"] = cfg.output_audio;
    sidecar["config_hash"] = cfg.hash();
    sidecar["chunks"] = nlohmann::json::array();
    for (const auto& c : chunks)
        sidecar["chunks"].push_back({{"start", c.start}, {"length", c.length}, {"seed", c.seed}});

    std::ofstream f(cfg.output_audio + ".json");
    if (!f) throw CommandError("cannot write sidecar for " + cfg.output_audio);
    f << sidecar.dump(2) << "\n";

    std::cout << "refined " << input.duration_s() << " s with " << backend_name(rcfg.backend)
              << " in " << chunks.size() << " chunk(s) -> " << cfg.output_audio << "\n";
}

}  // namespace

void RunConfig::apply(const std::string& key, const std::string& value) {
    if (key == "midi") midi_path = value;
    else if (key == "library") library_path = value;
    else if (key == "checkpoint") checkpoint_path = value;
    else if (key == "init_checkpoint") init_checkpoint = value;
    else if (key == "input") input_audio = value;
    else if (key == "output") output_audio = value;
    else if (key == "corpus_dir") corpus_dir = value;
    else if (key == "candidates") candidate_dir = value;
    else if (key == "reference") reference_dir = value;
    else if (key == "concat") concat_dir = value;
    else if (key == "scores") scores_dir = value;
    else if (key == "report") report_path = value;
    else if (key == "instrument") instrument = value;
    else if (key == "backend") backend = value;
    else if (key == "steps") steps = parse_num<int>(value);
    else if (key == "start_index") start_index = parse_num<int>(value);
    else if (key == "sigma_min") sigma_min = parse_num<double>(value);
    else if (key == "sigma_max") sigma_max = parse_num<double>(value);
    else if (key == "guidance_scale") guidance_scale = parse_num<double>(value);
    else if (key == "rho") rho = parse_num<double>(value);
    else if (key == "chunk_seconds") chunk_seconds = parse_num<double>(value);
    else if (key == "overlap_samples") overlap_samples = parse_num<int>(value);
    else if (key == "working_rate") working_rate = parse_num<int>(value);
    else if (key == "out_rate") out_rate = parse_num<int>(value);
    else if (key == "codec_d") codec_d = parse_num<int>(value);
    else if (key == "pcm16") pcm16 = parse_bool(value);
    else if (key == "apply_expression") apply_expression = parse_bool(value);
    else if (key == "velocity_to_gain") velocity_to_gain = parse_bool(value);
    else if (key == "train_steps") train_steps = parse_num<int>(value);
    else if (key == "batch_size") batch_size = parse_num<int>(value);
    else if (key == "learning_rate") learning_rate = parse_num<double>(value);
    else if (key == "label_drop") label_drop = parse_num<double>(value);
    else if (key == "train_schedule_steps") train_schedule_steps = parse_num<int>(value);
    else if (key == "train_sigma_min") train_sigma_min = parse_num<double>(value);
    else if (key == "train_sigma_max") train_sigma_max = parse_num<double>(value);
    else if (key == "clips_per_class") clips_per_class = parse_num<int>(value);
    else if (key == "clip_seconds") clip_seconds = parse_num<double>(value);
    else if (key == "seed") seed = parse_num<uint64_t>(value);
    else throw CommandError("unknown config key: " + key);
}

std::string RunConfig::serialize() const {
    std::ostringstream s;
    auto opt_i = [](const std::optional<int>& v) { return v ? std::to_string(*v) : ""; };
    auto opt_d = [](const std::optional<double>& v) { return v ? std::to_string(*v) : ""; };
    s << "midi=" << midi_path << "\nlibrary=" << library_path
      << "\ncheckpoint=" << checkpoint_path << "\ninit_checkpoint=" << init_checkpoint
      << "\ninput=" << input_audio << "\noutput=" << output_audio
      << "\ncorpus_dir=" << corpus_dir << "\ncandidates=" << candidate_dir
      << "\nreference=" << reference_dir << "\nconcat=" << concat_dir
      << "\nscores=" << scores_dir << "\nreport=" << report_path
      << "\ninstrument=" << instrument << "\nbackend=" << backend << "\nsteps=" << opt_i(steps)
      << "\nstart_index=" << opt_i(start_index) << "\nsigma_min=" << opt_d(sigma_min)
      << "\nsigma_max=" << opt_d(sigma_max) << "\nguidance_scale=" << opt_d(guidance_scale)
      << "\nrho=" << rho << "\nchunk_seconds=" << chunk_seconds
      << "\noverlap_samples=" << overlap_samples << "\nworking_rate=" << working_rate
      << "\nout_rate=" << out_rate << "\ncodec_d=" << codec_d << "\npcm16=" << pcm16
      << "\napply_expression=" << apply_expression << "\nvelocity_to_gain=" << velocity_to_gain
      << "\ntrain_steps=" << train_steps << "\nbatch_size=" << batch_size
      << "\nlearning_rate=" << learning_rate << "\nlabel_drop=" << label_drop
      << "\ntrain_schedule_steps=" << train_schedule_steps
      << "\ntrain_sigma_min=" << train_sigma_min << "\ntrain_sigma_max=" << train_sigma_max
      << "\nclips_per_class=" << clips_per_class << "\nclip_seconds=" << clip_seconds
      << "\nseed=" << seed << "\n";
    return s.str();
}

std::string RunConfig::hash() const {
    uint64_t h = 0xcbf29ce484222325ull;
    for (char c : serialize()) {
        h ^= static_cast<uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ull;
    }
    std::ostringstream s;
    s << std::hex << h;
    return s.str();
}

void load_config_file(const std::string& path, RunConfig& cfg) {
    std::ifstream f(path);
    if (!f) throw CommandError("cannot open config file: " + path);
    std::string line;
    int line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CommandError(path + ":" + std::to_string(line_no) + ": expected key=value");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        try {
            cfg.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const CommandError& e) {
            throw CommandError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

RefinementConfig refinement_from(const RunConfig& cfg) {
    RefinementConfig rcfg = RefinementConfig::defaults(backend_from_name(cfg.backend));
    if (cfg.steps) rcfg.steps = *cfg.steps;
    if (cfg.start_index) rcfg.start_index = *cfg.start_index;
    if (cfg.sigma_min) rcfg.sigma_min = *cfg.sigma_min;
    if (cfg.sigma_max) rcfg.sigma_max = *cfg.sigma_max;
    if (cfg.guidance_scale) rcfg.guidance_scale = *cfg.guidance_scale;
    rcfg.rho = cfg.rho;
    rcfg.chunk_seconds = cfg.chunk_seconds;
    rcfg.overlap_samples = cfg.overlap_samples;
    rcfg.cond = condition_from_metadata(cfg.instrument, ConditionStyle::FullTemplate);
    rcfg.cond_src = condition_from_metadata(cfg.instrument, ConditionStyle::Source);
    rcfg.cond_tgt = condition_from_metadata(cfg.instrument, ConditionStyle::Target);
    rcfg.seed = Rng(cfg.seed).fork("refinement").next_u64();
    return rcfg;
}

void run_render(const RunConfig& cfg) {
    if (cfg.midi_path.empty()) throw CommandError("render needs a midi path");
    if (cfg.output_audio.empty()) throw CommandError("render needs an output path");
    const Score score = parse_smf_file(cfg.midi_path);
    const Waveform wav = render_score(cfg, score);
    write_audio(cfg, cfg.output_audio, wav);
    std::cout << "rendered " << score.all_notes().size() << " notes, " << wav.duration_s()
              << " s, peak " << wav.peak() << " -> " << cfg.output_audio << "\n";
}

void run_refine(const RunConfig& cfg) {
    if (cfg.input_audio.empty()) throw CommandError("refine needs an input audio path");
    refine_to_output(cfg, wav_read(cfg.input_audio));
}

void run_synth(const RunConfig& cfg) {
    if (cfg.midi_path.empty()) throw CommandError("synth needs a midi path");
    const Score score = parse_smf_file(cfg.midi_path);
    const Waveform rendered = render_score(cfg, score);
    refine_to_output(cfg, rendered);
}

void run_make_toy_corpus(const RunConfig& cfg) {
    if (cfg.corpus_dir.empty()) throw CommandError("make-toy-corpus needs a corpus_dir");
    ToyCorpusSpec spec;
    spec.instruments = {cfg.instrument};
    spec.clips_per_class = cfg.clips_per_class;
    spec.clip_seconds = cfg.clip_seconds;
    spec.sample_rate = cfg.working_rate;
    spec.seed = Rng(cfg.seed).fork("corpus").next_u64();
    make_toy_corpus(spec, cfg.corpus_dir);
    std::cout << "wrote " << 2 * cfg.clips_per_class << " clips to " << cfg.corpus_dir << "\n";
}

void run_train(const RunConfig& cfg) {
    if (cfg.corpus_dir.empty()) throw CommandError("train needs a corpus_dir");
    if (cfg.checkpoint_path.empty()) throw CommandError("train needs a checkpoint path");
    const ToyDataset dataset = load_toy_dataset(cfg.corpus_dir);
    const NoiseSchedule schedule =
        build_schedule(cfg.train_schedule_steps, cfg.train_sigma_min, cfg.train_sigma_max, cfg.rho);
    TrainingConfig tcfg;
    tcfg.steps = cfg.train_steps;
    tcfg.batch_size = cfg.batch_size;
    tcfg.learning_rate = cfg.learning_rate;
    tcfg.label_drop_rate = cfg.label_drop;
    tcfg.seed = Rng(cfg.seed).fork("training").next_u64();
    tcfg.net.channels = cfg.codec_d;
    std::optional<Denoiser> init;
    if (!cfg.init_checkpoint.empty()) init = Denoiser::load(cfg.init_checkpoint);
    const OrthonormalCodec codec(cfg.codec_d);
    TrainResult result = train_toy_denoiser(dataset, schedule, tcfg, codec, init);
    result.denoiser.save(cfg.checkpoint_path);
    std::cout << "trained " << cfg.train_steps << " steps on " << dataset.clips.size()
              << " clips";
    if (!result.losses.empty()) std::cout << ", final loss " << result.losses.back();
    std::cout << " -> " << cfg.checkpoint_path << "\n";
}

void run_eval(const RunConfig& cfg) {
    if (cfg.candidate_dir.empty()) throw CommandError("eval needs a candidates directory");
    const EmbeddingSet cand = embed_dir(cfg.candidate_dir, "candidates");

    std::ostringstream report;
    report << "config_hash = " << cfg.hash() << "\n";
    report << "candidates = " << cand.size() << "\n";

    if (!cfg.reference_dir.empty()) {
        const EmbeddingSet ref = embed_dir(cfg.reference_dir, "reference");
        report << "reference = " << ref.size() << "\n";
        report << "FAD_r = " << frechet_distance(cand, ref) << "\n";
    }
    if (!cfg.concat_dir.empty()) {
        const EmbeddingSet concat = embed_dir(cfg.concat_dir, "concat");
        report << "concat = " << concat.size() << "\n";
        report << "FAD_t = " << frechet_distance(cand, concat) << "\n";
    }
    if (!cfg.scores_dir.empty()) {
        const auto wavs = list_files(cfg.candidate_dir, ".wav");
        const auto midis = list_files(cfg.scores_dir, ".mid");
        if (wavs.size() != midis.size())
            throw CommandError("candidate/score counts differ: " + std::to_string(wavs.size()) +
                               " vs " + std::to_string(midis.size()));
        long long total_ref = 0, total_hyp = 0, total_matched = 0;
        for (size_t i = 0; i < wavs.size(); ++i) {
            const auto notes = parse_smf_file(midis[i]).all_notes();
            const auto hyp = transcribe_mono(wav_read(wavs[i]));
            const F1Result r = note_f1(notes, hyp);
            total_ref += static_cast<long long>(notes.size());
            total_hyp += static_cast<long long>(hyp.size());
            total_matched += r.matched;
        }
        const double p = total_hyp ? static_cast<double>(total_matched) / total_hyp : 0.0;
        const double r = total_ref ? static_cast<double>(total_matched) / total_ref : 0.0;
        const double f1 = (p + r > 0.0) ? 2.0 * p * r / (p + r) : 0.0;
        report << "precision = " << p << "\nrecall = " << r << "\nF1 = " << f1 << "\n";
    }

    std::cout << report.str();
    if (!cfg.report_path.empty()) {
        std::ofstream f(cfg.report_path);
        if (!f) throw CommandError("cannot write report: " + cfg.report_path);
        f << report.str();
    }
}

}  // namespace cosaref
