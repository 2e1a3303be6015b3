// cosaref command-line tool: render / refine / synth / make-toy-corpus /
// train / eval. Options can come from a key=value config file, explicit
// flags, or repeated --set key=value overrides (applied in that order).
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "cosaref/commands.hpp"

namespace {

struct VerbState {
    std::string config_path;
    std::vector<std::pair<std::string, std::string>> overrides;
};

void add_common_options(CLI::App* cmd, VerbState& state) {
    cmd->add_option("-c,--config", state.config_path, "key=value config file");
    const std::pair<const char*, const char*> flags[] = {
        {"--midi", "midi"},
        {"--library", "library"},
        {"--checkpoint", "checkpoint"},
        {"--init-checkpoint", "init_checkpoint"},
        {"--input", "input"},
        {"--output", "output"},
        {"--corpus-dir", "corpus_dir"},
        {"--candidates", "candidates"},
        {"--reference", "reference"},
        {"--concat", "concat"},
        {"--scores", "scores"},
        {"--report", "report"},
        {"--instrument", "instrument"},
        {"--backend", "backend"},
        {"--steps", "steps"},
        {"--start-index", "start_index"},
        {"--sigma-min", "sigma_min"},
        {"--sigma-max", "sigma_max"},
        {"--guidance-scale", "guidance_scale"},
        {"--chunk-seconds", "chunk_seconds"},
        {"--overlap-samples", "overlap_samples"},
        {"--rho", "rho"},
        {"--working-rate", "working_rate"},
        {"--out-rate", "out_rate"},
        {"--codec-d", "codec_d"},
        {"--pcm16", "pcm16"},
        {"--apply-expression", "apply_expression"},
        {"--velocity-to-gain", "velocity_to_gain"},
        {"--train-steps", "train_steps"},
        {"--batch-size", "batch_size"},
        {"--learning-rate", "learning_rate"},
        {"--label-drop", "label_drop"},
        {"--train-schedule-steps", "train_schedule_steps"},
        {"--train-sigma-min", "train_sigma_min"},
        {"--train-sigma-max", "train_sigma_max"},
        {"--clips-per-class", "clips_per_class"},
        {"--clip-seconds", "clip_seconds"},
        {"--seed", "seed"},
    };
    for (const auto& [flag, key] : flags) {
        const std::string k = key;
        cmd->add_option_function<std::string>(
            flag, [&state, k](const std::string& v) { state.overrides.emplace_back(k, v); });
    }
    cmd->add_option_function<std::string>(
        "--set",
        [&state](const std::string& kv) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw CLI::ValidationError("--set expects key=value");
            state.overrides.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        },
        "override any config key (repeatable)");
}

cosaref::RunConfig build_config(const VerbState& state) {
    cosaref::RunConfig cfg;
    if (!state.config_path.empty()) cosaref::load_config_file(state.config_path, cfg);
    for (const auto& [key, value] : state.overrides) cfg.apply(key, value);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CoSaRef toy pipeline: concatenative sampling + diffusion refinement"};
    app.require_subcommand(1);

    struct Verb {
        const char* name;
        const char* desc;
        void (*run)(const cosaref::RunConfig&);
    };
    const Verb verbs[] = {
        {"render", "render a MIDI score to audio with the sample library", cosaref::run_render},
        {"refine", "refine audio toward the realistic domain", cosaref::run_refine},
        {"synth", "render then refine in one process", cosaref::run_synth},
        {"make-toy-corpus", "generate a labeled toy training corpus", cosaref::run_make_toy_corpus},
        {"train", "train or fine-tune the toy denoiser", cosaref::run_train},
        {"eval", "compute FAD and transcription F1 metrics", cosaref::run_eval},
    };

    std::vector<std::unique_ptr<VerbState>> states;
    for (const auto& verb : verbs) {
        auto* cmd = app.add_subcommand(verb.name, verb.desc);
        states.push_back(std::make_unique<VerbState>());
        VerbState* state = states.back().get();
        add_common_options(cmd, *state);
        auto run = verb.run;
        cmd->callback([state, run]() { run(build_config(*state)); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
