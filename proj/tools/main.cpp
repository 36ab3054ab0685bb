#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "speclearn/errors.hpp"
#include "speclearn/experiment/commands.hpp"
#include "speclearn/experiment/config.hpp"

namespace {

using speclearn::ExperimentConfig;

struct CommonArgs {
    std::string config_path;
    std::optional<uint64_t> seed;
    std::string out_dir;
    std::string data_dir = "data";
    std::string ckpt_dir = "ckpt";
    int jobs = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args, const char* out_default, bool data, bool ckpt) {
    args.out_dir = out_default;
    cmd->add_option("--config", args.config_path, "JSON experiment config");
    cmd->add_option("--seed", args.seed, "override the config seed list with one seed");
    cmd->add_option("--out", args.out_dir, "output directory")->capture_default_str();
    if (data)
        cmd->add_option("--data", args.data_dir, "dataset directory (from `generate`)")
            ->capture_default_str();
    if (ckpt)
        cmd->add_option("--ckpt", args.ckpt_dir, "checkpoint directory (from `train`)")
            ->capture_default_str();
    cmd->add_option("--jobs", args.jobs, "worker threads (0 = all cores)");
}

ExperimentConfig load_config(const CommonArgs& args) {
    ExperimentConfig cfg = args.config_path.empty()
                               ? ExperimentConfig{}
                               : ExperimentConfig::from_file(args.config_path);
    if (args.seed) {
        cfg.seeds = {*args.seed};
        cfg.data_seed = *args.seed;
    }
    if (args.jobs >= 0) cfg.jobs = args.jobs;
    cfg.validate();
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"speclearn: specification learning from synthetic tabletop demonstrations"};
    app.require_subcommand(1);

    CommonArgs gen_args, train_args, eval_args, refine_args, causal_args;
    std::string report_dir = "out";

    auto* generate = app.add_subcommand("generate", "synthesize scenes and demonstrations");
    add_common(generate, gen_args, "data", false, false);
    auto* train = app.add_subcommand("train", "train spec models for every (type, ablation, seed)");
    add_common(train, train_args, "ckpt", true, false);
    auto* eval = app.add_subcommand("eval", "accuracy vs trajectories-per-scene sweep");
    add_common(eval, eval_args, "out", true, false);
    auto* refine = app.add_subcommand("refine", "gradient refinement success table and traces");
    add_common(refine, refine_args, "out", true, true);
    auto* causal = app.add_subcommand("causal", "intervention analysis table");
    add_common(causal, causal_args, "out", true, true);
    auto* report = app.add_subcommand("report", "collate results into one markdown report");
    report->add_option("--out", report_dir, "directory holding the command outputs")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (generate->parsed())
            return speclearn::cmd_generate(load_config(gen_args), gen_args.out_dir);
        if (train->parsed())
            return speclearn::cmd_train(load_config(train_args), train_args.data_dir,
                                        train_args.out_dir);
        if (eval->parsed())
            return speclearn::cmd_eval(load_config(eval_args), eval_args.data_dir,
                                       eval_args.out_dir);
        if (refine->parsed())
            return speclearn::cmd_refine(load_config(refine_args), refine_args.ckpt_dir,
                                         refine_args.data_dir, refine_args.out_dir);
        if (causal->parsed())
            return speclearn::cmd_causal(load_config(causal_args), causal_args.ckpt_dir,
                                         causal_args.data_dir, causal_args.out_dir);
        if (report->parsed()) return speclearn::cmd_report(report_dir);
    } catch (const speclearn::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const speclearn::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    } catch (const speclearn::SchemaError& e) {
        std::fprintf(stderr, "schema error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
