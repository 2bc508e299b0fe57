// Command-line front end over the shared-library C API. Every subcommand
// reads a JSON config, calls the matching engine entry point and prints its
// JSON report. Exit codes: 0 success, 1 runtime or check failure, 2 usage or
// config error.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "etairl.h"

namespace {

int status_to_exit(etai_status status) {
    switch (status) {
        case ETAI_OK: return 0;
        case ETAI_ERR_INVALID_ARGUMENT:
        case ETAI_ERR_PARSE: return 2;
        case ETAI_ERR_RUNTIME:
        case ETAI_ERR_CHECK_FAILED: return 1;
    }
    return 1;
}

int report(etai_status status, char* payload) {
    if (payload) {
        std::cout << payload << std::endl;
        etai_string_free(payload);
    }
    if (status != ETAI_OK) std::cerr << "error: " << etai_last_error() << std::endl;
    return status_to_exit(status);
}

std::string read_file_or_die(const std::string& path, int& exit_code) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot read config file " << path << std::endl;
        exit_code = 2;
        return "";
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string seeds;

    void attach(CLI::App* cmd, bool config_required = true) {
        auto* opt = cmd->add_option("--config", config_path, "path to the JSON run config");
        if (config_required) opt->required();
        cmd->add_option("--out", out_dir, "output directory override");
        cmd->add_option("--seeds", seeds, "comma-separated seed list override");
    }

    // ETA_IRL_OUT / ETA_IRL_SEED take effect when the flag was not given
    void apply_env_overrides() {
        if (out_dir.empty())
            if (const char* v = std::getenv("ETA_IRL_OUT")) out_dir = v;
        if (seeds.empty())
            if (const char* v = std::getenv("ETA_IRL_SEED")) seeds = v;
    }
};

using RunFn = etai_status (*)(const char*, const char*, const char*, char**);

int run_config_command(CommonArgs& args, RunFn fn) {
    args.apply_env_overrides();
    int exit_code = 0;
    const std::string config = read_file_or_die(args.config_path, exit_code);
    if (exit_code != 0) return exit_code;
    char* summary = nullptr;
    const etai_status status =
        fn(config.c_str(), args.out_dir.empty() ? nullptr : args.out_dir.c_str(),
           args.seeds.empty() ? nullptr : args.seeds.c_str(), &summary);
    return report(status, summary);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"eta-weighted occupancy-matching IRL toolkit"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);

    std::string suite = "all";
    auto* check = app.add_subcommand("check", "run an identity/property suite");
    check->add_option("--suite", suite, "suite name (or \"all\")");

    CommonArgs train_args, sweep_args, idle_args, gamma_args, eval_args;
    auto* train = app.add_subcommand("train", "train per the config across seeds");
    train_args.attach(train);
    auto* sweep = app.add_subcommand("sweep-eta", "one training cell per eta grid entry");
    sweep_args.attach(sweep);
    auto* idle = app.add_subcommand("idle", "train the adversarial future-state generator");
    idle_args.attach(idle);
    auto* gamma = app.add_subcommand("gamma-sweep", "uniform-sampling cells across gamma_rl");
    gamma_args.attach(gamma);
    auto* eval = app.add_subcommand("eval", "score a stored policy on an environment");
    eval_args.attach(eval);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;  // usage problems exit 2
    }

    if (check->parsed()) {
        char* report_json = nullptr;
        const etai_status status = etai_check_run(suite.c_str(), &report_json);
        return report(status, report_json);
    }
    if (train->parsed()) return run_config_command(train_args, etai_train_run);
    if (sweep->parsed()) return run_config_command(sweep_args, etai_sweep_eta_run);
    if (idle->parsed()) return run_config_command(idle_args, etai_idle_run);
    if (gamma->parsed()) return run_config_command(gamma_args, etai_gamma_sweep_run);
    if (eval->parsed()) return run_config_command(eval_args, etai_eval_run);
    return 2;
}
