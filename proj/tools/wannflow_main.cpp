// Command line front end: wires the config file to the pipeline commands and
// maps the library's error hierarchy onto stable exit codes.

#include <CLI11.hpp>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wannflow/errors.hpp"
#include "wannflow/pipeline.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    bool overwrite = false;
    bool quiet = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "Run configuration file (JSON)")
        ->required();
    cmd->add_option("--seed", flags.seed, "Override the global seed");
    cmd->add_option("--out", flags.out_dir, "Override the output directory");
    cmd->add_flag("--overwrite", flags.overwrite, "Allow overwriting existing artifacts");
    cmd->add_flag("--quiet", flags.quiet, "Suppress progress output");
}

wannflow::RunConfig effective_config(const CommonFlags& flags) {
    wannflow::RunConfig config = wannflow::load_run_config(flags.config_path);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.out_dir) config.out_dir = *flags.out_dir;
    if (flags.overwrite) config.overwrite = true;
    if (flags.quiet) config.quiet = true;
    return config;
}

int run(const std::function<void(const wannflow::RunConfig&)>& body, const CommonFlags& flags) {
    try {
        body(effective_config(flags));
        return static_cast<int>(wannflow::ExitCode::ok);
    } catch (const wannflow::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return static_cast<int>(wannflow::ExitCode::config_error);
    } catch (const wannflow::DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return static_cast<int>(wannflow::ExitCode::data_error);
    } catch (const wannflow::ComputeError& e) {
        std::fprintf(stderr, "computation error: %s\n", e.what());
        return static_cast<int>(wannflow::ExitCode::compute_error);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "computation error: %s\n", e.what());
        return static_cast<int>(wannflow::ExitCode::compute_error);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flow-record traffic classifier: stacked random-weight reservoirs with "
                 "trained readouts, weight-agnostic topology search, predictive-power "
                 "feature selection, and Shapley explanations"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        void (*body)(const wannflow::RunConfig&);
    };
    const Sub subs[] = {
        {"ingest", "Load (or synthesize), normalize, and split the dataset", wannflow::cmd_ingest},
        {"pps", "Score features against the label and select a subset", wannflow::cmd_pps},
        {"train", "Fit the readout of a fixed genome and evaluate it", wannflow::cmd_train},
        {"search", "Run the weight-agnostic evolutionary topology search", wannflow::cmd_search},
        {"explain", "Compute Shapley attributions for test rows", wannflow::cmd_explain},
        {"evaluate", "Evaluate a saved model on the test split", wannflow::cmd_evaluate},
        {"datagen", "Write the synthetic dataset as a raw CSV", wannflow::cmd_datagen},
    };

    std::vector<std::unique_ptr<CommonFlags>> flag_sets;
    int exit_code = static_cast<int>(wannflow::ExitCode::ok);
    for (const Sub& sub : subs) {
        auto flags = std::make_unique<CommonFlags>();
        CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
        add_common_flags(cmd, *flags);
        CommonFlags* flags_ptr = flags.get();
        auto body = sub.body;
        cmd->callback([body, flags_ptr, &exit_code]() { exit_code = run(body, *flags_ptr); });
        flag_sets.push_back(std::move(flags));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // --help prints and exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(wannflow::ExitCode::config_error);
    }
    return exit_code;
}
