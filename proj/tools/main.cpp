#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reflectgan/errors.hpp"
#include "reflectgan/pipeline.hpp"

namespace {

rg::pipeline::RunConfig build_config(const std::string& config_path,
                                     const std::vector<std::string>& overrides) {
    rg::pipeline::RunConfig cfg;
    if (!config_path.empty()) cfg = rg::pipeline::load_config(config_path);
    for (const auto& o : overrides) rg::pipeline::apply_override(cfg, o);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bare-soil reflectance reconstruction and SOC estimation pipeline"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("-c,--config", config_path, "flat key=value config file");
    app.add_option("-s,--set", overrides,
                   "override a config entry as key=value (repeatable, wins over the file)");

    auto* synth = app.add_subcommand("synth", "generate a synthetic soil/vegetation dataset");
    auto* pair = app.add_subcommand("pair", "build (vegetated, bare) training pairs");
    auto* train_gan = app.add_subcommand("train-gan", "train the reflectance generator");
    auto* reconstruct =
        app.add_subcommand("reconstruct", "rewrite vegetated spectra through the generator");
    auto* train_soc =
        app.add_subcommand("train-soc", "cross-validate and persist the SOC regressors");
    auto* evaluate = app.add_subcommand("evaluate", "run the full scenario matrix");
    auto* compare = app.add_subcommand("compare-baselines",
                                       "spectral fidelity of each correction vs ground truth");
    auto* grad_check =
        app.add_subcommand("grad-check", "finite-difference check of every backward pass");

    CLI11_PARSE(app, argc, argv);

    try {
        if (grad_check->parsed()) {
            const auto table = rg::pipeline::cmd_grad_check(std::cout);
            return table.all_pass ? 0 : 2;
        }
        const rg::pipeline::RunConfig cfg = build_config(config_path, overrides);
        if (synth->parsed()) {
            rg::pipeline::cmd_synth(cfg, std::cout);
        } else if (pair->parsed()) {
            rg::pipeline::cmd_pair(cfg, std::cout);
        } else if (train_gan->parsed()) {
            rg::pipeline::cmd_train_gan(cfg, std::cout);
        } else if (reconstruct->parsed()) {
            rg::pipeline::cmd_reconstruct(cfg, std::cout);
        } else if (train_soc->parsed()) {
            rg::pipeline::cmd_train_soc(cfg, std::cout);
        } else if (evaluate->parsed()) {
            rg::pipeline::cmd_evaluate(cfg, std::cout);
        } else if (compare->parsed()) {
            rg::pipeline::cmd_compare_baselines(cfg, std::cout);
        }
        return 0;
    } catch (const rg::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
