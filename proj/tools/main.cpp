// betapot command line: equilibrium weights, ensemble sampling, rate-of-decay
// verification, partition ratios, and weighted polynomial diagnostics.
//
// Exit codes: 0 checks passed, 1 a verdict failed, 2 a hypothesis of the
// asymptotic theory is violated by the configuration, 3 runtime error.
#include <cstdio>
#include <exception>
#include <string>

#include "CLI11.hpp"
#include "betapot/experiments.hpp"

namespace {

struct SubArgs {
    std::string config_path;
    std::string out_dir;
};

void add_common(CLI::App* sub, SubArgs& args) {
    sub->add_option("--config", args.config_path, "JSON configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out_dir, "output directory")->required();
}

int run_scenario(const std::string& scenario, const SubArgs& args) {
    betapot::ExperimentConfig cfg = betapot::load_config(args.config_path);
    if (cfg.scenario != scenario)
        throw std::runtime_error("config scenario \"" + cfg.scenario +
                                 "\" does not match subcommand \"" + scenario + "\"");
    betapot::RunResult res = betapot::run_experiment(cfg, args.out_dir);
    std::printf("%s: %s\n", scenario.c_str(), res.pass ? "pass" : "fail");
    return res.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted potential theory workbench"};
    app.require_subcommand(1);

    SubArgs eq, sa, ld, ra, bm;
    CLI::App* sub_eq = app.add_subcommand("equilibrium", "solve for the equilibrium measure");
    add_common(sub_eq, eq);
    CLI::App* sub_sa = app.add_subcommand("sample", "run Metropolis chains and dump samples");
    add_common(sub_sa, sa);
    CLI::App* sub_ld = app.add_subcommand("ldp", "verify the window-probability decay rate");
    add_common(sub_ld, ld);
    CLI::App* sub_ra = app.add_subcommand("ratio", "partition ratio growth against the target");
    add_common(sub_ra, ra);
    CLI::App* sub_bm = app.add_subcommand("bm", "weighted polynomial sup/L2 diagnostics");
    add_common(sub_bm, bm);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sub_eq->parsed()) return run_scenario("equilibrium", eq);
        if (sub_sa->parsed()) return run_scenario("sample", sa);
        if (sub_ld->parsed()) return run_scenario("ldp", ld);
        if (sub_ra->parsed()) return run_scenario("ratio", ra);
        if (sub_bm->parsed()) return run_scenario("bm", bm);
    } catch (const betapot::HypothesisViolation& e) {
        std::fprintf(stderr, "hypothesis violation: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 3;
}
