#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "betapot/domain.hpp"
#include "betapot/field.hpp"
#include "betapot/serialize.hpp"

namespace betapot {

struct Tolerances {
    double kkt = 1e-3;
    double ldp_relative_gap = 0.15;
    double ratio_band = 0.10;
    double bm_final = 1.1;
    double energy_rel = 0.15;
    double energy_abs = 0.1;
};

struct ExperimentConfig {
    std::string scenario;  // equilibrium | sample | ldp | ratio | bm
    FieldSpec field;
    DomainSpec domain;
    std::optional<Window> window;
    std::vector<int> n_grid;
    std::vector<unsigned long long> seeds = {1, 2, 3, 4, 5, 6, 7, 8};
    long sweeps = 20000;
    std::vector<std::pair<int, long>> sweeps_by_n;  // per-n overrides
    long burn_in = -1;
    int thin = 1;
    int n = 2;  // coordinate count for the sample scenario
    int quad_order = 32;
    double dilation_cells = 2.0;
    int trials = 50;
    int bm_screen_resolution = 0;  // 0: pick automatically
    std::string output_dir;
    Tolerances tol;

    long sweeps_for(int n_value) const;
    void validate() const;
};

ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::string& path);

// named failure of a precondition the rate theory needs; mapped to exit code 2
struct HypothesisViolation : std::runtime_error {
    std::string hypothesis;
    HypothesisViolation(const std::string& hyp, const std::string& detail)
        : std::runtime_error(hyp + ": " + detail), hypothesis(hyp) {}
};

struct RunResult {
    bool pass = false;
    json summary;
};

RunResult run_equilibrium_experiment(const ExperimentConfig& cfg, const std::string& outdir);
RunResult run_sample_experiment(const ExperimentConfig& cfg, const std::string& outdir);
RunResult run_ldp_experiment(const ExperimentConfig& cfg, const std::string& outdir);
RunResult run_ratio_experiment(const ExperimentConfig& cfg, const std::string& outdir);
RunResult run_bm_experiment(const ExperimentConfig& cfg, const std::string& outdir);

// dispatch on cfg.scenario
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& outdir);

}  // namespace betapot
