#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "betapot/equilibrium.hpp"
#include "betapot/experiments.hpp"
#include "betapot/serialize.hpp"

using namespace betapot;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    fs::path p = fs::temp_directory_path() / "betapot_unit_experiments";
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json base_config() {
    json j;
    j["scenario"] = "equilibrium";
    j["field"] = {{"kind", "radial_poly"}, {"beta", 2.0}, {"coeffs", {0.0, 0.0, 1.0}}};
    j["domain"] = {{"kind", "disc"}, {"radius", 2.0}, {"resolution", 40}};
    return j;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(BETAPOT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int ret = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(ret));
    return WEXITSTATUS(ret);
}

json plateau_ldp_config() {
    // Q = r^2 tabulated up to r = 2, constant beyond; with a manual domain
    // cut at 8 the growth precondition fails while everything else is sane
    std::vector<double> absc, vals;
    for (int i = 0; i <= 100; ++i) {
        const double r = 0.02 * i;
        absc.push_back(r);
        vals.push_back(r * r);
    }
    FieldSpec plateau = make_tabulated1d_field(2.0, absc, vals, true);
    json j;
    j["scenario"] = "ldp";
    j["field"] = field_to_json(plateau);
    j["domain"] = {{"kind", "intervals"},
                   {"intervals", json::array({json::array({"-inf", "inf"})})},
                   {"resolution", 400},
                   {"truncation_override", 8.0}};
    j["window"] = {{"kind", "intervals"}, {"intervals", {{0.9, 1.1}}}};
    j["n_grid"] = {2, 3, 4, 5};
    j["sweeps"] = 400;
    j["burn_in"] = 100;
    return j;
}

}  // namespace

TEST_CASE("configs reject unknown keys by name") {
    json j = base_config();
    j["scnario"] = "equilibrium";
    try {
        parse_config(j);
        CHECK(false);
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("scnario") != std::string::npos);
    }

    json t = base_config();
    t["tolerances"] = {{"kkt", 1e-3}, {"kkt_residul", 1.0}};
    try {
        parse_config(t);
        CHECK(false);
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("kkt_residul") != std::string::npos);
    }

    json f = base_config();
    f["field"]["radius"] = 1.0;
    CHECK_THROWS_AS(parse_config(f), std::exception);
}

TEST_CASE("config validation rejects inconsistent blocks") {
    json j = base_config();
    j["n_grid"] = {8, 8, 16};
    CHECK_THROWS_AS(parse_config(j), std::exception);

    j = base_config();
    j["sweeps"] = 100;
    j["burn_in"] = 100;
    CHECK_THROWS_AS(parse_config(j), std::exception);

    j = base_config();
    j["thin"] = 0;
    CHECK_THROWS_AS(parse_config(j), std::exception);

    j = base_config();
    j["seeds"] = json::array();
    CHECK_THROWS_AS(parse_config(j), std::exception);

    // window outside the domain's bounding box
    j = base_config();
    j["window"] = {{"kind", "annulus"}, {"r_inner", 1.9}, {"r_outer", 2.4}};
    CHECK_THROWS_AS(parse_config(j), std::exception);

    j = base_config();
    j["sweeps_by_n"] = {{8, 1000, 3}};
    CHECK_THROWS_AS(parse_config(j), std::exception);

    // a fully-specified config parses and the per-size table is honored
    j = base_config();
    j["sweeps"] = 5000;
    j["sweeps_by_n"] = {{8, 1000}, {16, 2000}};
    ExperimentConfig cfg = parse_config(j);
    CHECK(cfg.sweeps_for(8) == 1000);
    CHECK(cfg.sweeps_for(16) == 2000);
    CHECK(cfg.sweeps_for(24) == 5000);
}

TEST_CASE("field definitions survive a json round trip") {
    std::vector<FieldSpec> fields;
    fields.push_back(make_real_poly_field(2.0, {0.1, 0.0, 0.5}, 1.5));
    fields.push_back(make_radial_poly_field(1.0, {0.0, 0.0, 1.0, 0.25}));
    fields.push_back(make_tabulated1d_field(2.0, {0.0, 1.0, 2.0}, {0.0, 0.5, 2.0}, true));
    fields.push_back(make_tabulated_nodes_field(2.0, {cpx(0.0, 0.0), cpx(1.0, -0.5)},
                                                {0.25, 0.75}));
    for (const FieldSpec& f : fields) {
        FieldSpec back = field_from_json(field_to_json(f));
        CHECK(back.beta == f.beta);
        CHECK(back.superlog_margin_b == f.superlog_margin_b);
        CHECK(back.q.kind == f.q.kind);
        for (cpx z : {cpx(0.3, 0.0), cpx(1.2, -0.4), cpx(0.9, 0.1)})
            CHECK(back.Q(z) == f.Q(z));
    }
}

TEST_CASE("domain definitions survive a json round trip") {
    std::vector<DomainSpec> specs(5);
    specs[0].kind = DomainKind::intervals;
    specs[0].intervals = {{-1.0, 0.5}, {1.0, std::numeric_limits<double>::infinity()}};
    specs[0].resolution = 64;
    specs[0].truncation_override = 12.0;
    specs[1].kind = DomainKind::disc;
    specs[1].radius = 2.5;
    specs[1].resolution = 40;
    specs[2].kind = DomainKind::annulus;
    specs[2].r_inner = 0.5;
    specs[2].r_outer = 2.0;
    specs[2].resolution = 48;
    specs[3].kind = DomainKind::rectangle;
    specs[3].x0 = -2.0;
    specs[3].x1 = 1.0;
    specs[3].y0 = -0.5;
    specs[3].y1 = 0.5;
    specs[3].resolution = 32;
    specs[3].tau_scale = 2.0;
    specs[4].kind = DomainKind::circle;
    specs[4].radius = 1.0;
    specs[4].resolution = 96;

    for (const DomainSpec& s : specs) {
        DomainSpec back = domain_from_json(domain_to_json(s));
        CHECK(back.kind == s.kind);
        CHECK(back.resolution == s.resolution);
        CHECK(back.tau_scale == s.tau_scale);
        CHECK(back.intervals == s.intervals);
        CHECK(back.radius == s.radius);
        CHECK(back.r_inner == s.r_inner);
        CHECK(back.r_outer == s.r_outer);
        CHECK(back.x0 == s.x0);
        CHECK(back.x1 == s.x1);
        CHECK(back.truncation_override == s.truncation_override);
    }
}

TEST_CASE("windows and solutions survive a json round trip") {
    Window wi;
    wi.kind = Window::Kind::intervals;
    wi.intervals = {{0.9, 1.3}};
    Window wd;
    wd.kind = Window::Kind::disc;
    wd.center = cpx(0.25, -1.0);
    wd.radius = 0.5;
    Window wa;
    wa.kind = Window::Kind::annulus;
    wa.r_inner = 0.6;
    wa.r_outer = 0.84;
    for (const Window& w : {wi, wd, wa}) {
        Window back = window_from_json(window_to_json(w));
        CHECK(back.kind == w.kind);
        CHECK(back.intervals == w.intervals);
        CHECK(back.center == w.center);
        CHECK(back.radius == w.radius);
        CHECK(back.r_inner == w.r_inner);
        CHECK(back.r_outer == w.r_outer);
    }

    FieldSpec f = make_radial_poly_field(2.0, {0.0, 0.0, 1.0});
    DomainSpec d;
    d.kind = DomainKind::disc;
    d.radius = 2.0;
    d.resolution = 24;
    DomainGrid g = build_grid(d, &f);
    EquilibriumSolution sol = solve_equilibrium(g, f);
    EquilibriumSolution back = solution_from_json(solution_to_json(sol));
    CHECK(back.rho == sol.rho);
    CHECK(back.kkt_residual == sol.kkt_residual);
    CHECK(back.weights == sol.weights);
    CHECK(rate_function(back, f, cpx(1.1, 0.0)) == rate_function(sol, f, cpx(1.1, 0.0)));
}

TEST_CASE("sampling runs are byte-for-byte reproducible") {
    json j = base_config();
    j["scenario"] = "sample";
    j["n"] = 2;
    j["seeds"] = {1, 2};
    j["sweeps"] = 1200;
    j["burn_in"] = 200;
    j["thin"] = 10;
    ExperimentConfig cfg = parse_config(j);

    const fs::path d1 = work_dir() / "rep1";
    const fs::path d2 = work_dir() / "rep2";
    RunResult r1 = run_sample_experiment(cfg, d1.string());
    RunResult r2 = run_sample_experiment(cfg, d2.string());
    CHECK(r1.pass);
    CHECK(r2.pass);
    const std::string s1 = slurp(d1 / "samples.csv");
    const std::string s2 = slurp(d2 / "samples.csv");
    REQUIRE(!s1.empty());
    CHECK(s1 == s2);
}

TEST_CASE("rate scenarios stop when the growth precondition fails") {
    ExperimentConfig cfg = parse_config(plateau_ldp_config());
    try {
        run_ldp_experiment(cfg, (work_dir() / "gate").string());
        CHECK(false);
    } catch (const HypothesisViolation& e) {
        CHECK(e.hypothesis == "superlogarithmic-growth");
    }
}

TEST_CASE("unknown scenarios are refused at dispatch") {
    ExperimentConfig cfg;
    cfg.scenario = "frobnicate";
    cfg.field = make_radial_poly_field(2.0, {0.0, 0.0, 1.0});
    cfg.domain.kind = DomainKind::disc;
    cfg.domain.radius = 2.0;
    cfg.domain.resolution = 24;
    CHECK_THROWS_AS(run_experiment(cfg, (work_dir() / "nope").string()),
                    std::runtime_error);
}

TEST_CASE("command-line driver maps outcomes to exit codes") {
    const fs::path dir = work_dir();

    // clean run: verdict pass -> 0
    json ok = base_config();
    write_text((dir / "ok.json").string(), ok.dump(2));
    CHECK(run_cli("equilibrium --config " + (dir / "ok.json").string() + " --out " +
                  (dir / "ok_out").string()) == 0);

    // unreachable stationarity tolerance: verdict fail -> 1
    json strict = base_config();
    strict["tolerances"] = {{"kkt", 1e-12}};
    write_text((dir / "strict.json").string(), strict.dump(2));
    CHECK(run_cli("equilibrium --config " + (dir / "strict.json").string() + " --out " +
                  (dir / "strict_out").string()) == 1);

    // growth precondition violated -> 2
    write_text((dir / "gate.json").string(), plateau_ldp_config().dump(2));
    CHECK(run_cli("ldp --config " + (dir / "gate.json").string() + " --out " +
                  (dir / "gate_out").string()) == 2);

    // malformed config (window outside the domain) -> 3
    json bad = base_config();
    bad["window"] = {{"kind", "annulus"}, {"r_inner", 1.9}, {"r_outer", 2.4}};
    write_text((dir / "bad.json").string(), bad.dump(2));
    CHECK(run_cli("equilibrium --config " + (dir / "bad.json").string() + " --out " +
                  (dir / "bad_out").string()) == 3);

    // scenario/subcommand mismatch -> 3
    CHECK(run_cli("sample --config " + (dir / "ok.json").string() + " --out " +
                  (dir / "mismatch_out").string()) == 3);
}
