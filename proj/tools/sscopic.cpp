#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sscopic/error.hpp"
#include "sscopic/io.hpp"
#include "sscopic/states.hpp"
#include "sscopic/suites.hpp"

using namespace sscopic;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInternal = 1;

struct Globals {
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string config;
};

void emit(const Globals& g, const std::string& text) {
    if (g.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(g.out);
    require(static_cast<bool>(f), ErrorCode::InvalidArgument, "cannot write " + g.out);
    f << text;
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

// "coherent:A", "cat:A", "squeezed:R", "tmss:R", "phenom:VX,VP".
std::vector<double> scaled(std::vector<double> v, double k) {
    for (double& x : v) x *= k;
    return v;
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string mode, x, p, joint, criteria, s_grid, estimator, calibration;
    std::optional<double> bin_width, k, s_hi;
    std::optional<std::size_t> replicas;
    std::size_t soundness_trials = 0;
};

int run_analyze(const Globals& g, const AnalyzeArgs& a) {
    AnalysisConfig config;
    if (!g.config.empty()) {
        std::ifstream f(g.config);
        require(static_cast<bool>(f), ErrorCode::Parse, "cannot open config " + g.config);
        nlohmann::json j;
        try {
            f >> j;
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::Parse, g.config + ": " + e.what());
        }
        config = config_from_json(j);
    }
    if (!a.mode.empty()) {
        const auto m = parse_mode(a.mode);
        require(m.has_value(), ErrorCode::InvalidArgument, "unknown mode '" + a.mode + "'");
        config.mode = *m;
    }
    if (!a.criteria.empty()) {
        config.criteria.clear();
        std::stringstream ss(a.criteria);
        for (std::string tok; std::getline(ss, tok, ',');) {
            const auto id = parse_criterion(tok);
            require(id.has_value(), ErrorCode::InvalidArgument, "unknown criterion '" + tok + "'");
            config.criteria.push_back(*id);
        }
    }
    if (config.criteria.empty()) config.criteria = criteria_for(config.mode);
    if (!a.s_grid.empty()) config.s_grid = SGridSpec::parse(a.s_grid);
    if (!a.estimator.empty()) {
        const auto e = parse_estimator(a.estimator);
        require(e.has_value(), ErrorCode::InvalidArgument, "unknown estimator '" + a.estimator + "'");
        config.estimator = *e;
    }
    if (a.bin_width) config.bin_width = *a.bin_width;
    if (a.k) config.significance_k = *a.k;
    if (a.s_hi) config.s_hi = a.s_hi;
    if (a.replicas) config.bootstrap_replicas = *a.replicas;
    if (g.seed_set) config.seed = g.seed;
    config.validate();

    const double scale = a.calibration.empty() ? 1.0 : calibration_scale(read_single_column(a.calibration));
    AnalysisInput input;
    require(!a.x.empty(), ErrorCode::ModeMismatch, "analyze needs --x");
    input.x = scaled(read_single_column(a.x), scale);
    if (config.mode == Mode::BipartiteInference) {
        require(!a.joint.empty(), ErrorCode::ModeMismatch, "bipartite-inference needs --joint");
        const auto j = read_two_column(a.joint);
        input.joint.emplace(scaled({j.pa().begin(), j.pa().end()}, scale), scaled({j.pb().begin(), j.pb().end()}, scale));
    } else {
        require(!a.p.empty(), ErrorCode::ModeMismatch, std::string(to_string(config.mode)) + " needs --p");
        input.p = scaled(read_single_column(a.p), scale);
    }

    auto report = run_analysis(config, input);
    if (a.soundness_trials > 0) {
        const double cap[] = {config.s_grid.values().back()};
        report.soundness = to_json(verify_fuzz(cap, a.soundness_trials, config.seed));
    }
    auto j = to_json(report);
    if (!a.calibration.empty()) j["calibration_scale"] = scale;
    emit(g, dump(j));
    return 0;
}

// ---------------------------------------------------------------------------

int run_simulate(const Globals& g, const std::string& state_spec, const std::string& quadrature, std::size_t n) {
    const auto state = parse_state(state_spec);
    std::ostringstream os;
    os << "# " << state.name() << " " << quadrature << " n=" << n << " seed=" << g.seed << "\n";
    if (quadrature == "x" || quadrature == "p") {
        write_single_column(os, sample(state, quadrature == "x" ? Quadrature::X : Quadrature::P, n, g.seed));
    } else if (quadrature == "joint") {
        write_two_column(os, sample_joint_p(state, n, g.seed));
    } else if (quadrature == "sum-x" || quadrature == "sum-p") {
        write_single_column(os, sample_sum(state, quadrature == "sum-x" ? Quadrature::X : Quadrature::P, n, g.seed));
    } else {
        fail(ErrorCode::InvalidArgument, "unknown quadrature '" + quadrature + "'");
    }
    emit(g, os.str());
    return 0;
}

// ---------------------------------------------------------------------------

int run_smax(const Globals& g, const std::string& state_spec, const std::string& criterion,
             std::optional<double> s_hi) {
    const auto state = parse_state(state_spec);
    const auto id = parse_criterion(criterion);
    require(id.has_value(), ErrorCode::InvalidArgument, "unknown criterion '" + criterion + "'");
    SMaxOptions opts;
    opts.s_hi = s_hi;
    const auto r = state_smax(state, *id, opts);
    nlohmann::ordered_json j;
    j["state"] = state.name();
    j.update(to_json(r));
    emit(g, dump(j));
    return 0;
}

// ---------------------------------------------------------------------------

int run_curve(const Globals& g, const std::string& task_name, std::optional<double> from, std::optional<double> to,
              std::optional<std::size_t> points, std::optional<double> var_p) {
    const auto task = parse_curve_task(task_name);
    require(task.has_value(), ErrorCode::InvalidArgument, "unknown curve task '" + task_name + "'");
    auto params = default_curve_params(*task);
    if (from) params.from = *from;
    if (to) params.to = *to;
    if (points) params.points = *points;
    if (var_p) params.var_p = *var_p;
    std::ostringstream os;
    write_csv(os, emit_curve(*task, params));
    emit(g, os.str());
    return 0;
}

// ---------------------------------------------------------------------------

int run_verify(const Globals& g, const std::string& suite, std::size_t trials, const std::vector<double>& caps) {
    const bool all = suite == "all";
    require(all || suite == "fuzz" || suite == "grid" || suite == "appendix-a" || suite == "appendix-b",
            ErrorCode::InvalidArgument, "unknown suite '" + suite + "'");
    std::vector<SuiteOutcome> outcomes;
    if (all || suite == "grid") outcomes.push_back(verify_grid());
    if (all || suite == "fuzz") outcomes.push_back(verify_fuzz(caps, trials, g.seed));
    if (all || suite == "appendix-a") outcomes.push_back(verify_appendix_a(100, 6, g.seed));
    if (all || suite == "appendix-b") outcomes.push_back(verify_appendix_b(100, 2000, g.seed));

    nlohmann::ordered_json j;
    j["tool"] = "sscopic";
    j["version"] = kVersion;
    j["seed"] = g.seed;
    bool ok = true;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& o : outcomes) {
        ok = ok && o.passed();
        arr.push_back(to_json(o));
    }
    j["passed"] = ok;
    j["suites"] = arr;
    emit(g, dump(j));
    return ok ? 0 : static_cast<int>(ErrorCode::SoundnessViolation);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certify S-scopic quantum superpositions from quadrature statistics"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    Globals g;
    app.add_option("--seed", g.seed, "Random seed (simulation, bootstrap, fuzz)")->each([&](const std::string&) {
        g.seed_set = true;
    });
    app.add_option("--out", g.out, "Write output to this file instead of stdout");
    app.add_option("--config", g.config, "JSON analysis config (flags override)");

    AnalyzeArgs aa;
    auto* analyze = app.add_subcommand("analyze", "Evaluate criteria on sample files and print a JSON report");
    analyze->add_option("--mode", aa.mode, "single | bipartite-inference | bipartite-sum");
    analyze->add_option("--x", aa.x, "x (or x^A, or sum-x) sample file");
    analyze->add_option("--p", aa.p, "p (or sum-p) sample file");
    analyze->add_option("--joint", aa.joint, "two-column (pA, pB) sample file");
    analyze->add_option("--criteria", aa.criteria, "comma-separated criterion names");
    analyze->add_option("--s-grid", aa.s_grid, "start:stop:count");
    analyze->add_option("--estimator", aa.estimator, "linear | conditional");
    analyze->add_option("--bin-width", aa.bin_width, "pB bin width for the conditional estimator");
    analyze->add_option("--replicas", aa.replicas, "bootstrap replicas");
    analyze->add_option("--k", aa.k, "significance multiplier on the bootstrap standard error");
    analyze->add_option("--s-hi", aa.s_hi, "upper end of the s_max scan");
    analyze->add_option("--calibration", aa.calibration, "vacuum reference sample file for unit rescaling");
    analyze->add_option("--soundness", aa.soundness_trials, "run this many fuzz trials and attach the summary");

    std::string sim_state, sim_quad = "x";
    std::size_t sim_n = 100000;
    auto* simulate = app.add_subcommand("simulate", "Draw quadrature samples from a state model");
    simulate->add_option("--state", sim_state, "coherent:A | cat:A | squeezed:R | tmss:R | phenom:VX,VP")->required();
    simulate->add_option("--quadrature", sim_quad, "x | p | joint | sum-x | sum-p");
    simulate->add_option("-n,--samples", sim_n, "number of samples");

    std::string smax_state, smax_crit;
    std::optional<double> smax_hi;
    auto* smax = app.add_subcommand("smax", "Largest certified S for a state model");
    smax->add_option("--state", smax_state, "state spec as for simulate")->required();
    smax->add_option("--criterion", smax_crit, "criterion name")->required();
    smax->add_option("--s-hi", smax_hi, "upper end of the scan");

    std::string curve_task;
    std::optional<double> c_from, c_to, c_var_p;
    std::optional<std::size_t> c_points;
    auto* curve = app.add_subcommand("curve", "Emit a CSV curve");
    curve->add_option("task", curve_task, "fig8 | fig10 | fig10-inset | cat-smax")->required();
    curve->add_option("--from", c_from, "first abscissa");
    curve->add_option("--to", c_to, "last abscissa");
    curve->add_option("--points", c_points, "number of points");
    curve->add_option("--var-p", c_var_p, "fixed var_p for fig10-inset");

    std::string suite = "all";
    std::size_t trials = 1000;
    std::vector<double> caps{1.0, 2.0, 4.0, 8.0};
    auto* verify = app.add_subcommand("verify", "Run oracle suites; exit 14 on any violation");
    verify->add_option("--suite", suite, "all | fuzz | grid | appendix-a | appendix-b");
    verify->add_option("--trials", trials, "fuzz trials per cap");
    verify->add_option("--s-cap", caps, "fuzz caps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*analyze) return run_analyze(g, aa);
        if (*simulate) return run_simulate(g, sim_state, sim_quad, sim_n);
        if (*smax) return run_smax(g, smax_state, smax_crit, smax_hi);
        if (*curve) return run_curve(g, curve_task, c_from, c_to, c_points, c_var_p);
        if (*verify) return run_verify(g, suite, trials, caps);
    } catch (const Error& e) {
        std::cerr << "sscopic: " << to_string(e.code()) << ": " << e.what() << "\n";
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::cerr << "sscopic: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}
