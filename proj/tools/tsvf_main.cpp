#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "tsvf/emit.hpp"
#include "tsvf/measurement.hpp"
#include "tsvf/runner.hpp"

// Command-line front end.  Exit codes: 0 success, 2 validation error (bad
// usage, unreadable file, config problems), 3 numeric-guard failure (runtime
// cross-checks like backend agreement).

namespace {

using namespace tsvf;

int run_verb(const std::string& scenario_path, bool seed_set, uint64_t seed,
             const std::string& backend, const std::string& out_dir, const std::string& format) {
    std::ifstream in(scenario_path, std::ios::binary);
    if (!in) {
        std::cerr << "cannot read scenario file " << scenario_path << "\n";
        return 2;
    }
    std::ostringstream text;
    text << in.rdbuf();

    ParseResult parsed = parse_scenario(text.str());
    if (!parsed.ok()) {
        for (const auto& e : parsed.errors) std::cerr << e << "\n";
        if (parsed.errors.empty()) std::cerr << "invalid scenario\n";
        return 2;
    }
    ScenarioConfig cfg = std::move(*parsed.config);
    if (seed_set) cfg.seed = seed;
    if (!backend.empty()) {
        if (backend == "dense") cfg.backend = BackendMode::dense;
        else if (backend == "product") cfg.backend = BackendMode::product;
        else cfg.backend = BackendMode::both;
    }

    try {
        const ResultSet rs = run_scenario(cfg);
        const EmitFormat fmt = format == "json" ? EmitFormat::json : EmitFormat::csv;
        for (const auto& path : emit(rs, fmt, out_dir)) std::cout << path << "\n";
        return 0;
    } catch (const ScenarioRunError& e) {
        std::cerr << e.what() << "\n";
        return e.validation ? 2 : 3;
    }
}

int demo_verb(bool rotate) {
    const SignalingResult r = signaling_demo(rotate);
    std::cout << "left flip: " << (r.left_flipped ? "on" : "off") << "\n";
    std::cout << "with the assigned future boundary:  p(up_R) = " << format_double(r.p_up_right)
              << ", p(down_R) = " << format_double(r.p_down_right) << "\n";
    std::cout << "with the evolved preparation:       p(up_R) = "
              << format_double(r.causal_p_up_right)
              << ", p(down_R) = " << format_double(r.causal_p_down_right) << "\n";
    std::cout << "note: " << r.note << "\n";
    return 0;
}

int bench_verb(int n_min, int n_max) {
    if (n_max < n_min) {
        std::cerr << "--n-max must be >= --n-min\n";
        return 2;
    }
    ScenarioConfig cfg{ScenarioKind::benchmark, 0, BackendMode::product,
                       BenchmarkParams{n_min, n_max}};
    try {
        const ResultSet rs = run_scenario(cfg);
        for (const auto& row : rs.tables.at(0).rows)
            std::cout << render_cell(row[1]) << " backend, n = " << render_cell(row[0]) << ": "
                      << render_cell(row[2]) << " ns/call\n";
        for (const auto& [key, cell] : rs.summary)
            std::cout << key << " = " << render_cell(cell) << "\n";
        return 0;
    } catch (const ScenarioRunError& e) {
        std::cerr << e.what() << "\n";
        return e.validation ? 2 : 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-boundary quantum toy-model laboratory"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run a scenario config and emit its results");
    std::string scenario_path, out_dir, backend, format = "csv";
    uint64_t seed = 0;
    run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory")->required();
    auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
    run->add_option("--backend", backend, "override the backend")
        ->check(CLI::IsMember({"dense", "product", "both"}));
    run->add_option("--format", format, "output format (default csv)")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* demo = app.add_subcommand("demo", "print a built-in demonstration");
    std::string what;
    bool rotate = false;
    demo->add_option("what", what, "demo name (signaling)")->required();
    demo->add_flag("--rotate", rotate, "flip the left qubit before the boundaries are compared");

    auto* bench = app.add_subcommand("bench", "time the correlation-amplitude backends");
    int n_min = 1000, n_max = 10000;
    bench->add_option("--n-min", n_min, "small environment size")->check(CLI::Range(1, 100000));
    bench->add_option("--n-max", n_max, "large environment size")->check(CLI::Range(1, 100000));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (run->parsed())
        return run_verb(scenario_path, seed_opt->count() > 0, seed, backend, out_dir, format);
    if (demo->parsed()) {
        if (what != "signaling") {
            std::cerr << "unknown demo '" << what << "' (available: signaling)\n";
            return 2;
        }
        return demo_verb(rotate);
    }
    if (bench->parsed()) return bench_verb(n_min, n_max);
    return 2;
}
