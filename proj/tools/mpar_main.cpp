#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "mpar/experiment.hpp"
#include "mpar/verify.hpp"

namespace {

int log_level() {
    const char* env = std::getenv("MPAR_LOG");
    if (!env) return 1;
    const std::string v = env;
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
}

int cmd_run(const std::string& config_path) {
    const auto spec = mpar::parse_config(config_path);
    const auto result = mpar::run_experiment(spec);
    if (log_level() >= 1) {
        std::cout << result.table.to_csv();
        std::cout << "wrote " << spec.output_dir << "/" << spec.name << ".csv ("
                  << result.log_paths.size() << " run logs)\n";
    }
    if (result.any_fault) {
        std::cerr << "invariant fault in run: " << result.fault_info << "\n";
        return 2;
    }
    return 0;
}

int cmd_verify(const std::string& fixture_path) {
    namespace fs = std::filesystem;
    std::string path = fixture_path;
    if (path.empty()) {
        if (fs::exists("fixtures/worked_example.json"))
            path = "fixtures/worked_example.json";
        else {
            std::cerr << "no fixture found (looked for fixtures/worked_example.json); "
                         "pass a path\n";
            return 2;
        }
    }
    const auto fx = mpar::load_fixture(path);
    const auto report = mpar::verify_fixture(fx);
    std::cout << report.render();
    return report.all_pass() ? 0 : 1;
}

int cmd_trace(const std::string& config_path, int message, const std::string& protocol,
              int seed_index) {
    auto spec = mpar::parse_config(config_path);
    mpar::Protocol proto =
        protocol.empty() ? spec.protocols.front() : mpar::protocol_from_name(protocol);
    const auto sc = mpar::scenario_for(spec, proto, spec.values.front());
    const auto run = mpar::run_scenario(sc, mpar::run_seed_for(spec, seed_index));
    for (const auto& rec : run.log.records) {
        if (message >= 0 && rec.msg != message) continue;
        mpar::EventLog one;
        one.records.push_back(rec);
        std::cout << one.to_ndjson();
    }
    return run.invariants.ok() ? 0 : 2;
}

int cmd_opt(const std::string& fixture_path, const std::string& algo, int fixed_length,
            int theta, std::uint64_t seed, const std::string& trace_out,
            const std::string& start_bits) {
    const auto fx = mpar::load_fixture(fixture_path);
    const auto ev = fx.evaluator();

    mpar::SolutionBits start(static_cast<size_t>(ev.relay_count()), 0);
    if (start_bits.empty()) {
        start[static_cast<size_t>(ev.relay_index(fx.source))] = 1;
    } else {
        if (start_bits.size() != start.size())
            throw mpar::parameter_error("--start must have one bit per relay candidate");
        for (size_t i = 0; i < start_bits.size(); ++i)
            start[i] = start_bits[i] == '1' ? 1 : 0;
    }

    mpar::SolutionBits result;
    mpar::SearchTrace trace;
    if (algo == "brute") {
        result = mpar::brute_force_opt(ev);
    } else {
        mpar::TabuParams params;
        params.theta = theta;
        params.seed = seed;
        if (fixed_length > 0) {
            params.fixed_length = true;
            params.fixed_value = fixed_length;
        }
        if (algo == "local")
            std::tie(result, trace) = mpar::local_search(start, ev);
        else if (algo == "tabu")
            std::tie(result, trace) = mpar::tabu_search(start, ev, params);
        else
            throw mpar::parameter_error("--algo must be local, tabu or brute");
    }

    std::cout << "solution " << mpar::solution_to_string(result) << "\n";
    std::cout << "relays {";
    bool first = true;
    for (mpar::NodeId n : ev.relays_of(result)) {
        if (!first) std::cout << ",";
        std::cout << fx.label(n);
        first = false;
    }
    std::cout << "}\n";
    std::cout << "probability " << ev.probability(result) << "\n";
    if (!trace_out.empty() && algo != "brute") {
        std::ofstream out(trace_out);
        out << mpar::trace_to_json(trace);
        if (log_level() >= 1) std::cout << "trace written to " << trace_out << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"movement-pattern-aware DTN routing toolkit"};
    app.require_subcommand(1);

    std::string config_path, fixture_path, protocol, trace_out, start_bits, algo = "tabu";
    int message = -1, seed_index = 0, fixed_length = 0, theta = 0;
    std::uint64_t seed = 1;

    auto* run = app.add_subcommand("run", "run an experiment sweep from a config");
    run->add_option("config", config_path, "experiment config (JSON)")->required();

    auto* verify = app.add_subcommand("verify", "recompute the reference fixture values");
    verify->add_option("fixture", fixture_path, "fixture path");

    auto* trace = app.add_subcommand("trace", "dump the event log of one message");
    trace->add_option("config", config_path, "experiment config (JSON)")->required();
    trace->add_option("--message", message, "message id (default: all)");
    trace->add_option("--protocol", protocol, "protocol override");
    trace->add_option("--seed", seed_index, "seed index (default 0)");

    auto* opt = app.add_subcommand("opt", "run a relay-set search on a fixture");
    opt->add_option("fixture", fixture_path, "fixture path")->required();
    opt->add_option("--algo", algo, "local | tabu | brute");
    opt->add_option("--fixed-L", fixed_length, "constant tabu tenure");
    opt->add_option("--theta", theta, "stop patience");
    opt->add_option("--seed", seed, "rng seed for stochastic tenures");
    opt->add_option("--trace", trace_out, "write the search trace as JSON");
    opt->add_option("--start", start_bits, "start vector, e.g. 010");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (verify->parsed()) return cmd_verify(fixture_path);
        if (trace->parsed()) return cmd_trace(config_path, message, protocol, seed_index);
        if (opt->parsed())
            return cmd_opt(fixture_path, algo, fixed_length, theta, seed, trace_out,
                           start_bits);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
