#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mpar/engine.hpp"

namespace mpar {

enum class SweepAxis { ttl, buffer, nodes };

const char* axis_name(SweepAxis axis);

// Deterministic synthetic rate matrix: each node's row is drawn from its own
// stream, so growing the node count leaves existing rows untouched.
struct RateGenerator {
    bool enabled = false;
    double min_rate = 0.05;
    double max_rate = 1.0;
    double zero_fraction = 0.0;
};

struct ExperimentSpec {
    std::string name = "experiment";
    Scenario base;
    RateGenerator rate_gen;
    SweepAxis axis = SweepAxis::ttl;
    std::vector<double> values;
    std::vector<Protocol> protocols;
    int seeds = 1;
    std::uint64_t master_seed = 1;
    std::string output_dir = "out";
    bool write_logs = true;
};

struct ReportRow {
    Protocol protocol = Protocol::epidemic;
    double value = 0.0;
    int seed_count = 0;
    // delivery_ratio, avg_latency_s, overhead_ratio, avg_hops
    double mean[4] = {0, 0, 0, 0};
    double stdev[4] = {0, 0, 0, 0};
};

struct ReportTable {
    SweepAxis axis = SweepAxis::ttl;
    std::vector<ReportRow> rows;
    std::string to_csv() const;
    std::string to_json() const;
};

ExperimentSpec parse_config(const std::string& path);
ExperimentSpec parse_config_text(const std::string& text);

std::vector<double> generate_rates(const RateGenerator& gen, int nodes, int slots,
                                   int locations, std::uint64_t master_seed);
Scenario scenario_for(const ExperimentSpec& spec, Protocol protocol, double axis_value);
std::uint64_t run_seed_for(const ExperimentSpec& spec, int seed_index);

struct ExperimentResult {
    ReportTable table;
    bool any_fault = false;
    std::string fault_info;
    std::vector<std::string> log_paths;
};

ExperimentResult run_experiment(const ExperimentSpec& spec);

// Runs fn(0..count-1) over a small thread pool; results must be slot-indexed.
void parallel_for_index(int count, const std::function<void(int)>& fn);

} // namespace mpar
