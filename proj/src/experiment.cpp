#include "mpar/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include <json.hpp>

namespace mpar {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double json_num_or_inf(const nlohmann::json& v, const char* what) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "inf" || s == "infinity") return kInf;
        throw parameter_error(std::string(what) + " must be a number or \"inf\"");
    }
    return v.get<double>();
}

const std::set<std::string> kKnownKeys = {
    "schema", "name", "nodes", "locations", "period_hours", "slots", "rates",
    "rate_min", "rate_max", "rate_zero_fraction", "dwell_mean_hours",
    "duration_hours", "delta", "buffer_bytes", "bandwidth_bytes_per_s", "knowledge", "pickup",
    "direct_delivery", "throwboxes", "deposit_everywhere", "spray_tickets", "theta", "sigma",
    "tabu_fixed_length", "tabu_fixed_value", "messages", "size_min_bytes",
    "size_max_bytes", "ttl_hours", "creation_window_hours", "axis", "values",
    "protocols", "seeds", "master_seed", "output", "write_logs"};

} // namespace

const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::ttl: return "ttl";
        case SweepAxis::buffer: return "buffer";
        case SweepAxis::nodes: return "nodes";
    }
    return "?";
}

ExperimentSpec parse_config_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw parameter_error(std::string("config is not valid JSON: ") + e.what());
    }
    for (const auto& [key, value] : j.items())
        if (!kKnownKeys.count(key))
            throw parameter_error("unknown config key: " + key);
    if (j.value("schema", 1) != 1) throw parameter_error("unsupported config schema");

    ExperimentSpec spec;
    spec.name = j.value("name", std::string("experiment"));
    Scenario& sc = spec.base;
    sc.name = spec.name;
    sc.nodes = j.at("nodes").get<int>();
    sc.locations = j.at("locations").get<int>();
    sc.grid.period_hours = j.value("period_hours", 24.0);
    sc.grid.slots = j.value("slots", 1);
    sc.dwell_mean_hours = j.value("dwell_mean_hours", 0.5);
    sc.duration_hours = j.at("duration_hours").get<double>();
    sc.delta = j.value("delta", 0.95);
    if (!(sc.delta > 0.0) || !(sc.delta < 1.0))
        throw parameter_error("delta must lie in (0,1)");
    if (j.contains("buffer_bytes"))
        sc.buffer_bytes = json_num_or_inf(j.at("buffer_bytes"), "buffer_bytes");
    if (j.contains("bandwidth_bytes_per_s"))
        sc.bandwidth_bytes_per_s =
            json_num_or_inf(j.at("bandwidth_bytes_per_s"), "bandwidth_bytes_per_s");
    const std::string knowledge = j.value("knowledge", std::string("oracle"));
    if (knowledge == "oracle")
        sc.knowledge = Knowledge::oracle;
    else if (knowledge == "learned")
        sc.knowledge = Knowledge::learned;
    else
        throw parameter_error("knowledge must be oracle or learned");
    const std::string pickup = j.value("pickup", std::string("every-visit"));
    if (pickup == "every-visit")
        sc.pickup = PickupMode::every_visit;
    else if (pickup == "first-visit-race")
        sc.pickup = PickupMode::first_visit_race;
    else
        throw parameter_error("pickup must be every-visit or first-visit-race");
    sc.direct_delivery = j.value("direct_delivery", true);
    sc.throwboxes = j.value("throwboxes", true);
    sc.deposit_everywhere = j.value("deposit_everywhere", false);
    sc.spray_tickets = j.value("spray_tickets", 8);
    sc.tabu.theta = j.value("theta", 0);
    sc.tabu.sigma = j.value("sigma", -1.0);
    sc.tabu.fixed_length = j.value("tabu_fixed_length", false);
    sc.tabu.fixed_value = j.value("tabu_fixed_value", 3);
    sc.workload.message_count = j.value("messages", 0);
    sc.workload.size_min_bytes = j.value("size_min_bytes", 500e3);
    sc.workload.size_max_bytes = j.value("size_max_bytes", 1e6);
    if (j.contains("ttl_hours"))
        sc.workload.ttl_hours = json_num_or_inf(j.at("ttl_hours"), "ttl_hours");
    sc.workload.creation_window_hours = j.value("creation_window_hours", 0.0);

    spec.master_seed = j.value("master_seed", 1ULL);
    spec.seeds = j.value("seeds", 1);
    if (spec.seeds < 1) throw parameter_error("need at least one seed");
    spec.output_dir = j.value("output", std::string("out"));
    spec.write_logs = j.value("write_logs", true);

    if (j.contains("rates") && j.at("rates").is_array()) {
        const auto& arr = j.at("rates");
        if (static_cast<int>(arr.size()) != sc.nodes)
            throw dimension_error("rates outer size must equal nodes");
        for (int i = 0; i < sc.nodes; ++i) {
            if (static_cast<int>(arr[i].size()) != sc.grid.slots)
                throw dimension_error("rates row count must equal slots");
            for (int k = 0; k < sc.grid.slots; ++k) {
                if (static_cast<int>(arr[i][k].size()) != sc.locations)
                    throw dimension_error("rates column count must equal locations");
                for (int l = 0; l < sc.locations; ++l)
                    sc.true_rates.push_back(arr[i][k][l].get<double>());
            }
        }
    } else {
        spec.rate_gen.enabled = true;
        spec.rate_gen.min_rate = j.value("rate_min", 0.05);
        spec.rate_gen.max_rate = j.value("rate_max", 1.0);
        spec.rate_gen.zero_fraction = j.value("rate_zero_fraction", 0.0);
        sc.true_rates = generate_rates(spec.rate_gen, sc.nodes, sc.grid.slots,
                                       sc.locations, spec.master_seed);
    }

    const std::string axis = j.value("axis", std::string("ttl"));
    if (axis == "ttl")
        spec.axis = SweepAxis::ttl;
    else if (axis == "buffer")
        spec.axis = SweepAxis::buffer;
    else if (axis == "nodes")
        spec.axis = SweepAxis::nodes;
    else
        throw parameter_error("axis must be ttl, buffer or nodes");

    if (j.contains("values"))
        for (const auto& v : j.at("values")) spec.values.push_back(v.get<double>());
    else
        spec.values.push_back(spec.axis == SweepAxis::ttl ? sc.workload.ttl_hours
                              : spec.axis == SweepAxis::buffer
                                  ? sc.buffer_bytes
                                  : static_cast<double>(sc.nodes));
    if (spec.values.empty()) throw parameter_error("need at least one sweep value");

    if (j.contains("protocols"))
        for (const auto& p : j.at("protocols"))
            spec.protocols.push_back(protocol_from_name(p.get<std::string>()));
    else
        spec.protocols = {Protocol::epidemic};
    if (spec.protocols.empty()) throw parameter_error("need at least one protocol");

    if (spec.axis == SweepAxis::nodes && !spec.rate_gen.enabled)
        throw parameter_error("a nodes sweep needs generated rates");

    // surface scenario-shape errors at parse time
    scenario_for(spec, spec.protocols.front(), spec.values.front()).validate();
    return spec;
}

ExperimentSpec parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parameter_error("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

std::vector<double> generate_rates(const RateGenerator& gen, int nodes, int slots,
                                   int locations, std::uint64_t master_seed) {
    std::vector<double> rates;
    rates.reserve(static_cast<size_t>(nodes) * slots * locations);
    for (int i = 0; i < nodes; ++i) {
        Rng rng(derive_seed(master_seed, "rates", static_cast<std::uint64_t>(i)));
        for (int k = 0; k < slots; ++k)
            for (int l = 0; l < locations; ++l) {
                if (gen.zero_fraction > 0.0 && rng.next_unit() < gen.zero_fraction) {
                    rates.push_back(0.0);
                    continue;
                }
                const double u = rng.uniform(std::log(gen.min_rate), std::log(gen.max_rate));
                rates.push_back(std::exp(u));
            }
    }
    return rates;
}

Scenario scenario_for(const ExperimentSpec& spec, Protocol protocol, double axis_value) {
    Scenario sc = spec.base;
    sc.protocol = protocol;
    switch (spec.axis) {
        case SweepAxis::ttl: sc.workload.ttl_hours = axis_value; break;
        case SweepAxis::buffer: sc.buffer_bytes = axis_value; break;
        case SweepAxis::nodes: {
            sc.nodes = static_cast<int>(axis_value);
            sc.true_rates = generate_rates(spec.rate_gen, sc.nodes, sc.grid.slots,
                                           sc.locations, spec.master_seed);
            break;
        }
    }
    return sc;
}

std::uint64_t run_seed_for(const ExperimentSpec& spec, int seed_index) {
    // deliberately independent of protocol and sweep point: runs are paired
    // across protocols and coupled across points
    return derive_seed(spec.master_seed, "run", static_cast<std::uint64_t>(seed_index));
}

void parallel_for_index(int count, const std::function<void(int)>& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(count));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    ExperimentResult result;
    result.table.axis = spec.axis;

    const int points = static_cast<int>(spec.values.size());
    const int protos = static_cast<int>(spec.protocols.size());
    const int total_runs = points * protos * spec.seeds;
    std::vector<MetricsReport> metrics(static_cast<size_t>(total_runs));
    std::vector<InvariantReport> inv(static_cast<size_t>(total_runs));
    std::vector<std::string> logs(static_cast<size_t>(total_runs));

    std::vector<std::string> faults(static_cast<size_t>(total_runs));
    parallel_for_index(total_runs, [&](int idx) {
        const int pi = idx / (points * spec.seeds);
        const int vi = (idx / spec.seeds) % points;
        const int si = idx % spec.seeds;
        const Scenario sc =
            scenario_for(spec, spec.protocols[static_cast<size_t>(pi)],
                         spec.values[static_cast<size_t>(vi)]);
        RunOptions opt;
        opt.keep_log = spec.write_logs;
        try {
            const RunResult run = run_scenario(sc, run_seed_for(spec, si), opt);
            metrics[static_cast<size_t>(idx)] = run.metrics;
            inv[static_cast<size_t>(idx)] = run.invariants;
            if (spec.write_logs) logs[static_cast<size_t>(idx)] = run.log.to_ndjson();
        } catch (const std::exception& e) {
            faults[static_cast<size_t>(idx)] = e.what();
        }
    });

    if (spec.write_logs) {
        fs::create_directories(fs::path(spec.output_dir) / "logs");
    } else {
        fs::create_directories(spec.output_dir);
    }

    for (int pi = 0; pi < protos; ++pi) {
        for (int vi = 0; vi < points; ++vi) {
            ReportRow row;
            row.protocol = spec.protocols[static_cast<size_t>(pi)];
            row.value = spec.values[static_cast<size_t>(vi)];
            row.seed_count = spec.seeds;
            double sum[4] = {0, 0, 0, 0};
            double sq[4] = {0, 0, 0, 0};
            for (int si = 0; si < spec.seeds; ++si) {
                const int idx = (pi * points + vi) * spec.seeds + si;
                const MetricsReport& m = metrics[static_cast<size_t>(idx)];
                if (!inv[static_cast<size_t>(idx)].ok() ||
                    !faults[static_cast<size_t>(idx)].empty()) {
                    result.any_fault = true;
                    result.fault_info = std::string(protocol_name(row.protocol)) +
                                        " value=" + num(row.value) +
                                        " seed_index=" + std::to_string(si);
                    if (!faults[static_cast<size_t>(idx)].empty())
                        result.fault_info += " (" + faults[static_cast<size_t>(idx)] + ")";
                }
                const double vals[4] = {m.delivery_ratio, m.avg_latency_hours * 3600.0,
                                        m.overhead_ratio, m.avg_hops};
                for (int q = 0; q < 4; ++q) {
                    sum[q] += vals[q];
                    sq[q] += vals[q] * vals[q];
                }
                if (spec.write_logs) {
                    char fname[160];
                    std::snprintf(fname, sizeof fname, "%s_%s_s%02d.ndjson",
                                  protocol_name(row.protocol), num(row.value).c_str(), si);
                    const auto path = fs::path(spec.output_dir) / "logs" / fname;
                    std::ofstream out(path);
                    out << logs[static_cast<size_t>(idx)];
                    result.log_paths.push_back(path.string());
                }
            }
            for (int q = 0; q < 4; ++q) {
                row.mean[q] = sum[q] / spec.seeds;
                if (spec.seeds > 1) {
                    const double var =
                        (sq[q] - spec.seeds * row.mean[q] * row.mean[q]) /
                        (spec.seeds - 1);
                    row.stdev[q] = var > 0.0 ? std::sqrt(var) : 0.0;
                }
            }
            result.table.rows.push_back(row);
        }
    }

    std::ofstream csv(fs::path(spec.output_dir) / (spec.name + ".csv"));
    csv << result.table.to_csv();
    std::ofstream js(fs::path(spec.output_dir) / (spec.name + ".json"));
    js << result.table.to_json();
    return result;
}

std::string ReportTable::to_csv() const {
    std::string out =
        "protocol,axis,value,seed_count,delivery_ratio_mean,delivery_ratio_std,"
        "avg_latency_s_mean,avg_latency_s_std,overhead_ratio_mean,overhead_ratio_std,"
        "avg_hops_mean,avg_hops_std\n";
    for (const ReportRow& r : rows) {
        out += protocol_name(r.protocol);
        out += ",";
        out += axis_name(axis);
        out += "," + num(r.value) + "," + std::to_string(r.seed_count);
        for (int q = 0; q < 4; ++q) out += "," + num(r.mean[q]) + "," + num(r.stdev[q]);
        out += "\n";
    }
    return out;
}

std::string ReportTable::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const ReportRow& r : rows) {
        rows_json.push_back({{"protocol", protocol_name(r.protocol)},
                             {"axis", axis_name(axis)},
                             {"value", r.value},
                             {"seed_count", r.seed_count},
                             {"delivery_ratio", {{"mean", r.mean[0]}, {"std", r.stdev[0]}}},
                             {"avg_latency_s", {{"mean", r.mean[1]}, {"std", r.stdev[1]}}},
                             {"overhead_ratio", {{"mean", r.mean[2]}, {"std", r.stdev[2]}}},
                             {"avg_hops", {{"mean", r.mean[3]}, {"std", r.stdev[3]}}}});
    }
    return nlohmann::json{{"rows", rows_json}}.dump(2);
}

} // namespace mpar
