#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mpar/mobility.hpp"
#include "mpar/protocols.hpp"
#include "mpar/scenario.hpp"

namespace mpar {

struct MetricsReport {
    int created = 0;
    int delivered = 0;
    int dropped = 0;   // dead before delivery: ttl expiry or every copy evicted
    int in_flight = 0; // undelivered with at least one live copy at the end
    long transmissions = 0;
    double delivery_ratio = 0.0;
    double avg_latency_hours = 0.0;
    double overhead_ratio = 0.0;
    double avg_hops = 0.0;

    std::string to_json() const;
};

struct EventRecord {
    double t = 0.0;
    std::string kind;
    NodeId a = -1;
    NodeId b = -1;
    int msg = -1;
    LocId loc = -1;
    std::string detail;
};

struct EventLog {
    std::vector<EventRecord> records;
    std::string to_ndjson() const;
};

// Violation counters for the protocol guarantees the routing schemes carry;
// a clean run reports all zeros.
struct InvariantReport {
    long local_multi_infectious = 0;  // more than one infectious per message
    long replication_without_infectious = 0;
    long ticket_conservation = 0;
    long all_infected_mismatch = 0;   // no infectious yet holders != target set
    long change_after_target = 0;     // transition after holders reached target
    long duplicate_copy = 0;

    long total() const {
        return local_multi_infectious + replication_without_infectious +
               ticket_conservation + all_infected_mismatch + change_after_target +
               duplicate_copy;
    }
    bool ok() const { return total() == 0; }
};

struct RunOptions {
    bool keep_log = true;
    bool check_invariants = true;
};

struct RunResult {
    MetricsReport metrics;
    InvariantReport invariants;
    EventLog log;
};

RunResult run_scenario(const Scenario& scenario, std::uint64_t run_seed,
                       const RunOptions& options = {});

} // namespace mpar
