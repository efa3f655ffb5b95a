#pragma once

#include <string>
#include <vector>

#include "mpar/movement.hpp"
#include "mpar/search.hpp"

namespace mpar {

enum class Protocol { epidemic, spray_wait, local_mpar, tabu_mpar, frozen };
enum class Knowledge { oracle, learned };
// every_visit: the destination collects waiting copies whenever it arrives.
// first_visit_race: only its first arrival per location after creation counts,
// which is the event the closed-form race probability describes.
enum class PickupMode { every_visit, first_visit_race };

const char* protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);

struct Workload {
    int message_count = 0;
    double size_min_bytes = 500e3;
    double size_max_bytes = 1e6;
    double ttl_hours = kInf;
    double creation_window_hours = 0.0; // creations uniform in [0, window]
};

struct Scenario {
    std::string name = "scenario";
    int nodes = 0;
    int locations = 0;
    TimeGrid grid;
    std::vector<double> true_rates; // nodes x slots x locations, visits/hour
    double dwell_mean_hours = 0.5;
    double duration_hours = 0.0;
    double delta = 0.95;
    double buffer_bytes = kInf;
    double bandwidth_bytes_per_s = kInf; // transfers gated by contact duration
    Protocol protocol = Protocol::epidemic;
    Knowledge knowledge = Knowledge::oracle;
    PickupMode pickup = PickupMode::every_visit;
    bool direct_delivery = true;
    bool throwboxes = true;
    bool deposit_everywhere = false;
    int spray_tickets = 8;
    TabuParams tabu;
    Workload workload;
    std::vector<NodeId> frozen_relays;
    NodeId frozen_destination = -1; // frozen mode routes one synthetic message

    double rate(NodeId node, int slot, LocId loc) const {
        return true_rates[(static_cast<size_t>(node) * grid.slots + slot) * locations + loc];
    }
    MovementRecord true_record(NodeId node) const;
    std::vector<MovementRecord> true_records() const;
    void validate() const;
};

// Slot window covering [now, now+horizon) on the periodic grid; windows that
// wrap or cover the period collapse to the whole period.
SlotRange window_for(const TimeGrid& grid, double now, double horizon);

} // namespace mpar
