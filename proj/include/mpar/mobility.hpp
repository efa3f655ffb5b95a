#pragma once

#include <cstdint>
#include <vector>

#include "mpar/rng.hpp"
#include "mpar/scenario.hpp"

namespace mpar {

struct VisitEvent {
    double arrival = 0.0;
    double departure = 0.0;
    NodeId node = -1;
    LocId location = -1;
};

struct ContactEvent {
    double time = 0.0;
    double end = 0.0; // co-presence ends when either side leaves
    NodeId a = -1;
    NodeId b = -1;
    LocId location = -1;
};

// Piecewise-homogeneous Poisson arrivals for one (node, location) stream:
// the active rate switches at slot boundaries, repeating each period.
std::vector<double> poisson_arrivals(const TimeGrid& grid,
                                     const std::vector<double>& slot_rates,
                                     double duration_hours, Rng& rng);

// All visit events of a scenario, time-ordered, deterministic per seed. Streams
// are seeded per (node, location) so one pair's draws never shift another's.
std::vector<VisitEvent> generate_visits(const Scenario& scenario, std::uint64_t seed);

// One contact per overlap of two presence intervals at a location, fired at the
// overlap start; time-ordered.
std::vector<ContactEvent> detect_contacts(const std::vector<VisitEvent>& visits);

// Learned-records estimation: per-slot visit counts scaled by how many times
// that slot has fully elapsed by `now`.
MovementRecord estimate_records(NodeId node, const std::vector<long>& slot_loc_counts,
                                const TimeGrid& grid, int locations, double now);

} // namespace mpar
