#include "mpar/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace mpar {

const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::epidemic: return "epidemic";
        case Protocol::spray_wait: return "spray-wait";
        case Protocol::local_mpar: return "local-mpar";
        case Protocol::tabu_mpar: return "tabu-mpar";
        case Protocol::frozen: return "frozen";
    }
    return "?";
}

Protocol protocol_from_name(const std::string& name) {
    if (name == "epidemic") return Protocol::epidemic;
    if (name == "spray-wait" || name == "spray_wait") return Protocol::spray_wait;
    if (name == "local-mpar" || name == "local_mpar") return Protocol::local_mpar;
    if (name == "tabu-mpar" || name == "tabu_mpar") return Protocol::tabu_mpar;
    if (name == "frozen") return Protocol::frozen;
    throw parameter_error("unknown protocol: " + name);
}

MovementRecord Scenario::true_record(NodeId node) const {
    MovementRecord r = MovementRecord::zero(node, grid.slots, locations);
    for (int k = 0; k < grid.slots; ++k)
        for (int j = 0; j < locations; ++j) r.at(k, j) = rate(node, k, j);
    return r;
}

std::vector<MovementRecord> Scenario::true_records() const {
    std::vector<MovementRecord> out;
    out.reserve(static_cast<size_t>(nodes));
    for (NodeId i = 0; i < nodes; ++i) out.push_back(true_record(i));
    return out;
}

void Scenario::validate() const {
    grid.validate();
    if (nodes < 2 || locations < 1) throw parameter_error("need >= 2 nodes and >= 1 location");
    if (true_rates.size() != static_cast<size_t>(nodes) * grid.slots * locations)
        throw dimension_error("rate matrix shape mismatch");
    for (double v : true_rates)
        if (!(v >= 0.0) || !std::isfinite(v)) throw parameter_error("rates must be finite, >= 0");
    if (!(duration_hours > 0.0)) throw parameter_error("duration must be positive");
    if (duration_hours < grid.period_hours)
        throw parameter_error("duration must cover at least one period");
    if (!(dwell_mean_hours > 0.0)) throw parameter_error("dwell mean must be positive");
    if (!(delta > 0.0) || !(delta < 1.0)) throw parameter_error("delta must lie in (0,1)");
    if (!(workload.ttl_hours > 0.0)) throw parameter_error("ttl must be positive");
    if (workload.creation_window_hours < 0.0 ||
        workload.creation_window_hours > duration_hours)
        throw parameter_error("creation window must fit the run");
    if (spray_tickets < 1) throw parameter_error("spray tickets must be >= 1");
    if (protocol == Protocol::frozen) {
        if (frozen_destination < 0 || frozen_destination >= nodes)
            throw parameter_error("frozen mode needs a destination");
        for (NodeId r : frozen_relays)
            if (r < 0 || r >= nodes || r == frozen_destination)
                throw parameter_error("frozen relays must be nodes other than the destination");
    }
}

SlotRange window_for(const TimeGrid& grid, double now, double horizon) {
    if (!(horizon > 0.0) || std::isinf(horizon) || horizon >= grid.period_hours)
        return full_period(grid);
    const double start = std::fmod(now, grid.period_hours);
    int s = static_cast<int>(std::floor(start / grid.slot_length()));
    if (s >= grid.slots) s = grid.slots - 1;
    int e = static_cast<int>(std::ceil((start + horizon) / grid.slot_length()));
    if (e > grid.slots) return full_period(grid); // wraps into the next period
    if (e <= s) e = s + 1;
    return {s, e};
}

std::vector<double> poisson_arrivals(const TimeGrid& grid,
                                     const std::vector<double>& slot_rates,
                                     double duration_hours, Rng& rng) {
    std::vector<double> arrivals;
    const double slot_len = grid.slot_length();
    double t = 0.0;
    int slot = 0;
    double slot_end = slot_len;
    while (t < duration_hours) {
        const double lambda = slot_rates[static_cast<size_t>(slot)];
        if (lambda <= 0.0) {
            t = slot_end;
        } else {
            const double dt = rng.exponential(lambda);
            if (t + dt <= slot_end) {
                t += dt;
                if (t < duration_hours) arrivals.push_back(t);
                continue;
            }
            // memorylessness: restart the clock at the boundary with the new rate
            t = slot_end;
        }
        slot = (slot + 1) % grid.slots;
        slot_end += slot_len;
    }
    return arrivals;
}

std::vector<VisitEvent> generate_visits(const Scenario& scenario, std::uint64_t seed) {
    std::vector<VisitEvent> events;
    for (NodeId i = 0; i < scenario.nodes; ++i) {
        for (LocId j = 0; j < scenario.locations; ++j) {
            std::vector<double> slot_rates(static_cast<size_t>(scenario.grid.slots));
            for (int k = 0; k < scenario.grid.slots; ++k)
                slot_rates[static_cast<size_t>(k)] = scenario.rate(i, k, j);
            Rng rng(derive_seed(seed, "visits",
                                static_cast<std::uint64_t>(i) * scenario.locations + j));
            const auto arrivals =
                poisson_arrivals(scenario.grid, slot_rates, scenario.duration_hours, rng);
            for (size_t k = 0; k < arrivals.size(); ++k) {
                VisitEvent v;
                v.arrival = arrivals[k];
                v.node = i;
                v.location = j;
                const double dwell = rng.exponential(1.0 / scenario.dwell_mean_hours);
                // presence may not outlast the next arrival of the same stream
                double departure = v.arrival + dwell;
                if (k + 1 < arrivals.size()) departure = std::min(departure, arrivals[k + 1]);
                v.departure = std::min(departure, scenario.duration_hours);
                if (v.departure > v.arrival) events.push_back(v);
            }
        }
    }
    std::sort(events.begin(), events.end(), [](const VisitEvent& a, const VisitEvent& b) {
        if (a.arrival != b.arrival) return a.arrival < b.arrival;
        if (a.node != b.node) return a.node < b.node;
        return a.location < b.location;
    });
    return events;
}

std::vector<ContactEvent> detect_contacts(const std::vector<VisitEvent>& visits) {
    struct Active {
        double departure;
        NodeId node;
    };
    std::vector<std::vector<Active>> open; // per location
    LocId max_loc = -1;
    for (const VisitEvent& v : visits) max_loc = std::max(max_loc, v.location);
    open.resize(static_cast<size_t>(max_loc + 1));

    std::vector<ContactEvent> contacts;
    for (const VisitEvent& v : visits) {
        auto& act = open[static_cast<size_t>(v.location)];
        act.erase(std::remove_if(act.begin(), act.end(),
                                 [&](const Active& a) { return a.departure <= v.arrival; }),
                  act.end());
        for (const Active& a : act) {
            ContactEvent c;
            c.time = v.arrival;
            c.end = std::min(a.departure, v.departure);
            c.a = std::min(a.node, v.node);
            c.b = std::max(a.node, v.node);
            c.location = v.location;
            contacts.push_back(c);
        }
        act.push_back({v.departure, v.node});
    }
    std::sort(contacts.begin(), contacts.end(), [](const ContactEvent& x, const ContactEvent& y) {
        if (x.time != y.time) return x.time < y.time;
        if (x.location != y.location) return x.location < y.location;
        if (x.a != y.a) return x.a < y.a;
        return x.b < y.b;
    });
    return contacts;
}

MovementRecord estimate_records(NodeId node, const std::vector<long>& slot_loc_counts,
                                const TimeGrid& grid, int locations, double now) {
    MovementRecord r = MovementRecord::zero(node, grid.slots, locations);
    const double slot_len = grid.slot_length();
    const double full_periods = std::floor(now / grid.period_hours);
    const double phase = now - full_periods * grid.period_hours;
    for (int k = 0; k < grid.slots; ++k) {
        double occurrences = full_periods;
        if (phase >= (k + 1) * slot_len) occurrences += 1.0;
        if (occurrences <= 0.0) continue;
        for (int j = 0; j < locations; ++j) {
            const long c = slot_loc_counts[static_cast<size_t>(k) * locations + j];
            r.at(k, j) = static_cast<double>(c) / (occurrences * slot_len);
        }
    }
    return r;
}

} // namespace mpar
