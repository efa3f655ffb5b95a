#include "mpar/movement.hpp"

#include <cmath>

namespace mpar {

void MovementRecord::validate() const {
    if (slots < 1 || locations < 1 ||
        rates.size() != static_cast<size_t>(slots) * locations)
        throw dimension_error("record shape mismatch");
    for (double v : rates)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw parameter_error("record entries must be finite and >= 0");
}

std::vector<double> accumulate(const std::vector<const MovementRecord*>& records,
                               SlotRange window) {
    if (records.empty()) throw parameter_error("accumulate needs at least one record");
    const int slots = records.front()->slots;
    const int m = records.front()->locations;
    TimeGrid probe{1.0, slots};
    check_range(probe, window);
    std::vector<double> acc(static_cast<size_t>(m), 0.0);
    for (const MovementRecord* r : records) {
        if (r->slots != slots || r->locations != m)
            throw dimension_error("records disagree on grid dimensions");
        for (int k = window.begin; k < window.end; ++k)
            for (int j = 0; j < m; ++j) acc[j] += r->at(k, j);
    }
    return acc;
}

MovementPattern extract_pattern(const std::vector<double>& v, double delta) {
    if (!(delta > 0.0) || !(delta < 1.0))
        throw parameter_error("delta must lie in (0,1)");
    MovementPattern p;
    p.bits.assign(v.size(), 0);
    double sum = 0.0;
    for (double x : v) {
        if (!(x >= 0.0)) throw parameter_error("pattern input must be nonnegative");
        sum += x;
    }
    if (sum <= 0.0) return p;
    const double threshold = delta / static_cast<double>(v.size()) * sum;
    for (size_t j = 0; j < v.size(); ++j) p.bits[j] = v[j] >= threshold ? 1 : 0;
    return p;
}

MovementPattern movement_pattern(const std::vector<const MovementRecord*>& records,
                                 SlotRange window, double delta) {
    return extract_pattern(accumulate(records, window), delta);
}

MovementPattern visited_support(const std::vector<double>& v) {
    MovementPattern p;
    p.bits.assign(v.size(), 0);
    for (size_t j = 0; j < v.size(); ++j) p.bits[j] = v[j] > 0.0 ? 1 : 0;
    return p;
}

std::vector<LocId> common_locations(const std::vector<const MovementRecord*>& relays,
                                    const MovementRecord& destination,
                                    SlotRange window, double delta) {
    for (const MovementRecord* r : relays)
        if (r->owner == destination.owner)
            throw contract_error("destination cannot be part of the relay set");
    const MovementPattern relay_side = movement_pattern(relays, window, delta);
    const MovementPattern dest_side = visited_support(accumulate({&destination}, window));
    std::vector<LocId> out;
    const size_t m = std::min(relay_side.bits.size(), dest_side.bits.size());
    for (size_t j = 0; j < m; ++j)
        if (relay_side.bits[j] && dest_side.bits[j]) out.push_back(static_cast<LocId>(j));
    return out;
}

MeetingIntervalRow meeting_intervals(const MovementRecord& record) {
    return meeting_intervals(record, SlotRange{0, record.slots});
}

MeetingIntervalRow meeting_intervals(const MovementRecord& record, SlotRange window) {
    TimeGrid probe{1.0, record.slots};
    check_range(probe, window);
    MeetingIntervalRow row;
    row.node = record.owner;
    row.mean_interval.assign(static_cast<size_t>(record.locations), kInf);
    for (int j = 0; j < record.locations; ++j) {
        // A slot with no visit would contribute r = inf to the slot average;
        // average only the visited slots so sparse data keeps a finite estimate.
        double sum = 0.0;
        int visited = 0;
        for (int k = window.begin; k < window.end; ++k) {
            const double rate = record.at(k, j);
            if (rate > 0.0) {
                sum += 1.0 / rate;
                ++visited;
            }
        }
        if (visited > 0) row.mean_interval[j] = sum / visited;
    }
    return row;
}

MovementRecord update_record_online(MovementRecord record, int slot, LocId loc,
                                    long observed_visits, double slot_length) {
    if (slot < 0 || slot >= record.slots || loc < 0 || loc >= record.locations)
        throw parameter_error("slot/location out of range");
    if (!(slot_length > 0.0)) throw parameter_error("slot length must be positive");
    record.at(slot, loc) = static_cast<double>(observed_visits) / slot_length;
    return record;
}

} // namespace mpar
