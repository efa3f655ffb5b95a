#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "mpar/errors.hpp"

namespace mpar {

using NodeId = int;
using LocId = int;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Periodic grid: the period T is split into `slots` equal slots. Extraction
// windows are always slot-aligned index ranges over one period.
struct TimeGrid {
    double period_hours = 0.0;
    int slots = 0;

    double slot_length() const { return period_hours / slots; }
    void validate() const {
        if (slots < 1 || !(period_hours > 0.0))
            throw parameter_error("time grid needs period > 0 and >= 1 slot");
    }
};

// Half-open range of slot indices [begin, end), 0 <= begin < end <= slots.
struct SlotRange {
    int begin = 0;
    int end = 0;
};

inline SlotRange full_period(const TimeGrid& grid) { return {0, grid.slots}; }

inline void check_range(const TimeGrid& grid, SlotRange r) {
    if (r.begin < 0 || r.end > grid.slots || r.begin >= r.end)
        throw parameter_error("slot range must satisfy 0 <= begin < end <= slots");
}

// Per-node visit-frequency matrix: entry (slot, location) is the node's average
// number of visits per hour during that slot; 0 encodes "never visited".
struct MovementRecord {
    NodeId owner = -1;
    int slots = 0;
    int locations = 0;
    std::vector<double> rates; // row-major, slots x locations

    double at(int slot, int loc) const { return rates[static_cast<size_t>(slot) * locations + loc]; }
    double& at(int slot, int loc) { return rates[static_cast<size_t>(slot) * locations + loc]; }

    static MovementRecord zero(NodeId owner, int slots, int locations) {
        MovementRecord r;
        r.owner = owner;
        r.slots = slots;
        r.locations = locations;
        r.rates.assign(static_cast<size_t>(slots) * locations, 0.0);
        return r;
    }
    void validate() const;
};

struct MovementPattern {
    std::vector<std::uint8_t> bits;

    std::vector<LocId> locations() const {
        std::vector<LocId> out;
        for (LocId j = 0; j < static_cast<LocId>(bits.size()); ++j)
            if (bits[j]) out.push_back(j);
        return out;
    }
    bool operator==(const MovementPattern&) const = default;
};

// Mean inter-visit time per location (+inf where the node never shows up) and
// the derived visit rate lambda = 1/M.
struct MeetingIntervalRow {
    NodeId node = -1;
    std::vector<double> mean_interval; // M_j, +inf allowed
    std::vector<double> rates() const {
        std::vector<double> out(mean_interval.size(), 0.0);
        for (size_t j = 0; j < out.size(); ++j)
            if (mean_interval[j] < kInf) out[j] = 1.0 / mean_interval[j];
        return out;
    }
};

// Component-wise sum of record rows over the window, across all given records.
std::vector<double> accumulate(const std::vector<const MovementRecord*>& records,
                               SlotRange window);

// Threshold filter: bit j set iff v_j >= (delta/m) * sum(v). The all-zero
// vector maps to the all-zero pattern (a node that moves nowhere frequents
// nothing); with sum = 0 the raw comparison would mark every location.
MovementPattern extract_pattern(const std::vector<double>& v, double delta);

MovementPattern movement_pattern(const std::vector<const MovementRecord*>& records,
                                 SlotRange window, double delta);

// Support of the accumulated rates: every location visited at all. Used for
// the destination side of the common-location intersection, where the filter's
// only job is to drop locations with zero destination rate.
MovementPattern visited_support(const std::vector<double>& v);

// A(relays) ∩ support(destination) over the window.
std::vector<LocId> common_locations(const std::vector<const MovementRecord*>& relays,
                                    const MovementRecord& destination,
                                    SlotRange window, double delta);

// Mean inter-visit time per location, averaging only slots with a visit; a
// location absent from every slot of the window gets M = +inf.
MeetingIntervalRow meeting_intervals(const MovementRecord& record);
MeetingIntervalRow meeting_intervals(const MovementRecord& record, SlotRange window);

// Overwrites one slot entry from an observed count; slot_length in hours.
MovementRecord update_record_online(MovementRecord record, int slot, LocId loc,
                                    long observed_visits, double slot_length);

} // namespace mpar
