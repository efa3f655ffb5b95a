#pragma once

#include <string>
#include <vector>

#include "mpar/delivery.hpp"

namespace mpar {

// A self-contained record instance: grid, per-node records, the scenario
// parameters the probability model needs, and display ids for reporting.
struct Fixture {
    std::string name;
    TimeGrid grid;
    int locations = 0;
    double delta = 0.95;
    double ttl_hours = kInf;
    NodeId source = -1;      // internal index
    NodeId destination = -1; // internal index
    std::vector<int> external_ids;
    std::vector<MovementRecord> records; // internal index order

    DeliveryEvaluator evaluator() const {
        return DeliveryEvaluator(records, grid, full_period(grid), delta, destination,
                                 ttl_hours);
    }
    std::string label(NodeId internal) const {
        return "n" + std::to_string(external_ids[static_cast<size_t>(internal)]);
    }
};

Fixture load_fixture(const std::string& path);
std::string fixture_to_json(const Fixture& fx);

} // namespace mpar
