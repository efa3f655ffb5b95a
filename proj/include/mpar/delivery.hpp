#pragma once

#include <cstdint>
#include <vector>

#include "mpar/movement.hpp"

namespace mpar {

// Visit-rate view used by the probability formulas: lambda[i*m + j] is node i's
// visit rate at location j (per hour), derived from the slot-averaged meeting
// intervals. ttl_hours may be +inf.
struct RateContext {
    int nodes = 0;
    int locations = 0;
    std::vector<double> lambda;
    NodeId destination = -1;
    double ttl_hours = kInf;

    double rate(NodeId i, LocId j) const { return lambda[static_cast<size_t>(i) * locations + j]; }
    void validate() const;
};

struct DeliveryEstimate {
    double probability = 0.0;
    std::vector<NodeId> relays;
    std::vector<LocId> common;
};

// P(relay arrives at the location before the destination, within ttl) for one
// location: the bracket of the time-limited integral, or lambda_i/(lambda_i+lambda_d)
// when ttl is infinite. Clamped to [0,1] to absorb floating-point drift.
double location_race_prob(double lambda_i, double lambda_d, double ttl_hours);

// 1 - prod_j (1 - race_j) over the common set A; empty A gives 0.
double pairwise_delivery_prob(NodeId i, const RateContext& ctx,
                              const std::vector<LocId>& common);

// 1 / sum of the node's rates over its own frequent set; empty set gives +inf.
double expected_delay(NodeId i, const std::vector<LocId>& own_frequent,
                      const RateContext& ctx);

// Relay-subset encoding: one bit per non-destination node, ascending node id.
using SolutionBits = std::vector<std::uint8_t>;

double objective_from_probability(double probability);  // log(1 - P), sentinel at P=1
double evaluation_from_probability(double probability); // -objective

// Binds records, grid window, delta and the rate matrix so relay subsets can be
// scored repeatedly. The common-location set is recomputed from the candidate
// set's own aggregate pattern on every evaluation; that recomputation is what
// makes the set probability non-monotone in the set.
class DeliveryEvaluator {
public:
    DeliveryEvaluator(std::vector<MovementRecord> records, TimeGrid grid,
                      SlotRange window, double delta, NodeId destination,
                      double ttl_hours);

    int relay_count() const { return static_cast<int>(relay_nodes_.size()); }
    NodeId relay_node(int index) const { return relay_nodes_[index]; }
    int relay_index(NodeId node) const { return node_to_index_[node]; }
    NodeId destination() const { return rates_.destination; }
    const RateContext& rates() const { return rates_; }
    const TimeGrid& grid() const { return grid_; }
    SlotRange window() const { return window_; }
    double delta() const { return delta_; }
    const MovementRecord& record(NodeId node) const { return records_[node]; }

    std::vector<LocId> common_locations_for(const std::vector<NodeId>& relays) const;
    DeliveryEstimate set_delivery_prob(const std::vector<NodeId>& relays) const;

    std::vector<NodeId> relays_of(const SolutionBits& x) const;
    SolutionBits bits_of(const std::vector<NodeId>& relays) const;

    double probability(const SolutionBits& x) const;
    double objective_f(const SolutionBits& x) const;
    double evaluation_p(const SolutionBits& x) const;

    // The node's own frequent-location set (relay thresholding rule).
    std::vector<LocId> own_frequent_set(NodeId node) const;
    double node_expected_delay(NodeId node) const;

private:
    std::vector<MovementRecord> records_;
    TimeGrid grid_;
    SlotRange window_;
    double delta_;
    RateContext rates_;
    std::vector<NodeId> relay_nodes_;
    std::vector<int> node_to_index_;
    std::vector<std::vector<double>> node_accum_; // per node, window-accumulated row
    std::vector<std::uint8_t> dest_support_;
};

} // namespace mpar
