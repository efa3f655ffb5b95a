#include "mpar/delivery.hpp"

#include <algorithm>
#include <cmath>

namespace mpar {

void RateContext::validate() const {
    if (nodes < 1 || locations < 1 ||
        lambda.size() != static_cast<size_t>(nodes) * locations)
        throw dimension_error("rate matrix shape mismatch");
    for (double v : lambda)
        if (!(v >= 0.0) || !std::isfinite(v))
            throw parameter_error("rates must be finite and >= 0");
    if (destination < 0 || destination >= nodes)
        throw parameter_error("destination id out of range");
    if (!(ttl_hours > 0.0)) throw parameter_error("ttl must be positive");
}

double location_race_prob(double lambda_i, double lambda_d, double ttl_hours) {
    if (!(lambda_i >= 0.0) || !(lambda_d >= 0.0))
        throw parameter_error("rates must be >= 0");
    if (lambda_i == 0.0) return 0.0;
    double q;
    if (std::isinf(ttl_hours)) {
        q = lambda_i / (lambda_i + lambda_d);
        // the infinite-horizon shortcut breaks down when the destination never
        // visits; the race can then never be won
        if (lambda_d == 0.0) q = 0.0;
    } else {
        // (e^{t*li}-1) e^{-t(ld+li)} rewritten as (1-e^{-t*li}) e^{-t*ld} so large
        // ttl values cannot overflow; expm1 keeps the small-ttl regime accurate
        const double both = lambda_i + lambda_d;
        q = lambda_i / both * -std::expm1(-ttl_hours * both) +
            std::expm1(-ttl_hours * lambda_i) * std::exp(-ttl_hours * lambda_d);
    }
    return std::clamp(q, 0.0, 1.0);
}

double pairwise_delivery_prob(NodeId i, const RateContext& ctx,
                              const std::vector<LocId>& common) {
    if (i == ctx.destination)
        throw contract_error("relay equals destination");
    double survive = 1.0;
    for (LocId j : common)
        survive *= 1.0 - location_race_prob(ctx.rate(i, j), ctx.rate(ctx.destination, j),
                                            ctx.ttl_hours);
    return std::clamp(1.0 - survive, 0.0, 1.0);
}

double expected_delay(NodeId i, const std::vector<LocId>& own_frequent,
                      const RateContext& ctx) {
    double total = 0.0;
    for (LocId j : own_frequent) total += ctx.rate(i, j);
    if (total <= 0.0) return kInf;
    return 1.0 / total;
}

double objective_from_probability(double probability) {
    if (probability >= 1.0) return -1e300; // keeps comparisons total
    if (probability <= 0.0) return 0.0;
    return std::log1p(-probability);
}

double evaluation_from_probability(double probability) {
    const double f = objective_from_probability(probability);
    return f == 0.0 ? 0.0 : -f;
}

DeliveryEvaluator::DeliveryEvaluator(std::vector<MovementRecord> records, TimeGrid grid,
                                     SlotRange window, double delta, NodeId destination,
                                     double ttl_hours)
    : records_(std::move(records)), grid_(grid), window_(window), delta_(delta) {
    grid_.validate();
    check_range(grid_, window_);
    if (records_.empty()) throw parameter_error("evaluator needs records");
    const int n = static_cast<int>(records_.size());
    if (destination < 0 || destination >= n)
        throw parameter_error("destination id out of range");
    const int m = records_.front().locations;
    for (int i = 0; i < n; ++i) {
        records_[i].validate();
        if (records_[i].slots != grid_.slots || records_[i].locations != m)
            throw dimension_error("records disagree with the grid");
    }

    rates_.nodes = n;
    rates_.locations = m;
    rates_.destination = destination;
    rates_.ttl_hours = ttl_hours;
    rates_.lambda.assign(static_cast<size_t>(n) * m, 0.0);
    for (int i = 0; i < n; ++i) {
        const auto row = meeting_intervals(records_[i]).rates();
        std::copy(row.begin(), row.end(), rates_.lambda.begin() + static_cast<size_t>(i) * m);
    }
    rates_.validate();

    node_to_index_.assign(n, -1);
    for (int i = 0; i < n; ++i) {
        if (i == destination) continue;
        node_to_index_[i] = static_cast<int>(relay_nodes_.size());
        relay_nodes_.push_back(i);
    }

    node_accum_.resize(n);
    for (int i = 0; i < n; ++i) node_accum_[i] = accumulate({&records_[i]}, window_);
    dest_support_ = visited_support(node_accum_[destination]).bits;
}

std::vector<LocId> DeliveryEvaluator::common_locations_for(
    const std::vector<NodeId>& relays) const {
    std::vector<LocId> out;
    if (relays.empty()) return out;
    const int m = rates_.locations;
    std::vector<double> acc(static_cast<size_t>(m), 0.0);
    for (NodeId i : relays) {
        if (i == rates_.destination)
            throw contract_error("destination cannot be part of the relay set");
        for (int j = 0; j < m; ++j) acc[j] += node_accum_[i][j];
    }
    const MovementPattern relay_side = extract_pattern(acc, delta_);
    for (int j = 0; j < m; ++j)
        if (relay_side.bits[j] && dest_support_[j]) out.push_back(j);
    return out;
}

DeliveryEstimate DeliveryEvaluator::set_delivery_prob(
    const std::vector<NodeId>& relays) const {
    DeliveryEstimate est;
    est.relays = relays;
    if (relays.empty()) return est;
    est.common = common_locations_for(relays);
    if (est.common.empty()) return est;
    // one survival factor per (relay, common location) pair, with the
    // set-level common set applied to every member
    double survive = 1.0;
    for (NodeId i : relays)
        for (LocId j : est.common)
            survive *= 1.0 - location_race_prob(rates_.rate(i, j),
                                                rates_.rate(rates_.destination, j),
                                                rates_.ttl_hours);
    est.probability = std::clamp(1.0 - survive, 0.0, 1.0);
    return est;
}

std::vector<NodeId> DeliveryEvaluator::relays_of(const SolutionBits& x) const {
    std::vector<NodeId> out;
    for (size_t k = 0; k < x.size(); ++k)
        if (x[k]) out.push_back(relay_nodes_[k]);
    return out;
}

SolutionBits DeliveryEvaluator::bits_of(const std::vector<NodeId>& relays) const {
    SolutionBits x(static_cast<size_t>(relay_count()), 0);
    for (NodeId i : relays) x[static_cast<size_t>(relay_index(i))] = 1;
    return x;
}

double DeliveryEvaluator::probability(const SolutionBits& x) const {
    return set_delivery_prob(relays_of(x)).probability;
}

double DeliveryEvaluator::objective_f(const SolutionBits& x) const {
    return objective_from_probability(probability(x));
}

double DeliveryEvaluator::evaluation_p(const SolutionBits& x) const {
    return evaluation_from_probability(probability(x));
}

std::vector<LocId> DeliveryEvaluator::own_frequent_set(NodeId node) const {
    return extract_pattern(node_accum_[node], delta_).locations();
}

double DeliveryEvaluator::node_expected_delay(NodeId node) const {
    return expected_delay(node, own_frequent_set(node), rates_);
}

} // namespace mpar
