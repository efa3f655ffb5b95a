#include "mpar/protocols.hpp"

#include <algorithm>
#include <cmath>

namespace mpar {

LocalOutcome local_mpar_transition(const LocalPeer& a, const LocalPeer& b,
                                   const std::vector<NodeId>& holder_set,
                                   const SetProbability& set_prob) {
    if (a.state == MsgState::infectious && b.state == MsgState::infectious)
        throw invariant_fault("two infectious nodes met for the same message");
    const bool a_is_b = a.state == MsgState::infectious;
    const bool b_is_b = b.state == MsgState::infectious;
    if (!a_is_b && !b_is_b) return {}; // WW / WG / GW / GG: nothing moves

    const LocalPeer& active = a_is_b ? a : b;
    const LocalPeer& other = a_is_b ? b : a;
    const double p_current = set_prob(holder_set);

    if (other.state == MsgState::pure) {
        // a believed member whose copy was since evicted must not be counted
        // twice when sizing up its return
        std::vector<NodeId> grown = holder_set;
        if (std::find(grown.begin(), grown.end(), other.id) == grown.end())
            grown.push_back(other.id);
        if (set_prob(grown) > p_current)
            return {LocalOutcome::Kind::replicate, other.id};
        return {};
    }

    // other is infected: consider shrinking N, then the role handover
    std::vector<NodeId> shrunk;
    shrunk.reserve(holder_set.size());
    for (NodeId v : holder_set)
        if (v != other.id) shrunk.push_back(v);
    if (set_prob(shrunk) > p_current)
        return {LocalOutcome::Kind::remove, other.id};
    if (other.expected_delay < active.expected_delay)
        return {LocalOutcome::Kind::transfer_role, other.id};
    return {};
}

TabuInit tabu_mpar_init(NodeId source, const DeliveryEvaluator& eval,
                        const TabuParams& params) {
    SolutionBits start(static_cast<size_t>(eval.relay_count()), 0);
    start[static_cast<size_t>(eval.relay_index(source))] = 1;
    auto [best, trace] = tabu_search(std::move(start), eval, params);
    TabuInit init;
    std::vector<NodeId> relays = eval.relays_of(best);
    // a zero-probability winner is the empty set in minimal-cardinality terms
    init.empty_search_result = relays.empty() || eval.probability(best) <= 0.0;
    // The source always carries the first copy, so it must be a member; without
    // this the all-infected state could differ from the target set.
    if (std::find(relays.begin(), relays.end(), source) == relays.end())
        relays.push_back(source);
    std::sort(relays.begin(), relays.end());
    init.nopt = std::move(relays);
    init.tickets = static_cast<int>(init.nopt.size());
    return init;
}

TicketSplit allocate_tickets(int tickets_a, int tickets_b, double delay_a,
                             double delay_b, NodeId a, NodeId b) {
    const int pool = tickets_a + tickets_b;
    if (pool < 1) throw parameter_error("ticket pool must be >= 1");
    if (tickets_a == 0 && tickets_b == 0)
        throw parameter_error("at least one side must hold the message");
    if (pool == 1) return {tickets_a, tickets_b}; // a single ticket never sprays

    // The floor/ceil rounding rule depends on which side is labeled first, so
    // anchor it to the lower node id to make encounters order-independent.
    if (a > b) {
        const TicketSplit flipped = allocate_tickets(tickets_b, tickets_a, delay_b,
                                                     delay_a, b, a);
        return {flipped.b, flipped.a};
    }

    const bool inf_a = std::isinf(delay_a);
    const bool inf_b = std::isinf(delay_b);
    double share_a;
    if ((inf_a && inf_b) || (delay_a == delay_b)) {
        share_a = (a < b) ? (pool + 1) / 2 : pool / 2; // even, remainder to lower id
    } else if (inf_a) {
        share_a = 0.0;
    } else if (inf_b) {
        share_a = pool;
    } else {
        share_a = delay_b / (delay_a + delay_b) * pool;
    }

    TicketSplit split;
    if (share_a < 1.0)
        split = {static_cast<int>(std::ceil(share_a)),
                 static_cast<int>(std::floor(pool - share_a))};
    else
        split = {static_cast<int>(std::floor(share_a)),
                 static_cast<int>(std::ceil(pool - share_a))};
    if (split.a < 1) split = {1, pool - 1};
    if (split.b < 1) split = {pool - 1, 1};
    return split;
}

TabuOutcome tabu_mpar_transition(const TabuPeer& a, const TabuPeer& b) {
    TabuOutcome out;
    out.tickets_a = a.tickets;
    out.tickets_b = b.tickets;
    if (a.tickets == 0 && b.tickets == 0) return out;

    const bool a_infectious = a.tickets >= 2;
    const bool b_infectious = b.tickets >= 2;

    if (a_infectious || b_infectious) {
        // Spraying reaches only target-set members; a stray copy on a
        // non-member would break the all-infected = target-set equivalence.
        const bool a_eligible = a.tickets > 0 || a.member;
        const bool b_eligible = b.tickets > 0 || b.member;
        if (!a_eligible || !b_eligible) return out;
        const TicketSplit split =
            allocate_tickets(a.tickets, b.tickets, a.expected_delay, b.expected_delay,
                             a.id, b.id);
        if (split.a == a.tickets && split.b == b.tickets) return out;
        out.changed = true;
        out.tickets_a = split.a;
        out.tickets_b = split.b;
        out.copy_to_a = a.tickets == 0 && split.a > 0;
        out.copy_to_b = b.tickets == 0 && split.b > 0;
        out.delete_a = a.tickets > 0 && split.a == 0;
        out.delete_b = b.tickets > 0 && split.b == 0;
        return out;
    }

    // No infectious side: the only remaining move is the membership handoff of
    // a lone ticket from a non-member to a pure member.
    if (a.tickets == 1 && b.tickets == 0 && !a.member && b.member) {
        out.changed = true;
        out.tickets_a = 0;
        out.tickets_b = 1;
        out.delete_a = true;
        out.copy_to_b = true;
    } else if (b.tickets == 1 && a.tickets == 0 && !b.member && a.member) {
        out.changed = true;
        out.tickets_b = 0;
        out.tickets_a = 1;
        out.delete_b = true;
        out.copy_to_a = true;
    }
    return out;
}

EpidemicOutcome epidemic_transition(bool a_holds, bool b_holds) {
    EpidemicOutcome out;
    out.copy_to_a = !a_holds && b_holds;
    out.copy_to_b = !b_holds && a_holds;
    return out;
}

SprayOutcome spray_and_wait_transition(int tickets_a, int tickets_b) {
    SprayOutcome out;
    out.tickets_a = tickets_a;
    out.tickets_b = tickets_b;
    if (tickets_a >= 2 && tickets_b == 0) {
        const int given = tickets_a / 2;
        out.changed = true;
        out.tickets_a = tickets_a - given;
        out.tickets_b = given;
        out.copy_to_b = true;
    } else if (tickets_b >= 2 && tickets_a == 0) {
        const int given = tickets_b / 2;
        out.changed = true;
        out.tickets_b = tickets_b - given;
        out.tickets_a = given;
        out.copy_to_a = true;
    }
    return out;
}

std::optional<std::vector<int>> admission_plan(const std::vector<BufferedCopy>& held,
                                               double free_space,
                                               const BufferedCopy& incoming) {
    if (free_space >= incoming.size) return std::vector<int>{};
    std::vector<int> eligible;
    for (int i = 0; i < static_cast<int>(held.size()); ++i) {
        const BufferedCopy& c = held[static_cast<size_t>(i)];
        if (c.expiry >= incoming.expiry) continue;
        if (c.probability >= 0.0 && incoming.probability >= 0.0 &&
            incoming.probability < c.probability)
            continue;
        eligible.push_back(i);
    }
    std::sort(eligible.begin(), eligible.end(), [&](int lhs, int rhs) {
        const auto& cl = held[static_cast<size_t>(lhs)];
        const auto& cr = held[static_cast<size_t>(rhs)];
        if (cl.expiry != cr.expiry) return cl.expiry < cr.expiry;
        return cl.message < cr.message;
    });
    std::vector<int> plan;
    double space = free_space;
    for (int idx : eligible) {
        if (space >= incoming.size) break;
        plan.push_back(idx);
        space += held[static_cast<size_t>(idx)].size;
    }
    if (space >= incoming.size) return plan;
    return std::nullopt;
}

} // namespace mpar
