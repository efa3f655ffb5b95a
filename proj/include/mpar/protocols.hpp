#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "mpar/delivery.hpp"
#include "mpar/search.hpp"

namespace mpar {

// Per-(node, message) routing state: pure (no copy), infected (copy, cannot
// replicate), infectious (copy, may replicate).
enum class MsgState : std::uint8_t { pure, infected, infectious };

inline MsgState state_from_tickets(int tickets) {
    if (tickets >= 2) return MsgState::infectious;
    if (tickets == 1) return MsgState::infected;
    return MsgState::pure;
}

// ---------------------------------------------------------------------------
// Local-MPAR: a single infectious node maintains the holder set N and grows or
// shrinks it one node per encounter, greedily on the co-delivery probability.

struct LocalPeer {
    NodeId id = -1;
    MsgState state = MsgState::pure;
    double expected_delay = kInf;
};

struct LocalOutcome {
    enum class Kind { none, replicate, remove, transfer_role } kind = Kind::none;
    // replicate: `subject` is the pure node that joins N (copy created)
    // remove: `subject` is the infected node that leaves N (copy deleted)
    // transfer_role: `subject` is the infected node that takes the infectious role
    NodeId subject = -1;
};

using SetProbability = std::function<double(const std::vector<NodeId>&)>;

LocalOutcome local_mpar_transition(const LocalPeer& a, const LocalPeer& b,
                                   const std::vector<NodeId>& holder_set,
                                   const SetProbability& set_prob);

// ---------------------------------------------------------------------------
// Tabu-MPAR: the source precomputes the target relay set; tickets bound the
// copy count and drain toward one-per-member.

struct TabuInit {
    std::vector<NodeId> nopt; // search result plus the source itself
    int tickets = 0;
    bool empty_search_result = false; // estimated delivery probability was 0
};

TabuInit tabu_mpar_init(NodeId source, const DeliveryEvaluator& eval,
                        const TabuParams& params);

struct TicketSplit {
    int a = 0;
    int b = 0;
};

// Shares proportional to inverse expected delay over the pair's pooled count.
// Both shares stay >= 1 whenever the pool allows it; a pool of one stays with
// its holder (an infected node cannot spray).
TicketSplit allocate_tickets(int tickets_a, int tickets_b, double delay_a,
                             double delay_b, NodeId a, NodeId b);

struct TabuPeer {
    NodeId id = -1;
    int tickets = 0;
    bool member = false; // belongs to the message's N_opt
    double expected_delay = kInf;
};

struct TabuOutcome {
    bool changed = false;
    int tickets_a = 0;
    int tickets_b = 0;
    bool copy_to_a = false;
    bool copy_to_b = false;
    bool delete_a = false;
    bool delete_b = false;
};

TabuOutcome tabu_mpar_transition(const TabuPeer& a, const TabuPeer& b);

// ---------------------------------------------------------------------------
// Zero-knowledge baselines.

struct EpidemicOutcome {
    bool copy_to_a = false;
    bool copy_to_b = false;
};

EpidemicOutcome epidemic_transition(bool a_holds, bool b_holds);

struct SprayOutcome {
    bool changed = false;
    int tickets_a = 0;
    int tickets_b = 0;
    bool copy_to_a = false;
    bool copy_to_b = false;
};

// Binary mode: a holder with k >= 2 tickets hands floor(k/2) to a pure peer.
SprayOutcome spray_and_wait_transition(int tickets_a, int tickets_b);

// ---------------------------------------------------------------------------
// Buffer policy.

inline bool ttl_expired(double created_at, double ttl_hours, double now) {
    return now - created_at >= ttl_hours;
}

struct BufferedCopy {
    int message = -1;
    double expiry = 0.0;
    double size = 0.0;
    double probability = -1.0; // <0: protocol carries no estimate
};

// Eviction plan admitting `incoming` into a buffer with `free_space` left:
// victims are strictly sooner-expiring copies, earliest first, and a copy with
// a probability estimate is never sacrificed for a lower-probability incoming.
// nullopt when the incoming message must be rejected instead.
std::optional<std::vector<int>> admission_plan(const std::vector<BufferedCopy>& held,
                                               double free_space,
                                               const BufferedCopy& incoming);

} // namespace mpar
