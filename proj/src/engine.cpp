#include "mpar/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>

#include <json.hpp>

namespace mpar {

namespace {

struct Copy {
    int hops = 0;
    int tickets = 0;
};

struct Msg {
    int id = -1;
    NodeId source = -1;
    NodeId dest = -1;
    double created = 0.0;
    double ttl = kInf;
    double size = 0.0;

    std::map<NodeId, Copy> copies; // ordered for deterministic iteration
    bool delivered = false;
    bool expired = false;
    double delivered_at = 0.0;
    int delivered_hops = 0;
    double p_estimate = -1.0;

    // Local-MPAR: the infectious node and the holder set it maintains
    NodeId active = -1;
    std::vector<NodeId> holder_belief;

    // Tabu-MPAR
    std::vector<NodeId> nopt; // sorted
    int tickets_retired = 0;  // lost to buffer evictions
    bool reached_target = false;
    bool undeliverable_flagged = false;

    std::vector<std::uint8_t> dest_seen_loc; // race pickup: first arrivals spent

    bool live(double now) const { return !delivered && !expired && now >= created; }
    bool holds(NodeId n) const { return copies.count(n) > 0; }
};

struct BoxCopy {
    int hops = 0;
};

class Engine {
public:
    Engine(const Scenario& sc, std::uint64_t seed, const RunOptions& opt)
        : sc_(sc), opt_(opt), seed_(seed) {}

    RunResult run();

private:
    const Scenario& sc_;
    RunOptions opt_;
    std::uint64_t seed_;

    std::vector<VisitEvent> visits_;
    std::vector<ContactEvent> contacts_;
    std::vector<Msg> msgs_;
    std::vector<double> buffer_used_;
    std::vector<std::map<int, BoxCopy>> boxes_;

    std::vector<MovementRecord> truth_;
    // learned mode: per-node visit counters and gossiped record tables
    std::vector<std::vector<long>> own_counts_;
    std::vector<std::vector<MovementRecord>> know_;
    std::vector<std::vector<double>> know_time_;

    MetricsReport met_;
    InvariantReport inv_;
    EventLog log_;
    int unresolved_ = 0;
    double now_ = 0.0;
    double link_window_hours_ = kInf; // co-presence span of the current event

    bool link_allows(double size_bytes) const {
        if (std::isinf(sc_.bandwidth_bytes_per_s)) return true;
        return size_bytes <= sc_.bandwidth_bytes_per_s * link_window_hours_ * 3600.0;
    }

    void log(double t, const char* kind, NodeId a, NodeId b, int msg, LocId loc,
             std::string detail = {}) {
        if (!opt_.keep_log) return;
        log_.records.push_back({t, kind, a, b, msg, loc, std::move(detail)});
    }

    int slot_of(double t) const {
        const double phase = std::fmod(t, sc_.grid.period_hours);
        int k = static_cast<int>(phase / sc_.grid.slot_length());
        return std::min(k, sc_.grid.slots - 1);
    }

    double remaining_ttl(const Msg& m) const {
        if (std::isinf(m.ttl)) return kInf;
        return m.created + m.ttl - now_;
    }

    std::vector<MovementRecord> records_view(NodeId observer) {
        if (sc_.knowledge == Knowledge::oracle) return truth_;
        refresh_own(observer);
        return know_[static_cast<size_t>(observer)];
    }

    void refresh_own(NodeId n) {
        auto& mine = know_[static_cast<size_t>(n)][static_cast<size_t>(n)];
        mine = estimate_records(n, own_counts_[static_cast<size_t>(n)], sc_.grid,
                                sc_.locations, now_);
        know_time_[static_cast<size_t>(n)][static_cast<size_t>(n)] = now_;
    }

    void exchange_knowledge(NodeId a, NodeId b) {
        refresh_own(a);
        refresh_own(b);
        auto& ka = know_[static_cast<size_t>(a)];
        auto& kb = know_[static_cast<size_t>(b)];
        auto& ta = know_time_[static_cast<size_t>(a)];
        auto& tb = know_time_[static_cast<size_t>(b)];
        for (NodeId o = 0; o < sc_.nodes; ++o) {
            const auto io = static_cast<size_t>(o);
            if (ta[io] < tb[io]) {
                ka[io] = kb[io];
                ta[io] = tb[io];
            } else if (tb[io] < ta[io]) {
                kb[io] = ka[io];
                tb[io] = ta[io];
            }
        }
    }

    DeliveryEvaluator evaluator_for(NodeId observer, const Msg& m) {
        const double rem = remaining_ttl(m);
        return DeliveryEvaluator(records_view(observer), sc_.grid,
                                 window_for(sc_.grid, now_, rem), sc_.delta, m.dest, rem);
    }

    double node_expected_delay(NodeId n, const Msg& m) {
        const MovementRecord rec = sc_.knowledge == Knowledge::oracle
                                       ? truth_[static_cast<size_t>(n)]
                                       : (refresh_own(n),
                                          know_[static_cast<size_t>(n)][static_cast<size_t>(n)]);
        const SlotRange window = window_for(sc_.grid, now_, remaining_ttl(m));
        const auto acc = accumulate({&rec}, window);
        const auto frequent = extract_pattern(acc, sc_.delta).locations();
        const auto lambda = meeting_intervals(rec).rates();
        double total = 0.0;
        for (LocId j : frequent) total += lambda[static_cast<size_t>(j)];
        return total > 0.0 ? 1.0 / total : kInf;
    }

    std::vector<LocId> deposit_support(NodeId observer, const Msg& m) {
        const MovementRecord rec = sc_.knowledge == Knowledge::oracle
                                       ? truth_[static_cast<size_t>(m.dest)]
                                       : know_[static_cast<size_t>(observer)]
                                              [static_cast<size_t>(m.dest)];
        const SlotRange window = window_for(sc_.grid, now_, remaining_ttl(m));
        return visited_support(accumulate({&rec}, window)).locations();
    }

    bool wants_deposit(NodeId holder, const Msg& m, LocId loc) {
        if (!sc_.throwboxes) return false;
        switch (sc_.protocol) {
            case Protocol::epidemic: return true;
            case Protocol::spray_wait: return false;
            default: break;
        }
        if (sc_.deposit_everywhere) return true;
        const auto support = deposit_support(holder, m);
        return std::binary_search(support.begin(), support.end(), loc);
    }

    // --- buffer handling -------------------------------------------------
    double free_space(NodeId n) const {
        if (std::isinf(sc_.buffer_bytes)) return kInf;
        return sc_.buffer_bytes - buffer_used_[static_cast<size_t>(n)];
    }

    bool admit_copy(NodeId n, Msg& incoming) {
        if (std::isinf(sc_.buffer_bytes)) return true;
        std::vector<BufferedCopy> held;
        std::vector<int> held_msg;
        for (Msg& m : msgs_) {
            if (m.id == incoming.id || !m.holds(n) || m.expired) continue;
            held.push_back({m.id, m.created + m.ttl, m.size, m.p_estimate});
            held_msg.push_back(m.id);
        }
        BufferedCopy in{incoming.id, incoming.created + incoming.ttl, incoming.size,
                        incoming.p_estimate};
        const auto plan = admission_plan(held, free_space(n), in);
        if (!plan) {
            log(now_, "buffer-reject", n, -1, incoming.id, -1);
            return false;
        }
        for (int idx : *plan) evict_copy(n, msgs_[static_cast<size_t>(held_msg[
                                             static_cast<size_t>(idx)])]);
        return true;
    }

    void evict_copy(NodeId n, Msg& m) {
        auto it = m.copies.find(n);
        if (it == m.copies.end()) return;
        m.tickets_retired += it->second.tickets;
        buffer_used_[static_cast<size_t>(n)] -= m.size;
        m.copies.erase(it);
        if (m.active == n) m.active = -1; // the maintainer lost its copy
        log(now_, "drop-buffer", n, -1, m.id, -1);
    }

    void place_copy(NodeId n, Msg& m, int hops, int tickets) {
        m.copies[n] = {hops, tickets};
        if (!std::isinf(sc_.buffer_bytes)) buffer_used_[static_cast<size_t>(n)] += m.size;
    }

    void remove_copy(NodeId n, Msg& m) {
        auto it = m.copies.find(n);
        if (it == m.copies.end()) return;
        if (!std::isinf(sc_.buffer_bytes)) buffer_used_[static_cast<size_t>(n)] -= m.size;
        m.copies.erase(it);
    }

    // --- lifecycle --------------------------------------------------------
    void create_message(Msg& m);
    void expire_message(Msg& m);
    void deliver(Msg& m, int hops, const char* how, NodeId from, NodeId to, LocId loc);
    void handle_visit(const VisitEvent& v);
    void handle_contact(const ContactEvent& c);

    void transition_epidemic(Msg& m, NodeId a, NodeId b);
    void transition_spray(Msg& m, NodeId a, NodeId b);
    void transition_local(Msg& m, NodeId a, NodeId b);
    void transition_tabu(Msg& m, NodeId a, NodeId b);

    void check_tabu_invariants(Msg& m, bool transition_happened);
    void resolve(const Msg&) { --unresolved_; }

    void finalize_metrics();
};

void Engine::create_message(Msg& m) {
    log(now_, "create", m.source, m.dest, m.id, -1);
    if (sc_.protocol == Protocol::frozen) {
        for (NodeId r : sc_.frozen_relays)
            if (admit_copy(r, m)) place_copy(r, m, 0, 0);
        return;
    }

    int tickets = 0;
    switch (sc_.protocol) {
        case Protocol::spray_wait: tickets = sc_.spray_tickets; break;
        case Protocol::tabu_mpar: {
            TabuParams params = sc_.tabu;
            params.seed = derive_seed(seed_, "tabu-init", static_cast<std::uint64_t>(m.id));
            const auto ev = evaluator_for(m.source, m);
            const TabuInit init = tabu_mpar_init(m.source, ev, params);
            m.nopt = init.nopt;
            m.undeliverable_flagged = init.empty_search_result;
            if (init.empty_search_result)
                log(now_, "undeliverable-estimate", m.source, -1, m.id, -1);
            m.p_estimate = ev.set_delivery_prob(m.nopt).probability;
            tickets = init.tickets;
            break;
        }
        case Protocol::local_mpar: {
            m.active = m.source;
            m.holder_belief = {m.source};
            m.p_estimate = evaluator_for(m.source, m)
                               .set_delivery_prob(m.holder_belief)
                               .probability;
            break;
        }
        default: break;
    }
    if (admit_copy(m.source, m))
        place_copy(m.source, m, 0, tickets);
    else
        m.active = -1;
}

void Engine::expire_message(Msg& m) {
    for (const auto& [node, copy] : m.copies) log(now_, "drop-ttl", node, -1, m.id, -1);
    if (!std::isinf(sc_.buffer_bytes))
        for (const auto& [node, copy] : m.copies)
            buffer_used_[static_cast<size_t>(node)] -= m.size;
    m.copies.clear();
    for (auto& box : boxes_) box.erase(m.id);
    // copies of an already-delivered message still vacate buffers at the
    // deadline, but the message itself was resolved at delivery time
    if (!m.delivered) resolve(m);
    m.expired = true;
    log(now_, "expire", -1, -1, m.id, -1);
}

void Engine::deliver(Msg& m, int hops, const char* how, NodeId from, NodeId to, LocId loc) {
    m.delivered = true;
    m.delivered_at = now_;
    m.delivered_hops = hops;
    ++met_.transmissions;
    resolve(m);
    log(now_, how, from, to, m.id, loc);
}

void Engine::handle_visit(const VisitEvent& v) {
    link_window_hours_ = v.departure - v.arrival;
    if (sc_.knowledge == Knowledge::learned) {
        auto& counts = own_counts_[static_cast<size_t>(v.node)];
        counts[static_cast<size_t>(slot_of(v.arrival)) * sc_.locations + v.location] += 1;
    }

    auto& box = boxes_[static_cast<size_t>(v.location)];

    for (Msg& m : msgs_) {
        if (!m.live(now_)) continue;

        if (sc_.throwboxes && v.node == m.dest) {
            bool may_collect = true;
            if (sc_.pickup == PickupMode::first_visit_race) {
                auto& seen = m.dest_seen_loc[static_cast<size_t>(v.location)];
                may_collect = !seen;
                seen = 1;
            }
            if (may_collect) {
                auto it = box.find(m.id);
                if (it != box.end() && link_allows(m.size)) {
                    deliver(m, it->second.hops + 1, "pickup-delivery", -1, v.node,
                            v.location);
                    continue;
                }
            }
        }

        if (m.holds(v.node) && !box.count(m.id) && link_allows(m.size) &&
            wants_deposit(v.node, m, v.location)) {
            box[m.id] = {m.copies[v.node].hops + 1};
            ++met_.transmissions;
            log(now_, "deposit", v.node, -1, m.id, v.location);
        }
    }
}

void Engine::handle_contact(const ContactEvent& c) {
    link_window_hours_ = c.end - c.time;
    if (sc_.knowledge == Knowledge::learned) exchange_knowledge(c.a, c.b);
    if (sc_.protocol == Protocol::frozen && !sc_.direct_delivery) return;

    for (Msg& m : msgs_) {
        if (!m.live(now_)) continue;
        const bool a_holds = m.holds(c.a);
        const bool b_holds = m.holds(c.b);
        if (!a_holds && !b_holds) continue;

        if (c.a == m.dest || c.b == m.dest) {
            // delivery sits outside the state machines; the destination either
            // collects the message here or nothing happens at this contact
            if (!sc_.direct_delivery) continue;
            const NodeId holder = c.a == m.dest ? c.b : c.a;
            if (!m.holds(holder) || !link_allows(m.size)) continue;
            deliver(m, m.copies[holder].hops + 1, "direct-delivery", holder, m.dest,
                    c.location);
            continue;
        }

        switch (sc_.protocol) {
            case Protocol::epidemic: transition_epidemic(m, c.a, c.b); break;
            case Protocol::spray_wait: transition_spray(m, c.a, c.b); break;
            case Protocol::local_mpar: transition_local(m, c.a, c.b); break;
            case Protocol::tabu_mpar: transition_tabu(m, c.a, c.b); break;
            case Protocol::frozen: break;
        }
        if (m.delivered || m.expired) continue;
    }
}

void Engine::transition_epidemic(Msg& m, NodeId a, NodeId b) {
    const auto out = epidemic_transition(m.holds(a), m.holds(b));
    const NodeId to = out.copy_to_a ? a : (out.copy_to_b ? b : -1);
    if (to < 0) return;
    const NodeId from = to == a ? b : a;
    if (opt_.check_invariants && m.holds(to)) {
        ++inv_.duplicate_copy;
        return;
    }
    if (!link_allows(m.size) || !admit_copy(to, m)) return;
    place_copy(to, m, m.copies[from].hops + 1, 0);
    ++met_.transmissions;
    log(now_, "replicate", from, to, m.id, -1);
}

void Engine::transition_spray(Msg& m, NodeId a, NodeId b) {
    const int ta = m.holds(a) ? m.copies[a].tickets : 0;
    const int tb = m.holds(b) ? m.copies[b].tickets : 0;
    const auto out = spray_and_wait_transition(ta, tb);
    if (!out.changed) return;
    const NodeId to = out.copy_to_a ? a : b;
    const NodeId from = to == a ? b : a;
    if (opt_.check_invariants && m.holds(to)) {
        ++inv_.duplicate_copy;
        return;
    }
    if (!link_allows(m.size) || !admit_copy(to, m)) return;
    place_copy(to, m, m.copies[from].hops + 1, to == a ? out.tickets_a : out.tickets_b);
    m.copies[from].tickets = to == a ? out.tickets_b : out.tickets_a;
    ++met_.transmissions;
    log(now_, "replicate", from, to, m.id, -1);
}

void Engine::transition_local(Msg& m, NodeId a, NodeId b) {
    auto state_of = [&](NodeId n) {
        if (!m.holds(n)) return MsgState::pure;
        return n == m.active ? MsgState::infectious : MsgState::infected;
    };
    const MsgState sa = state_of(a);
    const MsgState sb = state_of(b);
    if (opt_.check_invariants) {
        int infectious = 0;
        for (const auto& [node, copy] : m.copies)
            if (node == m.active) ++infectious;
        if (infectious > 1) ++inv_.local_multi_infectious;
    }
    if (sa != MsgState::infectious && sb != MsgState::infectious) return;

    const NodeId active = sa == MsgState::infectious ? a : b;
    auto ev = evaluator_for(active, m);
    const SetProbability scorer = [&](const std::vector<NodeId>& set) {
        return ev.set_delivery_prob(set).probability;
    };
    const LocalPeer pa{a, sa, node_expected_delay(a, m)};
    const LocalPeer pb{b, sb, node_expected_delay(b, m)};
    const LocalOutcome out = local_mpar_transition(pa, pb, m.holder_belief, scorer);

    switch (out.kind) {
        case LocalOutcome::Kind::none: return;
        case LocalOutcome::Kind::replicate: {
            if (opt_.check_invariants &&
                (m.holds(out.subject) ||
                 (state_of(a) != MsgState::infectious && state_of(b) != MsgState::infectious)))
                ++inv_.replication_without_infectious;
            if (m.holds(out.subject)) {
                ++inv_.duplicate_copy;
                return;
            }
            if (!link_allows(m.size) || !admit_copy(out.subject, m)) return;
            place_copy(out.subject, m, m.copies[active].hops + 1, 0);
            m.holder_belief.push_back(out.subject);
            std::sort(m.holder_belief.begin(), m.holder_belief.end());
            ++met_.transmissions;
            m.p_estimate = scorer(m.holder_belief);
            log(now_, "replicate", active, out.subject, m.id, -1);
            return;
        }
        case LocalOutcome::Kind::remove: {
            remove_copy(out.subject, m);
            m.holder_belief.erase(
                std::remove(m.holder_belief.begin(), m.holder_belief.end(), out.subject),
                m.holder_belief.end());
            m.p_estimate = scorer(m.holder_belief);
            log(now_, "delete", active, out.subject, m.id, -1);
            return;
        }
        case LocalOutcome::Kind::transfer_role: {
            m.active = out.subject;
            log(now_, "role-transfer", active, out.subject, m.id, -1);
            return;
        }
    }
}

void Engine::transition_tabu(Msg& m, NodeId a, NodeId b) {
    auto peer = [&](NodeId n) {
        TabuPeer p;
        p.id = n;
        p.tickets = m.holds(n) ? m.copies[n].tickets : 0;
        p.member = std::binary_search(m.nopt.begin(), m.nopt.end(), n);
        p.expected_delay = node_expected_delay(n, m);
        return p;
    };
    const TabuPeer pa = peer(a);
    const TabuPeer pb = peer(b);
    const TabuOutcome out = tabu_mpar_transition(pa, pb);
    if (!out.changed) {
        check_tabu_invariants(m, false);
        return;
    }

    if (out.copy_to_a || out.copy_to_b) {
        const NodeId to = out.copy_to_a ? a : b;
        const NodeId from = to == a ? b : a;
        if (m.holds(to)) {
            ++inv_.duplicate_copy;
            return;
        }
        if (!link_allows(m.size) || !admit_copy(to, m))
            return; // transfer blocked; tickets stay put
        place_copy(to, m, m.copies[from].hops + 1, 0);
        ++met_.transmissions;
        log(now_, "replicate", from, to, m.id, -1);
    }
    if (m.holds(a))
        m.copies[a].tickets = out.tickets_a;
    if (m.holds(b))
        m.copies[b].tickets = out.tickets_b;
    if (out.delete_a) {
        remove_copy(a, m);
        log(now_, "delete", a, -1, m.id, -1);
    }
    if (out.delete_b) {
        remove_copy(b, m);
        log(now_, "delete", b, -1, m.id, -1);
    }
    log(now_, "tickets", a, b, m.id, -1,
        std::to_string(out.tickets_a) + "/" + std::to_string(out.tickets_b));
    check_tabu_invariants(m, true);
}

void Engine::check_tabu_invariants(Msg& m, bool transition_happened) {
    if (!opt_.check_invariants) return;
    int total = m.tickets_retired;
    bool any_infectious = false;
    std::vector<NodeId> holders;
    for (const auto& [node, copy] : m.copies) {
        total += copy.tickets;
        if (copy.tickets >= 2) any_infectious = true;
        holders.push_back(node);
    }
    if (total != static_cast<int>(m.nopt.size())) ++inv_.ticket_conservation;
    const bool at_target = holders == m.nopt;
    // the equivalence between "all infected" and "holders are the target set"
    // only survives while no copy has been evicted
    if (m.tickets_retired == 0 && at_target == any_infectious)
        ++inv_.all_infected_mismatch;
    if (m.reached_target && transition_happened) ++inv_.change_after_target;
    if (at_target) m.reached_target = true;
}

void Engine::finalize_metrics() {
    met_.created = static_cast<int>(msgs_.size());
    double latency = 0.0;
    double hops = 0.0;
    for (Msg& m : msgs_) {
        if (m.delivered) {
            ++met_.delivered;
            latency += m.delivered_at - m.created;
            hops += m.delivered_hops;
            continue;
        }
        bool copies_somewhere = !m.copies.empty();
        for (const auto& box : boxes_)
            if (box.count(m.id)) copies_somewhere = true;
        if (m.expired || !copies_somewhere)
            ++met_.dropped;
        else
            ++met_.in_flight;
    }
    if (met_.created > 0)
        met_.delivery_ratio = static_cast<double>(met_.delivered) / met_.created;
    if (met_.delivered > 0) {
        met_.avg_latency_hours = latency / met_.delivered;
        met_.avg_hops = hops / met_.delivered;
        met_.overhead_ratio =
            static_cast<double>(met_.transmissions - met_.delivered) / met_.delivered;
    }
}

RunResult Engine::run() {
    sc_.validate();
    truth_ = sc_.true_records();
    buffer_used_.assign(static_cast<size_t>(sc_.nodes), 0.0);
    boxes_.assign(static_cast<size_t>(sc_.locations), {});
    if (sc_.knowledge == Knowledge::learned) {
        own_counts_.assign(static_cast<size_t>(sc_.nodes),
                           std::vector<long>(static_cast<size_t>(sc_.grid.slots) *
                                                 sc_.locations,
                                             0));
        know_.assign(static_cast<size_t>(sc_.nodes), {});
        know_time_.assign(static_cast<size_t>(sc_.nodes),
                          std::vector<double>(static_cast<size_t>(sc_.nodes), -1.0));
        for (NodeId i = 0; i < sc_.nodes; ++i) {
            auto& table = know_[static_cast<size_t>(i)];
            for (NodeId o = 0; o < sc_.nodes; ++o)
                table.push_back(MovementRecord::zero(o, sc_.grid.slots, sc_.locations));
            know_time_[static_cast<size_t>(i)][static_cast<size_t>(i)] = 0.0;
        }
    }

    visits_ = generate_visits(sc_, derive_seed(seed_, "mobility"));
    contacts_ = detect_contacts(visits_);

    // workload
    Rng wl(derive_seed(seed_, "workload"));
    if (sc_.protocol == Protocol::frozen) {
        Msg m;
        m.id = 0;
        m.dest = sc_.frozen_destination;
        m.source = sc_.frozen_relays.empty() ? 0 : sc_.frozen_relays.front();
        m.created = 0.0;
        m.ttl = sc_.workload.ttl_hours;
        m.size = sc_.workload.size_min_bytes;
        m.dest_seen_loc.assign(static_cast<size_t>(sc_.locations), 0);
        msgs_.push_back(std::move(m));
    } else {
        for (int k = 0; k < sc_.workload.message_count; ++k) {
            Msg m;
            m.id = k;
            m.source = static_cast<NodeId>(wl.bounded(static_cast<std::uint64_t>(sc_.nodes)));
            m.dest = static_cast<NodeId>(wl.bounded(static_cast<std::uint64_t>(sc_.nodes - 1)));
            if (m.dest >= m.source) ++m.dest;
            m.created = sc_.workload.creation_window_hours > 0.0
                            ? wl.uniform(0.0, sc_.workload.creation_window_hours)
                            : 0.0;
            m.ttl = sc_.workload.ttl_hours;
            m.size = wl.uniform(sc_.workload.size_min_bytes, sc_.workload.size_max_bytes);
            m.dest_seen_loc.assign(static_cast<size_t>(sc_.locations), 0);
            msgs_.push_back(std::move(m));
        }
        std::sort(msgs_.begin(), msgs_.end(),
                  [](const Msg& x, const Msg& y) { return x.created < y.created; });
        for (size_t k = 0; k < msgs_.size(); ++k) msgs_[k].id = static_cast<int>(k);
    }
    unresolved_ = static_cast<int>(msgs_.size());

    // merged deterministic event walk: creation < expiry < visit < contact on ties
    size_t im = 0, ie = 0, iv = 0, ic = 0;
    const double horizon = sc_.duration_hours;
    while (unresolved_ > 0) {
        double tm = im < msgs_.size() ? msgs_[im].created : kInf;
        double te = kInf;
        if (!std::isinf(sc_.workload.ttl_hours)) {
            while (ie < msgs_.size() && msgs_[ie].expired) ++ie;
            if (ie < msgs_.size()) te = msgs_[ie].created + msgs_[ie].ttl;
        }
        double tv = iv < visits_.size() ? visits_[iv].arrival : kInf;
        double tc = ic < contacts_.size() ? contacts_[ic].time : kInf;
        const double t = std::min(std::min(tm, te), std::min(tv, tc));
        if (std::isinf(t) || t > horizon) break;
        now_ = t;
        if (tm <= t) {
            create_message(msgs_[im]);
            ++im;
        } else if (te <= t) {
            expire_message(msgs_[ie]);
            ++ie;
        } else if (tv <= t) {
            handle_visit(visits_[iv]);
            ++iv;
        } else {
            handle_contact(contacts_[ic]);
            ++ic;
        }
    }
    now_ = horizon;
    finalize_metrics();

    RunResult result;
    result.metrics = met_;
    result.invariants = inv_;
    result.log = std::move(log_);
    return result;
}

std::string metrics_json(const MetricsReport& m) {
    nlohmann::json j{{"created", m.created},
                     {"delivered", m.delivered},
                     {"dropped", m.dropped},
                     {"in_flight", m.in_flight},
                     {"transmissions", m.transmissions},
                     {"delivery_ratio", m.delivery_ratio},
                     {"avg_latency_hours", m.avg_latency_hours},
                     {"overhead_ratio", m.overhead_ratio},
                     {"avg_hops", m.avg_hops}};
    return j.dump();
}

} // namespace

std::string MetricsReport::to_json() const { return metrics_json(*this); }

std::string EventLog::to_ndjson() const {
    std::string out;
    for (const EventRecord& r : records) {
        nlohmann::json j{{"t", r.t}, {"kind", r.kind}};
        if (r.a >= 0) j["a"] = r.a;
        if (r.b >= 0) j["b"] = r.b;
        if (r.msg >= 0) j["msg"] = r.msg;
        if (r.loc >= 0) j["loc"] = r.loc;
        if (!r.detail.empty()) j["detail"] = r.detail;
        out += j.dump();
        out += '\n';
    }
    return out;
}

RunResult run_scenario(const Scenario& scenario, std::uint64_t run_seed,
                       const RunOptions& options) {
    Engine engine(scenario, run_seed, options);
    return engine.run();
}

} // namespace mpar
