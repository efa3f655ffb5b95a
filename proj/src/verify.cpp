#include "mpar/verify.hpp"

#include <cmath>
#include <cstdio>

#include "mpar/protocols.hpp"
#include "mpar/search.hpp"

namespace mpar {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string pattern_str(const std::vector<std::uint8_t>& bits) {
    std::string s = "[";
    for (size_t i = 0; i < bits.size(); ++i) {
        if (i) s += ",";
        s += bits[i] ? "1" : "0";
    }
    return s + "]";
}

std::string locs_str(const std::vector<LocId>& locs) {
    if (locs.empty()) return "{}";
    std::string s = "{";
    for (size_t i = 0; i < locs.size(); ++i) {
        if (i) s += ",";
        s += "a" + std::to_string(locs[i] + 1);
    }
    return s + "}";
}

std::string table_str(const std::vector<int>& t) {
    std::string s = "(";
    for (size_t i = 0; i < t.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(t[i]);
    }
    return s + ")";
}

struct Checker {
    VerifyReport& report;

    void close(const std::string& name, const std::string& expected,
               const std::string& actual) {
        report.checks.push_back({name, expected == actual, expected, actual});
    }
    void close_num(const std::string& name, double expected, double actual, double tol) {
        CheckResult c;
        c.name = name;
        c.pass = std::abs(expected - actual) <= tol;
        c.expected = fmt(expected) + " (±" + fmt(tol) + ")";
        c.actual = fmt(actual);
        report.checks.push_back(std::move(c));
    }
    void close_flag(const std::string& name, bool pass, const std::string& expected,
                    const std::string& actual) {
        report.checks.push_back({name, pass, expected, actual});
    }
};

} // namespace

VerifyReport verify_fixture(const Fixture& fx) {
    VerifyReport report;
    Checker ck{report};

    const auto ev = fx.evaluator();
    const SlotRange whole = full_period(fx.grid);

    // -- accumulation of the three relay records over the whole period
    {
        std::vector<const MovementRecord*> rs;
        for (NodeId i = 0; i < 3 && i < static_cast<NodeId>(fx.records.size()); ++i)
            if (i != fx.destination) rs.push_back(&fx.records[static_cast<size_t>(i)]);
        if (rs.size() == 3) {
            const auto acc = accumulate(rs, whole);
            ck.close_num("accumulate {n1,n2,n3} @a1", 1.414, acc[0], 0.001);
            ck.close_num("accumulate {n1,n2,n3} @a2", 1.974, acc[1], 0.001);
        }
    }

    struct SubsetRef {
        std::vector<NodeId> relays; // internal indices
        const char* name;
        const char* pattern;
        const char* locations;
        double probability;
    };
    const std::vector<SubsetRef> subsets = {
        {{0}, "{n1}", "[1,0]", "{a1}", 0.430},
        {{1}, "{n2}", "[1,1]", "{a1,a2}", 0.673},
        {{2}, "{n3}", "[0,1]", "{a2}", 0.291},
        {{0, 1}, "{n1,n2}", "[1,0]", "{a1}", 0.670},
        {{1, 2}, "{n2,n3}", "[0,1]", "{a2}", 0.600},
        {{0, 2}, "{n1,n3}", "[0,1]", "{a2}", 0.626},
        {{0, 1, 2}, "{n1,n2,n3}", "[0,1]", "{a2}", 0.789},
    };

    for (const SubsetRef& s : subsets) {
        std::vector<const MovementRecord*> rs;
        for (NodeId i : s.relays) rs.push_back(&fx.records[static_cast<size_t>(i)]);
        const auto pat = movement_pattern(rs, whole, fx.delta);
        ck.close(std::string("pattern ") + s.name, s.pattern, pattern_str(pat.bits));
        ck.close(std::string("locations ") + s.name, s.locations,
                 locs_str(pat.locations()));
        const auto est = ev.set_delivery_prob(s.relays);
        ck.close_num(std::string("P ") + s.name + ",4", s.probability, est.probability,
                     0.005);
    }

    // the destination's list entry: every location it visits at all
    {
        const auto acc = accumulate({&fx.records[static_cast<size_t>(fx.destination)]}, whole);
        const auto pat = visited_support(acc);
        ck.close("pattern {n4} (destination)", "[1,1]", pattern_str(pat.bits));
        ck.close("locations {n4} (destination)", "{a1,a2}", locs_str(pat.locations()));
    }

    // -- meeting intervals
    const double m_expected[4][2] = {{4.05, 3.8}, {4.2, 4.4}, {7.05, 8.3}, {3.05, 3.4}};
    for (NodeId i = 0; i < 4 && i < static_cast<NodeId>(fx.records.size()); ++i) {
        const auto row = meeting_intervals(fx.records[static_cast<size_t>(i)]);
        for (LocId j = 0; j < 2; ++j)
            ck.close_num("M_" + std::to_string(i + 1) + "," + std::to_string(j + 1),
                         m_expected[i][j], row.mean_interval[static_cast<size_t>(j)], 1e-6);
    }

    // -- expected delays of the three relays
    ck.close_num("E[D_1]", 4.05, ev.node_expected_delay(0), 0.01);
    ck.close_num("E[D_2]", 2.15, ev.node_expected_delay(1), 0.01);
    ck.close_num("E[D_3]", 8.3, ev.node_expected_delay(2), 0.01);

    // -- greedy search stops at the source's own set
    {
        SolutionBits start(static_cast<size_t>(ev.relay_count()), 0);
        start[static_cast<size_t>(ev.relay_index(fx.source))] = 1;
        const auto [result, trace] = local_search(start, ev);
        ck.close("greedy stop state", "[0,1,0]",
                 pattern_str(result));
        ck.close_num("greedy stop P", 0.673, ev.probability(result), 0.005);
        ck.close_flag("greedy step count", trace.steps.size() == 1, "1",
                      std::to_string(trace.steps.size()));
        if (!trace.steps.empty()) {
            const auto& cands = trace.steps[0].candidates;
            const double expected_p[3] = {0.670, 0.0, 0.600};
            for (size_t i = 0; i < cands.size() && i < 3; ++i)
                ck.close_num("greedy candidate flip" + std::to_string(i),
                             expected_p[i], cands[i].probability, 0.005);
        }
    }

    // -- tenure-table search escapes and finds the full set
    {
        TabuParams params;
        params.fixed_length = true;
        params.fixed_value = 3;
        params.theta = 3;
        SolutionBits start(static_cast<size_t>(ev.relay_count()), 0);
        start[static_cast<size_t>(ev.relay_index(fx.source))] = 1;
        const auto [result, trace] = tabu_search(start, ev, params);
        ck.close("tabu best", "[1,1,1]", pattern_str(result));
        ck.close_num("tabu best P", 0.789, ev.probability(result), 0.005);
        ck.close_flag("tabu step count", trace.steps.size() == 5, "5",
                      std::to_string(trace.steps.size()));

        const char* want_now[5] = {"[0,1,0]", "[1,1,0]", "[1,1,1]", "[1,0,1]", "[1,0,1]"};
        const int want_table[5][3] = {
            {0, 0, 0}, {3, 0, 0}, {2, 0, 3}, {1, 3, 2}, {0, 2, 1}};
        const char* want_flags[5][3] = {
            {"choosable", "choosable", "choosable"},
            {"tabu", "choosable", "choosable"},
            {"tabu", "choosable", "tabu"},
            {"tabu", "tabu", "tabu"},
            {"choosable", "tabu", "tabu"}};
        for (size_t k = 0; k < trace.steps.size() && k < 5; ++k) {
            const auto& step = trace.steps[k];
            const std::string tag = "tabu step " + std::to_string(k + 1);
            ck.close(tag + " x_now", want_now[k], pattern_str(step.x_now));
            ck.close(tag + " table", table_str({want_table[k][0], want_table[k][1],
                                                want_table[k][2]}),
                     table_str(step.tabu_table));
            for (size_t c = 0; c < step.candidates.size() && c < 3; ++c)
                ck.close(tag + " flip" + std::to_string(c) + " status", want_flags[k][c],
                         step.candidates[c].tabu ? "tabu" : "choosable");
        }
        ck.close_flag("tabu null move at step 4",
                      trace.steps.size() >= 4 && trace.steps[3].null_move, "null move",
                      trace.steps.size() >= 4 && trace.steps[3].null_move
                          ? "null move"
                          : "moved");
    }

    // -- the one-flip neighborhood of [0,1,0,1]
    {
        const auto n = neighborhood({0, 1, 0, 1});
        const bool ok = n.size() == 4 && n[0] == SolutionBits{1, 1, 0, 1} &&
                        n[1] == SolutionBits{0, 0, 0, 1} &&
                        n[2] == SolutionBits{0, 1, 1, 1} &&
                        n[3] == SolutionBits{0, 1, 0, 0};
        ck.close_flag("neighborhood of [0,1,0,1]", ok,
                      "{[1,1,0,1],[0,0,0,1],[0,1,1,1],[0,1,0,0]}",
                      ok ? "as expected" : "differs");
    }

    // -- source-side target set and ticket stock
    {
        TabuParams params;
        params.fixed_length = true;
        params.fixed_value = 3;
        params.theta = 3;
        const auto init = tabu_mpar_init(fx.source, ev, params);
        ck.close("target set from source", "{n1,n2,n3}", [&] {
            std::string s = "{";
            for (size_t i = 0; i < init.nopt.size(); ++i) {
                if (i) s += ",";
                s += fx.label(init.nopt[i]);
            }
            return s + "}";
        }());
        ck.close("initial tickets", "3", std::to_string(init.tickets));
    }

    // -- the encounter where replication is declined (0.670 < 0.673)
    {
        const SetProbability scorer = [&](const std::vector<NodeId>& set) {
            return ev.set_delivery_prob(set).probability;
        };
        const LocalPeer active{fx.source, MsgState::infectious,
                               ev.node_expected_delay(fx.source)};
        const LocalPeer passerby{0, MsgState::pure, ev.node_expected_delay(0)};
        const auto out = local_mpar_transition(active, passerby, {fx.source}, scorer);
        ck.close_flag("declined replication at the first meeting",
                      out.kind == LocalOutcome::Kind::none, "no state change",
                      out.kind == LocalOutcome::Kind::none ? "no state change"
                                                           : "changed");
    }

    return report;
}

std::string VerifyReport::render() const {
    std::string out;
    int failed = 0;
    for (const CheckResult& c : checks) {
        out += c.pass ? "[PASS] " : "[FAIL] ";
        out += c.name;
        if (!c.pass) {
            out += "  expected " + c.expected + ", got " + c.actual;
            ++failed;
        }
        out += "\n";
    }
    out += failed == 0 ? "all " + std::to_string(checks.size()) + " checks passed\n"
                       : std::to_string(failed) + " of " +
                             std::to_string(checks.size()) + " checks failed\n";
    return out;
}

} // namespace mpar
