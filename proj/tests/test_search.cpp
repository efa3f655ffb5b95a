#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "mpar/search.hpp"

using namespace mpar;
using testutil::campus_evaluator;

namespace {

SolutionBits sb(std::initializer_list<int> v) { return {v.begin(), v.end()}; }

} // namespace

TEST_CASE("neighborhood flips one bit per candidate, in index order") {
    const auto n = neighborhood(sb({0, 1, 0, 1}));
    REQUIRE(n.size() == 4);
    CHECK(n[0] == sb({1, 1, 0, 1}));
    CHECK(n[1] == sb({0, 0, 0, 1}));
    CHECK(n[2] == sb({0, 1, 1, 1}));
    CHECK(n[3] == sb({0, 1, 0, 0}));
    CHECK(neighborhood(sb({0})) == std::vector<SolutionBits>{sb({1})});
    for (int len = 1; len <= 9; ++len)
        CHECK(neighborhood(SolutionBits(static_cast<size_t>(len), 0)).size() ==
              static_cast<size_t>(len));
}

TEST_CASE("exhaustive search finds the campus optimum") {
    const auto& ev = campus_evaluator();
    const auto best = brute_force_opt(ev);
    CHECK(best == sb({1, 1, 1}));
    CHECK(std::abs(ev.probability(best) - 0.789) <= 0.005);
}

TEST_CASE("exhaustive search tie-breaks toward the minimal set") {
    // every rate zero: all subsets score 0, the empty set must win
    std::vector<MovementRecord> recs;
    for (int i = 0; i < 4; ++i) recs.push_back(MovementRecord::zero(i, 1, 2));
    const DeliveryEvaluator ev(recs, {24.0, 1}, {0, 1}, 0.95, 3, kInf);
    CHECK(brute_force_opt(ev) == sb({0, 0, 0}));

    // one useful relay
    std::vector<MovementRecord> recs2;
    for (int i = 0; i < 2; ++i) {
        auto r = MovementRecord::zero(i, 1, 1);
        r.at(0, 0) = 0.5;
        recs2.push_back(std::move(r));
    }
    const DeliveryEvaluator ev2(recs2, {24.0, 1}, {0, 1}, 0.95, 1, kInf);
    CHECK(brute_force_opt(ev2) == sb({1}));

    const DeliveryEvaluator& big = campus_evaluator();
    (void)big;
    std::vector<MovementRecord> many;
    for (int i = 0; i < 22; ++i) many.push_back(MovementRecord::zero(i, 1, 1));
    const DeliveryEvaluator ev3(many, {24.0, 1}, {0, 1}, 0.95, 0, kInf);
    CHECK_THROWS_AS(brute_force_opt(ev3), capacity_error);
}

TEST_CASE("greedy search walks into the single-relay trap") {
    const auto& ev = campus_evaluator();
    const auto [stop, trace] = local_search(sb({0, 1, 0}), ev);
    CHECK(stop == sb({0, 1, 0}));
    CHECK(std::abs(ev.probability(stop) - 0.673) <= 0.005);
    REQUIRE(trace.steps.size() == 1);
    const auto& cands = trace.steps[0].candidates;
    REQUIRE(cands.size() == 3);
    CHECK(cands[0].x == sb({1, 1, 0}));
    CHECK(std::abs(cands[0].probability - 0.670) <= 0.005);
    CHECK(cands[1].x == sb({0, 0, 0}));
    CHECK(cands[1].probability == 0.0);
    CHECK(cands[2].x == sb({0, 1, 1}));
    CHECK(std::abs(cands[2].probability - 0.600) <= 0.005);
}

TEST_CASE("greedy search from nothing reaches the strongest single relay") {
    const auto& ev = campus_evaluator();
    const auto [stop, trace] = local_search(sb({0, 0, 0}), ev);
    CHECK(stop == sb({0, 1, 0}));
    CHECK(trace.steps.size() == 2);
}

TEST_CASE("greedy search keeps a global optimum fixed") {
    const auto& ev = campus_evaluator();
    const auto [stop, trace] = local_search(sb({1, 1, 1}), ev);
    CHECK(stop == sb({1, 1, 1}));
}

TEST_CASE("tenure sampling") {
    TabuParams fixed;
    fixed.fixed_length = true;
    fixed.fixed_value = 3;
    Rng rng(1);
    for (int i = 0; i < 20; ++i) CHECK(sample_tabu_length(0.2, 0.9, 9, fixed, rng) == 3);

    TabuParams degenerate;
    degenerate.sigma = 0.0;
    CHECK(sample_tabu_length(0.9, 0.2, 9, degenerate, rng) == 3); // floor(sqrt 9)
    CHECK(sample_tabu_length(0.9, 0.2, 1, degenerate, rng) == 1);

    // improving move of size 1: mean 2*sqrt(n), observed mean offset by the floor
    TabuParams defaults;
    Rng rng2(99);
    double sum = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) sum += sample_tabu_length(0.0, 1.0, 16, defaults, rng2);
    const double mean = sum / draws;
    CHECK(std::abs(mean - 7.5) <= 0.02 * 8.0);
    CHECK(mean >= std::sqrt(16.0));
    CHECK(mean <= 2.0 * std::sqrt(16.0));
}

TEST_CASE("tenure table updates") {
    std::vector<int> t = {4, 2, 1};
    update_tabu_table(t, 0, 7);
    CHECK(t == std::vector<int>{7, 1, 0});
    update_tabu_table(t, -1, 0); // stalled step: pure decay
    CHECK(t == std::vector<int>{6, 0, 0});
    std::vector<int> z = {0, 0, 0};
    update_tabu_table(z, 0, 3);
    CHECK(z == std::vector<int>{3, 0, 0});
}

TEST_CASE("tenure-table search escapes the trap and reproduces the trace") {
    const auto& ev = campus_evaluator();
    TabuParams params;
    params.fixed_length = true;
    params.fixed_value = 3;
    params.theta = 3;
    const auto [best, trace] = tabu_search(sb({0, 1, 0}), ev, params);
    CHECK(best == sb({1, 1, 1}));
    CHECK(std::abs(ev.probability(best) - 0.789) <= 0.005);

    REQUIRE(trace.steps.size() == 5);
    const SolutionBits now_seq[5] = {sb({0, 1, 0}), sb({1, 1, 0}), sb({1, 1, 1}),
                                     sb({1, 0, 1}), sb({1, 0, 1})};
    const std::vector<int> tables[5] = {
        {0, 0, 0}, {3, 0, 0}, {2, 0, 3}, {1, 3, 2}, {0, 2, 1}};
    const bool tabu_flags[5][3] = {{false, false, false},
                                   {true, false, false},
                                   {true, false, true},
                                   {true, true, true},
                                   {false, true, true}};
    for (int k = 0; k < 5; ++k) {
        const auto& step = trace.steps[static_cast<size_t>(k)];
        CHECK(step.x_now == now_seq[k]);
        CHECK(step.tabu_table == tables[k]);
        REQUIRE(step.candidates.size() == 3);
        for (int c = 0; c < 3; ++c)
            CHECK(step.candidates[static_cast<size_t>(c)].tabu == tabu_flags[k][c]);
    }
    CHECK_FALSE(trace.steps[0].null_move);
    CHECK(trace.steps[3].null_move); // everything tabued, nothing aspires
    CHECK_FALSE(trace.steps[4].null_move);
}

TEST_CASE("search from the optimum returns it unchanged") {
    const auto& ev = campus_evaluator();
    TabuParams params;
    params.theta = 4;
    params.seed = 5;
    const auto [best, trace] = tabu_search(sb({1, 1, 1}), ev, params);
    CHECK(best == sb({1, 1, 1}));
}

TEST_CASE("trace invariants hold on random instances") {
    for (int trial = 0; trial < 40; ++trial) {
        const auto inst = testutil::random_instance(4000 + trial, 8, 4);
        const auto ev = inst.evaluator();
        TabuParams params;
        params.seed = static_cast<std::uint64_t>(trial);
        SolutionBits start(static_cast<size_t>(ev.relay_count()), 0);
        start[static_cast<size_t>(ev.relay_index(inst.source))] = 1;
        const auto [best, trace] = tabu_search(start, ev, params);

        const int nprime = ev.relay_count();
        const int theta = params.resolved_theta(nprime);
        CHECK(trace.steps.size() <=
              static_cast<size_t>((theta + 1)) * (1ULL << nprime));

        double prev_best = -kInf;
        for (const auto& step : trace.steps) {
            CHECK(step.p_best >= prev_best);
            prev_best = step.p_best;
            int fresh = 0;
            for (int v : step.tabu_table) {
                CHECK(v >= 0);
                if (v > 0) ++fresh;
            }
            for (const auto& c : step.candidates)
                if (c.chosen && c.tabu) CHECK(c.p > step.p_best); // aspiration fired
        }

        // the no-memory walk never beats the tenure-table walk from the same start
        const auto [local_best, lt] = local_search(start, ev);
        CHECK(ev.evaluation_p(best) >= ev.evaluation_p(local_best) - 1e-12);
    }
}

TEST_CASE("greedy results are one-flip local optima") {
    for (int trial = 0; trial < 30; ++trial) {
        const auto inst = testutil::random_instance(6000 + trial, 8, 5);
        const auto ev = inst.evaluator();
        Rng rng(static_cast<std::uint64_t>(trial));
        SolutionBits start(static_cast<size_t>(ev.relay_count()), 0);
        for (auto& b : start) b = static_cast<std::uint8_t>(rng.bounded(2));
        const auto [stop, trace] = local_search(start, ev);
        const double p_stop = ev.evaluation_p(stop);
        for (const auto& neighbor : neighborhood(stop))
            CHECK(ev.evaluation_p(neighbor) <= p_stop + 1e-12);
    }
}

TEST_CASE("restarts only improve the result") {
    for (int trial = 0; trial < 10; ++trial) {
        const auto inst = testutil::random_instance(5000 + trial, 7, 4);
        const auto ev = inst.evaluator();
        TabuParams params;
        params.seed = 17;
        SolutionBits start(static_cast<size_t>(ev.relay_count()), 0);
        start[static_cast<size_t>(ev.relay_index(inst.source))] = 1;
        const auto single = tabu_search(start, ev, params).first;
        const auto multi = tabu_search_multistart(start, ev, params, 5);
        CHECK(ev.probability(multi) >= ev.probability(single) - 1e-12);
    }
}

TEST_CASE("trace serializes to json") {
    const auto& ev = campus_evaluator();
    TabuParams params;
    params.fixed_length = true;
    params.fixed_value = 3;
    params.theta = 3;
    const auto [best, trace] = tabu_search(sb({0, 1, 0}), ev, params);
    const std::string json = trace_to_json(trace);
    CHECK(json.find("\"x_now\": \"010\"") != std::string::npos);
    CHECK(json.find("\"tabu_table\"") != std::string::npos);
    CHECK(json.find("\"status\": \"tabu\"") != std::string::npos);
}
