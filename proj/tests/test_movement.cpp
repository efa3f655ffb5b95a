#include <doctest.h>

#include "helpers.hpp"
#include "mpar/movement.hpp"

using namespace mpar;
using testutil::campus_fixture;

namespace {

std::vector<const MovementRecord*> records_of(const Fixture& fx,
                                              std::initializer_list<int> internal) {
    std::vector<const MovementRecord*> out;
    for (int i : internal) out.push_back(&fx.records[static_cast<size_t>(i)]);
    return out;
}

std::vector<std::uint8_t> bits(std::initializer_list<int> v) {
    return {v.begin(), v.end()};
}

} // namespace

TEST_CASE("accumulate reproduces the campus reference vector") {
    const auto& fx = campus_fixture();
    const auto acc = accumulate(records_of(fx, {0, 1, 2}), full_period(fx.grid));
    CHECK(std::abs(acc[0] - 1.414) <= 0.001);
    CHECK(std::abs(acc[1] - 1.974) <= 0.001);
}

TEST_CASE("accumulate edge cases") {
    auto zero = MovementRecord::zero(0, 2, 3);
    const auto acc = accumulate({&zero}, {0, 2});
    CHECK(acc == std::vector<double>{0.0, 0.0, 0.0});

    auto one = MovementRecord::zero(1, 2, 2);
    one.at(0, 0) = 0.25;
    one.at(0, 1) = 0.75;
    one.at(1, 0) = 9.0;
    const auto row = accumulate({&one}, {0, 1});
    CHECK(row == std::vector<double>{0.25, 0.75});

    CHECK_THROWS_AS(accumulate({}, {0, 1}), parameter_error);
    auto other = MovementRecord::zero(2, 3, 2);
    CHECK_THROWS_AS(accumulate({&one, &other}, {0, 1}), dimension_error);
    CHECK_THROWS_AS(accumulate({&one}, {1, 1}), parameter_error);
}

TEST_CASE("extract_pattern thresholding") {
    CHECK(extract_pattern({1.414, 1.974}, 0.95).bits == bits({0, 1}));
    CHECK(extract_pattern({0.0, 0.0}, 0.5).bits == bits({0, 0}));
    CHECK(extract_pattern({3.0, 3.0, 3.0, 3.0}, 0.9).bits == bits({1, 1, 1, 1}));
    CHECK_THROWS_AS(extract_pattern({1.0}, 1.0), parameter_error);
    CHECK_THROWS_AS(extract_pattern({1.0}, 0.0), parameter_error);
    CHECK_THROWS_AS(extract_pattern({-1.0}, 0.5), parameter_error);
}

TEST_CASE("extract_pattern is scale invariant and binary") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 1 + static_cast<int>(rng.bounded(6));
        std::vector<double> v(static_cast<size_t>(m));
        for (auto& x : v) x = rng.next_unit() < 0.2 ? 0.0 : rng.uniform(0.0, 10.0);
        const double delta = rng.uniform(0.05, 0.95);
        const double c = std::exp(rng.uniform(-6.0, 6.0));
        std::vector<double> scaled = v;
        for (auto& x : scaled) x *= c;
        const auto p1 = extract_pattern(v, delta);
        const auto p2 = extract_pattern(scaled, delta);
        CHECK(p1.bits == p2.bits);
        for (auto b : p1.bits) CHECK((b == 0 || b == 1));
    }
}

TEST_CASE("movement_pattern matches the subset reference list") {
    const auto& fx = campus_fixture();
    const auto whole = full_period(fx.grid);
    CHECK(movement_pattern(records_of(fx, {1}), whole, fx.delta).bits == bits({1, 1}));
    CHECK(movement_pattern(records_of(fx, {0}), whole, fx.delta).bits == bits({1, 0}));
    CHECK(movement_pattern(records_of(fx, {0, 2}), whole, fx.delta).bits == bits({0, 1}));
    CHECK(movement_pattern(records_of(fx, {0, 1}), whole, fx.delta).bits == bits({1, 0}));
    CHECK(movement_pattern(records_of(fx, {1, 2}), whole, fx.delta).bits == bits({0, 1}));
    CHECK(movement_pattern(records_of(fx, {0, 1, 2}), whole, fx.delta).bits ==
          bits({0, 1}));
}

TEST_CASE("set pattern is not the union of member patterns") {
    const auto& fx = campus_fixture();
    const auto whole = full_period(fx.grid);
    const auto solo = movement_pattern(records_of(fx, {1}), whole, fx.delta);
    const auto trio = movement_pattern(records_of(fx, {0, 1, 2}), whole, fx.delta);
    CHECK(solo.bits == bits({1, 1}));
    CHECK(trio.bits == bits({0, 1})); // the union would keep a1 marked
}

TEST_CASE("common_locations intersects relay pattern with destination support") {
    const auto& fx = campus_fixture();
    const auto whole = full_period(fx.grid);
    const auto& dest = fx.records[static_cast<size_t>(fx.destination)];

    CHECK(common_locations(records_of(fx, {0, 1, 2}), dest, whole, fx.delta) ==
          std::vector<LocId>{1});
    CHECK(common_locations(records_of(fx, {1}), dest, whole, fx.delta) ==
          std::vector<LocId>{0, 1});

    auto idle = MovementRecord::zero(9, fx.grid.slots, 2);
    CHECK(common_locations({&idle}, dest, whole, fx.delta).empty());

    CHECK_THROWS_AS(common_locations({&dest}, dest, whole, fx.delta), contract_error);
}

TEST_CASE("meeting intervals average the per-slot visit gaps") {
    const auto& fx = campus_fixture();
    const auto r1 = meeting_intervals(fx.records[0]);
    CHECK(r1.mean_interval[0] == doctest::Approx(4.05));
    CHECK(r1.mean_interval[1] == doctest::Approx(3.8));
    const auto r3 = meeting_intervals(fx.records[2]);
    CHECK(r3.mean_interval[1] == doctest::Approx(8.3));
    CHECK(r1.rates()[0] == doctest::Approx(1.0 / 4.05));

    // a silent slot is excluded from the average instead of poisoning it
    auto sparse = MovementRecord::zero(0, 2, 1);
    sparse.at(0, 0) = 0.5;
    const auto row = meeting_intervals(sparse);
    CHECK(row.mean_interval[0] == doctest::Approx(2.0));

    auto silent = MovementRecord::zero(0, 2, 1);
    const auto none = meeting_intervals(silent);
    CHECK(std::isinf(none.mean_interval[0]));
    CHECK(none.rates()[0] == 0.0);
}

TEST_CASE("online record updates") {
    auto rec = MovementRecord::zero(3, 2, 2);
    rec = update_record_online(rec, 0, 1, 3, 6.0);
    CHECK(rec.at(0, 1) == doctest::Approx(0.5));
    rec = update_record_online(rec, 0, 1, 0, 6.0);
    CHECK(rec.at(0, 1) == 0.0);
    rec = update_record_online(rec, 1, 0, 4, 2.0);
    rec = update_record_online(rec, 1, 0, 4, 2.0);
    CHECK(rec.at(1, 0) == doctest::Approx(2.0));
    CHECK_THROWS_AS(update_record_online(rec, 2, 0, 1, 1.0), parameter_error);
}

TEST_CASE("accumulate is additive over disjoint record sets") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 1 + static_cast<int>(rng.bounded(4));
        std::vector<MovementRecord> recs;
        for (int i = 0; i < 4; ++i) {
            auto r = MovementRecord::zero(i, 2, m);
            for (int k = 0; k < 2; ++k)
                for (int j = 0; j < m; ++j) r.at(k, j) = rng.uniform(0.0, 3.0);
            recs.push_back(std::move(r));
        }
        const SlotRange w{0, 2};
        const auto left = accumulate({&recs[0], &recs[1]}, w);
        const auto right = accumulate({&recs[2], &recs[3]}, w);
        const auto both = accumulate({&recs[0], &recs[1], &recs[2], &recs[3]}, w);
        for (int j = 0; j < m; ++j)
            CHECK(both[static_cast<size_t>(j)] ==
                  doctest::Approx(left[static_cast<size_t>(j)] +
                                  right[static_cast<size_t>(j)]));
    }
}

// Any target pattern with at least one marked location stays reachable by one
// more nonnegative row, whatever has been accumulated so far.
TEST_CASE("a single added row can retarget the pattern") {
    Rng rng(23);
    const double delta = 0.95;
    for (int trial = 0; trial < 30; ++trial) {
        const int m = 2 + static_cast<int>(rng.bounded(2)); // m in {2,3}
        std::vector<double> prefix(static_cast<size_t>(m));
        for (auto& x : prefix) x = rng.next_unit() < 0.25 ? 0.0 : rng.uniform(0.0, 8.0);
        double prefix_sum = 0.0;
        for (double x : prefix) prefix_sum += x;
        const double big = std::max(prefix_sum, 1.0);

        const std::vector<double> grid = {0.0,         0.1 * big, 0.5 * big, big,
                                          4.0 * big,   16.0 * big, 256.0 * big};
        for (int target = 1; target < (1 << m); ++target) {
            bool found = false;
            std::vector<size_t> pick(static_cast<size_t>(m), 0);
            for (;;) {
                std::vector<double> v = prefix;
                for (int j = 0; j < m; ++j) v[static_cast<size_t>(j)] += grid[pick[static_cast<size_t>(j)]];
                const auto pat = extract_pattern(v, delta);
                bool match = true;
                for (int j = 0; j < m; ++j)
                    if (pat.bits[static_cast<size_t>(j)] != ((target >> j) & 1)) match = false;
                if (match) {
                    found = true;
                    break;
                }
                int j = 0;
                while (j < m) {
                    if (++pick[static_cast<size_t>(j)] < grid.size()) break;
                    pick[static_cast<size_t>(j)] = 0;
                    ++j;
                }
                if (j == m) break;
            }
            CHECK_MESSAGE(found, "target ", target, " unreachable at trial ", trial);
        }
    }
}
