#pragma once

#include <string>
#include <vector>

#include "mpar/fixture.hpp"
#include "mpar/rng.hpp"

namespace testutil {

inline const mpar::Fixture& campus_fixture() {
    static mpar::Fixture fx =
        mpar::load_fixture(std::string(MPAR_REPO_DIR) + "/fixtures/worked_example.json");
    return fx;
}

inline const mpar::DeliveryEvaluator& campus_evaluator() {
    static mpar::DeliveryEvaluator ev = campus_fixture().evaluator();
    return ev;
}

// Random instance for search-vs-oracle comparisons: log-uniform rates with a
// sprinkle of never-visited pairs.
struct RandomInstance {
    mpar::TimeGrid grid;
    std::vector<mpar::MovementRecord> records;
    mpar::NodeId destination = 0;
    mpar::NodeId source = 1;
    double ttl = mpar::kInf;
    double delta = 0.95;

    mpar::DeliveryEvaluator evaluator() const {
        return mpar::DeliveryEvaluator(records, grid, mpar::full_period(grid), delta,
                                       destination, ttl);
    }
};

inline RandomInstance random_instance(std::uint64_t seed, int max_relays = 12,
                                      int max_locations = 6) {
    mpar::Rng rng(seed);
    RandomInstance inst;
    const int nprime = 2 + static_cast<int>(rng.bounded(
                               static_cast<std::uint64_t>(max_relays - 1)));
    const int n = nprime + 1;
    const int m = 1 + static_cast<int>(rng.bounded(
                          static_cast<std::uint64_t>(max_locations)));
    const int h = 1 + static_cast<int>(rng.bounded(2));
    inst.grid = {24.0, h};
    inst.destination = static_cast<mpar::NodeId>(rng.bounded(static_cast<std::uint64_t>(n)));
    do {
        inst.source = static_cast<mpar::NodeId>(rng.bounded(static_cast<std::uint64_t>(n)));
    } while (inst.source == inst.destination);
    inst.ttl = rng.next_unit() < 0.5 ? mpar::kInf : rng.uniform(1.0, 60.0);
    for (int i = 0; i < n; ++i) {
        auto rec = mpar::MovementRecord::zero(i, h, m);
        for (int k = 0; k < h; ++k)
            for (int j = 0; j < m; ++j) {
                if (rng.next_unit() < 0.15) continue; // never visited
                rec.at(k, j) = std::exp(rng.uniform(std::log(0.05), std::log(5.0)));
            }
        inst.records.push_back(std::move(rec));
    }
    return inst;
}

} // namespace testutil
