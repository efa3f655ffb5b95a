#pragma once

#include <string>
#include <vector>

#include "mpar/fixture.hpp"

namespace mpar {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string expected;
    std::string actual;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
    std::string render() const;
};

// Recomputes the reference values the worked-example fixture pins: the
// accumulated rate vector, the pattern and frequent-location lists, the
// meeting intervals, all subset delivery probabilities, the expected delays,
// and the two search traces. Any drift fails the corresponding check.
VerifyReport verify_fixture(const Fixture& fx);

} // namespace mpar
