#include "mpar/search.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace mpar {

namespace {

int cardinality(const SolutionBits& x) {
    int c = 0;
    for (auto b : x) c += b;
    return c;
}

// Ordering used wherever two solutions must be ranked reproducibly.
bool better_solution(double p_a, const SolutionBits& a, double p_b,
                     const SolutionBits& b) {
    if (p_a > p_b + 1e-12) return true;
    if (p_b > p_a + 1e-12) return false;
    const int ca = cardinality(a), cb = cardinality(b);
    if (ca != cb) return ca < cb;
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace

std::vector<SolutionBits> neighborhood(const SolutionBits& x) {
    std::vector<SolutionBits> out;
    out.reserve(x.size());
    for (size_t i = 0; i < x.size(); ++i) {
        SolutionBits y = x;
        y[i] ^= 1;
        out.push_back(std::move(y));
    }
    return out;
}

SolutionBits brute_force_opt(const DeliveryEvaluator& eval) {
    const int n = eval.relay_count();
    if (n > 20) throw capacity_error("brute force capped at 20 relay candidates");
    SolutionBits best(static_cast<size_t>(n), 0);
    double best_prob = eval.probability(best);
    SolutionBits x(static_cast<size_t>(n), 0);
    for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
        for (int i = 0; i < n; ++i) x[static_cast<size_t>(i)] = (mask >> i) & 1u;
        const double prob = eval.probability(x);
        if (better_solution(prob, x, best_prob, best)) {
            best = x;
            best_prob = prob;
        }
    }
    return best;
}

std::pair<SolutionBits, SearchTrace> local_search(SolutionBits start,
                                                  const DeliveryEvaluator& eval) {
    SearchTrace trace;
    SolutionBits x = std::move(start);
    double prob = eval.probability(x);
    double p = evaluation_from_probability(prob);
    for (;;) {
        TraceStep step;
        step.x_now = x;
        step.p_now = p;
        step.prob_now = prob;
        step.x_best = x;
        step.p_best = p;
        step.prob_best = prob;
        int chosen = -1;
        double chosen_p = p;
        const auto neigh = neighborhood(x);
        for (size_t i = 0; i < neigh.size(); ++i) {
            CandidateEval c;
            c.flip_index = static_cast<int>(i);
            c.x = neigh[i];
            c.probability = eval.probability(neigh[i]);
            c.p = evaluation_from_probability(c.probability);
            if (c.p > chosen_p) { // strict: ties keep the earlier (lower) flip
                chosen = static_cast<int>(i);
                chosen_p = c.p;
            }
            step.candidates.push_back(std::move(c));
        }
        const bool done = chosen < 0;
        if (!done) step.candidates[static_cast<size_t>(chosen)].chosen = true;
        trace.steps.push_back(std::move(step));
        if (done) return {x, trace};
        x[static_cast<size_t>(chosen)] ^= 1;
        prob = trace.steps.back().candidates[static_cast<size_t>(chosen)].probability;
        p = chosen_p;
    }
}

int sample_tabu_length(double p_old, double p_new, int nprime,
                       const TabuParams& params, Rng& rng) {
    if (params.fixed_length) return std::max(1, params.fixed_value);
    const double root = std::sqrt(static_cast<double>(std::max(1, nprime)));
    double mu = root;
    if (p_new > p_old) mu = root * (1.0 + (p_new - p_old));
    if (!std::isfinite(mu)) mu = 1e9;
    const double draw = rng.normal(mu, params.resolved_sigma(nprime));
    if (draw >= 1e9) return 1000000000;
    return std::max(1, static_cast<int>(std::floor(draw)));
}

void update_tabu_table(std::vector<int>& table, int flipped_index, int length) {
    for (size_t i = 0; i < table.size(); ++i) {
        if (static_cast<int>(i) == flipped_index)
            table[i] = length;
        else if (table[i] > 0)
            --table[i];
    }
}

std::pair<SolutionBits, SearchTrace> tabu_search(SolutionBits start,
                                                 const DeliveryEvaluator& eval,
                                                 const TabuParams& params) {
    SearchTrace trace;
    const int n = static_cast<int>(start.size());
    const int theta = params.resolved_theta(n);
    Rng rng(params.seed);

    SolutionBits x_now = std::move(start);
    double prob_now = eval.probability(x_now);
    double p_now = evaluation_from_probability(prob_now);
    SolutionBits x_best = x_now;
    double prob_best = prob_now;
    double p_best = p_now;
    std::vector<int> table(static_cast<size_t>(n), 0);
    int stagnation = 0;

    while (stagnation < theta) {
        TraceStep step;
        step.x_now = x_now;
        step.p_now = p_now;
        step.prob_now = prob_now;
        step.x_best = x_best;
        step.p_best = p_best;
        step.prob_best = prob_best;
        step.tabu_table = table;

        int chosen = -1;
        double chosen_p = 0.0;
        const auto neigh = neighborhood(x_now);
        for (size_t i = 0; i < neigh.size(); ++i) {
            CandidateEval c;
            c.flip_index = static_cast<int>(i);
            c.x = neigh[i];
            c.probability = eval.probability(neigh[i]);
            c.p = evaluation_from_probability(c.probability);
            c.tabu = table[i] > 0;
            // aspiration: a tabued flip is admissible only above the best record
            const bool admissible = !c.tabu || c.p > p_best;
            if (admissible && (chosen < 0 || c.p > chosen_p)) {
                chosen = static_cast<int>(i);
                chosen_p = c.p;
            }
            step.candidates.push_back(std::move(c));
        }

        if (chosen < 0) {
            // everything tabued and nothing aspires: stay put while tenures decay
            step.null_move = true;
            trace.steps.push_back(std::move(step));
            update_tabu_table(table, -1, 0);
            ++stagnation;
            continue;
        }

        step.candidates[static_cast<size_t>(chosen)].chosen = true;
        const double prob_next = step.candidates[static_cast<size_t>(chosen)].probability;
        trace.steps.push_back(std::move(step));

        const int tenure = sample_tabu_length(p_now, chosen_p, n, params, rng);
        x_now[static_cast<size_t>(chosen)] ^= 1;
        p_now = chosen_p;
        prob_now = prob_next;
        if (p_now > p_best) {
            x_best = x_now;
            p_best = p_now;
            prob_best = prob_now;
            stagnation = 0;
        } else {
            ++stagnation;
        }
        update_tabu_table(table, chosen, tenure);
    }
    return {x_best, trace};
}

SolutionBits tabu_search_multistart(SolutionBits first_start,
                                    const DeliveryEvaluator& eval,
                                    const TabuParams& params, int restarts) {
    SolutionBits best;
    double best_prob = -1.0;
    for (int r = 0; r < std::max(1, restarts); ++r) {
        TabuParams run = params;
        run.seed = derive_seed(params.seed, "tabu-restart", static_cast<std::uint64_t>(r));
        SolutionBits start = first_start;
        if (r > 0) {
            Rng srng(derive_seed(params.seed, "tabu-start", static_cast<std::uint64_t>(r)));
            for (auto& b : start) b = static_cast<std::uint8_t>(srng.bounded(2));
        }
        auto [x, trace] = tabu_search(std::move(start), eval, run);
        const double prob = eval.probability(x);
        if (best_prob < 0.0 || better_solution(prob, x, best_prob, best)) {
            best = std::move(x);
            best_prob = prob;
        }
    }
    return best;
}

std::string solution_to_string(const SolutionBits& x) {
    std::string s;
    s.reserve(x.size());
    for (auto b : x) s.push_back(b ? '1' : '0');
    return s;
}

std::string trace_to_json(const SearchTrace& trace) {
    nlohmann::json steps = nlohmann::json::array();
    for (size_t k = 0; k < trace.steps.size(); ++k) {
        const TraceStep& s = trace.steps[k];
        nlohmann::json cands = nlohmann::json::array();
        for (const CandidateEval& c : s.candidates) {
            cands.push_back({{"flip", c.flip_index},
                             {"x", solution_to_string(c.x)},
                             {"p", c.p},
                             {"probability", c.probability},
                             {"status", c.tabu ? "tabu" : "choosable"},
                             {"chosen", c.chosen}});
        }
        steps.push_back({{"step", k + 1},
                         {"x_now", solution_to_string(s.x_now)},
                         {"p_now", s.p_now},
                         {"probability_now", s.prob_now},
                         {"x_best", solution_to_string(s.x_best)},
                         {"p_best", s.p_best},
                         {"probability_best", s.prob_best},
                         {"tabu_table", s.tabu_table},
                         {"null_move", s.null_move},
                         {"candidates", cands}});
    }
    return nlohmann::json{{"steps", steps}}.dump(2);
}

} // namespace mpar
