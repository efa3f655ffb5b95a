#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mpar/delivery.hpp"
#include "mpar/rng.hpp"

namespace mpar {

struct TabuParams {
    int theta = 0;          // stop patience; 0 resolves to max(3, 2n')
    double sigma = -1.0;    // tenure std-dev; <0 resolves to sqrt(n')/4
    bool fixed_length = false;
    int fixed_value = 3;
    std::uint64_t seed = 1;

    int resolved_theta(int nprime) const {
        return theta > 0 ? theta : std::max(3, 2 * nprime);
    }
    double resolved_sigma(int nprime) const {
        return sigma >= 0.0 ? sigma : std::sqrt(static_cast<double>(nprime)) / 4.0;
    }
};

struct CandidateEval {
    int flip_index = -1;
    SolutionBits x;
    double p = 0.0;
    double probability = 0.0;
    bool tabu = false;
    bool chosen = false;
};

struct TraceStep {
    SolutionBits x_now;
    double p_now = 0.0;
    double prob_now = 0.0;
    SolutionBits x_best;
    double p_best = 0.0;
    double prob_best = 0.0;
    std::vector<int> tabu_table; // snapshot at step start
    std::vector<CandidateEval> candidates;
    bool null_move = false;
};

struct SearchTrace {
    std::vector<TraceStep> steps;
};

// All n' Hamming-1 neighbors, in ascending flip-index order.
std::vector<SolutionBits> neighborhood(const SolutionBits& x);

// Exhaustive optimum: maximal probability, ties (within 1e-12) broken first by
// smaller cardinality, then by lexicographically smaller bit vector. Hard-capped
// at n' <= 20; the problem is exponential by nature.
SolutionBits brute_force_opt(const DeliveryEvaluator& eval);

// Steepest-ascent single-flip search; stops at the first 1-flip local optimum.
std::pair<SolutionBits, SearchTrace> local_search(SolutionBits start,
                                                  const DeliveryEvaluator& eval);

// floor of a normal draw, at least 1. Mean sqrt(n')(1 + p_new - p_old) after an
// improving move, sqrt(n') otherwise; fixed mode returns the constant.
int sample_tabu_length(double p_old, double p_new, int nprime,
                       const TabuParams& params, Rng& rng);

// flipped_index < 0 encodes a null move: every nonzero counter decays by one.
void update_tabu_table(std::vector<int>& table, int flipped_index, int length);

std::pair<SolutionBits, SearchTrace> tabu_search(SolutionBits start,
                                                 const DeliveryEvaluator& eval,
                                                 const TabuParams& params);

// First start as given, remaining restarts from uniformly random corners; keeps
// the best result under the brute-force comparison order.
SolutionBits tabu_search_multistart(SolutionBits first_start,
                                    const DeliveryEvaluator& eval,
                                    const TabuParams& params, int restarts);

std::string solution_to_string(const SolutionBits& x);
std::string trace_to_json(const SearchTrace& trace);

} // namespace mpar
