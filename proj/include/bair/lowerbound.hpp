#pragma once

#include <cstdint>
#include <utility>

#include "bair/harness.hpp"
#include "bair/instance.hpp"

#include <json.hpp>

namespace bair {

// Adversarial instance pair with swapped best arms: the runner-up arm (index
// 1) carries mean 1 in both; arm 0 sits at 1+eps-d in `nu` and 1+eps in
// `nu_prime`; every further arm is buried at -1/delta.
struct HardInstancePair {
    BanditInstance nu;
    BanditInstance nu_prime;
    std::int64_t n0 = 0;
    double d = 0.0;
    double eps = 0.0;
    int k = 0;
    double delta = 0.0, alpha = 0.0, c = 0.0, rho0 = 0.0, rho1 = 0.0, gap = 0.0;
};

// Acceptance budget below which any policy must confuse the pair:
// ceil(max(delta^(c - 1/alpha) / rho0, (2/gap^2) ln(1/(4 delta)))).
// Throws InvalidC (c outside (0, 1/2)) or InvalidDelta (delta outside (0, 1/4)).
std::int64_t n0_budget(double delta, double alpha, double c, double rho0, double gap);

// Builds the pair at the given user-parameter range. Throws BudgetBelowK
// when the budget does not even cover one recommendation per arm and
// DegenerateConstruction when the offsets collapse (d <= eps), which means
// delta is not small enough for the construction.
HardInstancePair hard_instance_pair(int k, double delta, double alpha, double c, double rho0,
                                    double rho1, double gap = 0.5);

struct ProbeStats {
    std::int64_t n0 = 0;
    double d = 0.0;
    double eps = 0.0;
    int reps = 0;
    // Frequency of "every arm except the runner-up accepted at most once
    // within the first n0 acceptances" with 95% Wilson intervals.
    double freq_nu = 0.0;
    double freq_nu_prime = 0.0;
    std::pair<double, double> ci_nu{0.0, 0.0};
    std::pair<double, double> ci_nu_prime{0.0, 0.0};
    // Pairs of coupled runs whose (arm, decision) transcripts coincide.
    int identical_transcripts = 0;
    // Runs where the event held on both sides and arm 0's single realized
    // reward fell below 1+eps-d in both; such pairs must coincide.
    int coupled_condition_runs = 0;
    int implication_violations = 0;
};

// Simulates the policy on both instances with per-arm common random
// numbers, truncating each run at n0 acceptances. Requires reps >= 100.
ProbeStats indistinguishability_probe(const HardInstancePair& pair, AlgoId policy, int reps,
                                      std::uint64_t seed);

nlohmann::json probe_stats_to_json(const ProbeStats& stats);

// 95% Wilson score interval for `successes` out of `trials`.
std::pair<double, double> wilson_interval(int successes, int trials);

}  // namespace bair
