#pragma once

#include <cstdint>
#include <vector>

#include "bair/algorithms.hpp"
#include "bair/session.hpp"

namespace bair {

// Kullback-Leibler divergence between Bernoulli(p) and Bernoulli(q);
// operands are expected pre-clamped away from {0, 1}.
double bernoulli_kl(double p, double q);

// Sampling proportions maximizing the pure-exploration rate for Bernoulli
// arms with a unique largest mean: the classic alternative-instance program
// reduced to one scalar equation, solved by bisection to `rel_tol`.
// Falls back to uniform when the largest mean is tied.
std::vector<double> optimal_weights(const std::vector<double>& means, double rel_tol = 1e-6);

// Generalized likelihood ratio that the empirically best arm beats every
// other arm; 0 when the best mean is tied.
double glr_statistic(const std::vector<double>& means, const std::vector<std::int64_t>& pulls);

// Stopping threshold: ln(2 t (K-1) / delta).
double stopping_threshold(std::int64_t t, int k, double delta);

struct TrackStopOptions {
    std::int64_t t_max = 0;        // hard cap on recommendations; required
    double mean_clamp = 1e-6;      // empirical means clipped to [c, 1-c]
    double weights_rel_tol = 1e-6;
};

// Fixed-confidence identification treating accept=1/reject=0 as Bernoulli
// rewards: D-tracking toward the optimal allocation with forced exploration
// of underplayed arms, stopping when the likelihood ratio clears the
// threshold. Hitting t_max yields BudgetExhausted with the acceptance
// argmax as the guess.
AlgorithmOutcome track_and_stop(UserSession& session, double delta,
                                const TrackStopOptions& options);

}  // namespace bair
