#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "bair/session.hpp"

namespace bair {

// Bookkeeping for one completed sweeping round: the round starts with the
// candidate set reset to all arms and ends once every arm has been rejected
// once. Tracks what the round-decrease invariant needs.
struct RoundRecord {
    std::int64_t start_step = 0;  // user step index of the round's first interaction
    std::int64_t end_step = 0;    // user step index of the round's last interaction
    double start_max_empirical_mean = 0.0;
    double end_max_empirical_mean = 0.0;
    double min_gamma_in_round = 0.0;
    std::int64_t acceptances_at_end = 0;

    // The highest empirical mean must drop by at least
    // 2*sqrt(min_gamma/acceptances) over a completed round. Only claimed
    // for rounds whose in-round gamma stayed positive throughout.
    bool decrease_holds(double tol = 1e-9) const;
};

struct Phase1Output {
    std::vector<std::int64_t> accept_counts;
    std::vector<std::int64_t> reject_counts;
    std::vector<RoundRecord> rounds;
    std::int64_t total_steps = 0;
};

// The sweeping phase accumulates acceptances by default; the time-step
// reading stops on the raw interaction count instead (sensitivity switch).
enum class Phase1Stop { AcceptanceCount, TimeStep };

struct Phase1Options {
    Phase1Stop stop_rule = Phase1Stop::AcceptanceCount;
    // Verify the round-decrease inequality on every completed round with
    // positive in-round gamma. Random decisions void the guarantee, so the
    // check is skipped for users with noise_p > 0 regardless of this flag.
    bool enforce_round_decrease = true;
};

enum class Termination { Identified, BudgetExhausted };

struct AlgorithmOutcome {
    int chosen_arm = -1;
    std::int64_t total_steps = 0;
    std::int64_t total_rejections = 0;
    std::vector<std::int64_t> per_arm_accepts;
    Termination termination = Termination::Identified;
    std::optional<std::int64_t> phase_boundary;  // steps spent in the sweeping phase

    bool operator==(const AlgorithmOutcome&) const = default;
};

// Acceptance budget for the sweeping phase: ceil((1/rho0) * (2K/delta)^(1/alpha)),
// never below K. Throws InvalidDelta.
std::int64_t default_n1(int k, double delta, double alpha, double rho0);

// Rejections needed to discard an arm in the elimination phase: 1 for a
// noiseless user, else ceil(2 * ln(K/delta)). Throws InvalidDelta.
int default_m(int k, double delta, double noise_p);

// Sweeping phase. Initialization recommends every candidate once per sweep
// and drops rejected arms; the main loop then repeatedly resets the
// candidate set and recommends each arm until its rejection, emitting a
// RoundRecord per completed round. Stops as soon as the budget is met
// (checked after every interaction) or the session's acceptance cap fires.
Phase1Output phase1_sweep(UserSession& session, std::int64_t n1, const Phase1Options& options = {});

struct Phase2Result {
    int survivor = -1;
    std::int64_t steps = 0;
    std::int64_t rejections = 0;
};

// Elimination phase: recommend the surviving arm with the fewest
// acceptances (ties to the lowest index); an arm leaves the pool at its
// m-th rejection; the last survivor is the answer. `counts` seeds the
// per-arm acceptance tallies (normally the sweeping phase's output).
Phase2Result phase2_eliminate(UserSession& session, std::vector<std::int64_t> counts, int m);

struct BairOptions {
    std::optional<std::int64_t> n1_override;
    std::optional<int> m;
    Phase1Options phase1;
};

// Two-phase identification from accept/reject feedback: sweep until the
// acceptance budget is met, then eliminate down to a single arm.
AlgorithmOutcome run_bair(UserSession& session, double delta, const BairOptions& options = {});

// Recommends a uniformly random arm for exactly `horizon` steps and
// outputs the arm with the most acceptances (ties to the lowest index).
// Throws InvalidBudget when horizon < 1.
AlgorithmOutcome uniform_explore(UserSession& session, std::int64_t horizon, RngStream& policy_rng);

struct Exp3Options {
    std::optional<double> gamma;  // update rate; default sqrt(ln K / (K T))
    std::optional<double> eps;    // uniform mixture; default min(1, sqrt(K ln K / T))
};

// Exponential-weights sampling over arms with accept=1/reject=0 rewards and
// an importance-weighted update on the played arm. Requires
// horizon > K ln K (BudgetTooSmall otherwise).
AlgorithmOutcome exp3(UserSession& session, std::int64_t horizon, RngStream& policy_rng,
                      const Exp3Options& options = {});

// Sampling distribution used by exp3: (1-eps) * softmax(log_weights) + eps/K.
std::vector<double> exp3_probs(const std::vector<double>& log_weights, double eps);

}  // namespace bair
