#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "bair/rng.hpp"

#include <json.hpp>

namespace bair {

// Trust multiplier rho_t inside the confidence width. Evaluations are a
// function of the step index t and the acceptance count n before the
// pending interaction, clamped to [lo, hi].
struct RhoPolicy {
    enum class Kind { Constant, LinearAcceptance };

    Kind kind = Kind::Constant;
    double value = 1.0;  // Constant only

    double lo() const { return kind == Kind::Constant ? value : 1.0; }
    double hi() const { return kind == Kind::Constant ? value : 2.0; }
    double operator()(std::int64_t t, std::int64_t n_total) const;

    static RhoPolicy constant(double v) { return {Kind::Constant, v}; }
    static RhoPolicy linear_acceptance() { return {Kind::LinearAcceptance, 0.0}; }
};

// rho_t = 1 + n(t)/t, the acceptance-rate policy with range [1, 2].
double rho_linear(std::int64_t t, std::int64_t n_total);

struct UserParams {
    double alpha = 1.0;   // exploration tendency; larger widens every CI
    RhoPolicy rho;
    double noise_p = 0.0; // probability of a uniformly random decision

    static UserParams constant_rho(double alpha, double rho_value, double noise_p = 0.0);
    static UserParams linear_rho(double alpha, double noise_p = 0.0);
};

// The user's running statistics. t counts every interaction; only
// acceptances advance the per-arm counts and reward sums.
struct UserState {
    std::int64_t t = 0;
    std::vector<std::int64_t> accept_counts;
    std::vector<double> reward_sums;
    std::int64_t n_total = 0;

    UserState() = default;
    explicit UserState(int k)
        : accept_counts(static_cast<std::size_t>(k), 0),
          reward_sums(static_cast<std::size_t>(k), 0.0) {}

    int num_arms() const { return static_cast<int>(accept_counts.size()); }
    // Only meaningful when accept_counts[arm] >= 1.
    double empirical_mean(int arm) const {
        return reward_sums[static_cast<std::size_t>(arm)] /
               static_cast<double>(accept_counts[static_cast<std::size_t>(arm)]);
    }
    // Highest empirical mean over arms with at least one acceptance;
    // -infinity when no arm has been accepted yet.
    double max_empirical_mean() const;

    bool operator==(const UserState&) const = default;
};

struct Decision {
    bool accept = false;
    bool via_noise = false;
};

// Confidence width driver: max(0, 2 * alpha * ln(rho_t * n_total)),
// extended to 0 at n_total = 0.
double gamma(std::int64_t n_total, double rho_t, double alpha);

// (lcb, ucb) for `arm` given the pending interaction's rho_t and n(t).
// Unvisited arms get (-inf, +inf). Throws ArmOutOfRange.
std::pair<double, double> confidence_interval(const UserState& state, const UserParams& params,
                                              int arm);

// Deterministic accept/reject rule: reject iff some other arm's lcb is >=
// the recommended arm's ucb (inclusive). Throws ArmOutOfRange.
Decision decide(const UserState& state, const UserParams& params, int arm);

// With probability noise_p the decision is a fair coin flip; otherwise the
// deterministic rule applies. Draws from `rng` only when noise_p > 0.
Decision decide_noisy(const UserState& state, const UserParams& params, int arm, RngStream& rng);

// Advances the state by one interaction. Reward must be present exactly
// when the decision is an acceptance (RewardMissing / RewardUnexpected).
UserState record_interaction(UserState state, int arm, const Decision& decision,
                             std::optional<double> reward);

nlohmann::json state_to_json(const UserState& state);
UserState state_from_json(const nlohmann::json& j);

}  // namespace bair
