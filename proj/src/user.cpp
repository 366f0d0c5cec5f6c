#include "bair/user.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace bair {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_arm(const UserState& state, int arm) {
    if (arm < 0 || arm >= state.num_arms()) {
        throw std::out_of_range("ArmOutOfRange: arm " + std::to_string(arm) + " not in [0, " +
                                std::to_string(state.num_arms()) + ")");
    }
}
}  // namespace

double rho_linear(std::int64_t t, std::int64_t n_total) {
    return 1.0 + static_cast<double>(n_total) / static_cast<double>(t);
}

double RhoPolicy::operator()(std::int64_t t, std::int64_t n_total) const {
    const double raw = kind == Kind::Constant ? value : rho_linear(t, n_total);
    return std::clamp(raw, lo(), hi());
}

UserParams UserParams::constant_rho(double alpha, double rho_value, double noise_p) {
    if (!(alpha > 0.0)) throw std::invalid_argument("InvalidAlpha: alpha must be > 0");
    if (!(rho_value > 0.0)) throw std::invalid_argument("InvalidRho: rho must be > 0");
    if (noise_p < 0.0 || noise_p >= 1.0)
        throw std::invalid_argument("InvalidNoise: noise_p must be in [0, 1)");
    return UserParams{alpha, RhoPolicy::constant(rho_value), noise_p};
}

UserParams UserParams::linear_rho(double alpha, double noise_p) {
    if (!(alpha > 0.0)) throw std::invalid_argument("InvalidAlpha: alpha must be > 0");
    if (noise_p < 0.0 || noise_p >= 1.0)
        throw std::invalid_argument("InvalidNoise: noise_p must be in [0, 1)");
    return UserParams{alpha, RhoPolicy::linear_acceptance(), noise_p};
}

double UserState::max_empirical_mean() const {
    double best = -kInf;
    for (int i = 0; i < num_arms(); ++i) {
        if (accept_counts[static_cast<std::size_t>(i)] > 0)
            best = std::max(best, empirical_mean(i));
    }
    return best;
}

double gamma(std::int64_t n_total, double rho_t, double alpha) {
    if (n_total <= 0) return 0.0;
    return std::max(0.0, 2.0 * alpha * std::log(rho_t * static_cast<double>(n_total)));
}

std::pair<double, double> confidence_interval(const UserState& state, const UserParams& params,
                                              int arm) {
    check_arm(state, arm);
    const std::int64_t n_arm = state.accept_counts[static_cast<std::size_t>(arm)];
    if (n_arm == 0) return {-kInf, kInf};
    const double rho_t = params.rho(state.t + 1, state.n_total);
    const double g = gamma(state.n_total, rho_t, params.alpha);
    const double width = std::sqrt(g / static_cast<double>(n_arm));
    const double mean = state.empirical_mean(arm);
    return {mean - width, mean + width};
}

Decision decide(const UserState& state, const UserParams& params, int arm) {
    check_arm(state, arm);
    const std::int64_t n_arm = state.accept_counts[static_cast<std::size_t>(arm)];
    if (n_arm == 0) return {true, false};  // unvisited arms carry an infinite ucb
    const double rho_t = params.rho(state.t + 1, state.n_total);
    const double g = gamma(state.n_total, rho_t, params.alpha);
    const double ucb_arm =
        state.empirical_mean(arm) + std::sqrt(g / static_cast<double>(n_arm));
    for (int j = 0; j < state.num_arms(); ++j) {
        if (j == arm) continue;
        const std::int64_t n_j = state.accept_counts[static_cast<std::size_t>(j)];
        if (n_j == 0) continue;
        const double lcb_j = state.empirical_mean(j) - std::sqrt(g / static_cast<double>(n_j));
        if (lcb_j >= ucb_arm) return {false, false};
    }
    return {true, false};
}

Decision decide_noisy(const UserState& state, const UserParams& params, int arm, RngStream& rng) {
    check_arm(state, arm);
    if (params.noise_p > 0.0 && rng.uniform01() < params.noise_p) {
        return {rng.uniform01() < 0.5, true};
    }
    return decide(state, params, arm);
}

UserState record_interaction(UserState state, int arm, const Decision& decision,
                             std::optional<double> reward) {
    check_arm(state, arm);
    if (decision.accept && !reward.has_value())
        throw std::invalid_argument("RewardMissing: acceptance must disclose a realized reward");
    if (!decision.accept && reward.has_value())
        throw std::invalid_argument("RewardUnexpected: rejections disclose no reward");
    state.t += 1;
    if (decision.accept) {
        state.accept_counts[static_cast<std::size_t>(arm)] += 1;
        state.reward_sums[static_cast<std::size_t>(arm)] += *reward;
        state.n_total += 1;
    }
    return state;
}

nlohmann::json state_to_json(const UserState& state) {
    return nlohmann::json{{"t", state.t},
                          {"accept_counts", state.accept_counts},
                          {"reward_sums", state.reward_sums}};
}

UserState state_from_json(const nlohmann::json& j) {
    UserState state;
    state.t = j.at("t").get<std::int64_t>();
    state.accept_counts = j.at("accept_counts").get<std::vector<std::int64_t>>();
    state.reward_sums = j.at("reward_sums").get<std::vector<double>>();
    state.n_total = 0;
    for (auto c : state.accept_counts) state.n_total += c;
    if (state.reward_sums.size() != state.accept_counts.size())
        throw std::invalid_argument("InconsistentState: count/sum lengths differ");
    return state;
}

}  // namespace bair
