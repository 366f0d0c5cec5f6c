#include "bair/session.hpp"

#include <sstream>
#include <stdexcept>

namespace bair {

namespace {
std::vector<RngStream> make_reward_streams(int k, std::uint64_t seed) {
    std::vector<RngStream> streams;
    streams.reserve(static_cast<std::size_t>(k));
    for (int arm = 0; arm < k; ++arm) {
        streams.emplace_back(derive_seed(seed, stream_tag::kReward, static_cast<std::uint64_t>(arm)));
    }
    return streams;
}
}  // namespace

UserSession::UserSession(const BanditInstance& instance, const UserParams& params,
                         std::uint64_t seed)
    : UserSession(instance, params, seed, UserState(instance.K())) {}

UserSession::UserSession(const BanditInstance& instance, const UserParams& params,
                         std::uint64_t seed, UserState resume_state)
    : instance_(&instance),
      params_(params),
      state_(std::move(resume_state)),
      reward_streams_(make_reward_streams(instance.K(), seed)),
      noise_stream_(derive_seed(seed, stream_tag::kUserNoise)),
      arm_accepts_(static_cast<std::size_t>(instance.K()), 0),
      arm_rejects_(static_cast<std::size_t>(instance.K()), 0) {
    if (state_.num_arms() != instance.K())
        throw std::invalid_argument("KMismatch: resume state arm count differs from instance");
}

StepResult UserSession::recommend(int arm) {
    const double rho_t = params_.rho(state_.t + 1, state_.n_total);
    const double g = gamma(state_.n_total, rho_t, params_.alpha);
    const Decision d = decide_noisy(state_, params_, arm, noise_stream_);
    if (d.accept) {
        const double reward = sample_reward(*instance_, arm, reward_streams_[static_cast<std::size_t>(arm)]);
        state_ = record_interaction(std::move(state_), arm, d, reward);
        ++acceptances_;
        ++arm_accepts_[static_cast<std::size_t>(arm)];
    } else {
        state_ = record_interaction(std::move(state_), arm, d, std::nullopt);
        ++rejections_;
        ++arm_rejects_[static_cast<std::size_t>(arm)];
    }
    ++steps_;
    transcript_.push_back({steps_, arm, d.accept});
    return {d.accept, d.via_noise, g};
}

std::string transcript_to_jsonl(const Transcript& transcript) {
    std::ostringstream out;
    for (const auto& e : transcript) {
        out << "{\"t\": " << e.step << ", \"arm\": " << e.arm << ", \"decision\": \""
            << (e.accepted ? 'A' : 'R') << "\"}\n";
    }
    return out.str();
}

}  // namespace bair
