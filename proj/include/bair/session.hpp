#pragma once

#include <cstdint>
#include <vector>

#include "bair/instance.hpp"
#include "bair/user.hpp"

#include <json.hpp>

namespace bair {

struct TranscriptEntry {
    std::int64_t step = 0;  // 1-based within the session
    int arm = 0;
    bool accepted = false;
};

using Transcript = std::vector<TranscriptEntry>;

// JSON lines, one {"t": ..., "arm": ..., "decision": "A"|"R"} per entry.
std::string transcript_to_jsonl(const Transcript& transcript);

struct StepResult {
    bool accepted = false;
    bool via_noise = false;
    double gamma_used = 0.0;  // confidence width driver at decision time
};

// One system/user interaction loop: owns the user's state, the per-arm
// reward streams, and the user's decision-noise stream; appends every
// interaction to a transcript. Single-owner; a run never shares a session.
//
// Reward draws are split per arm so two sessions with equal seeds give each
// arm the same noise sequence regardless of recommendation order - the
// coupling the distinguishability probe needs.
class UserSession {
public:
    UserSession(const BanditInstance& instance, const UserParams& params, std::uint64_t seed);
    // Resumes from a prior user state (e.g. re-running contenders from a
    // common preparation phase). Transcript and step counters start fresh.
    UserSession(const BanditInstance& instance, const UserParams& params, std::uint64_t seed,
                UserState resume_state);

    StepResult recommend(int arm);

    const BanditInstance& instance() const { return *instance_; }
    const UserParams& params() const { return params_; }
    const UserState& state() const { return state_; }
    const Transcript& transcript() const { return transcript_; }

    std::int64_t steps() const { return steps_; }
    std::int64_t rejections() const { return rejections_; }
    std::int64_t acceptances() const { return acceptances_; }
    const std::vector<std::int64_t>& arm_accepts() const { return arm_accepts_; }
    const std::vector<std::int64_t>& arm_rejects() const { return arm_rejects_; }

    // Optional truncation: once the session has observed `cap` acceptances,
    // drivers are expected to stop recommending.
    void set_acceptance_cap(std::int64_t cap) { acceptance_cap_ = cap; }
    bool acceptance_cap_reached() const {
        return acceptance_cap_ >= 0 && acceptances_ >= acceptance_cap_;
    }

private:
    const BanditInstance* instance_;
    UserParams params_;
    UserState state_;
    std::vector<RngStream> reward_streams_;
    RngStream noise_stream_;
    Transcript transcript_;
    std::vector<std::int64_t> arm_accepts_, arm_rejects_;
    std::int64_t steps_ = 0, rejections_ = 0, acceptances_ = 0;
    std::int64_t acceptance_cap_ = -1;
};

}  // namespace bair
