#pragma once

#include <cstdint>
#include <vector>

#include "bair/rng.hpp"

#include <json.hpp>

namespace bair {

// A K-armed problem instance: per-arm true mean utilities with a unique
// strict maximum. Immutable after construction and freely shareable.
class BanditInstance {
public:
    int K() const { return static_cast<int>(means_.size()); }
    int best_arm() const { return best_arm_; }
    double mean(int arm) const { return means_[static_cast<std::size_t>(arm)]; }
    const std::vector<double>& means() const { return means_; }

    friend BanditInstance make_instance(std::vector<double> means);

private:
    BanditInstance(std::vector<double> means, int best_arm)
        : means_(std::move(means)), best_arm_(best_arm) {}

    std::vector<double> means_;
    int best_arm_;
};

// Per-arm gaps to the best mean (the best arm's own entry is the margin to
// the runner-up) and the hardness constant H = sum_i 1/gap_i^2.
struct GapProfile {
    std::vector<double> gaps;
    double hardness = 0.0;
};

// Throws: TooFewArms (fewer than two entries), DuplicateMax (the maximum
// mean is not unique).
BanditInstance make_instance(std::vector<double> means);

GapProfile hardness(const BanditInstance& instance);

// One draw of the realized reward of `arm`: Normal(mean, 1). All unit
// variance sub-Gaussian families would satisfy the user model's contract;
// Gaussian is the family every experiment uses.
// Throws ArmOutOfRange.
double sample_reward(const BanditInstance& instance, int arm, RngStream& rng);

// Samples `count` instances with K arms each: per-arm means are standard
// normal draws, then the sampled maximum is relocated so that the gap
// between the best and second-best mean equals `gap`. Pure function of its
// arguments. Throws InvalidGap when gap <= 0.
std::vector<BanditInstance> generate_instance_batch(int k, double gap, int count,
                                                    std::uint64_t master_seed);

nlohmann::json instance_to_json(const BanditInstance& instance);
nlohmann::json batch_to_json(const std::vector<BanditInstance>& batch);
BanditInstance instance_from_json(const nlohmann::json& j);

}  // namespace bair
