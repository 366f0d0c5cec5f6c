#include "bair/instance.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bair {

BanditInstance make_instance(std::vector<double> means) {
    if (means.size() < 2) {
        throw std::invalid_argument("TooFewArms: an instance needs at least 2 arms, got " +
                                    std::to_string(means.size()));
    }
    int best = 0;
    for (int i = 1; i < static_cast<int>(means.size()); ++i) {
        if (means[static_cast<std::size_t>(i)] > means[static_cast<std::size_t>(best)]) best = i;
    }
    for (int i = 0; i < static_cast<int>(means.size()); ++i) {
        if (i != best &&
            means[static_cast<std::size_t>(i)] == means[static_cast<std::size_t>(best)]) {
            throw std::invalid_argument("DuplicateMax: the maximum mean must be unique");
        }
    }
    return BanditInstance(std::move(means), best);
}

GapProfile hardness(const BanditInstance& instance) {
    const int k = instance.K();
    const int best = instance.best_arm();
    double second = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < k; ++i) {
        if (i != best) second = std::max(second, instance.mean(i));
    }
    GapProfile profile;
    profile.gaps.resize(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        const double gap =
            (i == best) ? instance.mean(best) - second : instance.mean(best) - instance.mean(i);
        profile.gaps[static_cast<std::size_t>(i)] = gap;
        profile.hardness += 1.0 / (gap * gap);
    }
    return profile;
}

double sample_reward(const BanditInstance& instance, int arm, RngStream& rng) {
    if (arm < 0 || arm >= instance.K()) {
        throw std::out_of_range("ArmOutOfRange: arm " + std::to_string(arm) + " not in [0, " +
                                std::to_string(instance.K()) + ")");
    }
    return instance.mean(arm) + rng.normal();
}

namespace {

double shift_ulp(double x, int n) {
    const double dir = n > 0 ? 1e308 : -1e308;
    for (int i = 0; i < std::abs(n); ++i) x = std::nextafter(x, dir);
    return x;
}

// Relocates means[argmax] to second_max + gap so that the floating point
// subtraction best - second reproduces `gap` bit-exactly whenever such a
// pair of doubles exists (it always does for power-of-two gaps like 0.5).
// The second-best entry may move by a few ulp to make the pair exact.
void relocate_best(std::vector<double>& means, double gap) {
    int top = 0;
    for (int i = 1; i < static_cast<int>(means.size()); ++i) {
        if (means[static_cast<std::size_t>(i)] > means[static_cast<std::size_t>(top)]) top = i;
    }
    int second = top == 0 ? 1 : 0;
    for (int i = 0; i < static_cast<int>(means.size()); ++i) {
        if (i != top && means[static_cast<std::size_t>(i)] > means[static_cast<std::size_t>(second)])
            second = i;
    }
    double s = means[static_cast<std::size_t>(second)];
    double b = s + gap;
    if (b - s != gap) {
        [&] {
            for (int ds = 0; ds <= 8; ++ds) {
                for (int sign = -1; sign <= 1; sign += 2) {
                    const double s_adj = shift_ulp(s, sign * ds);
                    for (int db = -4; db <= 4; ++db) {
                        const double b_adj = shift_ulp(s_adj + gap, db);
                        if (b_adj - s_adj == gap && b_adj > s_adj) {
                            s = s_adj;
                            b = b_adj;
                            return;
                        }
                    }
                    if (ds == 0) break;
                }
            }
        }();
    }
    means[static_cast<std::size_t>(second)] = s;
    means[static_cast<std::size_t>(top)] = b;
}

}  // namespace

std::vector<BanditInstance> generate_instance_batch(int k, double gap, int count,
                                                    std::uint64_t master_seed) {
    if (k < 2) throw std::invalid_argument("TooFewArms: k must be >= 2");
    if (!(gap > 0.0)) throw std::invalid_argument("InvalidGap: gap must be > 0");
    if (count < 1) throw std::invalid_argument("InvalidCount: count must be >= 1");

    std::vector<BanditInstance> batch;
    batch.reserve(static_cast<std::size_t>(count));
    for (int idx = 0; idx < count; ++idx) {
        RngStream rng(derive_seed(master_seed, stream_tag::kInstanceGen,
                                  static_cast<std::uint64_t>(idx)));
        std::vector<double> means(static_cast<std::size_t>(k));
        for (double& m : means) m = rng.normal();
        relocate_best(means, gap);
        batch.push_back(make_instance(std::move(means)));
    }
    return batch;
}

nlohmann::json instance_to_json(const BanditInstance& instance) {
    return nlohmann::json{{"means", instance.means()}, {"best_arm", instance.best_arm()}};
}

nlohmann::json batch_to_json(const std::vector<BanditInstance>& batch) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& inst : batch) arr.push_back(instance_to_json(inst));
    return arr;
}

BanditInstance instance_from_json(const nlohmann::json& j) {
    auto inst = make_instance(j.at("means").get<std::vector<double>>());
    if (j.contains("best_arm") && j.at("best_arm").get<int>() != inst.best_arm()) {
        throw std::invalid_argument("InconsistentBestArm: stored best_arm does not match means");
    }
    return inst;
}

}  // namespace bair
