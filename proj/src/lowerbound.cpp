#include "bair/lowerbound.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bair/track_and_stop.hpp"

namespace bair {

std::int64_t n0_budget(double delta, double alpha, double c, double rho0, double gap) {
    if (!(c > 0.0 && c < 0.5)) throw std::invalid_argument("InvalidC: c must be in (0, 1/2)");
    if (!(delta > 0.0 && delta < 0.25))
        throw std::invalid_argument("InvalidDelta: delta must be in (0, 1/4)");
    if (!(alpha > 0.0)) throw std::invalid_argument("InvalidAlpha: alpha must be > 0");
    if (!(rho0 > 0.0)) throw std::invalid_argument("InvalidRho: rho0 must be > 0");
    if (!(gap > 0.0)) throw std::invalid_argument("InvalidGap: gap must be > 0");
    const double term1 = std::pow(delta, -1.0 / alpha + c) / rho0;
    const double term2 = 2.0 / (gap * gap) * std::log(1.0 / (4.0 * delta));
    return static_cast<std::int64_t>(std::ceil(std::max(term1, term2)));
}

HardInstancePair hard_instance_pair(int k, double delta, double alpha, double c, double rho0,
                                    double rho1, double gap) {
    if (k < 2) throw std::invalid_argument("TooFewArms: k must be >= 2");
    if (!(rho1 >= rho0)) throw std::invalid_argument("InvalidRho: rho1 must be >= rho0");
    const std::int64_t n0 = n0_budget(delta, alpha, c, rho0, gap);
    if (n0 <= k)
        throw std::invalid_argument("BudgetBelowK: n0 = " + std::to_string(n0) +
                                    " must exceed the arm count");
    const auto slack = static_cast<double>(n0 - k + 1);
    const double log_hi = 2.0 * alpha * std::log(rho1 * static_cast<double>(n0));
    const double log_lo = 2.0 * alpha * std::log(rho0 * static_cast<double>(n0));
    if (!(log_lo > 0.0))
        throw std::invalid_argument(
            "DegenerateConstruction: rho0 * n0 must exceed 1 for the offsets to be real");
    const double d =
        std::sqrt(log_hi) * (1.0 + 2.0 / std::sqrt(slack)) + 2.0 * std::sqrt(std::log(2.0 * slack) / slack);
    const double eps = std::sqrt(log_lo / slack);
    if (!(d > eps))
        throw std::invalid_argument(
            "DegenerateConstruction: d <= eps, delta is not small enough for distinct best arms");

    std::vector<double> low(static_cast<std::size_t>(k), -1.0 / delta);
    std::vector<double> high = low;
    low[0] = 1.0 + eps - d;
    low[1] = 1.0;
    high[0] = 1.0 + eps;
    high[1] = 1.0;

    HardInstancePair pair{make_instance(std::move(low)), make_instance(std::move(high)),
                          n0, d, eps, k, delta, alpha, c, rho0, rho1, gap};
    if (pair.nu.best_arm() != 1 || pair.nu_prime.best_arm() != 0)
        throw std::logic_error("DegenerateConstruction: best arms did not swap");
    return pair;
}

namespace {

struct ProbeRun {
    Transcript transcript;
    std::vector<std::int64_t> accepts;
    double arm0_first_reward = std::numeric_limits<double>::quiet_NaN();
    bool event = false;  // every arm except index 1 accepted at most once
};

ProbeRun drive(const BanditInstance& instance, const HardInstancePair& pair, AlgoId policy,
               std::uint64_t seed) {
    UserParams params = UserParams::linear_rho(pair.alpha);
    UserSession session(instance, params, seed);
    session.set_acceptance_cap(pair.n0);
    RngStream policy_rng(derive_seed(seed, stream_tag::kPolicy));

    // A generous horizon; the acceptance cap is what actually stops the run.
    const std::int64_t horizon = 64 * pair.n0 + 64 * pair.k;
    switch (policy) {
        case AlgoId::Bair: run_bair(session, pair.delta); break;
        case AlgoId::Uni: uniform_explore(session, horizon, policy_rng); break;
        case AlgoId::Exp3: exp3(session, horizon, policy_rng); break;
        case AlgoId::TrackStop: {
            TrackStopOptions opt;
            opt.t_max = horizon;
            track_and_stop(session, pair.delta, opt);
            break;
        }
    }

    ProbeRun run;
    run.transcript = session.transcript();
    run.accepts = session.arm_accepts();
    if (session.arm_accepts()[0] >= 1)
        run.arm0_first_reward = session.state().reward_sums[0] /
                                static_cast<double>(session.state().accept_counts[0]);
    run.event = true;
    for (int arm = 0; arm < pair.k; ++arm) {
        if (arm == 1) continue;
        if (run.accepts[static_cast<std::size_t>(arm)] > 1) run.event = false;
    }
    return run;
}

bool same_transcript(const Transcript& a, const Transcript& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].arm != b[i].arm || a[i].accepted != b[i].accepted) return false;
    }
    return true;
}

}  // namespace

ProbeStats indistinguishability_probe(const HardInstancePair& pair, AlgoId policy, int reps,
                                      std::uint64_t seed) {
    if (reps < 100) throw std::invalid_argument("InvalidCount: reps must be >= 100");

    ProbeStats stats;
    stats.n0 = pair.n0;
    stats.d = pair.d;
    stats.eps = pair.eps;
    stats.reps = reps;

    int hits_nu = 0, hits_nu_prime = 0;
    const double low_threshold = 1.0 + pair.eps - pair.d;
    for (int r = 0; r < reps; ++r) {
        const std::uint64_t run_seed =
            derive_seed(seed, static_cast<std::uint64_t>(r), 0, static_cast<std::uint64_t>(policy));
        const ProbeRun on_nu = drive(pair.nu, pair, policy, run_seed);
        const ProbeRun on_nu_prime = drive(pair.nu_prime, pair, policy, run_seed);
        hits_nu += on_nu.event ? 1 : 0;
        hits_nu_prime += on_nu_prime.event ? 1 : 0;
        if (same_transcript(on_nu.transcript, on_nu_prime.transcript))
            ++stats.identical_transcripts;
        const bool coupled_low = on_nu.accepts[0] == 1 && on_nu_prime.accepts[0] == 1 &&
                                 on_nu.arm0_first_reward < low_threshold &&
                                 on_nu_prime.arm0_first_reward < low_threshold;
        if (on_nu.event && on_nu_prime.event && coupled_low) {
            ++stats.coupled_condition_runs;
            if (!same_transcript(on_nu.transcript, on_nu_prime.transcript))
                ++stats.implication_violations;
        }
    }

    stats.freq_nu = static_cast<double>(hits_nu) / reps;
    stats.freq_nu_prime = static_cast<double>(hits_nu_prime) / reps;
    stats.ci_nu = wilson_interval(hits_nu, reps);
    stats.ci_nu_prime = wilson_interval(hits_nu_prime, reps);
    return stats;
}

std::pair<double, double> wilson_interval(int successes, int trials) {
    const double z = 1.959963984540054;  // 97.5% normal quantile
    const auto n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

nlohmann::json probe_stats_to_json(const ProbeStats& stats) {
    return nlohmann::json{{"n0", stats.n0},
                          {"d", stats.d},
                          {"eps", stats.eps},
                          {"reps", stats.reps},
                          {"freq_nu", stats.freq_nu},
                          {"freq_nu_prime", stats.freq_nu_prime},
                          {"ci_nu", {stats.ci_nu.first, stats.ci_nu.second}},
                          {"ci_nu_prime", {stats.ci_nu_prime.first, stats.ci_nu_prime.second}},
                          {"identical_transcripts", stats.identical_transcripts},
                          {"coupled_condition_runs", stats.coupled_condition_runs},
                          {"implication_violations", stats.implication_violations}};
}

}  // namespace bair
