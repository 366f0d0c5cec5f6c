#include "bair/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace bair {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

int argmax_lowest_index(const std::vector<std::int64_t>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i) {
        if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
    }
    return best;
}
}  // namespace

bool RoundRecord::decrease_holds(double tol) const {
    if (acceptances_at_end <= 0) return true;
    const double drop =
        2.0 * std::sqrt(min_gamma_in_round / static_cast<double>(acceptances_at_end));
    return end_max_empirical_mean <= start_max_empirical_mean - drop + tol;
}

std::int64_t default_n1(int k, double delta, double alpha, double rho0) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("InvalidDelta: delta must be in (0, 1)");
    if (k < 2) throw std::invalid_argument("TooFewArms: k must be >= 2");
    if (!(alpha > 0.0)) throw std::invalid_argument("InvalidAlpha: alpha must be > 0");
    if (!(rho0 > 0.0)) throw std::invalid_argument("InvalidRho: rho0 must be > 0");
    const double raw = std::pow(2.0 * k / delta, 1.0 / alpha) / rho0;
    const auto n1 = static_cast<std::int64_t>(std::ceil(raw));
    return std::max<std::int64_t>(n1, k);
}

int default_m(int k, double delta, double noise_p) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("InvalidDelta: delta must be in (0, 1)");
    if (noise_p == 0.0) return 1;
    return static_cast<int>(std::ceil(2.0 * std::log(k / delta)));
}

Phase1Output phase1_sweep(UserSession& session, std::int64_t n1, const Phase1Options& options) {
    if (n1 < 1) throw std::invalid_argument("InvalidBudget: n1 must be >= 1");
    const int k = session.instance().K();
    const bool check_rounds = options.enforce_round_decrease && session.params().noise_p == 0.0;

    Phase1Output out;
    out.accept_counts.assign(static_cast<std::size_t>(k), 0);
    out.reject_counts.assign(static_cast<std::size_t>(k), 0);
    const std::int64_t first_step = session.steps();

    const auto budget_met = [&] {
        if (session.acceptance_cap_reached()) return true;
        return options.stop_rule == Phase1Stop::AcceptanceCount ? session.state().n_total >= n1
                                                                : session.state().t >= n1;
    };
    const auto track = [&](int arm, const StepResult& res) {
        auto& tally = res.accepted ? out.accept_counts : out.reject_counts;
        ++tally[static_cast<std::size_t>(arm)];
    };

    // Initialization: sweep the survivors, dropping each arm at its first
    // rejection, until none remain.
    std::vector<int> pool(static_cast<std::size_t>(k));
    std::iota(pool.begin(), pool.end(), 0);
    bool stopped = budget_met();
    while (!pool.empty() && !stopped) {
        std::vector<int> keep;
        keep.reserve(pool.size());
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const int arm = pool[i];
            const StepResult res = session.recommend(arm);
            track(arm, res);
            if (res.accepted) keep.push_back(arm);
            if (budget_met()) {
                for (std::size_t j = i + 1; j < pool.size(); ++j) keep.push_back(pool[j]);
                stopped = true;
                break;
            }
        }
        pool = std::move(keep);
    }

    // Main loop: each round resets the pool and recommends every arm until
    // its rejection.
    while (!stopped) {
        RoundRecord rec;
        rec.start_step = session.state().t + 1;
        rec.start_max_empirical_mean = session.state().max_empirical_mean();
        double min_gamma = kInf;
        int rejected_in_round = 0;
        for (int arm = 0; arm < k && !stopped; ++arm) {
            for (;;) {
                const StepResult res = session.recommend(arm);
                track(arm, res);
                min_gamma = std::min(min_gamma, res.gamma_used);
                if (!res.accepted) {
                    ++rejected_in_round;
                    stopped = budget_met();
                    break;
                }
                if (budget_met()) {
                    stopped = true;
                    break;
                }
            }
        }
        if (rejected_in_round == k) {
            rec.end_step = session.state().t;
            rec.end_max_empirical_mean = session.state().max_empirical_mean();
            rec.min_gamma_in_round = min_gamma;
            rec.acceptances_at_end = session.state().n_total;
            if (check_rounds && rec.min_gamma_in_round > 0.0 && !rec.decrease_holds()) {
                throw std::logic_error(
                    "RoundDecreaseViolation: max empirical mean failed to drop by "
                    "2*sqrt(min_gamma/acceptances) over a completed round");
            }
            out.rounds.push_back(rec);
        }
    }

    out.total_steps = session.steps() - first_step;
    return out;
}

Phase2Result phase2_eliminate(UserSession& session, std::vector<std::int64_t> counts, int m) {
    const int k = session.instance().K();
    if (m < 1) throw std::invalid_argument("InvalidM: m must be >= 1");
    if (static_cast<int>(counts.size()) != k)
        throw std::invalid_argument("KMismatch: counts length must equal the arm count");

    std::vector<char> alive(static_cast<std::size_t>(k), 1);
    std::vector<int> rejections(static_cast<std::size_t>(k), 0);
    int alive_count = k;
    Phase2Result result;
    const std::int64_t first_step = session.steps();

    while (alive_count > 1 && !session.acceptance_cap_reached()) {
        int arm = -1;
        for (int i = 0; i < k; ++i) {
            if (!alive[static_cast<std::size_t>(i)]) continue;
            if (arm < 0 || counts[static_cast<std::size_t>(i)] < counts[static_cast<std::size_t>(arm)])
                arm = i;
        }
        const StepResult res = session.recommend(arm);
        if (res.accepted) {
            ++counts[static_cast<std::size_t>(arm)];
        } else {
            ++result.rejections;
            if (++rejections[static_cast<std::size_t>(arm)] >= m) {
                alive[static_cast<std::size_t>(arm)] = 0;
                --alive_count;
            }
        }
    }

    for (int i = 0; i < k; ++i) {
        if (alive[static_cast<std::size_t>(i)]) {
            result.survivor = i;
            break;
        }
    }
    result.steps = session.steps() - first_step;
    return result;
}

AlgorithmOutcome run_bair(UserSession& session, double delta, const BairOptions& options) {
    const int k = session.instance().K();
    const UserParams& params = session.params();
    const std::int64_t n1 =
        options.n1_override.value_or(default_n1(k, delta, params.alpha, params.rho.lo()));
    const int m = options.m.value_or(default_m(k, delta, params.noise_p));

    const Phase1Output phase1 = phase1_sweep(session, n1, options.phase1);
    const Phase2Result phase2 = phase2_eliminate(session, phase1.accept_counts, m);

    AlgorithmOutcome outcome;
    outcome.chosen_arm = phase2.survivor;
    outcome.total_steps = session.steps();
    outcome.total_rejections = session.rejections();
    outcome.per_arm_accepts = session.arm_accepts();
    outcome.termination =
        session.acceptance_cap_reached() ? Termination::BudgetExhausted : Termination::Identified;
    outcome.phase_boundary = phase1.total_steps;
    return outcome;
}

AlgorithmOutcome uniform_explore(UserSession& session, std::int64_t horizon,
                                 RngStream& policy_rng) {
    if (horizon < 1) throw std::invalid_argument("InvalidBudget: horizon must be >= 1");
    const int k = session.instance().K();
    for (std::int64_t step = 0; step < horizon && !session.acceptance_cap_reached(); ++step) {
        session.recommend(policy_rng.uniform_int(k));
    }
    AlgorithmOutcome outcome;
    outcome.chosen_arm = argmax_lowest_index(session.arm_accepts());
    outcome.total_steps = session.steps();
    outcome.total_rejections = session.rejections();
    outcome.per_arm_accepts = session.arm_accepts();
    outcome.termination =
        session.acceptance_cap_reached() ? Termination::BudgetExhausted : Termination::Identified;
    return outcome;
}

std::vector<double> exp3_probs(const std::vector<double>& log_weights, double eps) {
    const auto k = log_weights.size();
    const double top = *std::max_element(log_weights.begin(), log_weights.end());
    std::vector<double> probs(k);
    double norm = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        probs[i] = std::exp(log_weights[i] - top);
        norm += probs[i];
    }
    for (std::size_t i = 0; i < k; ++i) {
        probs[i] = (1.0 - eps) * probs[i] / norm + eps / static_cast<double>(k);
    }
    return probs;
}

AlgorithmOutcome exp3(UserSession& session, std::int64_t horizon, RngStream& policy_rng,
                      const Exp3Options& options) {
    const int k = session.instance().K();
    const double t_min = k * std::log(static_cast<double>(k));
    if (!(static_cast<double>(horizon) > t_min)) {
        throw std::invalid_argument("BudgetTooSmall: horizon must exceed K ln K = " +
                                    std::to_string(t_min));
    }
    const double t = static_cast<double>(horizon);
    const double rate = options.gamma.value_or(std::sqrt(std::log(k) / (k * t)));
    const double eps = options.eps.value_or(std::min(1.0, std::sqrt(k * std::log(k) / t)));

    std::vector<double> log_weights(static_cast<std::size_t>(k), 0.0);
    for (std::int64_t step = 0; step < horizon && !session.acceptance_cap_reached(); ++step) {
        const std::vector<double> probs = exp3_probs(log_weights, eps);
        const double u = policy_rng.uniform01();
        int arm = k - 1;
        double cumulative = 0.0;
        for (int i = 0; i < k; ++i) {
            cumulative += probs[static_cast<std::size_t>(i)];
            if (u < cumulative) {
                arm = i;
                break;
            }
        }
        const StepResult res = session.recommend(arm);
        const double reward = res.accepted ? 1.0 : 0.0;
        log_weights[static_cast<std::size_t>(arm)] +=
            rate * reward / probs[static_cast<std::size_t>(arm)];
    }

    AlgorithmOutcome outcome;
    outcome.chosen_arm = argmax_lowest_index(session.arm_accepts());
    outcome.total_steps = session.steps();
    outcome.total_rejections = session.rejections();
    outcome.per_arm_accepts = session.arm_accepts();
    outcome.termination =
        session.acceptance_cap_reached() ? Termination::BudgetExhausted : Termination::Identified;
    return outcome;
}

}  // namespace bair
