#include "bair/track_and_stop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bair {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

int unique_argmax(const std::vector<double>& means) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(means.size()); ++i) {
        if (means[static_cast<std::size_t>(i)] > means[static_cast<std::size_t>(best)]) best = i;
    }
    for (int i = 0; i < static_cast<int>(means.size()); ++i) {
        if (i != best &&
            means[static_cast<std::size_t>(i)] == means[static_cast<std::size_t>(best)])
            return -1;
    }
    return best;
}

// Mixture mean minimizing w1*kl(mu1, m) + x*kl(mua, m) for Bernoulli arms.
double mixture_mean(double mu1, double mua, double x) {
    return (mu1 + x * mua) / (1.0 + x);
}

// g_a(x) = kl(mu1, m(x)) + x kl(mua, m(x)): strictly increasing from 0 to
// kl(mu1, mua). Inverts by bisection.
double invert_g(double mu1, double mua, double y) {
    double lo = 0.0, hi = 1.0;
    auto g = [&](double x) {
        const double m = mixture_mean(mu1, mua, x);
        return bernoulli_kl(mu1, m) + x * bernoulli_kl(mua, m);
    };
    while (g(hi) < y) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e12) return hi;
    }
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < y)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= 1e-9 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}
}  // namespace

double bernoulli_kl(double p, double q) {
    return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

std::vector<double> optimal_weights(const std::vector<double>& means, double rel_tol) {
    const int k = static_cast<int>(means.size());
    const int best = unique_argmax(means);
    if (best < 0) {
        // Tied top: the allocation degenerates, and as two leading means
        // approach each other the optimum concentrates on the contenders.
        // Split evenly over the tied leaders; forced exploration covers the
        // rest.
        const double top = *std::max_element(means.begin(), means.end());
        std::vector<double> weights(static_cast<std::size_t>(k), 0.0);
        int tied = 0;
        for (int i = 0; i < k; ++i) {
            if (means[static_cast<std::size_t>(i)] == top) ++tied;
        }
        for (int i = 0; i < k; ++i) {
            if (means[static_cast<std::size_t>(i)] == top)
                weights[static_cast<std::size_t>(i)] = 1.0 / tied;
        }
        return weights;
    }

    const double mu1 = means[static_cast<std::size_t>(best)];
    double y_max = kInf;
    for (int a = 0; a < k; ++a) {
        if (a == best) continue;
        y_max = std::min(y_max, bernoulli_kl(mu1, means[static_cast<std::size_t>(a)]));
    }

    // F(y) = sum_a kl(mu1, m_a) / kl(mua, m_a) at x_a = g_a^{-1}(y) rises
    // from 0 and diverges at y_max; F(y*) = 1 picks the optimum.
    std::vector<double> x(static_cast<std::size_t>(k), 0.0);
    auto eval_f = [&](double y) {
        double f = 0.0;
        for (int a = 0; a < k; ++a) {
            if (a == best) continue;
            const double mua = means[static_cast<std::size_t>(a)];
            const double xa = invert_g(mu1, mua, y);
            x[static_cast<std::size_t>(a)] = xa;
            const double m = mixture_mean(mu1, mua, xa);
            f += bernoulli_kl(mu1, m) / bernoulli_kl(mua, m);
        }
        return f;
    };

    double lo = 0.0, hi = y_max * (1.0 - 1e-12);
    for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (eval_f(mid) < 1.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= rel_tol * std::max(hi, 1e-300)) break;
    }
    eval_f(0.5 * (lo + hi));

    std::vector<double> weights(static_cast<std::size_t>(k), 0.0);
    double norm = 1.0;
    for (int a = 0; a < k; ++a) {
        if (a == best) continue;
        norm += x[static_cast<std::size_t>(a)];
    }
    weights[static_cast<std::size_t>(best)] = 1.0 / norm;
    for (int a = 0; a < k; ++a) {
        if (a == best) continue;
        weights[static_cast<std::size_t>(a)] = x[static_cast<std::size_t>(a)] / norm;
    }
    return weights;
}

double glr_statistic(const std::vector<double>& means, const std::vector<std::int64_t>& pulls) {
    const int k = static_cast<int>(means.size());
    const int best = unique_argmax(means);
    if (best < 0) return 0.0;
    const double mu1 = means[static_cast<std::size_t>(best)];
    const auto n1 = static_cast<double>(pulls[static_cast<std::size_t>(best)]);
    double z = kInf;
    for (int a = 0; a < k; ++a) {
        if (a == best) continue;
        const auto na = static_cast<double>(pulls[static_cast<std::size_t>(a)]);
        const double mua = means[static_cast<std::size_t>(a)];
        const double m = (n1 * mu1 + na * mua) / (n1 + na);
        z = std::min(z, n1 * bernoulli_kl(mu1, m) + na * bernoulli_kl(mua, m));
    }
    return z;
}

double stopping_threshold(std::int64_t t, int k, double delta) {
    return std::log(2.0 * static_cast<double>(t) * (k - 1) / delta);
}

AlgorithmOutcome track_and_stop(UserSession& session, double delta,
                                const TrackStopOptions& options) {
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("InvalidDelta: delta must be in (0, 1)");
    if (options.t_max < 1) throw std::invalid_argument("InvalidBudget: t_max must be >= 1");

    const int k = session.instance().K();
    std::vector<std::int64_t> pulls(static_cast<std::size_t>(k), 0);
    std::vector<std::int64_t> accepts(static_cast<std::size_t>(k), 0);
    std::vector<double> means(static_cast<std::size_t>(k), 0.0);
    std::vector<double> weights(static_cast<std::size_t>(k), 1.0 / k);

    const auto clamp_mean = [&](int arm) {
        const double raw = static_cast<double>(accepts[static_cast<std::size_t>(arm)]) /
                           static_cast<double>(pulls[static_cast<std::size_t>(arm)]);
        return std::clamp(raw, options.mean_clamp, 1.0 - options.mean_clamp);
    };
    const auto play = [&](int arm) {
        const StepResult res = session.recommend(arm);
        ++pulls[static_cast<std::size_t>(arm)];
        if (res.accepted) ++accepts[static_cast<std::size_t>(arm)];
        means[static_cast<std::size_t>(arm)] = clamp_mean(arm);
    };

    std::int64_t t = 0;
    for (int arm = 0; arm < k && t < options.t_max && !session.acceptance_cap_reached(); ++arm) {
        play(arm);
        ++t;
    }

    bool stopped = false;
    std::int64_t last_solve_t = 0;
    int last_best = -1;
    while (t < options.t_max && !session.acceptance_cap_reached()) {
        if (glr_statistic(means, pulls) >= stopping_threshold(t, k, delta)) {
            stopped = true;
            break;
        }

        int arm;
        const std::int64_t floor_count =
            static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(t)) - k / 2.0));
        const auto least = static_cast<int>(
            std::min_element(pulls.begin(), pulls.end()) - pulls.begin());
        if (pulls[static_cast<std::size_t>(least)] < floor_count) {
            arm = least;  // forced exploration of underplayed arms
        } else {
            const int best = unique_argmax(means);
            // Refresh the allocation when the leader changes, then on a
            // schedule that thins out as t grows.
            if (best != last_best || t - last_solve_t >= std::max<std::int64_t>(1, t / 25)) {
                weights = optimal_weights(means, options.weights_rel_tol);
                last_solve_t = t;
                last_best = best;
            }
            arm = 0;
            double score = -kInf;
            for (int i = 0; i < k; ++i) {
                const double s = static_cast<double>(t) * weights[static_cast<std::size_t>(i)] -
                                 static_cast<double>(pulls[static_cast<std::size_t>(i)]);
                if (s > score) {
                    score = s;
                    arm = i;
                }
            }
        }
        play(arm);
        ++t;
    }

    AlgorithmOutcome outcome;
    outcome.total_steps = session.steps();
    outcome.total_rejections = session.rejections();
    outcome.per_arm_accepts = session.arm_accepts();
    if (stopped) {
        outcome.chosen_arm = unique_argmax(means);
        outcome.termination = Termination::Identified;
    } else {
        int guess = 0;
        for (int i = 1; i < k; ++i) {
            if (accepts[static_cast<std::size_t>(i)] > accepts[static_cast<std::size_t>(guess)])
                guess = i;
        }
        outcome.chosen_arm = guess;
        outcome.termination = Termination::BudgetExhausted;
    }
    return outcome;
}

}  // namespace bair
