#include <doctest.h>

#include <cmath>
#include <functional>

#include "bair/user.hpp"

using namespace bair;

namespace {

bool throws_with_prefix(const std::function<void()>& fn, const std::string& prefix) {
    try {
        fn();
    } catch (const std::exception& e) {
        return std::string(e.what()).rfind(prefix, 0) == 0;
    }
    return false;
}

// State with prescribed per-arm acceptance counts and empirical means;
// t defaults to the acceptance total (as if every step was accepted).
UserState state_with(const std::vector<std::int64_t>& counts, const std::vector<double>& means) {
    UserState s(static_cast<int>(counts.size()));
    for (std::size_t i = 0; i < counts.size(); ++i) {
        s.accept_counts[i] = counts[i];
        s.reward_sums[i] = means[i] * static_cast<double>(counts[i]);
        s.n_total += counts[i];
    }
    s.t = s.n_total;
    return s;
}

}  // namespace

TEST_SUITE_BEGIN("user_model");

TEST_CASE("gamma oracle values") {
    CHECK(gamma(1, 1.0, 1.0) == 0.0);
    CHECK(std::abs(gamma(8, 1.0, 1.0) - 4.1588830833596718) <= 1e-9);
    CHECK(gamma(1, 0.5, 1.0) == 0.0);  // 2 ln 0.5 < 0, clamped
    CHECK(gamma(0, 1.0, 1.0) == 0.0);
    CHECK(gamma(0, 2.0, 3.0) == 0.0);
}

TEST_CASE("confidence intervals") {
    // Gamma = 4 at n_total = 4 needs alpha = 2/ln 4 under constant rho 1.
    const auto params = UserParams::constant_rho(2.0 / std::log(4.0), 1.0);
    const auto s = state_with({4, 0}, {1.0, 0.0});
    const auto [lcb, ucb] = confidence_interval(s, params, 0);
    CHECK(lcb == doctest::Approx(0.0));
    CHECK(ucb == doctest::Approx(2.0));

    const auto [lo_inf, hi_inf] = confidence_interval(s, params, 1);
    CHECK(std::isinf(lo_inf));
    CHECK(std::isinf(hi_inf));
    CHECK(lo_inf < 0);
    CHECK(hi_inf > 0);

    // Gamma = 0 collapses the interval to a point.
    const auto point_params = UserParams::constant_rho(1.0, 1.0);
    const auto sp = state_with({1, 0}, {0.3, 0.0});
    const auto [plo, phi] = confidence_interval(sp, point_params, 0);
    CHECK(plo == doctest::Approx(0.3));
    CHECK(phi == doctest::Approx(0.3));

    CHECK(throws_with_prefix([&] { confidence_interval(s, params, 2); }, "ArmOutOfRange"));
}

TEST_CASE("decision rule") {
    // Arm 0 CI (0.5, 1.0) and arm 1 CI (0.0, 0.4) at Gamma = 1:
    // counts (16, 25), means (0.75, 0.2), alpha = 1 / (2 ln 41).
    const auto params = UserParams::constant_rho(1.0 / (2.0 * std::log(41.0)), 1.0);
    const auto s = state_with({16, 25}, {0.75, 0.2});
    const auto [l0, u0] = confidence_interval(s, params, 0);
    const auto [l1, u1] = confidence_interval(s, params, 1);
    REQUIRE(l0 == doctest::Approx(0.5));
    REQUIRE(u0 == doctest::Approx(1.0));
    REQUIRE(l1 == doctest::Approx(0.0));
    REQUIRE(u1 == doctest::Approx(0.4));

    CHECK_FALSE(decide(s, params, 1).accept);  // 0.5 >= 0.4 dominates
    CHECK(decide(s, params, 0).accept);

    // All arms unvisited: everything is accepted.
    const UserState fresh(3);
    for (int arm = 0; arm < 3; ++arm) CHECK(decide(fresh, params, arm).accept);

    // Inclusive comparison: equal point intervals reject (rho 0.5 makes
    // Gamma vanish at n_total = 2).
    const auto tie_params = UserParams::constant_rho(1.0, 0.5);
    const auto tie = state_with({1, 1}, {0.3, 0.3});
    CHECK(tie.t == 2);
    CHECK(gamma(tie.n_total, tie_params.rho(tie.t + 1, tie.n_total), tie_params.alpha) == 0.0);
    CHECK_FALSE(decide(tie, tie_params, 0).accept);
}

TEST_CASE("noisy decisions") {
    const auto params_clean = UserParams::linear_rho(1.0);
    const auto s = state_with({16, 25}, {0.75, 0.2});

    RngStream rng(5);
    for (int i = 0; i < 200; ++i) {
        const auto d = decide_noisy(s, params_clean, 1, rng);
        CHECK(d.accept == decide(s, params_clean, 1).accept);
        CHECK_FALSE(d.via_noise);
    }

    const auto params_coin = UserParams::linear_rho(1.0, 0.999999);
    RngStream coin_rng(6);
    int accepts = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) {
        accepts += decide_noisy(s, params_coin, 0, coin_rng).accept ? 1 : 0;
    }
    CHECK(std::abs(accepts / static_cast<double>(trials) - 0.5) < 0.01);

    const auto params_mild = UserParams::linear_rho(1.0, 0.1);
    RngStream mild_rng(7);
    int agree = 0;
    for (int i = 0; i < trials; ++i) {
        const bool noisy = decide_noisy(s, params_mild, 1, mild_rng).accept;
        agree += noisy == decide(s, params_mild, 1).accept ? 1 : 0;
    }
    CHECK(std::abs(agree / static_cast<double>(trials) - 0.95) < 0.005);
}

TEST_CASE("record_interaction bookkeeping") {
    UserState s(2);
    s = record_interaction(std::move(s), 0, {true, false}, 0.7);
    CHECK(s.t == 1);
    CHECK(s.n_total == 1);
    CHECK(s.accept_counts[0] == 1);
    CHECK(s.empirical_mean(0) == doctest::Approx(0.7));

    const auto before = s;
    s = record_interaction(std::move(s), 1, {false, false}, std::nullopt);
    CHECK(s.t == 2);
    CHECK(s.n_total == before.n_total);
    CHECK(s.accept_counts == before.accept_counts);
    CHECK(s.reward_sums == before.reward_sums);

    CHECK(throws_with_prefix(
        [&] { record_interaction(UserState(2), 0, {true, false}, std::nullopt); },
        "RewardMissing"));
    CHECK(throws_with_prefix(
        [&] { record_interaction(UserState(2), 0, {false, false}, 0.1); }, "RewardUnexpected"));
}

TEST_CASE("rho policies") {
    CHECK(rho_linear(10, 5) == doctest::Approx(1.5));
    CHECK(rho_linear(1, 0) == doctest::Approx(1.0));
    CHECK(rho_linear(7, 7) == doctest::Approx(2.0));

    const auto lin = RhoPolicy::linear_acceptance();
    CHECK(lin(1, 0) == doctest::Approx(1.0));
    CHECK(lin(10, 5) == doctest::Approx(1.5));
    CHECK(lin.lo() == 1.0);
    CHECK(lin.hi() == 2.0);

    const auto cst = RhoPolicy::constant(1.5);
    CHECK(cst(123, 45) == doctest::Approx(1.5));
}

TEST_CASE("constant rho 1 with alpha 1 reproduces the classic width") {
    const auto params = UserParams::constant_rho(1.0, 1.0);
    for (std::int64_t n = 1; n <= 100; ++n) {
        const double expected = std::max(0.0, 2.0 * std::log(static_cast<double>(n)));
        CHECK(gamma(n, params.rho(n + 1, n), params.alpha) == doctest::Approx(expected));
    }
}

TEST_CASE("CI width shrinks with more per-arm data at fixed gamma") {
    const auto params = UserParams::constant_rho(2.0 / std::log(4.0), 1.0);  // Gamma = 4 at n=4
    double prev = 1e300;
    for (std::int64_t n_arm = 1; n_arm <= 4; ++n_arm) {
        auto s = state_with({n_arm, 4 - n_arm}, {0.5, 0.5});
        REQUIRE(s.n_total == 4);
        const auto [lo, hi] = confidence_interval(s, params, 0);
        const double width = hi - lo;
        CHECK(width < prev);
        prev = width;
    }
}

TEST_CASE("state JSON snapshot round trip") {
    auto s = state_with({3, 0, 5}, {0.5, 0.0, -1.0});
    s.t = 12;
    const auto j = state_to_json(s);
    CHECK(j.at("t") == 12);
    const auto back = state_from_json(j);
    CHECK(back == s);
}

TEST_SUITE_END();
