#include <doctest.h>

#include <cmath>
#include <set>

#include "bair/instance.hpp"

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
}  // namespace

TEST_SUITE_BEGIN("core_env");

TEST_CASE("make_instance picks the strict maximum") {
    const auto two = make_instance({1.0, 0.5});
    CHECK(two.best_arm() == 0);
    CHECK(two.K() == 2);

    const auto four = make_instance({1.5, 1.0, -10.0, -10.0});
    CHECK(four.best_arm() == 0);

    CHECK(throws_with_prefix([] { make_instance({1.0, 1.0}); }, "DuplicateMax"));
    CHECK(throws_with_prefix([] { make_instance({1.0}); }, "TooFewArms"));
}

TEST_CASE("hardness gaps and H") {
    const auto a = hardness(make_instance({1.0, 0.5}));
    CHECK(a.gaps[0] == doctest::Approx(0.5));
    CHECK(a.gaps[1] == doctest::Approx(0.5));
    CHECK(a.hardness == doctest::Approx(8.0));

    const auto b = hardness(make_instance({2.0, 1.0, 0.0}));
    CHECK(b.gaps == std::vector<double>{1.0, 1.0, 2.0});
    CHECK(b.hardness == doctest::Approx(2.25));

    const auto c = hardness(make_instance({1.5, 1.0, -10.0, -10.0}));
    CHECK(std::abs(c.hardness - 8.0151228733459357) <= 1e-9 * 8.02);
}

TEST_CASE("sample_reward moments and determinism") {
    const auto instance = make_instance({0.0, 5.0});

    RngStream rng(42);
    const int n = 1000000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = sample_reward(instance, 0, rng);
        sum += r;
        sq += r * r;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.01);

    RngStream r1(7), r2(7);
    for (int i = 0; i < 100; ++i) {
        CHECK(sample_reward(instance, 1, r1) == sample_reward(instance, 1, r2));
    }

    RngStream r3(7);
    CHECK(throws_with_prefix([&] { sample_reward(instance, 2, r3); }, "ArmOutOfRange"));
    CHECK(throws_with_prefix([&] { sample_reward(instance, -1, r3); }, "ArmOutOfRange"));
}

TEST_CASE("generate_instance_batch hits the gap exactly") {
    const auto batch = generate_instance_batch(2, 0.5, 1000, 99);
    REQUIRE(batch.size() == 1000);
    for (const auto& inst : batch) {
        const int best = inst.best_arm();
        double second = -1e300;
        for (int i = 0; i < inst.K(); ++i) {
            if (i != best) second = std::max(second, inst.mean(i));
        }
        CHECK(inst.mean(best) - second == 0.5);  // bit-exact for the default gap
    }

    const auto wide = generate_instance_batch(5, 0.2, 200, 7);
    for (const auto& inst : wide) {
        const int best = inst.best_arm();
        double second = -1e300;
        for (int i = 0; i < inst.K(); ++i) {
            if (i != best) second = std::max(second, inst.mean(i));
        }
        const double diff = inst.mean(best) - second;
        CHECK(std::abs(diff - 0.2) <= 2e-16 * std::max(1.0, std::abs(inst.mean(best))));
    }

    // Hardness lower bound: at least two entries contribute 1/gap^2 each.
    for (const auto& inst : wide) {
        CHECK(hardness(inst).hardness >= 2.0 / (0.2 * 0.2) - 1e-9);
    }
}

TEST_CASE("generate_instance_batch is a pure function of its arguments") {
    const auto a = generate_instance_batch(5, 0.2, 50, 1234);
    const auto b = generate_instance_batch(5, 0.2, 50, 1234);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].means() == b[i].means());
        CHECK(a[i].best_arm() == b[i].best_arm());
    }
    CHECK(throws_with_prefix([] { generate_instance_batch(2, 0.0, 1, 1); }, "InvalidGap"));
    CHECK(throws_with_prefix([] { generate_instance_batch(2, -0.5, 1, 1); }, "InvalidGap"));
}

TEST_CASE("instance JSON round trip") {
    const auto batch = generate_instance_batch(3, 0.5, 5, 11);
    const auto j = batch_to_json(batch);
    REQUIRE(j.size() == 5);
    for (std::size_t i = 0; i < batch.size(); ++i) {
        const auto back = instance_from_json(j[i]);
        CHECK(back.means() == batch[i].means());
        CHECK(back.best_arm() == batch[i].best_arm());
    }
}

TEST_CASE("reward sampling concentration across seeds") {
    // Empirical mean of n draws lands within 4/sqrt(n) essentially always.
    const auto instance = make_instance({0.0, 1.0});
    const int trials = 2000, n = 64;
    int bad = 0;
    for (int t = 0; t < trials; ++t) {
        RngStream rng(derive_seed(900, static_cast<std::uint64_t>(t)));
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += sample_reward(instance, 0, rng);
        if (std::abs(sum / n) >= 4.0 / std::sqrt(static_cast<double>(n))) ++bad;
    }
    CHECK(bad == 0);
}

TEST_SUITE_END();
