#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include <isingcm/rng.hpp>
#include <isingcm/stats.hpp>

using namespace isingcm;

namespace {

struct DirectMoments {
    double mean = 0, m2 = 0, m3 = 0, m4 = 0;
};

DirectMoments direct(const std::vector<double>& xs) {
    DirectMoments d;
    const auto n = static_cast<double>(xs.size());
    for (const double x : xs) d.mean += x;
    d.mean /= n;
    for (const double x : xs) {
        const double c = x - d.mean;
        d.m2 += c * c;
        d.m3 += c * c * c;
        d.m4 += c * c * c * c;
    }
    return d;
}

} // namespace

TEST_CASE("running moments match a two-pass computation") {
    Rng rng = Rng::stream(11, 0);
    std::vector<double> xs(1000);
    for (auto& x : xs) x = 3.0 * rng.normal() + 0.7 + 0.2 * rng.uniform();
    RunningMoments rm;
    for (const double x : xs) rm.add(x);
    const DirectMoments d = direct(xs);
    REQUIRE(rm.n == xs.size());
    REQUIRE(rm.mean == Catch::Approx(d.mean).epsilon(1e-12));
    REQUIRE(rm.M2 == Catch::Approx(d.m2).epsilon(1e-10));
    REQUIRE(rm.M3 == Catch::Approx(d.m3).margin(std::fabs(d.m3) * 1e-9 + 1e-7));
    REQUIRE(rm.M4 == Catch::Approx(d.m4).epsilon(1e-9));
    REQUIRE(rm.variance() == Catch::Approx(d.m2 / (static_cast<double>(xs.size()) - 1)).epsilon(1e-12));
}

TEST_CASE("merging chunked moments equals a single pass") {
    Rng rng = Rng::stream(12, 0);
    std::vector<double> xs(2357);
    for (auto& x : xs) x = rng.normal() * 0.3 - 4.0;
    RunningMoments whole;
    for (const double x : xs) whole.add(x);

    const std::size_t cuts[] = {0, 1, 64, 65, 1000, 2356, 2357};
    RunningMoments merged;
    for (std::size_t c = 0; c + 1 < std::size(cuts); ++c) {
        RunningMoments part;
        for (std::size_t i = cuts[c]; i < cuts[c + 1]; ++i) part.add(xs[i]);
        merged.merge(part);
    }
    REQUIRE(merged.n == whole.n);
    REQUIRE(merged.mean == Catch::Approx(whole.mean).epsilon(1e-13));
    REQUIRE(merged.M2 == Catch::Approx(whole.M2).epsilon(1e-10));
    REQUIRE(merged.M3 == Catch::Approx(whole.M3).margin(std::fabs(whole.M3) * 1e-8 + 1e-7));
    REQUIRE(merged.M4 == Catch::Approx(whole.M4).epsilon(1e-9));

    RunningMoments empty_left;
    empty_left.merge(whole);
    REQUIRE(empty_left.n == whole.n);
    REQUIRE(empty_left.M4 == whole.M4);
}

TEST_CASE("variance SE tracks the normal-theory value on gaussian data") {
    Rng rng = Rng::stream(13, 0);
    const std::size_t n = 100000;
    const double sigma = 1.7;
    RunningMoments rm;
    for (std::size_t i = 0; i < n; ++i) rm.add(sigma * rng.normal());
    // For gaussian data Var(s^2) = 2 sigma^4 / (n-1).
    const double expected = sigma * sigma * std::sqrt(2.0 / (static_cast<double>(n) - 1));
    REQUIRE(rm.se_variance() == Catch::Approx(expected).epsilon(0.1));
    REQUIRE(rm.se_mean() == Catch::Approx(sigma / std::sqrt(static_cast<double>(n))).epsilon(0.05));
}

TEST_CASE("ks statistic hand case") {
    const std::vector<double> xs{0.25, 0.75};
    const double d = ks_statistic(xs, [](double x) { return std::clamp(x, 0.0, 1.0); });
    REQUIRE(d == Catch::Approx(0.25).margin(1e-15));
}

TEST_CASE("kolmogorov tail values") {
    REQUIRE(kolmogorov_p(0.5) == Catch::Approx(0.9639452436).margin(1e-6));
    REQUIRE(kolmogorov_p(1.3581) == Catch::Approx(0.05).margin(5e-4));
    REQUIRE(kolmogorov_p(0.0) == 1.0);
    REQUIRE(kolmogorov_p(8.0) < 1e-50);
}

TEST_CASE("ks test preconditions and degenerate samples") {
    std::vector<double> xs(49, 0.5);
    REQUIRE_THROWS_AS(ks_test(xs, [](double x) { return normal_cdf(x); }),
                      std::invalid_argument);
    xs.assign(100, 0.5);
    const auto r = ks_test(xs, [](double x) { return normal_cdf(x); });
    REQUIRE(r.p_value < 1e-30);
    REQUIRE(r.n == 100);
}

TEST_CASE("ks self-test against its own target") {
    int ok = 0;
    int high = 0;
    for (std::uint64_t run = 0; run < 100; ++run) {
        Rng rng = Rng::stream(500, run);
        std::vector<double> xs(10000);
        for (auto& x : xs) x = rng.normal();
        const auto r = ks_test(xs, [](double x) { return normal_cdf(x); });
        if (r.p_value > 0.001) ++ok;
        if (r.p_value > 0.1) ++high;
    }
    REQUIRE(ok >= 99);
    REQUIRE(high >= 60);  // p should be spread out, not piled near 0
}

TEST_CASE("normal cdf endpoints and symmetry") {
    REQUIRE(normal_cdf(0.0) == Catch::Approx(0.5).margin(1e-15));
    REQUIRE(normal_cdf(1.959963985) == Catch::Approx(0.975).margin(1e-9));
    for (const double x : {0.3, 1.1, 2.7}) {
        REQUIRE(normal_cdf(x) + normal_cdf(-x) == Catch::Approx(1.0).margin(1e-14));
    }
}
