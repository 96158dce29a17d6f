// Counter-based random streams (Philox2x64-10).
//
// Replica k draws from stream(seed, k); streams are indexed by a counter word,
// so they never overlap and results do not depend on the order in which
// replicas are scheduled. Uniform doubles and bounded integers are generated
// by hand instead of <random> distributions, whose output sequences are
// implementation-defined; this keeps reports bit-stable for a fixed seed.
#pragma once

#include <cstdint>
#include <cmath>

namespace isingcm {

// Philox2x64 round constants (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3").
inline constexpr std::uint64_t philox_m = 0xD2B74407B1CE6E93ull;
inline constexpr std::uint64_t philox_w = 0x9E3779B97F4A7C15ull;

class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : key_(seed), stream_(stream) {}

    // Stream k of a master seed; the factory form reads better at call sites.
    static Rng stream(std::uint64_t seed, std::uint64_t k) { return Rng(seed, k); }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~0ull; }

    result_type operator()() {
        if (have_ == 0) refill();
        return buf_[--have_];
    }

    // Uniform on [0,1) with 53 random bits.
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n); Lemire's multiply-shift with rejection.
    std::uint64_t below(std::uint64_t n) {
        unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t t = (0 - n) % n;
            while (lo < t) {
                m = static_cast<unsigned __int128>((*this)()) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    // Standard normal via Marsaglia's polar method; one spare value cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, q;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            q = u * u + v * v;
        } while (q >= 1.0 || q == 0.0);
        const double f = std::sqrt(-2.0 * std::log(q) / q);
        spare_ = v * f;
        has_spare_ = true;
        return u * f;
    }

private:
    void refill() {
        std::uint64_t x0 = ctr_++;
        std::uint64_t x1 = stream_;
        std::uint64_t k = key_;
        for (int round = 0; round < 10; ++round) {
            const unsigned __int128 prod = static_cast<unsigned __int128>(philox_m) * x0;
            const auto hi = static_cast<std::uint64_t>(prod >> 64);
            const auto lo = static_cast<std::uint64_t>(prod);
            x0 = hi ^ k ^ x1;
            x1 = lo;
            k += philox_w;
        }
        buf_[0] = x1;
        buf_[1] = x0;
        have_ = 2;
    }

    std::uint64_t key_;
    std::uint64_t stream_;
    std::uint64_t ctr_ = 0;
    std::uint64_t buf_[2] = {0, 0};
    int have_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace isingcm
