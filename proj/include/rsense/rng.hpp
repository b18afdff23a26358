#pragma once

// Seeded randomness for all sampling in the library. The engine is
// std::mt19937_64, whose output sequence the standard specifies exactly;
// the derived draws below avoid std::*_distribution on purpose, because
// those are implementation-defined and would break cross-toolchain
// reproducibility of reports.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "rsense/util.hpp"

namespace rsense {

class Rng {
public:
    explicit Rng(u64 seed) : eng_(seed) {}

    u64 next() { return eng_(); }

    // Uniform in [0, n) by rejection of the biased tail.
    u64 below(u64 n) {
        if (n == 0) throw std::invalid_argument("Rng::below: n must be > 0");
        const u64 limit = UINT64_MAX - UINT64_MAX % n;
        u64 v;
        do {
            v = eng_();
        } while (v >= limit);
        return v % n;
    }

    // Uniform in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    }

    // Standard normal via Box-Muller; the second deviate is cached.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 == 0.0) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    // `count` distinct values from {0,...,n-1} via a partial Fisher-Yates
    // shuffle, in draw order (not sorted).
    std::vector<i64> sample_distinct(i64 n, i64 count) {
        if (count < 0 || count > n)
            throw std::invalid_argument("Rng::sample_distinct: count out of range");
        std::vector<i64> pool(static_cast<size_t>(n));
        for (i64 i = 0; i < n; ++i) pool[static_cast<size_t>(i)] = i;
        std::vector<i64> out(static_cast<size_t>(count));
        for (i64 i = 0; i < count; ++i) {
            const i64 j = i + static_cast<i64>(below(static_cast<u64>(n - i)));
            std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(j)]);
            out[static_cast<size_t>(i)] = pool[static_cast<size_t>(i)];
        }
        return out;
    }

private:
    std::mt19937_64 eng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Per-trial seed derivation used everywhere a loop of independent trials is
// run: trial t uses seed ^ t, so any single trial can be reproduced alone.
inline u64 trial_seed(u64 seed, u64 trial) { return seed ^ trial; }

}  // namespace rsense
