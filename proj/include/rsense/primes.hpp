#pragma once

// Density experiments for shifted primes: counting primes p <= x such that
// p - 1 has a divisor k in the window (x^eps1, x^eps2]. Such primes are
// exactly the moduli for which the power-residue construction achieves a
// prescribed compression ratio, and their count is expected to stay
// comparable to x / log x.

#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsense/field.hpp"
#include "rsense/util.hpp"

namespace rsense {

// Primes <= x by a packed-bit sieve of Eratosthenes. Memory is x/8 bytes;
// the guard keeps accidental huge inputs from thrashing the machine.
inline std::vector<i64> sieve_primes(i64 x, i64 limit = 100'000'000) {
    if (x < 2) return {};
    if (x > limit)
        throw std::invalid_argument("sieve_primes: x exceeds the sieve limit of " +
                                    std::to_string(limit));
    std::vector<bool> composite(static_cast<size_t>(x) + 1, false);
    for (i64 d = 2; d * d <= x; ++d) {
        if (composite[static_cast<size_t>(d)]) continue;
        for (i64 m = d * d; m <= x; m += d)
            composite[static_cast<size_t>(m)] = true;
    }
    std::vector<i64> primes;
    for (i64 n = 2; n <= x; ++n)
        if (!composite[static_cast<size_t>(n)]) primes.push_back(n);
    return primes;
}

struct ShiftedPrimeHit {
    i64 p = 0;
    i64 k = 0;                  // smallest divisor of p-1 in the window
    std::vector<i64> factors;   // all divisors of p-1 in the window, ascending
};

// Odd primes p <= x such that p - 1 has a divisor k with x^eps1 < k <= x^eps2.
// The window endpoints are integer thresholds computed by power_floor, so
// boundary cases (x^eps exactly integral) are decided exactly.
inline std::vector<ShiftedPrimeHit> primes_with_factor_in_range(i64 x,
                                                                double eps1,
                                                                double eps2) {
    if (x < 2) throw std::invalid_argument("primes_with_factor_in_range: x < 2");
    if (!(eps1 >= 0.0 && eps1 < eps2 && eps2 <= 1.0))
        throw std::invalid_argument(
            "primes_with_factor_in_range: need 0 <= eps1 < eps2 <= 1");
    const i64 lo = power_floor(x, eps1).value;  // k > lo
    const i64 hi = power_floor(x, eps2).value;  // k <= hi
    std::vector<ShiftedPrimeHit> hits;
    for (i64 p : sieve_primes(x)) {
        if (p == 2) continue;
        ShiftedPrimeHit hit;
        hit.p = p;
        for (i64 d : divisors(p - 1)) {
            if (d > lo && d <= hi) hit.factors.push_back(d);
        }
        if (!hit.factors.empty()) {
            hit.k = hit.factors.front();
            hits.push_back(std::move(hit));
        }
    }
    return hits;
}

struct DensityRow {
    i64 x = 0;
    double eps1 = 0.0;
    double eps2 = 0.0;
    i64 hits = 0;
    double x_over_logx = 0.0;
    double ratio = 0.0;  // hits / (x / log x)
};

inline std::vector<DensityRow> shifted_prime_density(const std::vector<i64>& xs,
                                                     double eps1, double eps2) {
    std::vector<DensityRow> rows;
    for (i64 x : xs) {
        if (x < 10)
            throw std::invalid_argument(
                "shifted_prime_density: x must be >= 10 for a meaningful "
                "x/log x scale");
        DensityRow r;
        r.x = x;
        r.eps1 = eps1;
        r.eps2 = eps2;
        r.hits = static_cast<i64>(primes_with_factor_in_range(x, eps1, eps2).size());
        r.x_over_logx =
            static_cast<double>(x) / std::log(static_cast<double>(x));
        r.ratio = static_cast<double>(r.hits) / r.x_over_logx;
        rows.push_back(r);
    }
    return rows;
}

// CSV schema: x,eps1,eps2,hits,x_over_logx,ratio
inline void write_density_csv(std::ostream& os,
                              const std::vector<DensityRow>& rows) {
    os << "x,eps1,eps2,hits,x_over_logx,ratio\n";
    for (const DensityRow& r : rows) {
        os << r.x << ',' << fmt17(r.eps1) << ',' << fmt17(r.eps2) << ','
           << r.hits << ',' << fmt17(r.x_over_logx) << ',' << fmt17(r.ratio)
           << "\n";
    }
}

// CSV schema: p,k  (one row per hit, k the smallest admissible divisor)
inline void write_hits_csv(std::ostream& os,
                           const std::vector<ShiftedPrimeHit>& hits) {
    os << "p,k\n";
    for (const ShiftedPrimeHit& h : hits) os << h.p << ',' << h.k << "\n";
}

}  // namespace rsense
