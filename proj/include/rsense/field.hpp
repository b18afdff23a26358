#pragma once

// Arithmetic in the prime field F_p: primality testing, primitive roots,
// discrete logarithms, and the set of k-th power residues.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rsense/util.hpp"

namespace rsense {

inline u64 mul_mod(u64 a, u64 b, u64 m) {
    return static_cast<u64>((static_cast<unsigned __int128>(a) * b) % m);
}

inline u64 pow_mod(u64 base, u64 exp, u64 mod) {
    if (mod == 0) throw std::invalid_argument("pow_mod: zero modulus");
    if (mod == 1) return 0;
    u64 r = 1;
    base %= mod;
    while (exp) {
        if (exp & 1) r = mul_mod(r, base, mod);
        base = mul_mod(base, base, mod);
        exp >>= 1;
    }
    return r;
}

// Deterministic Miller-Rabin; the fixed base set decides primality for every
// 64-bit integer.
inline bool is_prime(u64 n) {
    if (n < 2) return false;
    for (u64 q : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL,
                  29ULL, 31ULL, 37ULL}) {
        if (n % q == 0) return n == q;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL,
                  29ULL, 31ULL, 37ULL}) {
        u64 x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool witness = true;
        for (int i = 1; i < s; ++i) {
            x = mul_mod(x, x, n);
            if (x == n - 1) {
                witness = false;
                break;
            }
        }
        if (witness) return false;
    }
    return true;
}

// All divisors of n, ascending.
inline std::vector<i64> divisors(i64 n) {
    if (n <= 0) throw std::invalid_argument("divisors: n must be positive");
    std::vector<i64> lo, hi;
    for (i64 d = 1; d * d <= n; ++d) {
        if (n % d == 0) {
            lo.push_back(d);
            if (d != n / d) hi.push_back(n / d);
        }
    }
    lo.insert(lo.end(), hi.rbegin(), hi.rend());
    return lo;
}

// Distinct prime factors of n, ascending.
inline std::vector<i64> prime_factors(i64 n) {
    if (n <= 0) throw std::invalid_argument("prime_factors: n must be positive");
    std::vector<i64> out;
    for (i64 q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
            out.push_back(q);
            while (n % q == 0) n /= q;
        }
    }
    if (n > 1) out.push_back(n);
    return out;
}

// Smallest primitive root modulo an odd prime p.
inline i64 primitive_root(i64 p) {
    if (p < 3 || !is_prime(static_cast<u64>(p)))
        throw std::invalid_argument("primitive_root: p must be an odd prime");
    const std::vector<i64> qs = prime_factors(p - 1);
    for (i64 g = 2; g < p; ++g) {
        bool ok = true;
        for (i64 q : qs) {
            if (pow_mod(static_cast<u64>(g), static_cast<u64>((p - 1) / q),
                        static_cast<u64>(p)) == 1) {
                ok = false;
                break;
            }
        }
        if (ok) return g;
    }
    throw std::logic_error("primitive_root: no generator found");
}

// F_p with a fixed generator (the smallest primitive root) and a full
// discrete-logarithm table, so characters evaluate in O(1). The table costs
// O(p) memory, which is the intended working range of this library.
class PrimeField {
public:
    static constexpr i64 kMaxModulus = 100'000'000;

    explicit PrimeField(i64 p) : p_(p) {
        if (p < 3 || !is_prime(static_cast<u64>(p)))
            throw std::invalid_argument("PrimeField: modulus " +
                                        std::to_string(p) +
                                        " is not an odd prime");
        if (p > kMaxModulus)
            throw std::invalid_argument(
                "PrimeField: modulus exceeds the supported table size");
        g_ = primitive_root(p);
        dlog_.assign(static_cast<size_t>(p), -1);
        i64 x = 1;
        for (i64 t = 0; t < p - 1; ++t) {
            dlog_[static_cast<size_t>(x)] = static_cast<std::int32_t>(t);
            x = static_cast<i64>(
                mul_mod(static_cast<u64>(x), static_cast<u64>(g_),
                        static_cast<u64>(p)));
        }
    }

    i64 modulus() const { return p_; }
    i64 generator() const { return g_; }

    // Representative of x in [0, p).
    i64 reduce(i64 x) const {
        i64 r = x % p_;
        return r < 0 ? r + p_ : r;
    }

    // t with generator()^t = x (mod p); rejects x = 0.
    i64 dlog(i64 x) const {
        const i64 r = reduce(x);
        if (r == 0)
            throw std::domain_error("PrimeField::dlog: 0 has no discrete log");
        return dlog_[static_cast<size_t>(r)];
    }

private:
    i64 p_;
    i64 g_;
    std::vector<std::int32_t> dlog_;
};

// (prime, multiplicity) factorization by trial division, ascending primes.
inline std::vector<std::pair<i64, i64>> factorize(i64 n) {
    if (n <= 0) throw std::invalid_argument("factorize: n must be positive");
    std::vector<std::pair<i64, i64>> out;
    for (i64 q = 2; q * q <= n; ++q) {
        if (n % q == 0) {
            i64 m = 0;
            while (n % q == 0) {
                n /= q;
                ++m;
            }
            out.emplace_back(q, m);
        }
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

// Best small-denominator rational approximation of x by continued
// fractions; succeeds only when |x - num/den| < 1e-12 with den <= max_den.
inline bool small_rational(double x, i64 max_den, i64& num, i64& den) {
    if (!(x >= 0.0) || !std::isfinite(x)) return false;
    double v = x;
    i64 p_prev = 1, p_prev2 = 0, q_prev = 0, q_prev2 = 1;
    for (int it = 0; it < 64; ++it) {
        const double fl = std::floor(v);
        if (fl > 1e17) break;
        const i64 ai = static_cast<i64>(fl);
        const i64 pc = ai * p_prev + p_prev2;
        const i64 qc = ai * q_prev + q_prev2;
        if (qc > max_den) break;
        p_prev2 = p_prev;
        p_prev = pc;
        q_prev2 = q_prev;
        q_prev = qc;
        if (std::abs(x - static_cast<double>(pc) / static_cast<double>(qc)) <
            1e-12) {
            num = pc;
            den = qc;
            return true;
        }
        const double frac = v - fl;
        if (frac < 1e-15) break;
        v = 1.0 / frac;
    }
    return false;
}

struct PowerThreshold {
    i64 value = 0;   // floor(x^eps)
    bool exact = false;  // x^eps is exactly this integer
};

// floor(x^eps) for integer x >= 1 and 0 <= eps <= 1, robust at near-integer
// powers: when the long-double estimate lands within 1e-6 of an integer and
// eps is (numerically) a small-denominator rational a/b, exactness of
// cand^b = x^a is decided by exact prime-factorization arithmetic. For
// irrational x^eps the long-double estimate (64-bit mantissa) decides the
// floor; at the magnitudes this library works with, irrational powers do
// not fall that close to integers.
inline PowerThreshold power_floor(i64 x, double eps) {
    if (x < 1) throw std::invalid_argument("power_floor: x must be >= 1");
    if (!(eps >= 0.0 && eps <= 1.0))
        throw std::invalid_argument("power_floor: eps must lie in [0, 1]");
    if (x == 1 || eps == 0.0) return {1, true};
    if (eps == 1.0) return {x, true};
    const long double t =
        expl(static_cast<long double>(eps) * logl(static_cast<long double>(x)));
    const i64 m = static_cast<i64>(floorl(t));
    i64 a = 0, b = 1;
    if (small_rational(eps, 64, a, b)) {
        const auto fx = factorize(x);
        for (const i64 cand : {m, m + 1}) {
            if (cand < 1) continue;
            if (fabsl(t - static_cast<long double>(cand)) >
                1e-6L * std::max<long double>(1.0L, t))
                continue;
            const auto fc = factorize(cand);
            bool exact = fc.size() == fx.size() || cand == 1;
            if (cand == 1) {
                exact = false;  // x^eps = 1 only for eps = 0, handled above
            } else {
                if (exact)
                    for (size_t i = 0; i < fc.size(); ++i)
                        if (fc[i].first != fx[i].first ||
                            b * fc[i].second != a * fx[i].second)
                            exact = false;
            }
            if (exact) return {cand, true};
        }
    }
    return {m, false};
}

struct ResidueSet {
    i64 p = 0;
    i64 k = 0;
    std::vector<i64> elements;  // ascending
};

// R_p^(k) = { x^k mod p : x in F_p^* } for k | p-1; has (p-1)/k elements.
inline ResidueSet kth_power_residues(const PrimeField& field, i64 k) {
    const i64 p = field.modulus();
    if (k < 1 || (p - 1) % k != 0)
        throw std::invalid_argument(
            "kth_power_residues: k must be a positive divisor of p-1");
    std::vector<bool> seen(static_cast<size_t>(p), false);
    for (i64 x = 1; x < p; ++x)
        seen[static_cast<size_t>(pow_mod(static_cast<u64>(x),
                                         static_cast<u64>(k),
                                         static_cast<u64>(p)))] = true;
    ResidueSet out{p, k, {}};
    out.elements.reserve(static_cast<size_t>((p - 1) / k));
    for (i64 r = 0; r < p; ++r)
        if (seen[static_cast<size_t>(r)]) out.elements.push_back(r);
    return out;
}

}  // namespace rsense
