#pragma once

// Batch self-verification: sweeps every odd prime p <= p_max and every
// admissible k, and checks the identities the construction rests on --
// character homomorphisms, Gauss-sum magnitudes and the power-sum
// decomposition, unit column norms, the inner-product/Gauss-sum identity,
// coherence bounds, and the flat-sum decomposition chain on seeded subset
// pairs. Each family reports its worst normalized residual and witness.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "rsense/characters.hpp"
#include "rsense/field.hpp"
#include "rsense/primes.hpp"
#include "rsense/rip.hpp"
#include "rsense/rng.hpp"
#include "rsense/sensing.hpp"
#include "rsense/util.hpp"

namespace rsense {

struct CheckAggregate {
    std::string name;
    i64 instances = 0;
    double worst = 0.0;      // max normalized residual / violation seen
    double tolerance = 0.0;
    bool pass = true;
    std::string witness;     // where the worst value occurred
};

struct VerifySummary {
    i64 p_max = 0;
    u64 seed = 0;
    i64 chain_pairs = 0;
    std::vector<i64> primes;
    bool pass = true;
    std::vector<CheckAggregate> checks;
};

namespace detail {

struct FamilyHit {
    double value = -1.0;
    std::string witness;
    i64 instances = 0;

    void feed(double v, const std::string& w) {
        ++instances;
        if (v > value) {
            value = v;
            witness = w;
        }
    }

    void merge(const FamilyHit& o) {
        instances += o.instances;
        if (o.value > value) {
            value = o.value;
            witness = o.witness;
        }
    }
};

// Fixed family order of the sweep report.
enum Family : size_t {
    kAddHom = 0,
    kMultHom,
    kGaussMagnitude,
    kGaussIdentity,
    kUnitColumns,
    kInnerProduct,
    kCoherenceQuadratic,
    kCoherenceUpper,
    kCoherenceWelch,
    kPaleyEquiangular,
    kChainDecomposition,
    kChainTriangle,
    kChainMagnitude,
    kChainEndToEnd,
    kFamilyCount
};

struct FamilySpec {
    const char* name;
    double tolerance;
};

inline const FamilySpec kFamilies[kFamilyCount] = {
    {"additive_character_homomorphism", 1e-12},
    {"multiplicative_character_homomorphism", 1e-12},
    {"gauss_sum_magnitude", 1e-9},
    {"gauss_sum_decomposition", 1e-9},
    {"unit_column_norms", 1e-9},
    {"inner_product_gauss_identity", 1e-9},
    {"coherence_value_quadratic", 1e-9},
    {"coherence_upper_bound", 1e-9},
    {"coherence_welch_bound", 1e-9},
    {"paley_equiangular", 1e-9},
    {"flat_chain_decomposition", 1e-9},
    {"flat_chain_triangle", 1e-9},
    {"flat_chain_magnitude", 1e-9},
    {"flat_chain_end_to_end", 1e-9},
};

using FamilyHits = std::array<FamilyHit, kFamilyCount>;

inline void sweep_one_prime(i64 p, u64 seed, i64 chain_pairs, FamilyHits& hits) {
    PrimeField field(p);
    const double sqrtp = std::sqrt(static_cast<double>(p));
    const std::string ptag = "p=" + std::to_string(p);

    // additive character homomorphism, all pairs for small p
    {
        const i64 cap = 101;
        if (p <= cap) {
            for (i64 x = 0; x < p; ++x)
                for (i64 y = 0; y < p; ++y) {
                    const double v = std::abs(additive_char(field, x + y) -
                                              additive_char(field, x) *
                                                  additive_char(field, y));
                    hits[kAddHom].feed(v, ptag + " x=" + std::to_string(x) +
                                              " y=" + std::to_string(y));
                }
        } else {
            Rng rng(trial_seed(seed, static_cast<u64>(p)));
            for (i64 t = 0; t < 2000; ++t) {
                const i64 x = static_cast<i64>(rng.below(static_cast<u64>(p)));
                const i64 y = static_cast<i64>(rng.below(static_cast<u64>(p)));
                const double v = std::abs(additive_char(field, x + y) -
                                          additive_char(field, x) *
                                              additive_char(field, y));
                hits[kAddHom].feed(v, ptag + " x=" + std::to_string(x) +
                                          " y=" + std::to_string(y));
            }
        }
    }

    std::vector<i64> ks;  // admissible character orders
    for (i64 d : divisors(p - 1))
        if (d >= 2 && d <= p - 2) ks.push_back(d);

    for (i64 k : ks) {
        const std::string pktag = ptag + " k=" + std::to_string(k);
        for (i64 h = 1; h < k; ++h) {
            MultChar chi(field, k, h);
            const std::string tag = pktag + " h=" + std::to_string(h);
            // homomorphism on seeded unit pairs
            Rng rng(trial_seed(seed, static_cast<u64>(p * 131 + k * 7 + h)));
            for (i64 t = 0; t < 100; ++t) {
                const i64 x = 1 + static_cast<i64>(rng.below(static_cast<u64>(p - 1)));
                const i64 y = 1 + static_cast<i64>(rng.below(static_cast<u64>(p - 1)));
                const double v = std::abs(chi(x * y) - chi(x) * chi(y));
                hits[kMultHom].feed(v, tag + " x=" + std::to_string(x) +
                                           " y=" + std::to_string(y));
            }
            const double mag = std::abs(gauss_sum(chi, 1));
            hits[kGaussMagnitude].feed(std::abs(mag - sqrtp) / sqrtp, tag);
        }
        const double id_scale = sqrtp * static_cast<double>(k);
        for (i64 a = 1; a < p; ++a) {
            const GaussIdentityResult r = verify_gauss_identity(field, k, a);
            const double v = std::max(r.residual, r.form_gap) / id_scale;
            hits[kGaussIdentity].feed(v, pktag + " a=" + std::to_string(a));
        }
    }

    // matrices: every admissible k (including the degenerate k = 1) + Paley
    std::vector<i64> mks;
    for (i64 d : divisors(p - 1))
        if (d <= p - 2) mks.push_back(d);
    for (i64 k : mks) {
        const SensingMatrix mat = SensingMatrix::power_residue(field, k);
        const std::string pktag = ptag + " k=" + std::to_string(k);
        for (i64 c = 0; c < mat.cols(); ++c) {
            double nn = 0.0;
            for (const cd& v : mat.column(c)) nn += std::norm(v);
            hits[kUnitColumns].feed(std::abs(std::sqrt(nn) - 1.0),
                                    pktag + " col=" + std::to_string(c));
        }
        if (k < 2) continue;

        // inner products vs (1/p) G_k(a_i - a_j), Gauss sums cached by
        // difference
        std::vector<cd> gk(static_cast<size_t>(p));
        for (i64 d = 1; d < p; ++d)
            gk[static_cast<size_t>(d)] = power_gauss_sum(field, k, d);
        double mu = -1.0;
        for (i64 i = 0; i + 1 < mat.cols(); ++i)
            for (i64 j = i + 1; j < mat.cols(); ++j) {
                const cd ip = mat.inner_product(i, j);
                const cd expect =
                    gk[static_cast<size_t>(field.reduce(i - j))] /
                    static_cast<double>(p);
                hits[kInnerProduct].feed(std::abs(ip - expect),
                                         pktag + " i=" + std::to_string(i) +
                                             " j=" + std::to_string(j));
                const double a = std::abs(ip);
                if (a > mu) mu = a;
            }
        if (k == 2)
            hits[kCoherenceQuadratic].feed(std::abs(mu - 1.0 / sqrtp), pktag);
        hits[kCoherenceUpper].feed(
            std::max(mu - static_cast<double>(k - 1) / sqrtp, 0.0), pktag);
        hits[kCoherenceWelch].feed(
            std::max(welch_bound(mat.rows(), mat.cols()) - mu, 0.0), pktag);

        // flat-sum decomposition chain on seeded disjoint subset pairs
        const i64 cap = std::min<i64>(4, (mat.cols() - 1) / 2);
        if (cap >= 1) {
            Rng rng(trial_seed(seed, static_cast<u64>(p * 1009 + k)));
            for (i64 t = 0; t < chain_pairs; ++t) {
                const i64 a = 1 + static_cast<i64>(rng.below(static_cast<u64>(cap)));
                const i64 b = 1 + static_cast<i64>(rng.below(static_cast<u64>(cap)));
                std::vector<i64> both = rng.sample_distinct(mat.cols(), a + b);
                std::vector<i64> I(both.begin(), both.begin() + a);
                std::vector<i64> J(both.begin() + a, both.end());
                const FlatChainReport ch = flat_sum_chain(mat, I, J);
                const std::string tag = pktag + " trial=" + std::to_string(t);
                hits[kChainDecomposition].feed(
                    ch.decomposition_residual / ch.scale, tag);
                hits[kChainTriangle].feed(
                    std::max(-ch.majorant_slack, 0.0) / ch.scale, tag);
                hits[kChainMagnitude].feed(ch.magnitude_residual / ch.scale,
                                           tag);
                hits[kChainEndToEnd].feed(
                    std::max(-ch.end_to_end_slack, 0.0) / ch.scale, tag);
            }
        }
    }

    // Paley variant: unit norms and the equiangular coherence value.
    // Needs k = 2 <= p-2, so p = 3 has no Paley matrix.
    if (p >= 5) {
        const SensingMatrix mat = SensingMatrix::paley(field);
        const std::string tag = ptag + " paley";
        for (i64 c = 0; c < mat.cols(); ++c) {
            double nn = 0.0;
            for (const cd& v : mat.column(c)) nn += std::norm(v);
            hits[kUnitColumns].feed(std::abs(std::sqrt(nn) - 1.0),
                                    tag + " col=" + std::to_string(c));
        }
        const CoherencePoint cp = coherence(mat);
        hits[kPaleyEquiangular].feed(
            std::abs(cp.mu - welch_bound(mat.rows(), mat.cols())), tag);
        hits[kCoherenceWelch].feed(
            std::max(welch_bound(mat.rows(), mat.cols()) - cp.mu, 0.0), tag);
    }
}

}  // namespace detail

// Runs the whole sweep. `chain_pairs` seeded (I, J) pairs are checked per
// (p, k) matrix; `threads` parallelizes over primes without affecting the
// result.
inline VerifySummary verify_sweep(i64 p_max, u64 seed = 0, i64 chain_pairs = 10,
                                  i64 threads = 1) {
    if (p_max < 3)
        throw std::invalid_argument("verify_sweep: p_max must be >= 3");
    if (chain_pairs < 0)
        throw std::invalid_argument("verify_sweep: chain_pairs must be >= 0");
    VerifySummary sum;
    sum.p_max = p_max;
    sum.seed = seed;
    sum.chain_pairs = chain_pairs;
    for (i64 p : sieve_primes(p_max))
        if (p >= 3) sum.primes.push_back(p);

    const i64 np = static_cast<i64>(sum.primes.size());
    std::vector<detail::FamilyHits> partial(static_cast<size_t>(np));
    parallel_for(np, threads, [&](i64 i) {
        detail::sweep_one_prime(sum.primes[static_cast<size_t>(i)], seed,
                                chain_pairs, partial[static_cast<size_t>(i)]);
    });

    detail::FamilyHits hits;
    for (const detail::FamilyHits& part : partial)
        for (size_t f = 0; f < detail::kFamilyCount; ++f)
            hits[f].merge(part[f]);

    for (size_t f = 0; f < detail::kFamilyCount; ++f) {
        CheckAggregate c;
        c.name = detail::kFamilies[f].name;
        c.tolerance = detail::kFamilies[f].tolerance;
        c.instances = hits[f].instances;
        c.worst = hits[f].instances ? hits[f].value : 0.0;
        c.witness = hits[f].witness;
        c.pass = c.worst <= c.tolerance;
        if (!c.pass) sum.pass = false;
        sum.checks.push_back(std::move(c));
    }
    return sum;
}

}  // namespace rsense
