#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "rsense/recovery.hpp"
#include "rsense/rip.hpp"

using namespace rsense;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

SparseSignal basis_vector(i64 n, i64 i) {
    SparseSignal x;
    x.n = n;
    x.support = {i};
    x.values = {cd(1.0, 0.0)};
    return x;
}

}  // namespace

TEST_CASE("sparse signal sampling") {
    SECTION("deterministic and well-formed") {
        const auto a = sample_sparse_signal(50, 7, 123, Amplitude::Gaussian);
        const auto b = sample_sparse_signal(50, 7, 123, Amplitude::Gaussian);
        CHECK(a.support == b.support);
        CHECK(a.values == b.values);
        REQUIRE(a.support.size() == 7);
        CHECK(std::is_sorted(a.support.begin(), a.support.end()));
        CHECK(std::adjacent_find(a.support.begin(), a.support.end()) ==
              a.support.end());
        CHECK(a.support.front() >= 0);
        CHECK(a.support.back() < 50);
        const auto c = sample_sparse_signal(50, 7, 124, Amplitude::Gaussian);
        CHECK(a.support != c.support);  // seed matters
    }

    SECTION("amplitude models") {
        const auto u = sample_sparse_signal(20, 5, 9, Amplitude::Unit);
        for (const cd& v : u.values) CHECK(v == cd(1.0, 0.0));
        const auto r = sample_sparse_signal(20, 12, 9, Amplitude::Rademacher);
        bool saw_minus = false;
        for (const cd& v : r.values) {
            CHECK((v == cd(1.0, 0.0) || v == cd(-1.0, 0.0)));
            saw_minus = saw_minus || v == cd(-1.0, 0.0);
        }
        CHECK(saw_minus);
        const auto g = sample_sparse_signal(20, 5, 9, Amplitude::Gaussian);
        bool nonreal = false;
        for (const cd& v : g.values) nonreal = nonreal || v.imag() != 0.0;
        CHECK(nonreal);
    }

    SECTION("edge sparsities and errors") {
        const auto z = sample_sparse_signal(10, 0, 1, Amplitude::Unit);
        CHECK(z.support.empty());
        CHECK(z.norm() == 0.0);
        CHECK(z.dense() == std::vector<cd>(10, cd(0.0, 0.0)));
        const auto full = sample_sparse_signal(6, 6, 1, Amplitude::Unit);
        CHECK(full.support == std::vector<i64>{0, 1, 2, 3, 4, 5});
        CHECK_THROWS_AS(sample_sparse_signal(10, -1, 1, Amplitude::Unit),
                        std::invalid_argument);
        CHECK_THROWS_AS(sample_sparse_signal(10, 11, 1, Amplitude::Unit),
                        std::invalid_argument);
        CHECK_THROWS_AS(sample_sparse_signal(0, 0, 1, Amplitude::Unit),
                        std::invalid_argument);
    }

    SECTION("names round-trip") {
        for (Amplitude a :
             {Amplitude::Unit, Amplitude::Gaussian, Amplitude::Rademacher})
            CHECK(amplitude_from_name(amplitude_name(a)) == a);
        CHECK_THROWS_AS(amplitude_from_name("laplace"), std::invalid_argument);
        for (Algorithm a : {Algorithm::Omp, Algorithm::Iht})
            CHECK(algorithm_from_name(algorithm_name(a)) == a);
        CHECK_THROWS_AS(algorithm_from_name("lasso"), std::invalid_argument);
    }
}

TEST_CASE("measurement") {
    PrimeField f(13);
    const auto mat = SensingMatrix::power_residue(f, 2);

    SECTION("zero signal") {
        SparseSignal zero;
        zero.n = 13;
        const auto ms = measure(mat, zero);
        CHECK(ms.y == std::vector<cd>(7, cd(0.0, 0.0)));
        CHECK(ms.rip_ratio == 1.0);
    }

    SECTION("basis vectors reproduce columns") {
        for (i64 i = 0; i < 13; ++i) {
            const auto ms = measure(mat, basis_vector(13, i));
            const auto col = mat.column(i);
            REQUIRE(ms.y.size() == col.size());
            for (size_t m = 0; m < col.size(); ++m) CHECK(ms.y[m] == col[m]);
            CHECK(std::abs(ms.rip_ratio - 1.0) < 1e-12);
        }
    }

    SECTION("energy ratio lies in the RIP window") {
        const double delta2 = rip_delta_exhaustive(mat, 2).delta;
        for (u64 seed = 0; seed < 50; ++seed) {
            const auto x = sample_sparse_signal(13, 2, seed,
                                                Amplitude::Gaussian);
            const auto ms = measure(mat, x);
            CHECK(ms.rip_ratio >= 1.0 - delta2 - 1e-9);
            CHECK(ms.rip_ratio <= 1.0 + delta2 + 1e-9);
        }
    }

    SECTION("dimension mismatch") {
        SparseSignal wrong;
        wrong.n = 14;
        CHECK_THROWS_AS(measure(mat, wrong), std::invalid_argument);
    }
}

TEST_CASE("orthogonal matching pursuit") {
    PrimeField f(13);
    const auto mat = SensingMatrix::power_residue(f, 2);

    SECTION("single columns are recovered in one step") {
        for (i64 i = 0; i < 13; ++i) {
            const auto y = measure(mat, basis_vector(13, i)).y;
            const auto rec = omp_recover(mat, y, 1);
            CHECK(rec.iterations == 1);
            REQUIRE(rec.estimate.support == std::vector<i64>{i});
            CHECK(std::abs(rec.estimate.values[0] - cd(1.0, 0.0)) < 1e-10);
            REQUIRE(rec.residual_norms.size() == 1);
            CHECK(rec.residual_norms[0] < 1e-10);
        }
    }

    SECTION("zero measurements stop immediately") {
        const auto rec = omp_recover(mat, std::vector<cd>(7, cd(0.0, 0.0)), 3);
        CHECK(rec.iterations == 0);
        CHECK(rec.estimate.support.empty());
    }

    SECTION("noiseless sparse signals below the coherence limit") {
        // mu = 1/sqrt(101), so supports up to K = 5 are certified
        PrimeField f101(101);
        const auto big = SensingMatrix::power_residue(f101, 2);
        for (i64 K : {2, 5}) {
            for (u64 seed = 0; seed < 10; ++seed) {
                const auto x =
                    sample_sparse_signal(101, K, seed, Amplitude::Unit);
                const auto y = measure(big, x).y;
                const auto rec = omp_recover(big, y, K);
                INFO("K=" << K << " seed=" << seed);
                CHECK(rec.estimate.support == x.support);
                double diff = 0.0;
                const auto xd = x.dense(), ed = rec.estimate.dense();
                for (size_t i = 0; i < xd.size(); ++i)
                    diff += std::norm(ed[i] - xd[i]);
                CHECK(std::sqrt(diff) / x.norm() < 1e-9);
            }
        }
    }

    SECTION("residual trace is non-increasing and the estimate is sorted") {
        const auto x = sample_sparse_signal(13, 3, 17, Amplitude::Gaussian);
        const auto y = measure(mat, x).y;
        const auto rec = omp_recover(mat, y, 5);
        for (size_t t = 1; t < rec.residual_norms.size(); ++t)
            CHECK(rec.residual_norms[t] <=
                  rec.residual_norms[t - 1] + 1e-10);
        CHECK(std::is_sorted(rec.estimate.support.begin(),
                             rec.estimate.support.end()));
    }

    SECTION("over-selection past M reports dependent columns") {
        const auto a3 = SensingMatrix::power_residue(f, 3);  // M = 5
        const auto x = sample_sparse_signal(13, 3, 99, Amplitude::Gaussian);
        const auto y = measure(a3, x).y;
        // tol = 0 forces selection to continue past the spanning set
        CHECK_THROWS_MATCHES(omp_recover(a3, y, 8, 0.0), std::runtime_error,
                             MessageMatches(ContainsSubstring("dependent")));
    }

    SECTION("argument validation") {
        CHECK_THROWS_AS(omp_recover(mat, std::vector<cd>(6), 1),
                        std::invalid_argument);
        const std::vector<cd> y(7, cd(0.0, 0.0));
        CHECK_THROWS_AS(omp_recover(mat, y, -1), std::invalid_argument);
        CHECK_THROWS_AS(omp_recover(mat, y, 14), std::invalid_argument);
        CHECK_THROWS_AS(omp_recover(mat, y, 1, -1.0), std::invalid_argument);
    }
}

TEST_CASE("iterative hard thresholding") {
    PrimeField f(13);
    const auto mat = SensingMatrix::power_residue(f, 2);

    SECTION("zero measurements converge to zero at once") {
        const auto rec = iht_recover(mat, std::vector<cd>(7, cd(0.0, 0.0)), 3);
        CHECK(rec.iterations == 1);
        CHECK(rec.estimate.support.empty());
    }

    SECTION("single columns are fixed points") {
        for (i64 i = 0; i < 13; ++i) {
            const auto y = measure(mat, basis_vector(13, i)).y;
            const auto rec = iht_recover(mat, y, 1);
            REQUIRE(rec.estimate.support == std::vector<i64>{i});
            CHECK(std::abs(rec.estimate.values[0] - cd(1.0, 0.0)) < 1e-6);
        }
    }

    SECTION("orthonormal columns give exact one-shot recovery") {
        // k = 1: the rows enumerate all of F_p^*, so the Gram matrix is the
        // identity and the first gradient step lands on the signal
        const auto dft = SensingMatrix::power_residue(f, 1);
        const auto gram_check = coherence(dft).mu;
        CHECK(gram_check < 1e-12);
        for (u64 seed = 0; seed < 10; ++seed) {
            const auto x = sample_sparse_signal(13, 3, seed,
                                                Amplitude::Gaussian);
            const auto y = measure(dft, x).y;
            const auto rec = iht_recover(dft, y, 3);
            CHECK(rec.estimate.support == x.support);
            double diff = 0.0;
            const auto xd = x.dense(), ed = rec.estimate.dense();
            for (size_t i = 0; i < xd.size(); ++i)
                diff += std::norm(ed[i] - xd[i]);
            CHECK(std::sqrt(diff) / x.norm() < 1e-9);
        }
    }

    SECTION("determinism and support size") {
        const auto x = sample_sparse_signal(13, 3, 5, Amplitude::Gaussian);
        const auto y = measure(mat, x).y;
        const auto r1 = iht_recover(mat, y, 3);
        const auto r2 = iht_recover(mat, y, 3);
        CHECK(r1.estimate.support == r2.estimate.support);
        CHECK(r1.estimate.values == r2.estimate.values);
        CHECK(r1.iterations == r2.iterations);
        CHECK(r1.estimate.support.size() <= 3);
    }

    SECTION("oversized steps diverge loudly") {
        // moderate oversteps stop on stalled residuals instead of throwing,
        // so push far past the iterate-norm guard in the very first step
        const auto x = sample_sparse_signal(13, 2, 3, Amplitude::Unit);
        const auto y = measure(mat, x).y;
        CHECK_THROWS_MATCHES(iht_recover(mat, y, 2, 1e9),
                             std::runtime_error,
                             MessageMatches(ContainsSubstring("step")));
    }

    SECTION("argument validation") {
        const std::vector<cd> y(7, cd(0.0, 0.0));
        CHECK_THROWS_AS(iht_recover(mat, std::vector<cd>(6), 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(iht_recover(mat, y, -1), std::invalid_argument);
        CHECK_THROWS_AS(iht_recover(mat, y, 14), std::invalid_argument);
        CHECK_THROWS_AS(iht_recover(mat, y, 1, 1.0, 0), std::invalid_argument);
    }
}

TEST_CASE("recovery trials and experiments") {
    PrimeField f(13);
    const auto mat = SensingMatrix::power_residue(f, 2);

    SECTION("trials are reproducible from their seed") {
        const auto t1 = run_trial(mat, Algorithm::Omp, 2, 77, Amplitude::Unit);
        const auto t2 = run_trial(mat, Algorithm::Omp, 2, 77, Amplitude::Unit);
        CHECK(t1.signal.support == t2.signal.support);
        CHECK(t1.y == t2.y);
        CHECK(t1.estimate.support == t2.estimate.support);
        CHECK(t1.estimate.values == t2.estimate.values);
        CHECK(t1.rel_error == t2.rel_error);
        CHECK(t1.support_exact == t2.support_exact);
        CHECK(t1.p == 13);
        CHECK(t1.k == 2);
        CHECK(t1.variant == "powerresidue");
        CHECK(t1.algorithm == "omp");
        CHECK(t1.K == 2);
        CHECK(t1.seed == 77);
        CHECK(std::abs(t1.rip_ratio - 1.0) < 1.0);  // sane energy ratio
    }

    SECTION("K = 0 always succeeds") {
        const auto res = run_experiment(mat, {0}, 8, Algorithm::Omp,
                                        Amplitude::Unit, 5);
        REQUIRE(res.rows.size() == 1);
        CHECK(res.rows[0].success_rate == 1.0);
        CHECK(res.rows[0].median_rel_err == 0.0);
        CHECK(res.success_monotone);
    }

    SECTION("threading does not change the rows") {
        const std::vector<i64> Ks{1, 2, 3};
        const auto serial = run_experiment(mat, Ks, 12, Algorithm::Omp,
                                           Amplitude::Gaussian, 31, {}, 1);
        const auto threaded = run_experiment(mat, Ks, 12, Algorithm::Omp,
                                             Amplitude::Gaussian, 31, {}, 4);
        REQUIRE(serial.rows.size() == 3);
        REQUIRE(threaded.rows.size() == 3);
        for (size_t i = 0; i < 3; ++i) {
            CHECK(serial.rows[i].success_rate == threaded.rows[i].success_rate);
            CHECK(serial.rows[i].median_rel_err ==
                  threaded.rows[i].median_rel_err);
            CHECK(serial.rows[i].K == Ks[i]);
            CHECK(serial.rows[i].trials == 12);
            CHECK(serial.rows[i].seed == 31);
            CHECK(serial.rows[i].variant == "powerresidue");
            CHECK(serial.rows[i].algorithm == "omp");
        }
        CHECK(serial.success_monotone == threaded.success_monotone);
    }

    SECTION("easy regime reaches full success and stays monotone") {
        PrimeField f101(101);
        const auto big = SensingMatrix::power_residue(f101, 2);
        const auto res = run_experiment(big, {1, 2}, 10, Algorithm::Omp,
                                        Amplitude::Unit, 11);
        REQUIRE(res.rows.size() == 2);
        CHECK(res.rows[0].success_rate == 1.0);
        CHECK(res.rows[1].success_rate == 1.0);
        CHECK(res.rows[0].median_rel_err < 1e-9);
        CHECK(res.success_monotone);
    }

    SECTION("argument validation") {
        CHECK_THROWS_AS(run_experiment(mat, {1}, 0, Algorithm::Omp,
                                       Amplitude::Unit, 1),
                        std::invalid_argument);
        CHECK_THROWS_AS(run_experiment(mat, {}, 5, Algorithm::Omp,
                                       Amplitude::Unit, 1),
                        std::invalid_argument);
    }

    SECTION("CSV schema") {
        const auto res = run_experiment(mat, {1}, 5, Algorithm::Iht,
                                        Amplitude::Rademacher, 3);
        std::ostringstream os;
        write_experiment_csv(os, res.rows);
        const ExperimentRow& r = res.rows[0];
        const std::string expected =
            "p,k,variant,algorithm,K,trials,success_rate,median_rel_err,seed\n"
            "13,2,powerresidue,iht,1,5," + fmt17(r.success_rate) + "," +
            fmt17(r.median_rel_err) + ",3\n";
        CHECK(os.str() == expected);
    }
}
