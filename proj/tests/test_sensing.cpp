#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "rsense/characters.hpp"
#include "rsense/sensing.hpp"

using namespace rsense;

namespace {

double column_norm(const SensingMatrix& a, i64 j) {
    double s = 0.0;
    for (const cd& v : a.column(j)) s += std::norm(v);
    return std::sqrt(s);
}

std::string serialized(const SensingMatrix& a) {
    std::ostringstream os;
    a.write(os);
    return os.str();
}

SensingMatrix parse(const std::string& text) {
    std::istringstream is(text);
    return SensingMatrix::read(is);
}

}  // namespace

TEST_CASE("power-residue matrix shape, labels, and entries") {
    PrimeField f(13);
    const auto a = SensingMatrix::power_residue(f, 3);
    CHECK(a.rows() == 5);
    CHECK(a.cols() == 13);
    CHECK(a.prime() == 13);
    CHECK(a.power() == 3);
    CHECK(a.variant() == MatrixVariant::PowerResidue);
    CHECK(a.row_labels() == std::vector<i64>{0, 1, 5, 8, 12});
    REQUIRE(a.column_labels().size() == 13);
    CHECK(a.column_labels().front() == 0);
    CHECK(a.column_labels().back() == 12);

    // row 0 is the constant 1/sqrt(p); row 1+l is sqrt(k/p) psi(b_l a)
    const double top = 1.0 / std::sqrt(13.0);
    const double amp = std::sqrt(3.0 / 13.0);
    for (i64 col = 0; col < 13; ++col) {
        CHECK(a.entry(0, col) == cd(top, 0.0));
        for (i64 l = 0; l < 4; ++l) {
            const i64 b = a.row_labels()[static_cast<size_t>(1 + l)];
            const cd expect =
                amp * std::polar(1.0, 2.0 * std::numbers::pi *
                                          static_cast<double>(b * col % 13) /
                                          13.0);
            CHECK(std::abs(a.entry(1 + l, col) - expect) < 1e-15);
        }
    }

    // k = 1 uses every nonzero residue and has M = p rows
    const auto full = SensingMatrix::power_residue(f, 1);
    CHECK(full.rows() == 13);
    CHECK(full.cols() == 13);
    CHECK(full.row_labels().size() == 13);

    CHECK_THROWS_AS(SensingMatrix::power_residue(f, 0), std::invalid_argument);
    CHECK_THROWS_AS(SensingMatrix::power_residue(f, 12), std::invalid_argument);
    CHECK_THROWS_AS(SensingMatrix::power_residue(f, 5), std::invalid_argument);
    CHECK_THROWS_AS(a.entry(5, 0), std::out_of_range);
    CHECK_THROWS_AS(a.entry(0, 13), std::out_of_range);
    CHECK_THROWS_AS(a.column(-1), std::out_of_range);
}

TEST_CASE("columns are unit vectors") {
    for (i64 p : {5, 13, 29, 31}) {
        PrimeField f(p);
        for (i64 k : divisors(p - 1)) {
            if (k > p - 2) continue;
            const auto a = SensingMatrix::power_residue(f, k);
            for (i64 j = 0; j < a.cols(); ++j) {
                INFO("p=" << p << " k=" << k << " col=" << j);
                CHECK(std::abs(column_norm(a, j) - 1.0) < 1e-12);
            }
        }
        if (p >= 5) {
            const auto pa = SensingMatrix::paley(f);
            for (i64 j = 0; j < pa.cols(); ++j)
                CHECK(std::abs(column_norm(pa, j) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("paley extension") {
    PrimeField f13(13), f7(7);
    const auto a = SensingMatrix::paley(f13);
    CHECK(a.rows() == 7);
    CHECK(a.cols() == 14);
    CHECK(a.variant() == MatrixVariant::Paley);
    CHECK(a.power() == 2);
    CHECK(a.column_labels().back() == -1);

    // 13 = 1 mod 4: extension column is (1, 0, ..., 0)
    CHECK(a.entry(0, 13) == cd(1.0, 0.0));
    for (i64 r = 1; r < 7; ++r) CHECK(a.entry(r, 13) == cd(0.0, 0.0));

    // 7 = 3 mod 4: extension column starts with i
    const auto b = SensingMatrix::paley(f7);
    CHECK(b.rows() == 4);
    CHECK(b.cols() == 8);
    CHECK(b.entry(0, 7) == cd(0.0, 1.0));

    // the field columns agree with the k = 2 matrix
    const auto base = SensingMatrix::power_residue(f13, 2);
    for (i64 c = 0; c < 13; ++c)
        for (i64 r = 0; r < 7; ++r) CHECK(a.entry(r, c) == base.entry(r, c));

    // inner products against the extension column have magnitude 1/sqrt(p)
    for (i64 c = 0; c < 13; ++c)
        CHECK(std::abs(std::abs(a.inner_product(c, 13)) -
                       1.0 / std::sqrt(13.0)) < 1e-12);
}

TEST_CASE("inner products equal scaled power gauss sums") {
    // <phi_i, phi_j> = (1/p) G_k(i - j), with the conjugation on the second
    // argument; checked for every valid k and every ordered pair.
    PrimeField f(13);
    for (i64 k : {2, 3, 4, 6}) {
        const auto a = SensingMatrix::power_residue(f, k);
        for (i64 i = 0; i < 13; ++i) {
            for (i64 j = 0; j < 13; ++j) {
                if (i == j) continue;
                const cd lhs = a.inner_product(i, j);
                const cd rhs = power_gauss_sum(f, k, i - j) / 13.0;
                INFO("k=" << k << " i=" << i << " j=" << j);
                CHECK(std::abs(lhs - rhs) < 1e-12);
            }
        }
    }
}

TEST_CASE("coherence values and witnesses") {
    PrimeField f(13);

    const auto a2 = SensingMatrix::power_residue(f, 2);
    const auto c2 = coherence(a2);
    CHECK(std::abs(c2.mu - 0.2773500981126146) < 1e-12);  // = 1/sqrt(13)
    CHECK(std::abs(c2.mu - 1.0 / std::sqrt(13.0)) < 1e-12);

    const auto a3 = SensingMatrix::power_residue(f, 3);
    const auto c3 = coherence(a3);
    CHECK(std::abs(c3.mu - 0.5348677097547333) < 1e-12);
    CHECK(c3.i < c3.j);
    CHECK(std::abs(a3.inner_product(c3.i, c3.j)) == c3.mu);  // witness reproduces

    // mu <= (k-1)/sqrt(p) and mu >= the Welch bound
    for (i64 k : {2, 3, 4, 6}) {
        const auto a = SensingMatrix::power_residue(f, k);
        const double mu = coherence(a).mu;
        CHECK(mu <= static_cast<double>(k - 1) / std::sqrt(13.0) + 1e-12);
        CHECK(mu >= welch_bound(a.rows(), a.cols()) - 1e-12);
    }

    // |<phi_i, phi_j>| depends only on i - j mod p
    for (i64 i = 0; i < 13; ++i)
        for (i64 j = i + 1; j < 13; ++j)
            CHECK(std::abs(std::abs(a3.inner_product(i, j)) -
                           std::abs(a3.inner_product(0, (j - i) % 13))) <
                  1e-12);

    // the Paley matrix is equiangular: coherence meets the Welch bound
    const auto pa = SensingMatrix::paley(f);
    const auto cp = coherence(pa);
    CHECK(std::abs(cp.mu - welch_bound(7, 14)) < 1e-12);
    for (i64 i = 0; i < 14; ++i)
        for (i64 j = i + 1; j < 14; ++j)
            CHECK(std::abs(std::abs(pa.inner_product(i, j)) - cp.mu) < 1e-12);
}

TEST_CASE("welch bound and compression ratio") {
    CHECK(std::abs(welch_bound(5, 13) - 0.36514837167011074) < 1e-15);
    CHECK(std::abs(welch_bound(7, 14) - 0.2773500981126146) < 1e-12);
    CHECK(welch_bound(3, 3) == 0.0);
    CHECK(welch_bound(1, 1) == 0.0);
    CHECK_THROWS_AS(welch_bound(0, 5), std::invalid_argument);
    CHECK_THROWS_AS(welch_bound(5, 3), std::invalid_argument);

    PrimeField f(13);
    CHECK(compression_ratio(SensingMatrix::power_residue(f, 3)) == 2.6);
    CHECK(compression_ratio(SensingMatrix::paley(f)) == 2.0);

    // the ratio approaches k: p = 9901, k = 100 gives N/M = 99.01
    PrimeField big(9901);
    const auto a = SensingMatrix::power_residue(big, 100);
    CHECK(a.rows() == 100);
    CHECK(a.cols() == 9901);
    CHECK(std::abs(compression_ratio(a) - 99.01) < 1e-12);
}

TEST_CASE("PHIPK serialization round-trips exactly") {
    PrimeField f(13);
    for (const auto& a : {SensingMatrix::power_residue(f, 3),
                          SensingMatrix::paley(f)}) {
        const std::string text = serialized(a);
        CHECK(serialized(a) == text);  // byte-identical rewrites
        const auto back = parse(text);
        CHECK(back.rows() == a.rows());
        CHECK(back.cols() == a.cols());
        CHECK(back.prime() == a.prime());
        CHECK(back.power() == a.power());
        CHECK(back.variant() == a.variant());
        CHECK(back.data() == a.data());  // %.17g round-trip is exact
        CHECK(back.row_labels() == a.row_labels());
        CHECK(back.column_labels() == a.column_labels());
        CHECK(serialized(back) == text);
    }

    const auto a = SensingMatrix::power_residue(f, 3);
    CHECK(serialized(a).rfind("PHIPK v1 variant=powerresidue p=13 k=3 M=5 N=13\n",
                              0) == 0);

    // file round-trip
    const std::string path = "phipk_roundtrip_test.tmp";
    a.save(path);
    const auto loaded = SensingMatrix::load(path);
    CHECK(loaded.data() == a.data());
    std::remove(path.c_str());
    CHECK_THROWS_AS(SensingMatrix::load("does_not_exist.phipk"),
                    std::runtime_error);
}

TEST_CASE("PHIPK reader rejects malformed input") {
    PrimeField f(13);
    const auto a = SensingMatrix::power_residue(f, 3);
    const std::string good = serialized(a);

    auto expect_reject = [](const std::string& text, const std::string& what) {
        INFO("variant: " << what);
        CHECK_THROWS_AS(parse(text), std::runtime_error);
    };

    expect_reject("", "empty input");
    expect_reject("PHIPKX v1 variant=powerresidue p=13 k=3 M=5 N=13\n",
                  "bad magic");
    expect_reject("PHIPK v2 variant=powerresidue p=13 k=3 M=5 N=13\n",
                  "bad version");
    expect_reject("PHIPK v1 variant=mystery p=13 k=3 M=5 N=13\n",
                  "unknown variant");
    expect_reject("PHIPK v1 variant=powerresidue p=12 k=3 M=5 N=12\n",
                  "composite p");
    expect_reject("PHIPK v1 variant=powerresidue p=13 k=5 M=3 N=13\n",
                  "k does not divide p-1");
    expect_reject("PHIPK v1 variant=powerresidue p=13 k=3 M=6 N=13\n",
                  "wrong M");
    expect_reject("PHIPK v1 variant=powerresidue p=13 k=3 M=5 N=14\n",
                  "wrong N");
    expect_reject("PHIPK v1 variant=paley p=13 k=3 M=5 N=14\n",
                  "paley with k != 2");
    expect_reject("PHIPK v1 variant=powerresidue p=abc k=3 M=5 N=13\n",
                  "non-integer p");
    expect_reject("PHIPK v1 q=13 variant=powerresidue k=3 M=5 N=13\n",
                  "misnamed field");
    expect_reject("PHIPK v1 variant=powerresidue p=13 k=3 M=5 N=13\n",
                  "header only, no rows");

    // truncated after two rows
    size_t pos = 0;
    for (int lines = 0; lines < 3; ++lines) pos = good.find('\n', pos) + 1;
    expect_reject(good.substr(0, pos), "truncated rows");

    // row with a missing entry
    {
        std::string text = good;
        const size_t row_start = text.find('\n') + 1;
        const size_t row_end = text.find('\n', row_start);
        std::string row = text.substr(row_start, row_end - row_start);
        row = row.substr(0, row.rfind(' '));
        expect_reject(text.substr(0, row_start) + row +
                          text.substr(row_end),
                      "short row");
    }

    // row with an extra entry
    {
        std::string text = good;
        const size_t row_end = text.find('\n', text.find('\n') + 1);
        expect_reject(text.substr(0, row_end) + " 0:0" + text.substr(row_end),
                      "long row");
    }

    // malformed entries
    {
        std::string text = good;
        const size_t row_start = text.find('\n') + 1;
        const size_t tok_end = text.find(' ', row_start);
        expect_reject(text.substr(0, row_start) + "oops" +
                          text.substr(tok_end),
                      "no colon");
        expect_reject(text.substr(0, row_start) + "1.0:zz" +
                          text.substr(tok_end),
                      "bad imaginary part");
        expect_reject(text.substr(0, row_start) + "1.0:2.0:3.0" +
                          text.substr(tok_end),
                      "double colon");
        // replacing a top-row entry by 0:0 breaks the unit-norm check
        expect_reject(text.substr(0, row_start) + "0:0" +
                          text.substr(tok_end),
                      "non-unit column");
    }
}
