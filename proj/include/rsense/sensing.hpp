#pragma once

// The deterministic sensing matrix Phi_p^(k) built from k-th power residues:
//
//   M = (p + k - 1) / k rows, N = p columns; column a (a = 0..p-1) is
//     row 0:    1/sqrt(p)
//     row 1+l:  sqrt(k/p) * psi(b_l * a),  b_1 < ... < b_{(p-1)/k} the k-th
//                                          power residues mod p.
//
// The Paley variant extends Phi_p^(2) with one extra column
// ((sqrt(-1))^r, 0, ..., 0), r = 0 for p = 1 mod 4 and r = 1 for p = 3 mod 4,
// giving an (p+1)/2 x (p+1) matrix.
//
// Matrices are serialized in the PHIPK v1 text format:
//   PHIPK v1 variant=<powerresidue|paley> p=<p> k=<k> M=<M> N=<N>
// followed by M lines of N entries "re:im" (17 significant digits,
// space-separated). The reader re-validates dimensions and unit column
// norms (tolerance 1e-6).

#include <cmath>
#include <complex>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rsense/characters.hpp"
#include "rsense/field.hpp"

namespace rsense {

enum class MatrixVariant { PowerResidue, Paley };

inline std::string variant_name(MatrixVariant v) {
    return v == MatrixVariant::PowerResidue ? "powerresidue" : "paley";
}

class SensingMatrix {
public:
    // Entry budget guard; M*N complex doubles are held in memory.
    static constexpr i64 kMaxEntries = 50'000'000;

    static SensingMatrix power_residue(const PrimeField& field, i64 k) {
        const i64 p = field.modulus();
        if (k < 1 || k > p - 2)
            throw std::invalid_argument(
                "SensingMatrix: k must satisfy 1 <= k <= p-2");
        if ((p - 1) % k != 0)
            throw std::invalid_argument(
                "SensingMatrix: k must divide p-1 (got k=" + std::to_string(k) +
                ", p=" + std::to_string(p) + ")");
        const ResidueSet residues = kth_power_residues(field, k);
        const i64 m = (p + k - 1) / k;
        SensingMatrix a;
        a.init(MatrixVariant::PowerResidue, p, k, m, p);
        const double top = 1.0 / std::sqrt(static_cast<double>(p));
        const double amp = std::sqrt(static_cast<double>(k) /
                                     static_cast<double>(p));
        for (i64 col = 0; col < p; ++col) {
            cd* c = a.col_ptr(col);
            c[0] = cd(top, 0.0);
            for (i64 l = 0; l < m - 1; ++l) {
                const i64 b = residues.elements[static_cast<size_t>(l)];
                c[1 + l] = amp * unit_root(b * col, p);
            }
        }
        a.row_labels_.push_back(0);
        a.row_labels_.insert(a.row_labels_.end(), residues.elements.begin(),
                             residues.elements.end());
        for (i64 col = 0; col < p; ++col) a.column_labels_.push_back(col);
        return a;
    }

    static SensingMatrix paley(const PrimeField& field) {
        const i64 p = field.modulus();
        SensingMatrix base = power_residue(field, 2);
        SensingMatrix a;
        a.init(MatrixVariant::Paley, p, 2, base.rows(), p + 1);
        for (i64 col = 0; col < p; ++col) {
            const cd* src = base.col_ptr(col);
            cd* dst = a.col_ptr(col);
            for (i64 r = 0; r < base.rows(); ++r) dst[r] = src[r];
        }
        cd* last = a.col_ptr(p);
        last[0] = (p % 4 == 1) ? cd(1.0, 0.0) : cd(0.0, 1.0);
        for (i64 r = 1; r < a.rows(); ++r) last[r] = cd(0.0, 0.0);
        a.row_labels_ = base.row_labels_;
        a.column_labels_ = base.column_labels_;
        a.column_labels_.push_back(-1);  // the appended column has no label
        return a;
    }

    i64 rows() const { return rows_; }
    i64 cols() const { return cols_; }
    i64 prime() const { return p_; }
    i64 power() const { return k_; }
    MatrixVariant variant() const { return variant_; }

    // Row labels: 0 followed by the residues b_l. Column labels: the field
    // elements a = 0..p-1 (and -1 for the Paley extension column).
    const std::vector<i64>& row_labels() const { return row_labels_; }
    const std::vector<i64>& column_labels() const { return column_labels_; }

    std::span<const cd> column(i64 j) const {
        check_col(j);
        return {data_.data() + static_cast<size_t>(j * rows_),
                static_cast<size_t>(rows_)};
    }

    cd entry(i64 r, i64 c) const {
        check_col(c);
        if (r < 0 || r >= rows_)
            throw std::out_of_range("SensingMatrix: row index out of range");
        return data_[static_cast<size_t>(c * rows_ + r)];
    }

    const std::vector<cd>& data() const { return data_; }

    // <phi_i, phi_j> = sum_m phi_i[m] * conj(phi_j[m]).
    cd inner_product(i64 i, i64 j) const {
        check_col(i);
        check_col(j);
        const cd* a = col_ptr_const(i);
        const cd* b = col_ptr_const(j);
        cd s(0.0, 0.0);
        for (i64 m = 0; m < rows_; ++m) s += a[m] * std::conj(b[m]);
        return s;
    }

    void write(std::ostream& os) const {
        os << "PHIPK v1 variant=" << variant_name(variant_) << " p=" << p_
           << " k=" << k_ << " M=" << rows_ << " N=" << cols_ << "\n";
        for (i64 r = 0; r < rows_; ++r) {
            for (i64 c = 0; c < cols_; ++c) {
                if (c) os << ' ';
                const cd v = data_[static_cast<size_t>(c * rows_ + r)];
                os << fmt17(v.real()) << ':' << fmt17(v.imag());
            }
            os << "\n";
        }
    }

    static SensingMatrix read(std::istream& is) {
        std::string line;
        if (!std::getline(is, line))
            throw std::runtime_error("PHIPK read: missing header line");
        std::istringstream hs(line);
        std::string magic, version;
        hs >> magic >> version;
        if (magic != "PHIPK" || version != "v1")
            throw std::runtime_error("PHIPK read: bad magic (expected 'PHIPK v1')");
        std::string vars, ps, ks, ms, ns;
        hs >> vars >> ps >> ks >> ms >> ns;
        const std::string var = header_field(vars, "variant");
        const i64 p = header_int(ps, "p");
        const i64 k = header_int(ks, "k");
        const i64 m = header_int(ms, "M");
        const i64 n = header_int(ns, "N");
        MatrixVariant variant;
        if (var == "powerresidue")
            variant = MatrixVariant::PowerResidue;
        else if (var == "paley")
            variant = MatrixVariant::Paley;
        else
            throw std::runtime_error("PHIPK read: unknown variant '" + var + "'");
        if (!is_prime(static_cast<u64>(p)) || p < 3)
            throw std::runtime_error("PHIPK read: p is not an odd prime");
        if (k < 1 || (p - 1) % k != 0)
            throw std::runtime_error("PHIPK read: k does not divide p-1");
        const i64 want_m = (p + k - 1) / k;
        const i64 want_n = variant == MatrixVariant::Paley ? p + 1 : p;
        if (variant == MatrixVariant::Paley && k != 2)
            throw std::runtime_error("PHIPK read: paley variant requires k=2");
        if (m != want_m || n != want_n)
            throw std::runtime_error(
                "PHIPK read: header dimensions M=" + std::to_string(m) + " N=" +
                std::to_string(n) + " do not match p, k (expected M=" +
                std::to_string(want_m) + " N=" + std::to_string(want_n) + ")");

        SensingMatrix a;
        a.init(variant, p, k, m, n);
        for (i64 r = 0; r < m; ++r) {
            if (!std::getline(is, line))
                throw std::runtime_error("PHIPK read: truncated at row " +
                                         std::to_string(r));
            std::istringstream ls(line);
            for (i64 c = 0; c < n; ++c) {
                std::string tok;
                if (!(ls >> tok))
                    throw std::runtime_error("PHIPK read: row " + std::to_string(r) +
                                             " has fewer than N entries");
                const size_t colon = tok.find(':');
                if (colon == std::string::npos)
                    throw std::runtime_error(
                        "PHIPK read: malformed entry '" + tok + "'");
                size_t used = 0;
                double re, im;
                try {
                    re = std::stod(tok.substr(0, colon), &used);
                    if (used != colon) throw std::invalid_argument("");
                    im = std::stod(tok.substr(colon + 1), &used);
                    if (used != tok.size() - colon - 1)
                        throw std::invalid_argument("");
                } catch (const std::exception&) {
                    throw std::runtime_error(
                        "PHIPK read: malformed entry '" + tok + "'");
                }
                a.data_[static_cast<size_t>(c * m + r)] = cd(re, im);
            }
            std::string extra;
            if (ls >> extra)
                throw std::runtime_error("PHIPK read: row " + std::to_string(r) +
                                         " has more than N entries");
        }
        for (i64 c = 0; c < n; ++c) {
            double nn = 0.0;
            const cd* col = a.col_ptr(c);
            for (i64 r = 0; r < m; ++r) nn += std::norm(col[r]);
            if (std::abs(std::sqrt(nn) - 1.0) > 1e-6)
                throw std::runtime_error(
                    "PHIPK read: column " + std::to_string(c) +
                    " is not unit-norm (|norm-1| > 1e-6)");
        }
        a.rebuild_labels();
        return a;
    }

    void save(const std::string& path) const {
        std::ofstream os(path);
        if (!os) throw std::runtime_error("cannot open for writing: " + path);
        write(os);
        if (!os) throw std::runtime_error("write failed: " + path);
    }

    static SensingMatrix load(const std::string& path) {
        std::ifstream is(path);
        if (!is) throw std::runtime_error("cannot open for reading: " + path);
        return read(is);
    }

private:
    void init(MatrixVariant v, i64 p, i64 k, i64 m, i64 n) {
        if (m * n > kMaxEntries)
            throw std::invalid_argument(
                "SensingMatrix: M*N exceeds the in-memory entry budget");
        variant_ = v;
        p_ = p;
        k_ = k;
        rows_ = m;
        cols_ = n;
        data_.assign(static_cast<size_t>(m * n), cd(0.0, 0.0));
    }

    void rebuild_labels() {
        row_labels_.clear();
        column_labels_.clear();
        PrimeField field(p_);
        const ResidueSet residues = kth_power_residues(field, k_);
        row_labels_.push_back(0);
        row_labels_.insert(row_labels_.end(), residues.elements.begin(),
                           residues.elements.end());
        for (i64 c = 0; c < p_; ++c) column_labels_.push_back(c);
        if (variant_ == MatrixVariant::Paley) column_labels_.push_back(-1);
    }

    cd* col_ptr(i64 c) { return data_.data() + static_cast<size_t>(c * rows_); }
    const cd* col_ptr_const(i64 c) const {
        return data_.data() + static_cast<size_t>(c * rows_);
    }
    void check_col(i64 j) const {
        if (j < 0 || j >= cols_)
            throw std::out_of_range("SensingMatrix: column index out of range");
    }

    static std::string header_field(const std::string& tok,
                                    const std::string& key) {
        const std::string prefix = key + "=";
        if (tok.rfind(prefix, 0) != 0)
            throw std::runtime_error("PHIPK read: expected '" + key +
                                     "=...' in header, got '" + tok + "'");
        return tok.substr(prefix.size());
    }

    static i64 header_int(const std::string& tok, const std::string& key) {
        const std::string v = header_field(tok, key);
        try {
            size_t used = 0;
            const i64 x = std::stoll(v, &used);
            if (used != v.size()) throw std::invalid_argument("");
            return x;
        } catch (const std::exception&) {
            throw std::runtime_error("PHIPK read: non-integer header field '" +
                                     key + "=" + v + "'");
        }
    }

    MatrixVariant variant_ = MatrixVariant::PowerResidue;
    i64 p_ = 0;
    i64 k_ = 0;
    i64 rows_ = 0;
    i64 cols_ = 0;
    std::vector<cd> data_;
    std::vector<i64> row_labels_;
    std::vector<i64> column_labels_;
};

struct CoherencePoint {
    double mu = 0.0;
    i64 i = 0;  // witness column pair, i < j
    i64 j = 0;
};

// mu(Phi) = max_{i<j} |<phi_i, phi_j>|; the witness is the first maximizing
// pair in lexicographic order.
inline CoherencePoint coherence(const SensingMatrix& a) {
    if (a.cols() < 2)
        throw std::invalid_argument("coherence: needs at least two columns");
    CoherencePoint best{-1.0, 0, 1};
    for (i64 i = 0; i + 1 < a.cols(); ++i) {
        for (i64 j = i + 1; j < a.cols(); ++j) {
            const double v = std::abs(a.inner_product(i, j));
            if (v > best.mu) best = {v, i, j};
        }
    }
    return best;
}

// sqrt((N-M) / (M(N-1))), the Welch lower bound on coherence.
inline double welch_bound(i64 m, i64 n) {
    if (m < 1 || n < m)
        throw std::invalid_argument("welch_bound: requires 1 <= M <= N");
    if (n == 1) return 0.0;
    return std::sqrt(static_cast<double>(n - m) /
                     (static_cast<double>(m) * static_cast<double>(n - 1)));
}

inline double compression_ratio(const SensingMatrix& a) {
    return static_cast<double>(a.cols()) / static_cast<double>(a.rows());
}

}  // namespace rsense
