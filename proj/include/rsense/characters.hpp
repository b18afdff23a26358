#pragma once

// Additive and multiplicative characters of F_p, Gauss sums, and the
// decomposition of the k-th power Gauss sum
//
//   sum_x psi(a x^k) = sum_{h=1}^{k-1} chi_k^{-h}(a) G(chi_k^h),   a != 0,
//
// where chi_k is the multiplicative character of order k fixed by the
// field's generator and G(chi) = sum_x chi(x) psi(x).

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rsense/field.hpp"

namespace rsense {

using cd = std::complex<double>;

// exp(2*pi*i * num/den) with the fraction reduced into [0,1) by exact
// integer arithmetic first, so equal angles give bit-identical values.
inline cd unit_root(i64 num, i64 den) {
    if (den <= 0) throw std::invalid_argument("unit_root: den must be positive");
    i64 r = num % den;
    if (r < 0) r += den;
    return std::polar(1.0, 2.0 * std::numbers::pi *
                               (static_cast<double>(r) / static_cast<double>(den)));
}

// psi(x) = exp(2*pi*i*x/p).
inline cd additive_char(const PrimeField& field, i64 x) {
    return unit_root(field.reduce(x), field.modulus());
}

// chi_k^h: the multiplicative character of F_p^* sending generator^t to
// exp(2*pi*i*h*t/k), extended by chi(0) = 0. Requires k | p-1 and
// 2 <= k <= p-2; h is taken modulo k (h = 0 mod k gives the trivial
// character, which callers that need a non-trivial one must reject).
class MultChar {
public:
    MultChar(const PrimeField& field, i64 k, i64 h) : field_(&field), k_(k) {
        const i64 p = field.modulus();
        if (k < 2 || k > p - 2 || (p - 1) % k != 0)
            throw std::invalid_argument(
                "MultChar: order divisor k must satisfy k | p-1 and 2 <= k <= p-2"
                " (got k=" + std::to_string(k) + ", p=" + std::to_string(p) + ")");
        h_ = h % k;
        if (h_ < 0) h_ += k;
    }

    cd operator()(i64 x) const {
        const i64 r = field_->reduce(x);
        if (r == 0) return cd(0.0, 0.0);
        return unit_root(h_ * field_->dlog(r), k_);
    }

    bool is_trivial() const { return h_ == 0; }
    i64 order_divisor() const { return k_; }
    i64 exponent() const { return h_; }
    const PrimeField& field() const { return *field_; }

private:
    const PrimeField* field_;
    i64 k_;
    i64 h_;
};

// G(a, chi) = sum_{x in F_p} chi(x) psi(a x), summed in the fixed order
// x = 0, 1, ..., p-1.
inline cd gauss_sum(const MultChar& chi, i64 a) {
    const PrimeField& f = chi.field();
    const i64 p = f.modulus();
    const i64 ar = f.reduce(a);
    cd s(0.0, 0.0);
    for (i64 x = 1; x < p; ++x)
        s += chi(x) * unit_root(ar * x, p);
    return s;
}

// G_k(a) = sum_{x in F_p} psi(a x^k) for k | p-1 (k = 1 and k = p-1 allowed).
inline cd power_gauss_sum(const PrimeField& field, i64 k, i64 a) {
    const i64 p = field.modulus();
    if (k < 1 || (p - 1) % k != 0)
        throw std::invalid_argument(
            "power_gauss_sum: k must be a positive divisor of p-1");
    const i64 ar = field.reduce(a);
    cd s(0.0, 0.0);
    for (i64 x = 0; x < p; ++x) {
        const i64 xk = static_cast<i64>(pow_mod(
            static_cast<u64>(x), static_cast<u64>(k), static_cast<u64>(p)));
        s += unit_root(ar * xk, p);
    }
    return s;
}

struct GaussIdentityResult {
    cd power_sum;    // G_k(a) by direct summation
    cd char_form;    // sum_h chi_k^{-h}(a) G(chi_k^h)
    cd direct_form;  // sum_h G(a, chi_k^h)
    double residual; // |power_sum - char_form|
    double form_gap; // |direct_form - char_form|
};

// Checks the character decomposition of G_k(a) for a != 0. Both equivalent
// right-hand sides are evaluated; `residual` is the distance between the
// direct power sum and the twisted form, `form_gap` between the two forms.
inline GaussIdentityResult verify_gauss_identity(const PrimeField& field, i64 k,
                                                 i64 a) {
    const i64 p = field.modulus();
    if (field.reduce(a) == 0)
        throw std::invalid_argument(
            "verify_gauss_identity: requires a in F_p^* (a != 0 mod p)");
    if (k < 1 || k > p - 2 || (p - 1) % k != 0)
        throw std::invalid_argument(
            "verify_gauss_identity: k must be a divisor of p-1 with "
            "1 <= k <= p-2, so that the order-k character family exists");

    GaussIdentityResult out{};
    out.power_sum = power_gauss_sum(field, k, a);
    out.char_form = cd(0.0, 0.0);
    out.direct_form = cd(0.0, 0.0);
    for (i64 h = 1; h < k; ++h) {
        MultChar chi(field, k, h);
        MultChar chi_neg(field, k, -h);
        out.char_form += chi_neg(a) * gauss_sum(chi, 1);
        out.direct_form += gauss_sum(chi, a);
    }
    out.residual = std::abs(out.power_sum - out.char_form);
    out.form_gap = std::abs(out.direct_form - out.char_form);
    return out;
}

}  // namespace rsense
