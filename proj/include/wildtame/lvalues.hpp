#pragma once

#include "wildtame/quadratic.hpp"

namespace wildtame {

using Rational = boost::multiprecision::cpp_rational;

struct DirichletCharacter {
    Int D;          /* fundamental discriminant, or 1 for the trivial character */
    Int conductor;  /* |D| */

    int operator()(const Int &n) const { return kronecker(D, n); }
    bool odd() const { return D < 0; }
};

inline DirichletCharacter kronecker_character(const Int &D) {
    if (D != 1 && !is_fundamental_discriminant(D))
        throw std::invalid_argument("kronecker_character: discriminant not fundamental");
    return {D, abs_int(D)};
}

/* B2,chi = f * sum over a in [1, f] of chi(a) B2(a/f), B2(x) = x^2 - x + 1/6;
 * exact via the three integer sums sum chi(a) a^k, k = 0, 1, 2 */
inline Rational bernoulli_b2_chi(const DirichletCharacter &chi) {
    const Int &f = chi.conductor;
    Int s0 = 0, s1 = 0, s2 = 0;
    for (Int a = 1; a <= f; ++a) {
        int c = chi(a);
        if (c == 0) continue;
        s0 += c;
        s1 += c * a;
        s2 += c * a * a;
    }
    return Rational(s2, f) - Rational(s1) + Rational(f * s0, 6);
}

/* zeta_k(-1) = zeta(-1) L(-1, chi_D) = B2,chi_D / 24 for k real quadratic */
inline Rational zeta_k_minus1(const Int &D) {
    if (D <= 0) throw std::invalid_argument("Birch-Tate order path requires totally real k");
    if (D == 1) throw std::invalid_argument("zeta_k_minus1: base field is not quadratic");
    Rational z = bernoulli_b2_chi(kronecker_character(D)) / 24;
    if (!(z > 0)) throw std::runtime_error("zeta_k_minus1: value not positive");
    return z;
}

/* v3 of the K2 order for delta in the admissible family: delta > 0,
 * square-free, delta = -3 mod 9; for these fields v3(w2) = v3(24) so the
 * exponent is v3(24 zeta_k(-1)) */
inline long k2_order_3part(const Int &delta) {
    if (delta <= 0 || mod_floor(delta, 9) != 6)
        throw std::invalid_argument("k2_order_3part: delta outside the admissible family");
    QuadDiscriminant q = fundamental_discriminant(delta);
    Rational b = 24 * zeta_k_minus1(q.D);
    if (b < 0) b = -b;
    Int den = boost::multiprecision::denominator(b);
    if (mod_floor(den, 3) == 0)
        throw std::runtime_error("k2_order_3part: data error: denominator divisible by 3");
    return valuation(boost::multiprecision::numerator(b), 3);
}

}  // namespace wildtame
