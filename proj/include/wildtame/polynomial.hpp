#pragma once

#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "wildtame/int_matrix.hpp"
#include "wildtame/integer.hpp"

namespace wildtame {

/* coefficients low-to-high; empty vector is the zero polynomial */
using Poly = std::vector<Int>;

inline Poly poly_norm(Poly a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
    return a;
}

inline long poly_deg(const Poly &a) { return static_cast<long>(a.size()) - 1; }

inline bool poly_is_monic(const Poly &a) { return !a.empty() && a.back() == 1; }

inline Poly poly_add(const Poly &a, const Poly &b) {
    Poly out(std::max(a.size(), b.size()), Int(0));
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return poly_norm(out);
}

inline Poly poly_neg(const Poly &a) {
    Poly out = a;
    for (Int &c : out) c = -c;
    return out;
}

inline Poly poly_sub(const Poly &a, const Poly &b) { return poly_add(a, poly_neg(b)); }

inline Poly poly_mul(const Poly &a, const Poly &b) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, Int(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return poly_norm(out);
}

inline Poly poly_scale(const Poly &a, const Int &c) {
    if (c == 0) return {};
    Poly out = a;
    for (Int &x : out) x *= c;
    return out;
}

inline Int poly_eval(const Poly &a, const Int &x) {
    Int v = 0;
    for (long i = poly_deg(a); i >= 0; --i) v = v * x + a[i];
    return v;
}

inline Poly poly_derivative(const Poly &a) {
    if (a.size() <= 1) return {};
    Poly out(a.size() - 1);
    for (std::size_t i = 1; i < a.size(); ++i) out[i - 1] = Int(i) * a[i];
    return poly_norm(out);
}

/* f(x + t) by Horner in the shifted variable */
inline Poly poly_translate(const Poly &f, const Int &t) {
    Poly out;
    for (long i = poly_deg(f); i >= 0; --i) {
        Poly nxt(out.size() + 1, Int(0));
        for (std::size_t j = 0; j < out.size(); ++j) {
            nxt[j + 1] += out[j];
            nxt[j] += t * out[j];
        }
        nxt[0] += f[i];
        out = nxt;
    }
    return poly_norm(out);
}

/* (-1)^deg f(-x); monic stays monic */
inline Poly poly_mirror(const Poly &f) {
    Poly out = f;
    long n = poly_deg(f);
    for (long i = 0; i <= n; ++i)
        if ((n - i) % 2 != 0) out[i] = -out[i];
    return out;
}

inline Poly poly_mod_coeffs(Poly a, const Int &m) {
    for (Int &c : a) c = mod_floor(c, m);
    return poly_norm(a);
}

/* division by a monic divisor; exact over Z, coefficientwise mod m when m > 0 */
inline std::pair<Poly, Poly> poly_divmod_monic(Poly a, const Poly &b, const Int &m = 0) {
    if (!poly_is_monic(b)) throw std::invalid_argument("poly_divmod_monic: divisor not monic");
    long db = poly_deg(b);
    if (poly_deg(a) < db) return {{}, m > 0 ? poly_mod_coeffs(a, m) : poly_norm(a)};
    Poly q(a.size() - db, Int(0));
    for (long i = poly_deg(a); i >= db; --i) {
        Int c = m > 0 ? mod_floor(a[i], m) : a[i];
        if (c == 0) {
            a[i] = 0;
            continue;
        }
        q[i - db] = c;
        for (long j = 0; j <= db; ++j) {
            a[i - db + j] -= c * b[j];
            if (m > 0) a[i - db + j] = mod_floor(a[i - db + j], m);
        }
    }
    if (m > 0) return {poly_norm(q), poly_mod_coeffs(a, m)};
    return {poly_norm(q), poly_norm(a)};
}

inline Poly poly_mulmod(const Poly &a, const Poly &b, const Poly &f, const Int &p) {
    Poly prod = poly_mod_coeffs(poly_mul(a, b), p);
    return poly_divmod_monic(prod, f, p).second;
}

inline Poly poly_powmod(Poly base, Int e, const Poly &f, const Int &p) {
    Poly r{Int(1)};
    base = poly_divmod_monic(poly_mod_coeffs(base, p), f, p).second;
    while (e > 0) {
        if (mod_floor(e, 2) == 1) r = poly_mulmod(r, base, f, p);
        base = poly_mulmod(base, base, f, p);
        e /= 2;
    }
    return r;
}

inline Poly poly_make_monic_mod(Poly a, const Int &p) {
    a = poly_mod_coeffs(a, p);
    if (a.empty()) return a;
    Int inv = mod_inverse(a.back(), p);
    for (Int &c : a) c = mod_floor(c * inv, p);
    return a;
}

inline Poly poly_gcd_mod(Poly a, Poly b, const Int &p) {
    a = poly_mod_coeffs(a, p);
    b = poly_mod_coeffs(b, p);
    while (!b.empty()) {
        Poly r = poly_divmod_monic(a, poly_make_monic_mod(b, p), p).second;
        a = b;
        b = r;
    }
    return poly_make_monic_mod(a, p);
}

/* fraction-free determinant; destroys its argument */
inline Int det_bareiss(IntMatrix a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("det_bareiss: matrix not square");
    std::size_t n = a.rows();
    if (n == 0) return 1;
    Int prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a.at(k, k) == 0) {
            std::size_t piv = k + 1;
            while (piv < n && a.at(piv, k) == 0) ++piv;
            if (piv == n) return 0;
            for (std::size_t j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(piv, j));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a.at(i, j) = (a.at(k, k) * a.at(i, j) - a.at(i, k) * a.at(k, j)) / prev;
        prev = a.at(k, k);
    }
    return sign * a.at(n - 1, n - 1);
}

/* Sylvester resultant; Res(f, g) = lc(g)^deg f prod f(beta_j) */
inline Int resultant(const Poly &f, const Poly &g) {
    Poly a = poly_norm(f), b = poly_norm(g);
    long m = poly_deg(a), n = poly_deg(b);
    if (m < 0 || n < 0) return 0;
    if (m == 0) return pow_int(a[0], static_cast<unsigned long>(n));
    if (n == 0) return pow_int(b[0], static_cast<unsigned long>(m));
    IntMatrix s(m + n, m + n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j <= m; ++j) s.at(i, i + j) = a[m - j];
    for (long i = 0; i < m; ++i)
        for (long j = 0; j <= n; ++j) s.at(n + i, i + j) = b[n - j];
    return det_bareiss(std::move(s));
}

inline Int poly_discriminant(const Poly &f) {
    long n = poly_deg(f);
    if (n < 1) throw std::invalid_argument("poly_discriminant: degree must be positive");
    if (!poly_is_monic(f)) throw std::invalid_argument("poly_discriminant: polynomial not monic");
    Int r = resultant(f, poly_derivative(f));
    return (n * (n - 1) / 2) % 2 == 0 ? r : Int(-r);
}

namespace detail {

/* distinct-degree splitting of a monic squarefree polynomial mod p */
inline std::vector<std::pair<Poly, long>> ddf_mod(const Poly &f, const Int &p) {
    std::vector<std::pair<Poly, long>> out;
    Poly rest = f;
    Poly h{Int(0), Int(1)};  /* x */
    long d = 0;
    while (poly_deg(rest) > 0) {
        ++d;
        if (2 * d > poly_deg(rest)) {
            out.emplace_back(rest, poly_deg(rest));
            break;
        }
        h = poly_powmod(h, p, rest, p);
        Poly g = poly_gcd_mod(poly_sub(h, Poly{Int(0), Int(1)}), rest, p);
        if (poly_deg(g) > 0) {
            out.emplace_back(g, d);
            rest = poly_divmod_monic(rest, g, p).first;
            rest = poly_mod_coeffs(rest, p);
            h = poly_divmod_monic(h, rest, p).second;
        }
    }
    return out;
}

/* equal-degree splitting, Cantor-Zassenhaus, p odd; deterministic seed */
inline void edf_mod(const Poly &g, long d, const Poly &whole, const Int &p,
                    std::mt19937_64 &rng, std::vector<Poly> &out) {
    long r = poly_deg(g) / d;
    if (r == 1) {
        out.push_back(g);
        return;
    }
    Int exponent = (pow_int(p, static_cast<unsigned long>(d)) - 1) / 2;
    long pl = to_long(p);
    for (;;) {
        Poly a(static_cast<std::size_t>(poly_deg(g)), Int(0));
        for (Int &c : a) c = Int(static_cast<long>(rng() % static_cast<unsigned long>(pl)));
        a = poly_norm(a);
        if (poly_deg(a) < 1) continue;
        Poly b = poly_powmod(a, exponent, g, p);
        b = poly_sub(b, Poly{Int(1)});
        Poly h = poly_gcd_mod(b, g, p);
        if (poly_deg(h) > 0 && poly_deg(h) < poly_deg(g)) {
            edf_mod(h, d, whole, p, rng, out);
            Poly q = poly_mod_coeffs(poly_divmod_monic(g, h, p).first, p);
            edf_mod(q, d, whole, p, rng, out);
            return;
        }
    }
}

inline bool poly_lex_less(const Poly &a, const Poly &b) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (std::size_t i = a.size(); i-- > 0;)
        if (a[i] != b[i]) return a[i] < b[i];
    return false;
}

}  // namespace detail

/* monic irreducible factors of f mod p; requires f squarefree mod p, p an odd prime */
inline std::vector<Poly> factor_mod_p(const Poly &f, const Int &p) {
    if (!is_prime(p) || p == 2) throw std::invalid_argument("factor_mod_p: p must be an odd prime");
    Poly fm = poly_make_monic_mod(f, p);
    if (poly_deg(fm) < 1) throw std::invalid_argument("factor_mod_p: degree dropped mod p");
    if (poly_deg(poly_gcd_mod(fm, poly_derivative(fm), p)) != 0)
        throw std::invalid_argument("factor_mod_p: polynomial not squarefree mod p");
    std::vector<Poly> out;
    std::mt19937_64 rng(0x77696c64656bULL ^ (to_long(p) * 1000003ULL) ^ poly_deg(fm));
    for (auto &[g, d] : detail::ddf_mod(fm, p)) detail::edf_mod(g, d, fm, p, rng, out);
    std::sort(out.begin(), out.end(), detail::poly_lex_less);
    return out;
}

/* squarefree decomposition mod p: pairwise coprime monic (g, m) with
 * f = prod g^m up to the leading unit */
inline std::vector<std::pair<Poly, long>> squarefree_decomposition_mod(const Poly &f0,
                                                                       const Int &p,
                                                                       long mult = 1) {
    Poly f = poly_make_monic_mod(f0, p);
    std::vector<std::pair<Poly, long>> out;
    if (poly_deg(f) < 1) return out;
    Poly c = poly_gcd_mod(f, poly_derivative(f), p);
    Poly w = poly_mod_coeffs(poly_divmod_monic(f, c, p).first, p);
    long i = 1;
    while (poly_deg(w) > 0) {
        Poly y = poly_gcd_mod(w, c, p);
        Poly z = poly_mod_coeffs(poly_divmod_monic(w, y, p).first, p);
        if (poly_deg(z) > 0) out.emplace_back(z, mult * i);
        w = y;
        c = poly_mod_coeffs(poly_divmod_monic(c, y, p).first, p);
        ++i;
    }
    if (poly_deg(c) > 0) {
        /* remaining part is a p-th power: c(x) = v(x^p) */
        long pl = to_long(p);
        Poly v(poly_deg(c) / pl + 1, Int(0));
        for (long j = 0; j <= poly_deg(c); ++j) {
            if (c[j] != 0 && j % pl != 0)
                throw std::runtime_error("squarefree_decomposition_mod: malformed p-th power");
            if (j % pl == 0) v[j / pl] = c[j];
        }
        auto rec = squarefree_decomposition_mod(v, p, mult * pl);
        out.insert(out.end(), rec.begin(), rec.end());
    }
    return out;
}

namespace detail {

/* trial division factorization mod a tiny prime, multiplicities included */
inline std::vector<std::pair<Poly, long>> factor_mod_tiny(const Poly &f0, const Int &p) {
    Poly f = poly_make_monic_mod(f0, p);
    std::vector<std::pair<Poly, long>> out;
    long pl = to_long(p);
    for (long d = 1; 2 * d <= poly_deg(f); ++d) {
        Int count = pow_int(p, static_cast<unsigned long>(d));
        for (Int code = 0; code < count; ++code) {
            Poly g(d + 1, Int(0));
            Int c = code;
            for (long i = 0; i < d; ++i) {
                g[i] = mod_floor(c, p);
                c /= pl;
            }
            g[d] = 1;
            long e = 0;
            for (;;) {
                auto [q, r] = poly_divmod_monic(f, g, p);
                if (!r.empty()) break;
                f = q;
                ++e;
            }
            if (e > 0) out.emplace_back(g, e);
            if (poly_deg(f) < 2 * d) break;
        }
        if (poly_deg(f) < 2 * (d + 1)) break;
    }
    if (poly_deg(f) > 0) out.emplace_back(f, 1);
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
        return poly_lex_less(a.first, b.first);
    });
    return out;
}

}  // namespace detail

/* monic irreducible factors of f mod p with multiplicities; any prime p */
inline std::vector<std::pair<Poly, long>> factor_mod_p_full(const Poly &f, const Int &p) {
    if (!is_prime(p)) throw std::invalid_argument("factor_mod_p_full: p must be prime");
    if (poly_deg(poly_make_monic_mod(f, p)) < 1)
        throw std::invalid_argument("factor_mod_p_full: degree dropped mod p");
    if (p == 2) return detail::factor_mod_tiny(f, p);
    std::vector<std::pair<Poly, long>> out;
    for (auto &[g, m] : squarefree_decomposition_mod(f, p))
        for (const Poly &h : factor_mod_p(g, p)) out.emplace_back(h, m);
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) {
        return detail::poly_lex_less(a.first, b.first);
    });
    return out;
}

namespace detail {

/* one quadratic Hensel step: f = g h, s g + t h = 1 (mod m) -> same mod m^2 */
inline void hensel_step(const Poly &f, Poly &g, Poly &h, Poly &s, Poly &t, const Int &m) {
    Int m2 = m * m;
    Poly e = poly_mod_coeffs(poly_sub(f, poly_mul(g, h)), m2);
    auto [q, r] = poly_divmod_monic(poly_mod_coeffs(poly_mul(s, e), m2), h, m2);
    Poly gstar = poly_mod_coeffs(poly_add(poly_add(g, poly_mul(t, e)), poly_mul(q, g)), m2);
    Poly hstar = poly_mod_coeffs(poly_add(h, r), m2);
    Poly b = poly_mod_coeffs(
        poly_sub(poly_add(poly_mul(s, gstar), poly_mul(t, hstar)), Poly{Int(1)}), m2);
    auto [c, dd] = poly_divmod_monic(poly_mod_coeffs(poly_mul(s, b), m2), hstar, m2);
    s = poly_mod_coeffs(poly_sub(s, dd), m2);
    t = poly_mod_coeffs(poly_sub(poly_sub(t, poly_mul(t, b)), poly_mul(c, gstar)), m2);
    g = gstar;
    h = hstar;
}

/* extended gcd mod p for coprime a, b: u a + v b = 1 */
inline std::pair<Poly, Poly> poly_xgcd_mod(const Poly &a, const Poly &b, const Int &p) {
    Poly r0 = poly_mod_coeffs(a, p), r1 = poly_mod_coeffs(b, p);
    Poly u0{Int(1)}, u1{}, v0{}, v1{Int(1)};
    while (!r1.empty()) {
        Poly r1m = poly_make_monic_mod(r1, p);
        Int lead_inv = mod_inverse(r1.back(), p);
        auto [q, r] = poly_divmod_monic(r0, r1m, p);
        q = poly_mod_coeffs(poly_scale(q, lead_inv), p);
        Poly u2 = poly_mod_coeffs(poly_sub(u0, poly_mul(q, u1)), p);
        Poly v2 = poly_mod_coeffs(poly_sub(v0, poly_mul(q, v1)), p);
        r0 = r1;
        r1 = r;
        u0 = u1;
        u1 = u2;
        v0 = v1;
        v1 = v2;
    }
    if (poly_deg(r0) != 0) throw std::invalid_argument("poly_xgcd_mod: inputs not coprime");
    Int inv = mod_inverse(r0[0], p);
    return {poly_mod_coeffs(poly_scale(u0, inv), p), poly_mod_coeffs(poly_scale(v0, inv), p)};
}

/* lift the mod-p factorization of monic f to factors mod target = p^(2^j) */
inline std::vector<Poly> hensel_lift_tree(const Poly &f, const std::vector<Poly> &fac,
                                          const Int &p, const Int &target) {
    if (fac.size() == 1) return {poly_mod_coeffs(f, target)};
    std::size_t half = fac.size() / 2;
    std::vector<Poly> left(fac.begin(), fac.begin() + half);
    std::vector<Poly> right(fac.begin() + half, fac.end());
    Poly g{Int(1)}, h{Int(1)};
    for (const Poly &q : left) g = poly_mod_coeffs(poly_mul(g, q), p);
    for (const Poly &q : right) h = poly_mod_coeffs(poly_mul(h, q), p);
    auto [s, t] = poly_xgcd_mod(g, h, p);
    Int m = p;
    while (m < target) {
        hensel_step(poly_mod_coeffs(f, m * m), g, h, s, t, m);
        m *= m;
    }
    g = poly_mod_coeffs(g, target);
    h = poly_mod_coeffs(h, target);
    std::vector<Poly> out = hensel_lift_tree(g, left, p, target);
    std::vector<Poly> rr = hensel_lift_tree(h, right, p, target);
    out.insert(out.end(), rr.begin(), rr.end());
    return out;
}

inline Poly symmetric_residues(Poly a, const Int &m) {
    for (Int &c : a) {
        c = mod_floor(c, m);
        if (2 * c > m) c -= m;
    }
    return poly_norm(a);
}

}  // namespace detail

/* irreducible monic factors over Z of a monic squarefree polynomial */
inline std::vector<Poly> factor_z(const Poly &f0) {
    Poly f = poly_norm(f0);
    if (!poly_is_monic(f)) throw std::invalid_argument("factor_z: polynomial not monic");
    long n = poly_deg(f);
    if (n < 1) throw std::invalid_argument("factor_z: degree must be positive");
    if (n == 1) return {f};
    if (resultant(f, poly_derivative(f)) == 0)
        throw std::invalid_argument("factor_z: polynomial not squarefree");

    /* pick the odd prime with squarefree reduction and fewest modular factors */
    const long primes[] = {3,  5,  7,  11, 13, 17, 19, 23, 29, 31,
                           37, 41, 43, 47, 53, 59, 61, 67, 71, 73};
    std::vector<Poly> best;
    Int best_p = 0;
    int tried = 0;
    for (long pl : primes) {
        Int p(pl);
        Poly fm = poly_mod_coeffs(f, p);
        if (poly_deg(fm) != n) continue;
        if (poly_deg(poly_gcd_mod(fm, poly_derivative(fm), p)) != 0) continue;
        std::vector<Poly> fac = factor_mod_p(f, p);
        if (best.empty() || fac.size() < best.size()) {
            best = fac;
            best_p = p;
        }
        if (++tried == 5 || best.size() == 1) break;
    }
    if (best.empty()) throw std::runtime_error("factor_z: no usable prime found");
    if (best.size() == 1) return {f};

    /* Landau-Mignotte style bound on factor coefficients, then lift */
    Int norm2sq = 0;
    for (const Int &c : f) norm2sq += c * c;
    Int bound = pow_int(Int(2), static_cast<unsigned long>(n)) * (isqrt_int(norm2sq) + 1);
    Int target = best_p;
    while (target <= 2 * bound) target *= target;
    std::vector<Poly> lifted = detail::hensel_lift_tree(poly_mod_coeffs(f, target), best,
                                                        best_p, target);

    std::vector<Poly> out;
    std::vector<std::size_t> remaining(lifted.size());
    for (std::size_t i = 0; i < remaining.size(); ++i) remaining[i] = i;
    Poly rest = f;
    std::size_t s = 1;
    while (2 * s <= remaining.size()) {
        bool found = false;
        std::vector<std::size_t> idx(s);
        for (std::size_t i = 0; i < s; ++i) idx[i] = i;
        for (;;) {
            Poly cand{Int(1)};
            for (std::size_t i : idx) cand = poly_mod_coeffs(poly_mul(cand, lifted[remaining[i]]), target);
            cand = detail::symmetric_residues(cand, target);
            if (poly_is_monic(cand)) {
                auto [q, r] = poly_divmod_monic(rest, cand, Int(0));
                if (r.empty()) {
                    out.push_back(cand);
                    rest = q;
                    std::vector<std::size_t> keep;
                    for (std::size_t i = 0, j = 0; i < remaining.size(); ++i) {
                        if (j < s && idx[j] == i) {
                            ++j;
                            continue;
                        }
                        keep.push_back(remaining[i]);
                    }
                    remaining = keep;
                    found = true;
                    break;
                }
            }
            /* next s-subset */
            long pos = static_cast<long>(s) - 1;
            while (pos >= 0 && idx[pos] == remaining.size() - s + pos) --pos;
            if (pos < 0) break;
            ++idx[pos];
            for (std::size_t i = pos + 1; i < s; ++i) idx[i] = idx[i - 1] + 1;
        }
        if (!found) ++s;
    }
    if (poly_deg(rest) > 0) out.push_back(rest);
    std::sort(out.begin(), out.end(), detail::poly_lex_less);
    return out;
}

inline bool is_irreducible_z(const Poly &f0) {
    Poly f = poly_norm(f0);
    if (!poly_is_monic(f)) throw std::invalid_argument("is_irreducible_z: polynomial not monic");
    long n = poly_deg(f);
    if (n < 1) return false;
    if (n == 1) return true;
    if (resultant(f, poly_derivative(f)) == 0) return false;
    return factor_z(f).size() == 1;
}

/* Res_y(A(y), B(x, y)) by evaluation and interpolation; By[j] is the x-poly
 * coefficient of y^j and the top one must be a nonzero constant */
inline Poly resultant_y(const Poly &A, const std::vector<Poly> &By, long degx_bound) {
    if (By.empty() || poly_deg(By.back()) != 0 || By.back().empty())
        throw std::invalid_argument("resultant_y: leading y-coefficient must be a nonzero constant");
    long pts = degx_bound + 1;
    std::vector<Int> nodes, values;
    for (long k = 0; static_cast<long>(nodes.size()) < pts; ++k) {
        Int x0 = (k % 2 == 0) ? Int(k / 2) : Int(-(k / 2 + 1));
        Poly b(By.size());
        for (std::size_t j = 0; j < By.size(); ++j) b[j] = poly_eval(By[j], x0);
        nodes.push_back(x0);
        values.push_back(resultant(A, poly_norm(b)));
    }
    /* Newton interpolation over rationals, must come out integral */
    using Rat = boost::multiprecision::cpp_rational;
    std::vector<Rat> coef(pts);
    for (long i = 0; i < pts; ++i) coef[i] = Rat(values[i]);
    for (long j = 1; j < pts; ++j)
        for (long i = pts - 1; i >= j; --i)
            coef[i] = (coef[i] - coef[i - 1]) / Rat(nodes[i] - nodes[i - j]);
    std::vector<Rat> acc{coef[pts - 1]};
    for (long i = pts - 2; i >= 0; --i) {
        /* acc = acc * (x - nodes[i]) + coef[i] */
        std::vector<Rat> nxt(acc.size() + 1);
        for (std::size_t j = 0; j < acc.size(); ++j) {
            nxt[j + 1] += acc[j];
            nxt[j] -= Rat(nodes[i]) * acc[j];
        }
        nxt[0] += coef[i];
        acc = nxt;
    }
    Poly out(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        if (boost::multiprecision::denominator(acc[i]) != 1)
            throw std::runtime_error("resultant_y: interpolation not integral");
        out[i] = boost::multiprecision::numerator(acc[i]);
    }
    return poly_norm(out);
}

/* minimal polynomial of zeta_m + 1/zeta_m for m = 3^k via the palindromic
 * cyclotomic x^(2 3^(k-1)) + x^(3^(k-1)) + 1 and x^j + x^-j = V_j(x + 1/x) */
inline Poly real_cyclotomic_poly(long m) {
    if (m < 9) throw std::invalid_argument("real_cyclotomic_poly: modulus must be at least 9");
    long k = 0, t = m;
    while (t % 3 == 0) {
        t /= 3;
        ++k;
    }
    if (t != 1) throw std::invalid_argument("real_cyclotomic_poly: modulus must be a power of 3");
    long third = m / 3;
    Poly phi(2 * third + 1, Int(0));
    phi[0] = phi[third] = phi[2 * third] = 1;
    long d = third;  /* half degree */
    /* V_0 = 2, V_1 = y, V_{j+1} = y V_j - V_{j-1} */
    Poly vprev{Int(2)}, v{Int(0), Int(1)};
    Poly psi = poly_scale(Poly{Int(1)}, phi[d]);
    for (long j = 1; j <= d; ++j) {
        if (phi[d + j] != phi[d - j]) throw std::runtime_error("real_cyclotomic_poly: not palindromic");
        psi = poly_add(psi, poly_scale(v, phi[d + j]));
        Poly vnext = poly_sub(poly_mul(Poly{Int(0), Int(1)}, v), vprev);
        vprev = v;
        v = vnext;
    }
    return psi;
}

/* number of real roots of a squarefree polynomial, by Sturm chains */
inline long count_real_roots(const Poly &f) {
    using Rat = boost::multiprecision::cpp_rational;
    if (poly_deg(f) < 1) return 0;
    using RP = std::vector<Rat>;
    auto norm = [](RP a) {
        while (!a.empty() && a.back() == 0) a.pop_back();
        return a;
    };
    auto rem = [&](RP a, const RP &b) {
        while (a.size() >= b.size()) {
            Rat c = a.back() / b.back();
            std::size_t off = a.size() - b.size();
            for (std::size_t j = 0; j < b.size(); ++j) a[off + j] -= c * b[j];
            a = norm(std::move(a));
            if (a.empty()) break;
        }
        return a;
    };
    std::vector<RP> chain;
    RP p0(f.size()), p1;
    for (std::size_t i = 0; i < f.size(); ++i) p0[i] = Rat(f[i]);
    Poly df = poly_derivative(f);
    p1.resize(df.size());
    for (std::size_t i = 0; i < df.size(); ++i) p1[i] = Rat(df[i]);
    chain.push_back(norm(p0));
    chain.push_back(norm(p1));
    while (!chain.back().empty() && chain.back().size() > 1) {
        RP r = rem(chain[chain.size() - 2], chain.back());
        if (r.empty()) throw std::invalid_argument("count_real_roots: polynomial not squarefree");
        for (Rat &c : r) c = -c;
        chain.push_back(std::move(r));
    }
    auto variations = [&](int at_plus_infinity) {
        int prev = 0;
        long v = 0;
        for (const RP &q : chain) {
            if (q.empty()) continue;
            Rat lead = q.back();
            int s = lead > 0 ? 1 : -1;
            if (!at_plus_infinity && (q.size() - 1) % 2 == 1) s = -s;
            if (prev != 0 && s != prev) ++v;
            prev = s;
        }
        return v;
    };
    return variations(0) - variations(1);
}

}  // namespace wildtame
