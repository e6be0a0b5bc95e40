#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "wildtame/abelian.hpp"

namespace wildtame {

using Real = boost::multiprecision::cpp_bin_float_50;

struct QuadDiscriminant {
    Int delta;  /* square-free radicand */
    Int D;      /* fundamental discriminant */
};

inline QuadDiscriminant fundamental_discriminant(const Int &delta) {
    if (delta == 0 || delta == 1)
        throw std::invalid_argument("fundamental_discriminant: radicand must not be 0 or 1");
    if (!is_square_free(delta))
        throw std::invalid_argument("fundamental_discriminant: radicand must be square-free");
    QuadDiscriminant q;
    q.delta = delta;
    q.D = mod_floor(delta, 4) == 1 ? delta : 4 * delta;
    return q;
}

inline bool is_fundamental_discriminant(const Int &D) {
    if (D == 0 || D == 1) return false;
    Int m4 = mod_floor(D, 4);
    if (m4 == 1) return is_square_free(D);
    if (m4 != 0) return false;
    Int m = D / 4;
    Int r = mod_floor(m, 4);
    return (r == 2 || r == 3) && is_square_free(m);
}

struct BQF {
    Int a, b, c;

    Int disc() const { return b * b - 4 * a * c; }
    Int eval(const Int &x, const Int &y) const { return a * x * x + b * x * y + c * y * y; }
    bool primitive() const { return gcd_int(gcd_int(a, b), c) == 1; }
    bool operator==(const BQF &o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator<(const BQF &o) const {
        return std::tie(a, b, c) < std::tie(o.a, o.b, o.c);
    }
};

inline BQF principal_form(const Int &D) {
    Int b0 = mod_floor(D, 2);
    return {1, b0, (b0 * b0 - D) / 4};
}

inline BQF form_inverse(const BQF &f) { return {f.a, -f.b, f.c}; }

/* GL2 substitution (x, y) -> (px + qy, rx + sy), ps - qr = 1 */
inline BQF transform(const BQF &f, const Int &p, const Int &q, const Int &r, const Int &s) {
    if (p * s - q * r != 1) throw std::invalid_argument("transform: matrix not unimodular");
    BQF g;
    g.a = f.eval(p, r);
    g.c = f.eval(q, s);
    g.b = 2 * (f.a * p * q + f.c * r * s) + f.b * (p * s + q * r);
    return g;
}

inline BQF reduce_imaginary(BQF f) {
    Int D = f.disc();
    if (D >= 0) throw std::invalid_argument("reduce_imaginary: discriminant not negative");
    if (f.a <= 0) throw std::invalid_argument("reduce_imaginary: form not positive definite");
    for (int guard = 0; guard < 100000; ++guard) {
        Int twoa = 2 * f.a;
        Int r = mod_floor(f.b, twoa);
        if (r > f.a) r -= twoa;
        f.b = r;
        f.c = (f.b * f.b - D) / (4 * f.a);
        if (f.c < f.a) {
            std::swap(f.a, f.c);
            f.b = -f.b;
            continue;
        }
        if (f.a == f.c && f.b < 0) f.b = -f.b;
        return f;
    }
    throw std::runtime_error("reduce_imaginary: failed to terminate");
}

inline bool is_reduced_real(const BQF &f, const Int &s) {
    if (f.b <= 0 || f.b > s) return false;
    Int twoabs = 2 * abs_int(f.a);
    return twoabs + f.b >= s + 1 && twoabs - f.b <= s;
}

/* one step along the cycle; exact, s = isqrt(D) */
inline BQF rho_real(const BQF &f, const Int &s) {
    Int ac = abs_int(f.c);
    if (ac == 0) throw std::invalid_argument("rho_real: degenerate form");
    Int r;
    if (ac > s) {
        r = mod_floor(-f.b, 2 * ac);
        if (r > ac) r -= 2 * ac;
    } else {
        r = s - mod_floor(s + f.b, 2 * ac);
    }
    Int D = f.disc();
    return {f.c, r, (r * r - D) / (4 * f.c)};
}

inline BQF reduce_real(BQF f) {
    Int D = f.disc();
    if (D <= 0) throw std::invalid_argument("reduce_real: discriminant not positive");
    Int s = isqrt_int(D);
    for (int guard = 0; guard < 1000000; ++guard) {
        if (is_reduced_real(f, s)) return f;
        f = rho_real(f, s);
    }
    throw std::runtime_error("reduce_real: failed to terminate");
}

inline BQF reduce(const BQF &f) {
    return f.disc() < 0 ? reduce_imaginary(f) : reduce_real(f);
}

/* full rho-cycle of a reduced indefinite form */
inline std::vector<BQF> cycle_of(const BQF &reduced) {
    Int D = reduced.disc();
    Int s = isqrt_int(D);
    std::vector<BQF> cyc{reduced};
    BQF g = rho_real(reduced, s);
    for (int guard = 0; guard < 1000000 && !(g == reduced); ++guard) {
        cyc.push_back(g);
        g = rho_real(g, s);
    }
    if (!(g == reduced)) throw std::runtime_error("cycle_of: cycle failed to close");
    return cyc;
}

/* unique class representative: the reduced form itself (definite) or the
 * lexicographically least form on the cycle (indefinite) */
inline BQF canonical_rep(const BQF &f) {
    BQF r = reduce(f);
    if (f.disc() < 0) return r;
    std::vector<BQF> cyc = cycle_of(r);
    return *std::min_element(cyc.begin(), cyc.end());
}

/* Dirichlet composition: move g to a representative with leading coefficient
 * coprime to f.a, align middle coefficients by CRT, multiply */
inline BQF compose(const BQF &f, const BQF &g) {
    Int D = f.disc();
    if (g.disc() != D) throw std::invalid_argument("compose: discriminant mismatch");
    if (!f.primitive() || !g.primitive())
        throw std::invalid_argument("compose: forms must be primitive");
    Int am = abs_int(f.a);
    BQF gp = g;
    bool found = gcd_int(abs_int(g.a), am) == 1;
    Int cap = am + 2 < 50 ? Int(50) : am + 2;
    for (Int l = 1; !found && l <= cap; ++l) {
        for (Int x = -l; !found && x <= l; ++x)
            for (Int y = -l; !found && y <= l; ++y) {
                if (abs_int(x) != l && abs_int(y) != l) continue;
                if (gcd_int(x, y) != 1) continue;
                Int v = g.eval(x, y);
                if (v == 0 || gcd_int(abs_int(v), am) != 1) continue;
                XgcdResult e = xgcd(x, y);
                gp = transform(g, x, -e.v, y, e.u);
                found = true;
            }
    }
    if (!found) throw std::runtime_error("compose: no coprime representative found");
    Int a1 = f.a, b1 = f.b, a2 = gp.a, b2 = gp.b;
    Int m = abs_int(a2);
    Int k = m == 1 ? Int(0) : mod_floor(((b2 - b1) / 2) * mod_inverse(mod_floor(a1, m), m), m);
    Int B = b1 + 2 * a1 * k;
    Int denom = 4 * a1 * a2;
    if ((B * B - D) % denom != 0) throw std::runtime_error("compose: alignment failed");
    return reduce(BQF{a1 * a2, B, (B * B - D) / denom});
}

/* all reduced forms of a fundamental discriminant */
inline std::vector<BQF> reduced_forms(const Int &D) {
    std::vector<BQF> out;
    if (D < 0) {
        Int amax = isqrt_int(-D / 3);
        for (Int a = 1; a <= amax; ++a)
            for (Int b = -a + 1; b <= a; ++b) {
                Int num = b * b - D;
                if (num % (4 * a) != 0) continue;
                Int c = num / (4 * a);
                if (c < a) continue;
                if (a == c && b < 0) continue;
                BQF f{a, b, c};
                if (f.primitive()) out.push_back(f);
            }
    } else {
        Int s = isqrt_int(D);
        Int b0 = mod_floor(D, 2);
        for (Int b = b0 == 0 ? 2 : 1; b <= s; b += 2)
            for (Int two_a = (s - b) + 1; two_a <= s + b; ++two_a) {
                if (mod_floor(two_a, 2) != 0) continue;
                Int a = two_a / 2;
                Int num = b * b - D;
                if (num % (4 * a) != 0) continue;
                for (Int sign : {Int(1), Int(-1)}) {
                    BQF f{sign * a, b, num / (4 * sign * a)};
                    if (is_reduced_real(f, s) && f.primitive()) out.push_back(f);
                }
            }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/* fundamental totally positive automorph: product of the step matrices
 * around the principal cycle; eps+ = (t + u sqrt(D))/2, t^2 - D u^2 = 4 */
inline std::pair<Int, Int> principal_automorph(const Int &D) {
    if (D <= 0) throw std::invalid_argument("principal_automorph: discriminant not positive");
    Int s = isqrt_int(D);
    BQF f0 = reduce_real(principal_form(D));
    Int p = 1, q = 0, r = 0, w = 1;
    BQF f = f0;
    for (int guard = 0; guard < 1000000; ++guard) {
        BQF g = rho_real(f, s);
        Int mcoef = (f.b + g.b) / (2 * f.c);
        /* right-multiply by [[0, -1], [1, m]] */
        Int np = q, nq = -p + q * mcoef;
        Int nr = w, nw = -r + w * mcoef;
        p = np;
        q = nq;
        r = nr;
        w = nw;
        f = g;
        if (f == f0) {
            Int t = abs_int(p + w);
            Int u = abs_int(r) / f0.a;
            if (t * t - D * u * u != 4 || u == 0)
                throw std::runtime_error("principal_automorph: automorph verification failed");
            return {t, u};
        }
    }
    throw std::runtime_error("principal_automorph: cycle failed to close");
}

struct RealUnit {
    Int t, u;  /* (t + u sqrt(D))/2 */
    int norm;  /* +1 or -1 */
};

/* fundamental unit of the order of discriminant D: eps+ or its square root
 * when a norm -1 unit exists */
inline RealUnit real_fundamental_unit(const Int &D) {
    auto [t, u] = principal_automorph(D);
    if (is_square(t - 2)) {
        Int x = isqrt_int(t - 2);
        if (x > 0 && u % x == 0) {
            Int y = u / x;
            if (x * x - D * y * y == -4) return {x, y, -1};
        }
    }
    return {t, u, +1};
}

namespace detail {

/* class-number independent check: L(1, chi_D) from the finite log-sin sum,
 * valid for even primitive chi; error is floating-point only */
inline Real l_one_real(const Int &D) {
    Real pi = 4 * atan(Real(1));
    Real sum = 0;
    long f = to_long(D);
    for (long a = 1; 2 * a < f; ++a) {
        int chi = kronecker(D, a);
        if (chi == 0) continue;
        sum += chi * log(sin(pi * a / f));
    }
    return -2 * sum / sqrt(Real(D));
}

}  // namespace detail

class FormClassGroup {
  public:
    Int D;
    FiniteAbelianGroup group;          /* wide class group */
    Int h;                             /* wide class number */
    std::vector<BQF> generator_forms;  /* classes generating the narrow group */
    std::string assurance;             /* "enumerated" or "pinned" */

    FiniteAbelianGroup narrow;
    std::vector<BQF> class_reps;  /* canonical representatives, narrow classes */
    Int unit_t = 0, unit_u = 0;   /* eps+ for D > 0 */

    std::size_t class_index(const BQF &f) const {
        BQF c = canonical_rep(f);
        auto it = rep_index_.find(c);
        if (it == rep_index_.end()) throw std::runtime_error("class_index: unknown class");
        return it->second;
    }

    /* coordinates in the wide group */
    std::vector<Int> coords_of(const BQF &f) const {
        return to_wide_.apply(narrow_coords_[class_index(f)]);
    }

    std::vector<Int> narrow_coords_of(const BQF &f) const {
        return narrow_coords_[class_index(f)];
    }

    friend FormClassGroup build_form_class_group(const Int &D);

  private:
    std::map<BQF, std::size_t> rep_index_;
    std::vector<std::vector<Int>> narrow_coords_;
    GroupHom to_wide_;
};

inline constexpr long kMaxFormDiscriminant = 500000;

inline FormClassGroup build_form_class_group(const Int &D) {
    if (abs_int(D) > kMaxFormDiscriminant)
        throw std::invalid_argument("class group: discriminant too large");
    if (!is_fundamental_discriminant(D))
        throw std::invalid_argument("class group: discriminant not fundamental");
    FormClassGroup out;
    out.D = D;

    /* narrow classes from reduced forms */
    std::vector<BQF> forms = reduced_forms(D);
    std::set<BQF> reps_set;
    for (const BQF &f : forms) reps_set.insert(canonical_rep(f));
    out.class_reps.assign(reps_set.begin(), reps_set.end());
    for (std::size_t i = 0; i < out.class_reps.size(); ++i)
        out.rep_index_[out.class_reps[i]] = i;
    std::size_t hplus = out.class_reps.size();
    std::size_t id = out.rep_index_.at(canonical_rep(principal_form(D)));

    /* composition on class indices, memoized */
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> table;
    auto mul = [&](std::size_t i, std::size_t j) {
        auto key = std::minmax(i, j);
        auto it = table.find(key);
        if (it != table.end()) return it->second;
        std::size_t k =
            out.rep_index_.at(canonical_rep(compose(out.class_reps[i], out.class_reps[j])));
        table[key] = k;
        return k;
    };

    /* greedy generators, then spanning-tree relations */
    std::vector<std::size_t> gens;
    auto closure = [&](const std::vector<std::size_t> &gs) {
        std::set<std::size_t> seen{id};
        std::vector<std::size_t> frontier{id};
        while (!frontier.empty()) {
            std::vector<std::size_t> next;
            for (std::size_t v : frontier)
                for (std::size_t g : gs) {
                    std::size_t w = mul(v, g);
                    if (seen.insert(w).second) next.push_back(w);
                }
            frontier = std::move(next);
        }
        return seen;
    };
    std::set<std::size_t> reach = closure(gens);
    while (reach.size() < hplus) {
        for (std::size_t i = 0; i < hplus; ++i)
            if (!reach.count(i)) {
                gens.push_back(i);
                break;
            }
        reach = closure(gens);
    }
    std::size_t t = gens.size();
    std::vector<std::vector<Int>> coords(hplus);
    std::vector<char> visited(hplus, 0);
    std::vector<std::vector<Int>> relations;
    coords[id] = std::vector<Int>(t, Int(0));
    visited[id] = 1;
    std::vector<std::size_t> frontier{id};
    while (!frontier.empty()) {
        std::vector<std::size_t> next;
        for (std::size_t v : frontier)
            for (std::size_t gi = 0; gi < t; ++gi) {
                std::size_t w = mul(v, gens[gi]);
                std::vector<Int> cw = coords[v];
                cw[gi] += 1;
                if (!visited[w]) {
                    visited[w] = 1;
                    coords[w] = cw;
                    next.push_back(w);
                } else {
                    std::vector<Int> rel(t);
                    bool nonzero = false;
                    for (std::size_t x = 0; x < t; ++x) {
                        rel[x] = cw[x] - coords[w][x];
                        if (rel[x] != 0) nonzero = true;
                    }
                    if (nonzero) relations.push_back(std::move(rel));
                }
            }
        frontier = std::move(next);
    }
    GroupPresentation pres =
        relations.empty() ? group_from_relations(t, IntMatrix(0, t))
                          : group_from_relations(t, IntMatrix::from_rows(relations));
    out.narrow = pres.group;
    if (out.narrow.order() != Int(hplus))
        throw std::runtime_error("class group: structure resolution failed");
    out.narrow_coords_.resize(hplus);
    for (std::size_t i = 0; i < hplus; ++i)
        out.narrow_coords_[i] = out.narrow.reduce(pres.projection.apply(coords[i]));
    for (std::size_t g : gens) out.generator_forms.push_back(out.class_reps[g]);

    if (D < 0) {
        out.group = out.narrow;
        out.to_wide_ = GroupHom::identity(out.narrow);
        out.h = out.group.order();
        out.assurance = "enumerated";
        return out;
    }

    /* wide group: quotient by the class of (-1, b0, (D - b0^2)/4) */
    Int b0 = mod_floor(D, 2);
    BQF sign_form{-1, b0, (D - b0 * b0) / 4};
    std::vector<Int> sc = out.narrow_coords_[out.rep_index_.at(canonical_rep(sign_form))];
    IntMatrix gen(out.narrow.rank(), 1);
    for (std::size_t i = 0; i < out.narrow.rank(); ++i) gen.at(i, 0) = sc[i];
    QuotientResult wide = quotient_by_generators(out.narrow, gen);
    out.group = wide.group;
    out.to_wide_ = wide.projection;
    out.h = out.group.order();

    /* analytic pin: h+ = sqrt(D) L(1,chi)/log(eps+) must match the count */
    auto [ut, uu] = principal_automorph(D);
    out.unit_t = ut;
    out.unit_u = uu;
    Real sq = sqrt(Real(D));
    Real eps_plus = (Real(ut.str()) + Real(uu.str()) * sq) / 2;
    Real hf = sq * detail::l_one_real(D) / log(eps_plus);
    Real diff = hf - Real(hplus);
    if (!(abs(diff) < Real("0.01")))
        throw std::runtime_error(
            "class group: analytic class number does not pin the enumerated count; raise "
            "precision");
    out.assurance = "pinned";
    return out;
}

inline FormClassGroup class_group_imaginary(const Int &D) {
    if (D >= 0) throw std::invalid_argument("class_group_imaginary: discriminant must be negative");
    return build_form_class_group(D);
}

inline FormClassGroup class_group_real(const Int &D) {
    if (D <= 0) throw std::invalid_argument("class_group_real: discriminant must be positive");
    return build_form_class_group(D);
}

inline FormClassGroup class_group(const QuadDiscriminant &q) { return build_form_class_group(q.D); }

/* prime form (p, b, c) of discriminant D; requires p split or ramified */
inline BQF prime_form(const Int &D, const Int &p) {
    for (Int b = 0; b < 2 * p; ++b) {
        if (mod_floor(b * b - D, 4 * p) != 0) continue;
        BQF f{p, b, (b * b - D) / (4 * p)};
        if (!f.primitive()) continue;
        return f;
    }
    throw std::invalid_argument("prime_form: prime is inert or not representable");
}

/* class group of the ring of p-integers: quotient by the classes above p */
inline FiniteAbelianGroup s_class_group(const QuadDiscriminant &q, const Int &p) {
    FormClassGroup cg = build_form_class_group(q.D);
    int kr = kronecker(q.D, p);
    if (kr == -1) return cg.group;
    std::vector<Int> coords = cg.coords_of(prime_form(q.D, p));
    IntMatrix gen(cg.group.rank(), 1);
    for (std::size_t i = 0; i < cg.group.rank(); ++i) gen.at(i, 0) = coords[i];
    return quotient_by_generators(cg.group, gen).group;
}

}  // namespace wildtame
