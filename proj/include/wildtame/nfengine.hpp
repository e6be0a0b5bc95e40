#pragma once

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "wildtame/abelian.hpp"
#include "wildtame/polynomial.hpp"
#include "wildtame/quadratic.hpp"

namespace wildtame {

struct NumberFieldDesc {
    std::string label;
    Poly poly;  /* monic, irreducible, degree <= 12 */
    long degree = 0;
    long r1 = 0, r2 = 0;

    bool operator==(const NumberFieldDesc &o) const {
        return label == o.label && poly == o.poly;
    }
};

/* balanced trace coefficient, then the lex-smaller of f and its mirror */
inline Poly canonical_defining_poly(const Poly &f0) {
    Poly f = poly_norm(f0);
    if (!poly_is_monic(f)) throw std::invalid_argument("canonical_defining_poly: not monic");
    long n = poly_deg(f);
    if (n < 1) throw std::invalid_argument("canonical_defining_poly: degree must be positive");
    auto balance = [n](const Poly &g) {
        Int a = g[n - 1];
        Int r = mod_floor(a, Int(n));
        if (2 * r > n) r -= n;
        return poly_translate(g, -((a - r) / n));
    };
    Poly c1 = balance(f);
    Poly c2 = balance(poly_mirror(f));
    for (long i = n; i >= 0; --i) {
        if (c1[i] != c2[i]) return c1[i] < c2[i] ? c1 : c2;
    }
    return c1;
}

inline NumberFieldDesc make_field(const std::string &label, const Poly &poly0) {
    NumberFieldDesc d;
    d.label = label;
    if (label.empty() || label.find_first_of(" \t\n") != std::string::npos)
        throw std::invalid_argument("make_field: label must be nonempty without whitespace");
    d.poly = poly_norm(poly0);
    d.degree = poly_deg(d.poly);
    if (d.degree < 1 || d.degree > 12)
        throw std::invalid_argument("make_field: degree must be between 1 and 12");
    if (!poly_is_monic(d.poly)) throw std::invalid_argument("make_field: polynomial not monic");
    if (!is_irreducible_z(d.poly))
        throw std::invalid_argument("make_field: polynomial not irreducible");
    d.r1 = count_real_roots(d.poly);
    d.r2 = (d.degree - d.r1) / 2;
    return d;
}

inline NumberFieldDesc field_rationals() { return make_field("Q", Poly{Int(0), Int(1)}); }

inline NumberFieldDesc field_quadratic(const QuadDiscriminant &q) {
    Poly f;
    if (mod_floor(q.D, 4) == 1)
        f = Poly{-(q.D - 1) / 4, Int(-1), Int(1)};
    else
        f = Poly{-q.D / 4, Int(0), Int(1)};
    return make_field("qf(" + q.D.str() + ")", f);
}

namespace detail {

/* bivariate polynomials as y-power coefficients, each an x-polynomial */
using Bivariate = std::vector<Poly>;

/* g(x - c y) expanded in powers of y */
inline Bivariate sum_shape(const Poly &g, long c) {
    long n = poly_deg(g);
    Bivariate out(n + 1);
    /* powers of (x - c y): pw[k] = x-coefficient polynomial of y^k */
    Bivariate pw{Poly{Int(1)}};
    for (long j = 0; j <= n; ++j) {
        for (std::size_t k = 0; k < pw.size(); ++k)
            out[k] = poly_add(out[k], poly_scale(pw[k], g[j]));
        Bivariate nxt(pw.size() + 1);
        for (std::size_t k = 0; k < pw.size(); ++k) {
            nxt[k] = poly_add(nxt[k], poly_mul(pw[k], Poly{Int(0), Int(1)}));
            nxt[k + 1] = poly_add(nxt[k + 1], poly_scale(pw[k], Int(-c)));
        }
        pw = std::move(nxt);
    }
    while (out.size() > 1 && poly_norm(out.back()).empty()) out.pop_back();
    return out;
}

/* y^n g_c(x / y) with g_c(t) = g(t - c): kernel of the product generator */
inline Bivariate product_shape(const Poly &g, long c) {
    Poly gc = poly_translate(g, Int(-c));
    long n = poly_deg(gc);
    Bivariate out(n + 1);
    for (long k = 0; k <= n; ++k) {
        Poly mono(n - k + 1, Int(0));
        mono[n - k] = gc[n - k];
        out[k] = poly_norm(mono);
    }
    return out;
}

}  // namespace detail

/* defining polynomial of the compositum of base and the degree-3^n real
 * cyclotomic layer, as the first candidate generator that stays irreducible */
inline NumberFieldDesc layer_field(const NumberFieldDesc &base, long n, const Int &p = 3,
                                   long max_level = 1) {
    if (p != 3) throw std::invalid_argument("layer_field: only the 3-tower is supported");
    if (n < 0) throw std::invalid_argument("layer_field: negative layer");
    if (n > max_level) throw std::invalid_argument("layer_field: layer exceeds configured max");
    if (n == 0) return base;
    long layer_degree = 1;
    for (long i = 0; i < n; ++i) layer_degree *= 3;
    if (base.degree * layer_degree > 12)
        throw std::invalid_argument("layer_field: compositum degree exceeds 12");
    long modulus = 3 * layer_degree;
    Poly psi = real_cyclotomic_poly(modulus);
    std::string label = base.label + ".l" + std::to_string(n);
    if (base.degree == 1) return make_field(label, canonical_defining_poly(psi));

    long target = base.degree * layer_degree;
    std::vector<detail::Bivariate> shapes;
    for (long c : {0L, 1L, -1L, 2L, -2L, 3L, -3L}) {
        if (poly_eval(psi, Int(-c)) == 0) continue;
        shapes.push_back(detail::product_shape(psi, c));
    }
    for (long c : {1L, -1L, 2L, -2L, 3L, -3L}) shapes.push_back(detail::sum_shape(psi, c));
    for (const auto &shape : shapes) {
        Poly cand = resultant_y(base.poly, shape, target);
        if (poly_deg(cand) != target) continue;
        if (resultant(cand, poly_derivative(cand)) == 0) continue;
        if (!is_irreducible_z(cand)) continue;
        return make_field(label, canonical_defining_poly(cand));
    }
    throw std::runtime_error("layer_field: degenerate compositum for " + label);
}

inline NumberFieldDesc layer_field(const QuadDiscriminant &q, long n, const Int &p = 3,
                                   long max_level = 1) {
    return layer_field(field_quadratic(q), n, p, max_level);
}

/* Dedekind criterion: the equation order is maximal at p */
inline bool dedekind_maximal_at(const Poly &f, const Int &p) {
    auto fac = factor_mod_p_full(f, p);
    Poly gbar{Int(1)}, hbar{Int(1)};
    for (const auto &[g, e] : fac) {
        gbar = poly_mod_coeffs(poly_mul(gbar, g), p);
        for (long i = 1; i < e; ++i) hbar = poly_mod_coeffs(poly_mul(hbar, g), p);
    }
    Poly diff = poly_sub(poly_mul(gbar, hbar), f);
    Poly T(diff.size());
    for (std::size_t i = 0; i < diff.size(); ++i) {
        if (diff[i] % p != 0) throw std::runtime_error("dedekind_maximal_at: lift mismatch");
        T[i] = diff[i] / p;
    }
    Poly U = poly_gcd_mod(poly_gcd_mod(poly_norm(T), gbar, p), hbar, p);
    return poly_deg(U) <= 0;
}

struct PrimeIdeal {
    Int p;
    Poly g;   /* monic irreducible mod p */
    long e = 1, f = 1;
    Int norm;
    std::string label;
};

/* prime ideals above p in the equation order, from the splitting of f mod p */
inline std::vector<PrimeIdeal> split_prime(const Poly &f, const Int &p) {
    std::vector<PrimeIdeal> out;
    for (const auto &[g, e] : factor_mod_p_full(f, p)) {
        PrimeIdeal q;
        q.p = p;
        q.g = g;
        q.e = e;
        q.f = poly_deg(g);
        q.norm = pow_int(p, static_cast<unsigned long>(q.f));
        std::string coeffs;
        for (std::size_t i = 0; i < g.size(); ++i)
            coeffs += (i ? "," : "") + g[i].str();
        q.label = "(" + p.str() + ";" + coeffs + ")";
        out.push_back(std::move(q));
    }
    return out;
}

struct ClassGroupRecord {
    NumberFieldDesc field;
    FiniteAbelianGroup s_class_group;  /* 3-part of the 3-integer class group */
    std::vector<std::string> generator_ideals;
    std::vector<std::pair<std::string, IntMatrix>> galois_actions;
    std::optional<std::pair<std::string, IntMatrix>> norm_to;
    std::string provenance = "computed";  /* computed | ingested */
    std::string assurance = "heuristic";  /* heuristic | pinned | ingested-trusted */
    bool stable = false;
    std::vector<std::pair<std::string, Int>> extra_invariants;
};

inline int assurance_level(const std::string &a) {
    if (a == "heuristic") return 0;
    if (a == "pinned") return 1;
    if (a == "ingested-trusted") return 2;
    throw std::invalid_argument("unknown assurance level: " + a);
}

struct EngineOptions {
    long factor_base_bound = 0;  /* 0 = Minkowski bound only */
    Int max_abs_disc = Int("1000000000000");
    long max_search_height = 0;  /* 0 = automatic choice by degree */
    std::string requested_assurance = "heuristic";
};

namespace detail {

inline long minkowski_bound(long degree, long r2, const Int &absdisc) {
    Real m = sqrt(Real(absdisc));
    Real pi = 4 * atan(Real(1));
    for (long i = 1; i <= degree; ++i) m *= Real(i) / Real(degree);
    for (long i = 0; i < r2; ++i) m *= 4 / pi;
    /* floor at 50-digit precision; the nudge absorbs representation error on
     * exact integer values without ever reaching the next integer */
    return static_cast<long>(floor(m + Real("1e-30")).convert_to<long double>());
}

/* enumerate coefficient vectors of height exactly h for the relation search:
 * full box below degree 4, at most three nonzero slots from degree 4 on */
inline std::vector<Poly> element_box(long degree, long h) {
    std::vector<Poly> out;
    long slots = degree;  /* coefficients 0..degree-1 */
    std::vector<long> v(slots, 0);
    auto max_abs = [&]() {
        long m = 0;
        for (long x : v) m = std::max(m, std::labs(x));
        return m;
    };
    auto nonzero = [&]() {
        long c = 0;
        for (long x : v)
            if (x != 0) ++c;
        return c;
    };
    long cap = degree <= 3 ? slots : 3;
    for (;;) {
        if (max_abs() == h && nonzero() >= 1 && nonzero() <= cap) {
            Poly a(slots);
            for (long i = 0; i < slots; ++i) a[i] = Int(v[i]);
            a = poly_norm(a);
            if (poly_deg(a) >= 1 && a.back() > 0) {
                Int content = 0;
                for (const Int &c : a) content = gcd_int(content, c);
                if (content == 1) out.push_back(std::move(a));
            }
        }
        long i = 0;
        while (i < slots && v[i] == h) v[i++] = -h;
        if (i == slots) break;
        ++v[i];
    }
    return out;
}

}  // namespace detail

/* relation-search class group engine: S-class group at 3, reported with an
 * assurance level it can actually support */
inline ClassGroupRecord class_group_generic(const NumberFieldDesc &K,
                                            const EngineOptions &opts = {}) {
    if (K.degree > 6)
        throw std::invalid_argument("class_group_generic: degree above 6 not supported");
    assurance_level(opts.requested_assurance);
    const Poly &f = K.poly;
    Int disc = poly_discriminant(f);
    Int absdisc = abs_int(disc);
    if (absdisc > opts.max_abs_disc)
        throw std::invalid_argument("class_group_generic: discriminant above configured bound");

    long mink = detail::minkowski_bound(K.degree, K.r2, absdisc);
    long bound = std::max(opts.factor_base_bound, mink);

    /* rational primes up to the bound; 3 always tracked for the S-quotient */
    std::vector<Int> rational_primes;
    for (long q = 2; q <= bound; ++q)
        if (is_prime(Int(q))) rational_primes.push_back(Int(q));
    if (bound < 3) rational_primes.push_back(Int(3));

    for (const Int &q : rational_primes)
        if (disc % (q * q) == 0 && !dedekind_maximal_at(f, q))
            throw std::runtime_error("class_group_generic: equation order not maximal at " +
                                     q.str());

    std::vector<std::vector<PrimeIdeal>> splits;
    for (const Int &q : rational_primes) splits.push_back(split_prime(f, q));

    /* columns: prime ideals of norm within the bound, not above 3 */
    struct Column {
        std::size_t prime_index;
        std::size_t ideal_index;
    };
    std::vector<Column> columns;
    std::vector<std::string> column_labels;
    for (std::size_t i = 0; i < splits.size(); ++i) {
        if (rational_primes[i] == 3) continue;
        for (std::size_t j = 0; j < splits[i].size(); ++j)
            if (splits[i][j].norm <= bound) {
                columns.push_back({i, j});
                column_labels.push_back(splits[i][j].label);
            }
    }

    auto finish = [&](const FiniteAbelianGroup &full, const std::string &achieved) {
        if (assurance_level(achieved) < assurance_level(opts.requested_assurance))
            throw std::runtime_error("class_group_generic: cannot certify assurance \"" +
                                     opts.requested_assurance + "\" (achieved \"" + achieved +
                                     "\")");
        ClassGroupRecord rec;
        rec.field = K;
        rec.s_class_group = sylow(full, Int(3));
        rec.generator_ideals = column_labels;
        rec.provenance = "computed";
        rec.assurance = achieved;
        rec.extra_invariants.emplace_back("sclassnumber", full.order());
        return rec;
    };

    if (columns.empty()) return finish(FiniteAbelianGroup{}, "pinned");

    /* exact S-class number for quadratic fields, for pinning */
    std::optional<Int> exact_hs;
    if (K.degree == 2 && absdisc <= kMaxFormDiscriminant) {
        QuadDiscriminant q;
        q.D = disc;
        q.delta = mod_floor(disc, 4) == 1 ? disc : disc / 4;
        exact_hs = s_class_group(q, Int(3)).order();
    }

    std::vector<std::vector<Int>> rows;
    /* free relations: (q) is principal */
    for (std::size_t i = 0; i < splits.size(); ++i) {
        if (rational_primes[i] == 3) continue;
        bool usable = true;
        for (std::size_t j = 0; j < splits[i].size(); ++j)
            if (splits[i][j].norm > bound) usable = false;
        if (!usable) continue;
        std::vector<Int> row(columns.size(), Int(0));
        for (std::size_t c = 0; c < columns.size(); ++c)
            if (columns[c].prime_index == i) row[c] = splits[i][columns[c].ideal_index].e;
        rows.push_back(std::move(row));
    }

    auto try_presentation = [&]() -> std::optional<FiniteAbelianGroup> {
        if (rows.empty()) return std::nullopt;
        IntMatrix rel(rows.size(), columns.size());
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = 0; j < columns.size(); ++j) rel.at(i, j) = rows[i][j];
        try {
            return group_from_relations(rel).group;
        } catch (const std::invalid_argument &) {
            return std::nullopt;
        }
    };

    auto supported = [&](const FiniteAbelianGroup &g) -> std::optional<std::string> {
        if (exact_hs) {
            if (g.order() < *exact_hs)
                throw std::runtime_error(
                    "class_group_generic: relation lattice contradicts the analytic class "
                    "number");
            return g.order() == *exact_hs ? std::optional<std::string>("pinned") : std::nullopt;
        }
        /* no analytic pin available at degree >= 3: heuristic only */
        return std::optional<std::string>("heuristic");
    };

    /* real quadratic fields need tall boxes: the smallest elements of smooth
     * norm can have coefficients far beyond the factor base bound */
    long max_height = opts.max_search_height;
    if (max_height == 0) max_height = K.degree == 2 ? 64 : 8;

    long attempts = 0;
    for (long h = 1; h <= max_height; ++h) {
        for (const Poly &a : detail::element_box(K.degree, h)) {
            ++attempts;
            Int nrm = abs_int(resultant(f, a));
            if (nrm == 0) continue;
            std::vector<std::pair<std::size_t, long>> val;  /* prime index -> v_q(norm) */
            Int rest = nrm;
            for (std::size_t i = 0; i < splits.size() && rest > 1; ++i) {
                long v = 0;
                while (rest % rational_primes[i] == 0) {
                    rest /= rational_primes[i];
                    ++v;
                }
                if (v > 0) val.emplace_back(i, v);
            }
            if (rest != 1) continue;  /* not smooth over the factor base */
            std::vector<Int> row(columns.size(), Int(0));
            bool ok = true;
            for (const auto &[i, v] : val) {
                const Int &q = rational_primes[i];
                Poly am = poly_mod_coeffs(a, q);
                long fsum = 0;
                std::vector<std::size_t> hit;
                for (std::size_t j = 0; j < splits[i].size(); ++j) {
                    if (!poly_divmod_monic(am, splits[i][j].g, q).second.empty()) continue;
                    fsum += splits[i][j].f;
                    hit.push_back(j);
                }
                /* certified valuations: a single hit carries everything, and
                 * several hits are certain only when each is forced to one */
                std::vector<long> ideal_val(splits[i].size(), 0);
                if (hit.size() == 1 && v % splits[i][hit[0]].f == 0) {
                    ideal_val[hit[0]] = v / splits[i][hit[0]].f;
                } else if (!hit.empty() && fsum == v) {
                    for (std::size_t j : hit) ideal_val[j] = 1;
                } else {
                    ok = false;
                    break;
                }
                if (q == 3) continue;  /* S-primes are trivial in the quotient */
                for (std::size_t j : hit) {
                    bool placed = false;
                    for (std::size_t c = 0; c < columns.size(); ++c)
                        if (columns[c].prime_index == i && columns[c].ideal_index == j) {
                            row[c] += ideal_val[j];
                            placed = true;
                        }
                    if (!placed) ok = false;  /* divisor outside the factor base */
                }
                if (!ok) break;
            }
            if (!ok) continue;
            rows.push_back(std::move(row));
        }
        if (auto g = try_presentation()) {
            if (auto level = supported(*g)) return finish(*g, *level);
        }
    }
    if (auto g = try_presentation()) {
        if (auto level = supported(*g)) return finish(*g, *level);
        throw std::runtime_error(
            "class_group_generic: insufficient relations (candidate order " +
            g->order().str() + " not pinned by the analytic class number " +
            exact_hs->str() + " after " + std::to_string(attempts) + " elements)");
    }
    throw std::runtime_error("class_group_generic: insufficient relations (" +
                             std::to_string(rows.size()) + " relations over " +
                             std::to_string(columns.size()) + " prime ideals after " +
                             std::to_string(attempts) + " elements)");
}

/* ---------- record serialization (WTREC 1) ---------- */

inline std::string serialize_record(const ClassGroupRecord &rec) {
    std::ostringstream out;
    out << "WTREC 1\n";
    out << "field " << rec.field.label << " " << rec.field.degree;
    for (const Int &c : rec.field.poly) out << " " << c.str();
    out << "\n";
    out << "group";
    for (const Int &d : rec.s_class_group.invariants()) out << " " << d.str();
    out << "\n";
    for (const auto &[name, m] : rec.galois_actions) {
        out << "action " << name;
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) out << " " << m.at(i, j).str();
        out << "\n";
    }
    if (rec.norm_to) {
        out << "norm_to " << rec.norm_to->first;
        const IntMatrix &m = rec.norm_to->second;
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j) out << " " << m.at(i, j).str();
        out << "\n";
    }
    out << "provenance " << rec.provenance << "\n";
    out << "assurance " << rec.assurance << "\n";
    if (rec.stable) out << "stable 1\n";
    for (const auto &[name, n] : rec.extra_invariants)
        out << "invariant " << name << " " << n.str() << "\n";
    return out.str();
}

inline ClassGroupRecord parse_record(const std::string &text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "WTREC 1")
        throw std::runtime_error("record parse: missing WTREC 1 header");
    ClassGroupRecord rec;
    bool have_field = false, have_group = false, have_provenance = false;
    auto parse_int = [](const std::string &s) {
        try {
            return Int(s);
        } catch (...) {
            throw std::runtime_error("record parse: malformed integer \"" + s + "\"");
        }
    };
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        std::vector<std::string> toks;
        std::string t;
        while (ls >> t) toks.push_back(t);
        if (key == "field") {
            if (toks.size() < 3) throw std::runtime_error("record parse: short field line");
            long degree = 0;
            try {
                degree = std::stol(toks[1]);
            } catch (...) {
                throw std::runtime_error("record parse: malformed degree \"" + toks[1] + "\"");
            }
            Poly p;
            for (std::size_t i = 2; i < toks.size(); ++i) p.push_back(parse_int(toks[i]));
            if (poly_deg(poly_norm(p)) != degree)
                throw std::runtime_error("record parse: field degree does not match polynomial");
            rec.field = make_field(toks[0], p);
            have_field = true;
        } else if (key == "group") {
            std::vector<Int> inv;
            for (const auto &s : toks) inv.push_back(parse_int(s));
            try {
                rec.s_class_group = FiniteAbelianGroup(inv);
            } catch (const std::invalid_argument &e) {
                throw std::runtime_error(std::string("record parse: invariant factors: ") +
                                         e.what());
            }
            have_group = true;
        } else if (key == "action") {
            if (toks.empty()) throw std::runtime_error("record parse: action without name");
            std::size_t r = rec.s_class_group.rank();
            if (toks.size() - 1 != r * r)
                throw std::runtime_error("record parse: action matrix must have rank^2 entries");
            IntMatrix m(r, r);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) m.at(i, j) = parse_int(toks[1 + i * r + j]);
            rec.galois_actions.emplace_back(toks[0], std::move(m));
        } else if (key == "norm_to") {
            if (toks.empty()) throw std::runtime_error("record parse: norm_to without label");
            std::size_t r = rec.s_class_group.rank();
            std::size_t entries = toks.size() - 1;
            std::size_t rows_ = 0;
            if (r > 0) {
                if (entries % r != 0)
                    throw std::runtime_error(
                        "record parse: norm_to entries not a multiple of the rank");
                rows_ = entries / r;
            } else if (entries != 0) {
                throw std::runtime_error("record parse: norm_to entries on a trivial group");
            }
            IntMatrix m(rows_, r);
            for (std::size_t i = 0; i < rows_; ++i)
                for (std::size_t j = 0; j < r; ++j) m.at(i, j) = parse_int(toks[1 + i * r + j]);
            rec.norm_to = std::make_pair(toks[0], std::move(m));
        } else if (key == "provenance") {
            if (toks.size() != 1) throw std::runtime_error("record parse: provenance needs one token");
            rec.provenance = toks[0];
            have_provenance = true;
        } else if (key == "assurance") {
            if (toks.size() != 1) throw std::runtime_error("record parse: assurance needs one token");
            assurance_level(toks[0]);
            rec.assurance = toks[0];
        } else if (key == "stable") {
            if (toks.size() != 1 || toks[0] != "1")
                throw std::runtime_error("record parse: stable takes the single value 1");
            rec.stable = true;
        } else if (key == "invariant") {
            if (toks.size() != 2)
                throw std::runtime_error("record parse: invariant needs a name and a value");
            rec.extra_invariants.emplace_back(toks[0], parse_int(toks[1]));
        } else {
            throw std::runtime_error("record parse: unknown directive \"" + key + "\"");
        }
    }
    if (!have_field || !have_group || !have_provenance)
        throw std::runtime_error("record parse: field, group and provenance are required");
    return rec;
}

using RecordResolver = std::function<std::optional<ClassGroupRecord>(const std::string &)>;

namespace detail {

inline bool action_is_invertible(const FiniteAbelianGroup &g, const IntMatrix &m) {
    if (g.order() > 1000000)
        throw std::runtime_error("validate_record: invertibility check exceeds budget");
    std::set<std::vector<Int>> images;
    for (const auto &x : g.all_elements()) images.insert(g.reduce(m.apply(x)));
    return Int(images.size()) == g.order();
}

inline bool matrices_equal_mod(const IntMatrix &a, const IntMatrix &b,
                               const std::vector<Int> &row_mod) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (mod_floor(a.at(i, j) - b.at(i, j), row_mod[i]) != 0) return false;
    return true;
}

}  // namespace detail

/* full invariant check; failures name the violated invariant */
inline void validate_record(const ClassGroupRecord &rec, const RecordResolver &resolver = {}) {
    const FiniteAbelianGroup &g = rec.s_class_group;
    std::size_t r = g.rank();
    for (const auto &[name, m] : rec.galois_actions) {
        if (m.rows() != r || m.cols() != r)
            throw std::runtime_error("validate_record: action \"" + name +
                                     "\" is not rank x rank");
        try {
            GroupHom(g, g, m);
        } catch (const std::invalid_argument &) {
            throw std::runtime_error("validate_record: action \"" + name +
                                     "\" inconsistent with the invariant factors");
        }
        if (!detail::action_is_invertible(g, m))
            throw std::runtime_error("validate_record: action \"" + name + "\" not invertible");
    }
    for (std::size_t i = 0; i < rec.galois_actions.size(); ++i)
        for (std::size_t j = i + 1; j < rec.galois_actions.size(); ++j) {
            const auto &[na, ma] = rec.galois_actions[i];
            const auto &[nb, mb] = rec.galois_actions[j];
            if (!detail::matrices_equal_mod(ma * mb, mb * ma, g.invariants()))
                throw std::runtime_error("validate_record: actions \"" + na + "\" and \"" + nb +
                                         "\" do not commute");
        }
    if (rec.norm_to) {
        const auto &[target_label, m] = *rec.norm_to;
        if (!resolver)
            throw std::runtime_error("validate_record: norm_to target unresolved (no resolver)");
        auto target = resolver(target_label);
        if (!target)
            throw std::runtime_error("validate_record: norm_to target unresolved: " +
                                     target_label);
        const FiniteAbelianGroup &gd = target->s_class_group;
        if (r > 0 && m.rows() != gd.rank())
            throw std::runtime_error("validate_record: norm_to matrix shape mismatch");
        IntMatrix nm = m;
        if (r == 0) nm = IntMatrix(gd.rank(), 0);
        try {
            GroupHom(g, gd, nm);
        } catch (const std::invalid_argument &) {
            throw std::runtime_error(
                "validate_record: norm_to inconsistent with the invariant factors");
        }
        for (const auto &[name, up] : rec.galois_actions)
            for (const auto &[dname, down] : target->galois_actions)
                if (name == dname &&
                    !detail::matrices_equal_mod(nm * up, down * nm, gd.invariants()))
                    throw std::runtime_error("validate_record: norm_to not equivariant for \"" +
                                             name + "\"");
    }
    assurance_level(rec.assurance);
}

inline ClassGroupRecord ingest_record(const std::filesystem::path &file,
                                      const RecordResolver &resolver = {}) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw std::runtime_error("ingest_record: cannot open " + file.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    ClassGroupRecord rec = parse_record(buf.str());
    rec.provenance = "ingested";
    if (rec.assurance == "heuristic") rec.assurance = "ingested-trusted";
    validate_record(rec, resolver);
    return rec;
}

/* ---------- persistent cache ---------- */

namespace detail {

inline std::string fnv64_hex(const std::string &s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct AdvisoryLock {
    std::string path;
    bool held = false;
    explicit AdvisoryLock(std::string p) : path(std::move(p)) {
        for (int attempt = 0; attempt < 200; ++attempt) {
            int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
            if (fd >= 0) {
                ::close(fd);
                held = true;
                return;
            }
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        throw std::runtime_error("cache: could not acquire advisory lock " + path);
    }
    ~AdvisoryLock() {
        if (held) ::unlink(path.c_str());
    }
};

}  // namespace detail

/* one record per file; writes serialize exactly, reads are bit-faithful */
class CacheStore {
  public:
    explicit CacheStore(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    const std::filesystem::path &directory() const { return dir_; }

    std::filesystem::path entry_path(const std::string &label, const std::string &params) const {
        return dir_ / ("rec_" + detail::fnv64_hex(label + "\x1f" + params) + ".wtrec");
    }

    std::optional<ClassGroupRecord> get(const std::string &label,
                                        const std::string &params) const {
        std::filesystem::path p = entry_path(label, params);
        std::ifstream in(p, std::ios::binary);
        if (!in) return std::nullopt;
        std::ostringstream buf;
        buf << in.rdbuf();
        try {
            ClassGroupRecord rec = parse_record(buf.str());
            if (rec.field.label != label)
                throw std::runtime_error("label mismatch: " + rec.field.label);
            return rec;
        } catch (const std::exception &e) {
            std::cerr << "cache: corrupt entry ignored (" << p.string() << "): " << e.what()
                      << "\n";
            return std::nullopt;
        }
    }

    /* returns false when an existing higher-assurance entry is kept */
    bool put(const ClassGroupRecord &rec, const std::string &params) const {
        detail::AdvisoryLock lock((dir_ / "index.lock").string());
        std::filesystem::path p = entry_path(rec.field.label, params);
        {
            std::ifstream in(p, std::ios::binary);
            if (in) {
                std::ostringstream buf;
                buf << in.rdbuf();
                try {
                    ClassGroupRecord old = parse_record(buf.str());
                    if (assurance_level(old.assurance) > assurance_level(rec.assurance))
                        return false;
                } catch (const std::exception &) {
                    /* corrupt entries never block a rewrite */
                }
            }
        }
        std::filesystem::path tmp = p;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out << serialize_record(rec);
        }
        std::filesystem::rename(tmp, p);
        return true;
    }

  private:
    std::filesystem::path dir_;
};

}  // namespace wildtame
