#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wildtame/abelian.hpp"

namespace wildtame {

/* Finite abelian group with named commuting automorphisms, optionally a
 * mod-p^m structure so Tate twists make sense. */
class FiniteGaloisModule {
  public:
    FiniteGaloisModule() = default;

    FiniteGaloisModule(FiniteAbelianGroup group, std::map<std::string, GroupHom> actors,
                       std::optional<Int> modulus = std::nullopt)
        : group_(std::move(group)), actors_(std::move(actors)), modulus_(std::move(modulus)) {
        for (const auto &[name, a] : actors_) {
            if (!(a.source() == group_) || !(a.target() == group_))
                throw std::invalid_argument("FiniteGaloisModule: actor '" + name +
                                            "' is not an endomorphism of the group");
            if (!hom_is_isomorphism(a))
                throw std::invalid_argument("FiniteGaloisModule: actor '" + name +
                                            "' is not invertible");
        }
        for (auto i = actors_.begin(); i != actors_.end(); ++i)
            for (auto j = std::next(i); j != actors_.end(); ++j)
                if (!i->second.compose(j->second).equals(j->second.compose(i->second)))
                    throw std::invalid_argument("FiniteGaloisModule: actors '" + i->first +
                                                "' and '" + j->first + "' do not commute");
        if (modulus_) {
            auto fac = factorize(*modulus_);
            if (fac.size() != 1)
                throw std::invalid_argument("FiniteGaloisModule: modulus must be a prime power");
            if (!group_.is_trivial() && *modulus_ % group_.exponent() != 0)
                throw std::invalid_argument(
                    "FiniteGaloisModule: group exponent must divide the modulus");
            p_ = fac[0].first;
            m_ = fac[0].second;
        }
    }

    const FiniteAbelianGroup &group() const { return group_; }
    const std::map<std::string, GroupHom> &actors() const { return actors_; }
    const std::optional<Int> &modulus() const { return modulus_; }
    const Int &prime() const {
        if (!modulus_) throw std::logic_error("FiniteGaloisModule: no modulus");
        return p_;
    }

    const GroupHom &actor(const std::string &name) const {
        auto it = actors_.find(name);
        if (it == actors_.end())
            throw std::invalid_argument("FiniteGaloisModule: unknown actor '" + name + "'");
        return it->second;
    }

    bool has_actor(const std::string &name) const { return actors_.count(name) != 0; }

    std::vector<std::string> actor_names() const {
        std::vector<std::string> out;
        for (const auto &[n, a] : actors_) out.push_back(n);
        return out;
    }

  private:
    FiniteAbelianGroup group_;
    std::map<std::string, GroupHom> actors_;
    std::optional<Int> modulus_;
    Int p_ = 0;
    long m_ = 0;
};

/* chi(g) mod p^level for each named actor; values at lower levels by reduction. */
class CyclotomicCharacterTable {
  public:
    CyclotomicCharacterTable() = default;

    CyclotomicCharacterTable(Int p, long level, std::map<std::string, Int> chi)
        : p_(std::move(p)), level_(level), chi_(std::move(chi)) {
        if (!is_prime(p_)) throw std::invalid_argument("CyclotomicCharacterTable: p not prime");
        if (level_ < 1) throw std::invalid_argument("CyclotomicCharacterTable: level must be >= 1");
        Int q = pow_int(p_, static_cast<unsigned long>(level_));
        for (auto &[name, v] : chi_) {
            v = mod_floor(v, q);
            if (gcd_int(v, p_) != 1)
                throw std::invalid_argument("CyclotomicCharacterTable: chi('" + name +
                                            "') is not a unit");
        }
    }

    const Int &p() const { return p_; }
    long level() const { return level_; }

    Int value(const std::string &name, long m) const {
        if (m < 1 || m > level_)
            throw std::invalid_argument("CyclotomicCharacterTable: level out of range");
        auto it = chi_.find(name);
        if (it == chi_.end())
            throw std::invalid_argument("CyclotomicCharacterTable: no character value for '" +
                                        name + "'");
        return mod_floor(it->second, pow_int(p_, static_cast<unsigned long>(m)));
    }

    bool has(const std::string &name) const { return chi_.count(name) != 0; }

  private:
    Int p_ = 0;
    long level_ = 0;
    std::map<std::string, Int> chi_;
};

inline FiniteGaloisModule tate_twist(const FiniteGaloisModule &m, long j,
                                     const CyclotomicCharacterTable &chi) {
    if (!m.modulus())
        throw std::invalid_argument("tate_twist: module carries no modulus");
    Int q = *m.modulus();
    if (chi.p() != m.prime())
        throw std::invalid_argument("tate_twist: character table prime mismatch");
    long level = 0;
    {
        Int t = q;
        while (t > 1) {
            t /= m.prime();
            ++level;
        }
    }
    std::map<std::string, GroupHom> twisted;
    for (const auto &[name, a] : m.actors()) {
        Int c = chi.value(name, level);
        Int scalar = j >= 0 ? pow_mod(c, j, q) : pow_mod(mod_inverse(c, q), -j, q);
        twisted.emplace(name, GroupHom(m.group(), m.group(), a.matrix() * scalar));
    }
    return FiniteGaloisModule(m.group(), std::move(twisted), q);
}

inline QuotientResult coinvariants(const FiniteGaloisModule &m,
                                   const std::vector<std::string> &names) {
    std::size_t r = m.group().rank();
    IntMatrix gens(r, r * names.size());
    for (std::size_t t = 0; t < names.size(); ++t) {
        const IntMatrix &a = m.actor(names[t]).matrix();
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < r; ++j)
                gens.at(i, t * r + j) = a.at(i, j) - (i == j ? 1 : 0);
    }
    return quotient_by_generators(m.group(), gens);
}

inline QuotientResult coinvariants(const FiniteGaloisModule &m) {
    return coinvariants(m, m.actor_names());
}

inline SubgroupResult invariants(const FiniteGaloisModule &m,
                                 const std::vector<std::string> &names) {
    std::size_t r = m.group().rank();
    std::size_t blocks = names.size();
    /* x with (A_g - 1)x = 0 in the group, for every g: kernel of the stacked
     * system with one modulus block per actor */
    IntMatrix stacked(blocks * r, r + blocks * r);
    for (std::size_t t = 0; t < blocks; ++t) {
        const IntMatrix &a = m.actor(names[t]).matrix();
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < r; ++j)
                stacked.at(t * r + i, j) = a.at(i, j) - (i == j ? 1 : 0);
            stacked.at(t * r + i, r + t * r + i) = m.group().invariants()[i];
        }
    }
    IntMatrix ker = kernel_lattice(stacked);
    IntMatrix gens(r, ker.cols());
    for (std::size_t j = 0; j < ker.cols(); ++j)
        for (std::size_t i = 0; i < r; ++i)
            gens.at(i, j) = mod_floor(ker.at(i, j), m.group().invariants()[i]);
    return subgroup_from_generators(m.group(), gens);
}

inline SubgroupResult invariants(const FiniteGaloisModule &m) {
    return invariants(m, m.actor_names());
}

/* G -> G invertible: inverse via columnwise lattice solve. */
inline GroupHom inverse_hom(const GroupHom &f) {
    if (!(f.source() == f.target())) throw std::invalid_argument("inverse_hom: not an endomorphism");
    if (!hom_is_isomorphism(f)) throw std::invalid_argument("inverse_hom: not invertible");
    std::size_t r = f.source().rank();
    IntMatrix big(r, 2 * r);
    for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < r; ++j) big.at(i, j) = f.matrix().at(i, j);
        big.at(i, r + i) = f.source().invariants()[i];
    }
    IntMatrix inv(r, r);
    for (std::size_t col = 0; col < r; ++col) {
        std::vector<Int> e(r, Int(0));
        e[col] = 1;
        auto sol = solve_integer(big, e);
        if (!sol) throw std::runtime_error("inverse_hom: no preimage for a generator");
        for (std::size_t i = 0; i < r; ++i) inv.at(i, col) = (*sol)[i];
    }
    return GroupHom(f.source(), f.source(), inv);
}

/* B restricted along an inclusion iota: K -> G with B(im iota) inside im iota. */
inline GroupHom restrict_endo(const GroupHom &iota, const GroupHom &b) {
    const FiniteAbelianGroup &g = iota.target();
    const FiniteAbelianGroup &k = iota.source();
    std::size_t rg = g.rank(), rk = k.rank();
    IntMatrix big(rg, rk + rg);
    for (std::size_t i = 0; i < rg; ++i) {
        for (std::size_t j = 0; j < rk; ++j) big.at(i, j) = iota.matrix().at(i, j);
        big.at(i, rk + i) = g.invariants()[i];
    }
    IntMatrix out(rk, rk);
    for (std::size_t col = 0; col < rk; ++col) {
        std::vector<Int> e = k.zero();
        e[col] = 1;
        std::vector<Int> target = b.apply(iota.apply(e));
        auto sol = solve_integer(big, target);
        if (!sol) throw std::runtime_error("restrict_endo: endomorphism does not preserve the subgroup");
        for (std::size_t i = 0; i < rk; ++i) out.at(i, col) = (*sol)[i];
    }
    return GroupHom(k, k, out);
}

/* B descended along a surjection pi: G -> Q with B(ker pi) inside ker pi. */
inline GroupHom descend_endo(const GroupHom &pi, const GroupHom &b) {
    const FiniteAbelianGroup &g = pi.source();
    const FiniteAbelianGroup &q = pi.target();
    std::size_t rg = g.rank(), rq = q.rank();
    IntMatrix big(rq, rg + rq);
    for (std::size_t i = 0; i < rq; ++i) {
        for (std::size_t j = 0; j < rg; ++j) big.at(i, j) = pi.matrix().at(i, j);
        big.at(i, rg + i) = q.invariants()[i];
    }
    IntMatrix out(rq, rq);
    for (std::size_t col = 0; col < rq; ++col) {
        std::vector<Int> e = q.zero();
        e[col] = 1;
        auto lift = solve_integer(big, e);
        if (!lift) throw std::runtime_error("descend_endo: projection is not surjective");
        std::vector<Int> lifted(rg);
        for (std::size_t i = 0; i < rg; ++i) lifted[i] = (*lift)[i];
        std::vector<Int> img = pi.apply(b.apply(lifted));
        for (std::size_t i = 0; i < rq; ++i) out.at(i, col) = img[i];
    }
    GroupHom cand(q, q, out);
    if (!cand.compose(pi).equals(pi.compose(b)))
        throw std::runtime_error("descend_endo: endomorphism does not preserve the kernel");
    return cand;
}

struct EigenspaceResult {
    FiniteGaloisModule module;
    GroupHom inclusion;
};

/* Image of the idempotent e = (1/d) sum chi^{-t} g^t for the named actor of
 * order d coprime to p; remaining actors restricted to the image. */
inline EigenspaceResult eigenspace(const FiniteGaloisModule &m, const std::string &name, long d,
                                   const Int &zeta) {
    if (!m.modulus()) throw std::invalid_argument("eigenspace: module carries no modulus");
    Int q = *m.modulus();
    if (d < 1 || gcd_int(Int(d), m.prime()) != 1)
        throw std::invalid_argument("eigenspace: actor order must be coprime to p");
    if (pow_mod(zeta, d, q) != 1)
        throw std::invalid_argument("eigenspace: character value is not a d-th root of unity");
    const GroupHom &a = m.actor(name);
    /* a^d must be the identity */
    GroupHom power = GroupHom::identity(m.group());
    for (long t = 0; t < d; ++t) power = a.compose(power);
    if (!power.equals(GroupHom::identity(m.group())))
        throw std::invalid_argument("eigenspace: actor does not have the stated order");

    Int invd = mod_inverse(d, q);
    Int zinv = mod_inverse(zeta, q);
    std::size_t r = m.group().rank();
    IntMatrix acc(r, r);
    GroupHom apow = GroupHom::identity(m.group());
    Int zpow = 1;
    for (long t = 0; t < d; ++t) {
        acc = acc + apow.matrix() * zpow;
        apow = a.compose(apow);
        zpow = zpow * zinv % q;
    }
    acc = acc * invd;
    GroupHom idem(m.group(), m.group(), acc);
    if (!idem.compose(idem).equals(idem))
        throw std::runtime_error("eigenspace: idempotent verification failed");
    auto img = hom_image(idem);
    std::map<std::string, GroupHom> restricted;
    for (const auto &[n, act] : m.actors()) restricted.emplace(n, restrict_endo(img.inclusion, act));
    return {FiniteGaloisModule(img.group, std::move(restricted), q), img.inclusion};
}

/* Does pi admit an equivariant section? Solved as one integer congruence
 * system in the entries of the section matrix. */
inline std::pair<bool, std::optional<GroupHom>> equivariant_section_exists(
    const GroupHom &pi, const std::map<std::string, GroupHom> &src_actions,
    const std::map<std::string, GroupHom> &dst_actions) {
    if (!hom_is_surjective(pi))
        throw std::invalid_argument("equivariant_section_exists: map is not surjective");
    if (src_actions.size() != dst_actions.size())
        throw std::invalid_argument("equivariant_section_exists: actor name sets differ");
    for (const auto &[name, gb] : src_actions) {
        auto it = dst_actions.find(name);
        if (it == dst_actions.end())
            throw std::invalid_argument("equivariant_section_exists: actor name sets differ");
        if (!pi.compose(gb).equals(it->second.compose(pi)))
            throw std::invalid_argument("equivariant_section_exists: map is not equivariant");
    }
    const FiniteAbelianGroup &b = pi.source();
    const FiniteAbelianGroup &c = pi.target();
    std::size_t rb = b.rank(), rc = c.rank();
    std::size_t nunk = rb * rc;
    auto unk = [rc](std::size_t i, std::size_t j) { return i * rc + j; };

    std::vector<std::vector<Int>> rows;
    std::vector<Int> moduli, rhs;
    /* validity: c_j * S_ij = 0 mod b_i */
    for (std::size_t i = 0; i < rb; ++i)
        for (std::size_t j = 0; j < rc; ++j) {
            std::vector<Int> row(nunk, Int(0));
            row[unk(i, j)] = c.invariants()[j];
            rows.push_back(std::move(row));
            moduli.push_back(b.invariants()[i]);
            rhs.push_back(0);
        }
    /* section: (pi S)_qj = delta_qj mod c_q */
    for (std::size_t qi = 0; qi < rc; ++qi)
        for (std::size_t j = 0; j < rc; ++j) {
            std::vector<Int> row(nunk, Int(0));
            for (std::size_t i = 0; i < rb; ++i) row[unk(i, j)] = pi.matrix().at(qi, i);
            rows.push_back(std::move(row));
            moduli.push_back(c.invariants()[qi]);
            rhs.push_back(qi == j ? 1 : 0);
        }
    /* equivariance: (B_g S - S C_g)_ij = 0 mod b_i */
    for (const auto &[name, gb] : src_actions) {
        const GroupHom &gc = dst_actions.at(name);
        for (std::size_t i = 0; i < rb; ++i)
            for (std::size_t j = 0; j < rc; ++j) {
                std::vector<Int> row(nunk, Int(0));
                for (std::size_t k = 0; k < rb; ++k) row[unk(k, j)] += gb.matrix().at(i, k);
                for (std::size_t k = 0; k < rc; ++k) row[unk(i, k)] -= gc.matrix().at(k, j);
                rows.push_back(std::move(row));
                moduli.push_back(b.invariants()[i]);
                rhs.push_back(0);
            }
    }
    std::size_t neq = rows.size();
    IntMatrix big(neq, nunk + neq);
    for (std::size_t e = 0; e < neq; ++e) {
        for (std::size_t x = 0; x < nunk; ++x) big.at(e, x) = rows[e][x];
        big.at(e, nunk + e) = moduli[e];
    }
    auto sol = solve_integer(big, rhs);
    if (!sol) return {false, std::nullopt};
    IntMatrix smat(rb, rc);
    for (std::size_t i = 0; i < rb; ++i)
        for (std::size_t j = 0; j < rc; ++j) smat.at(i, j) = (*sol)[unk(i, j)];
    GroupHom s(c, b, smat);
    if (!pi.compose(s).equals(GroupHom::identity(c)))
        throw std::runtime_error("equivariant_section_exists: witness failed verification");
    for (const auto &[name, gb] : src_actions)
        if (!s.compose(dst_actions.at(name)).equals(gb.compose(s)))
            throw std::runtime_error("equivariant_section_exists: witness not equivariant");
    return {true, s};
}

inline std::pair<bool, std::optional<GroupHom>> equivariant_section_exists(const GroupHom &pi) {
    return equivariant_section_exists(pi, {}, {});
}

namespace detail {

struct ModReduction {
    FiniteAbelianGroup group;
    std::vector<std::size_t> kept;  /* ambient coordinate index per reduced coordinate */
};

inline ModReduction reduce_mod(const FiniteAbelianGroup &g, const Int &q) {
    ModReduction out;
    std::vector<Int> inv;
    for (std::size_t i = 0; i < g.rank(); ++i) {
        Int d = gcd_int(g.invariants()[i], q);
        if (d > 1) {
            inv.push_back(d);
            out.kept.push_back(i);
        }
    }
    out.group = FiniteAbelianGroup{inv};
    return out;
}

}  // namespace detail

/* split <=> pure <=> H/q -> G/q injective for every prime power q | exponent(G) */
inline bool purity_split_check(const GroupHom &iota) {
    if (!hom_is_injective(iota))
        throw std::invalid_argument("purity_split_check: inclusion is not injective");
    const FiniteAbelianGroup &h = iota.source();
    const FiniteAbelianGroup &g = iota.target();
    if (g.is_trivial() || h.is_trivial()) return true;
    for (auto &[p, e] : factorize(g.exponent())) {
        Int q = 1;
        for (long t = 1; t <= e; ++t) {
            q *= p;
            auto hq = detail::reduce_mod(h, q);
            auto gq = detail::reduce_mod(g, q);
            IntMatrix m(gq.group.rank(), hq.group.rank());
            for (std::size_t i = 0; i < gq.kept.size(); ++i)
                for (std::size_t j = 0; j < hq.kept.size(); ++j)
                    m.at(i, j) = mod_floor(iota.matrix().at(gq.kept[i], hq.kept[j]),
                                           gq.group.invariants()[i]);
            GroupHom ind(hq.group, gq.group, m);
            if (!hom_kernel(ind).group.is_trivial()) return false;
        }
    }
    return true;
}

/* Hom(A, B) as a finite abelian group: generators h_ij : x_j -> (b_i/g_ij) y_i
 * with g_ij = gcd(a_j, b_i), presented and normalized. */
class HomModule {
  public:
    HomModule(FiniteAbelianGroup a, FiniteAbelianGroup b) : a_(std::move(a)), b_(std::move(b)) {
        for (std::size_t i = 0; i < b_.rank(); ++i)
            for (std::size_t j = 0; j < a_.rank(); ++j) {
                idx_.emplace_back(i, j);
                g_.push_back(gcd_int(a_.invariants()[j], b_.invariants()[i]));
            }
        std::size_t n = idx_.size();
        IntMatrix diag(n, n);
        for (std::size_t t = 0; t < n; ++t) diag.at(t, t) = g_[t];
        auto pres = group_from_relations(diag);
        group_ = pres.group;
        proj_ = pres.projection;
        /* section of proj for lifting normalized coordinates */
        std::size_t r = group_.rank();
        IntMatrix big(r, n + r);
        for (std::size_t i = 0; i < r; ++i) {
            for (std::size_t j = 0; j < n; ++j) big.at(i, j) = proj_.at(i, j);
            big.at(i, n + i) = group_.invariants()[i];
        }
        section_ = IntMatrix(n, r);
        for (std::size_t col = 0; col < r; ++col) {
            std::vector<Int> e(r, Int(0));
            e[col] = 1;
            auto sol = solve_integer(big, e);
            if (!sol) throw std::runtime_error("HomModule: presentation section missing");
            for (std::size_t i = 0; i < n; ++i) section_.at(i, col) = (*sol)[i];
        }
    }

    const FiniteAbelianGroup &group() const { return group_; }
    const FiniteAbelianGroup &dom() const { return a_; }
    const FiniteAbelianGroup &cod() const { return b_; }

    /* normalized coordinates of a hom given by its matrix */
    std::vector<Int> coords_of(const GroupHom &f) const {
        if (!(f.source() == a_) || !(f.target() == b_))
            throw std::invalid_argument("HomModule::coords_of: hom has wrong ends");
        std::size_t n = idx_.size();
        std::vector<Int> raw(n, Int(0));
        for (std::size_t t = 0; t < n; ++t) {
            auto [i, j] = idx_[t];
            if (g_[t] == b_.invariants()[i]) {
                raw[t] = mod_floor(f.matrix().at(i, j), g_[t]);
            } else {
                Int unit = b_.invariants()[i] / g_[t];
                Int v = mod_floor(f.matrix().at(i, j), b_.invariants()[i]);
                if (v % unit != 0)
                    throw std::invalid_argument("HomModule::coords_of: matrix entry violates order");
                raw[t] = mod_floor(v / unit, g_[t]);
            }
        }
        std::vector<Int> out = proj_.apply(raw);
        return group_.reduce(out);
    }

    /* hom with the given normalized coordinates */
    GroupHom hom_of(const std::vector<Int> &coords) const {
        std::vector<Int> raw = section_.apply(group_.reduce(coords));
        IntMatrix m(b_.rank(), a_.rank());
        for (std::size_t t = 0; t < idx_.size(); ++t) {
            auto [i, j] = idx_[t];
            Int unit = b_.invariants()[i] / g_[t];
            m.at(i, j) = mod_floor(raw[t] * unit, b_.invariants()[i]);
        }
        return GroupHom(a_, b_, m);
    }

    /* endomorphism of the Hom-group induced by f -> post . f . pre */
    GroupHom transport(const GroupHom &post, const GroupHom &pre) const {
        std::size_t r = group_.rank();
        IntMatrix m(r, r);
        for (std::size_t col = 0; col < r; ++col) {
            std::vector<Int> e(r, Int(0));
            e[col] = 1;
            GroupHom f = hom_of(e);
            auto c = coords_of(post.compose(f).compose(pre));
            for (std::size_t i = 0; i < r; ++i) m.at(i, col) = c[i];
        }
        return GroupHom(group_, group_, m);
    }

    /* map HomModule -> other induced by f -> post . f (same domain) */
    GroupHom pushforward(const HomModule &other, const GroupHom &post) const {
        std::size_t r = group_.rank();
        IntMatrix m(other.group().rank(), r);
        for (std::size_t col = 0; col < r; ++col) {
            std::vector<Int> e(r, Int(0));
            e[col] = 1;
            GroupHom f = hom_of(e);
            auto c = other.coords_of(post.compose(f));
            for (std::size_t i = 0; i < other.group().rank(); ++i) m.at(i, col) = c[i];
        }
        return GroupHom(group_, other.group(), m);
    }

  private:
    FiniteAbelianGroup a_, b_, group_;
    std::vector<std::pair<std::size_t, std::size_t>> idx_;
    std::vector<Int> g_;
    IntMatrix proj_, section_;
};

/* Kernel of Hom(M3,M1)_coinv -> Hom(M3,M2)_coinv under the conjugation action
 * (g f)(m) = g f(g^{-1} m); trivial iff the sequence splits equivariantly. */
inline FiniteAbelianGroup lemma_pavia_obstruction(const GroupHom &iota, const GroupHom &pi,
                                                  const std::map<std::string, GroupHom> &act1,
                                                  const std::map<std::string, GroupHom> &act2,
                                                  const std::map<std::string, GroupHom> &act3) {
    const FiniteAbelianGroup &m1 = iota.source();
    const FiniteAbelianGroup &m2 = iota.target();
    const FiniteAbelianGroup &m3 = pi.target();
    if (!(pi.source() == m2))
        throw std::invalid_argument("lemma_pavia_obstruction: maps do not compose");
    if (!hom_is_injective(iota) || !hom_is_surjective(pi))
        throw std::invalid_argument("lemma_pavia_obstruction: sequence is not exact at the ends");
    if (!pi.compose(iota).equals(GroupHom::zero(m1, m3)) ||
        m1.order() * m3.order() != m2.order())
        throw std::invalid_argument("lemma_pavia_obstruction: sequence is not exact in the middle");
    if (!purity_split_check(iota))
        throw std::invalid_argument("lemma_pavia_obstruction: sequence does not split plainly");

    HomModule hom31(m3, m1), hom32(m3, m2);
    /* conjugation actions and their coinvariants */
    std::vector<IntMatrix> cols31, cols32;
    for (const auto &[name, a1] : act1) {
        const GroupHom &a3 = act3.at(name);
        GroupHom inv3 = inverse_hom(a3);
        GroupHom c31 = hom31.transport(a1, inv3);
        GroupHom c32 = hom32.transport(act2.at(name), inv3);
        cols31.push_back(c31.matrix() - IntMatrix::identity(hom31.group().rank()));
        cols32.push_back(c32.matrix() - IntMatrix::identity(hom32.group().rank()));
    }
    auto concat = [](const FiniteAbelianGroup &g, const std::vector<IntMatrix> &mats) {
        std::size_t r = g.rank(), total = 0;
        for (const auto &m : mats) total += m.cols();
        IntMatrix out(r, total);
        std::size_t off = 0;
        for (const auto &m : mats) {
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < m.cols(); ++j) out.at(i, off + j) = m.at(i, j);
            off += m.cols();
        }
        return out;
    };
    auto co31 = quotient_by_generators(hom31.group(), concat(hom31.group(), cols31));
    auto co32 = quotient_by_generators(hom32.group(), concat(hom32.group(), cols32));
    GroupHom push = hom31.pushforward(hom32, iota);
    /* induced map on coinvariants */
    std::size_t r1 = co31.group.rank();
    {
        std::size_t n = hom31.group().rank();
        IntMatrix b2(r1, n + r1);
        for (std::size_t i = 0; i < r1; ++i) {
            for (std::size_t j = 0; j < n; ++j) b2.at(i, j) = co31.projection.matrix().at(i, j);
            b2.at(i, n + i) = co31.group.invariants()[i];
        }
        IntMatrix ind(co32.group.rank(), r1);
        for (std::size_t col = 0; col < r1; ++col) {
            std::vector<Int> e(r1, Int(0));
            e[col] = 1;
            auto lift = solve_integer(b2, e);
            if (!lift) throw std::runtime_error("lemma_pavia_obstruction: lift failed");
            std::vector<Int> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = (*lift)[i];
            auto img = co32.projection.apply(push.apply(x));
            for (std::size_t i = 0; i < co32.group.rank(); ++i) ind.at(i, col) = img[i];
        }
        GroupHom induced(co31.group, co32.group, ind);
        return hom_kernel(induced).group;
    }
}

struct CasaDiagram {
    /* rows: 0 -> A1 -> A2 -> A3 -> 0 over 0 -> B1 -> B2 -> B3 -> 0,
     * columns 2,3 continue to T2, T3; tau2: T2 -> T3 an isomorphism. */
    FiniteAbelianGroup a1, a2, a3, b1, b2, b3, t2, t3;
    GroupHom alpha1, alpha2, beta1, beta2, iota1, iota2, iota3, pi2, pi3, tau2;
    std::map<std::string, GroupHom> act_a1, act_a2, act_a3, act_b1, act_b2, act_b3, act_t2, act_t3;
};

inline void casa_require(bool cond, const std::string &what) {
    if (!cond) throw std::invalid_argument("casa_check: " + what);
}

inline std::pair<bool, bool> casa_check(const CasaDiagram &d) {
    auto exact_row = [](const GroupHom &f, const GroupHom &g, const std::string &where) {
        casa_require(f.target() == g.source(), where + ": maps do not compose");
        casa_require(hom_is_injective(f), where + ": left map not injective");
        casa_require(hom_is_surjective(g), where + ": right map not surjective");
        casa_require(g.compose(f).equals(GroupHom::zero(f.source(), g.target())),
                     where + ": composite not zero");
        casa_require(f.source().order() * g.target().order() == f.target().order(),
                     where + ": orders violate exactness");
    };
    exact_row(d.alpha1, d.alpha2, "top row");
    exact_row(d.beta1, d.beta2, "middle row");
    exact_row(d.iota2, d.pi2, "second column");
    exact_row(d.iota3, d.pi3, "third column");
    casa_require(hom_is_isomorphism(d.tau2), "tau2 must be an isomorphism");
    casa_require(hom_is_isomorphism(d.iota1), "iota1 must be an isomorphism");
    casa_require(d.iota2.compose(d.alpha1).equals(d.beta1.compose(d.iota1)),
                 "left square does not commute");
    casa_require(d.iota3.compose(d.alpha2).equals(d.beta2.compose(d.iota2)),
                 "right square does not commute");
    casa_require(d.pi3.compose(d.beta2).equals(d.tau2.compose(d.pi2)),
                 "bottom square does not commute");
    auto equivariant = [](const GroupHom &f, const std::map<std::string, GroupHom> &src,
                          const std::map<std::string, GroupHom> &dst, const std::string &where) {
        for (const auto &[name, a] : src) {
            casa_require(dst.count(name) != 0, where + ": actor sets differ");
            casa_require(f.compose(a).equals(dst.at(name).compose(f)),
                         where + ": map not equivariant for '" + name + "'");
        }
    };
    equivariant(d.alpha1, d.act_a1, d.act_a2, "alpha1");
    equivariant(d.alpha2, d.act_a2, d.act_a3, "alpha2");
    equivariant(d.beta1, d.act_b1, d.act_b2, "beta1");
    equivariant(d.beta2, d.act_b2, d.act_b3, "beta2");
    equivariant(d.iota1, d.act_a1, d.act_b1, "iota1");
    equivariant(d.iota2, d.act_a2, d.act_b2, "iota2");
    equivariant(d.iota3, d.act_a3, d.act_b3, "iota3");
    equivariant(d.pi2, d.act_b2, d.act_t2, "pi2");
    equivariant(d.pi3, d.act_b3, d.act_t3, "pi3");
    equivariant(d.tau2, d.act_t2, d.act_t3, "tau2");

    bool i_alpha = equivariant_section_exists(d.alpha2, d.act_a2, d.act_a3).first;
    bool i_pi2 = equivariant_section_exists(d.pi2, d.act_b2, d.act_t2).first;
    bool ii_beta = equivariant_section_exists(d.beta2, d.act_b2, d.act_b3).first;
    bool ii_pi3 = equivariant_section_exists(d.pi3, d.act_b3, d.act_t3).first;
    return {i_alpha && i_pi2, ii_beta && ii_pi3};
}

}  // namespace wildtame
