#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wildtame/galois_module.hpp"
#include "wildtame/nfengine.hpp"

namespace wildtame {

/* A class group tower above a base field: one record per layer 0..n_max,
 * consecutive layers linked by norm maps. Levels are the vector indices.
 * The flag asserts that every prime above 3 ramifies totally in the tower,
 * which is what makes the norm maps surjective and finite-level data usable. */
struct TowerData {
    NumberFieldDesc base;
    std::vector<ClassGroupRecord> records;
    bool totally_ramified = true;
};

struct PsiResult {
    FiniteAbelianGroup group;
    long level = 0;                      /* finite level the computation used */
    std::string assurance = "heuristic"; /* weakest assurance among the inputs */
};

namespace detail {

inline bool is_three_group(const FiniteAbelianGroup &g) {
    Int n = g.order();
    while (n % 3 == 0) n /= 3;
    return n == 1;
}

inline GroupHom tower_norm(const ClassGroupRecord &up, const ClassGroupRecord &down) {
    return GroupHom(up.s_class_group, down.s_class_group, up.norm_to->second);
}

/* The unique h with h . projection = f, for f killing the quotient kernel.
 * Columns are images of generator preimages; the factorization is verified. */
inline GroupHom hom_through_quotient(const QuotientResult &q, const GroupHom &f) {
    if (!(f.source() == q.projection.source()))
        throw std::invalid_argument("hom_through_quotient: source mismatch");
    std::size_t rq = q.group.rank();
    std::size_t rg = f.source().rank();
    std::size_t rt = f.target().rank();
    IntMatrix cols(rt, rq);
    for (std::size_t c = 0; c < rq; ++c) {
        IntMatrix big(rq, rg + rq);
        for (std::size_t i = 0; i < rq; ++i) {
            for (std::size_t jj = 0; jj < rg; ++jj) big.at(i, jj) = q.projection.matrix().at(i, jj);
            big.at(i, rg + i) = q.group.invariants()[i];
        }
        std::vector<Int> e(rq, Int(0));
        e[c] = 1;
        auto sol = solve_integer(big, e);
        if (!sol) throw std::logic_error("hom_through_quotient: projection not surjective");
        std::vector<Int> x(sol->begin(), sol->begin() + static_cast<long>(rg));
        std::vector<Int> y = f.apply(x);
        for (std::size_t i = 0; i < rt; ++i) cols.at(i, c) = y[i];
    }
    GroupHom h(q.group, f.target(), cols);
    if (!h.compose(q.projection).equals(f))
        throw std::logic_error("hom_through_quotient: map does not factor through the quotient");
    return h;
}

inline std::string weakest_assurance(const std::vector<ClassGroupRecord> &recs, long level) {
    int w = 2;
    for (long i = 0; i <= level; ++i)
        w = std::min(w, assurance_level(recs[static_cast<std::size_t>(i)].assurance));
    if (w == 0) return "heuristic";
    return w == 1 ? "pinned" : "ingested-trusted";
}

}  // namespace detail

/* Validates and assembles tower data. Level 0 is the floor: no norm leaves it
 * and gamma acts trivially there. A record without a gamma action gets the
 * identity injected, so ingested files may omit trivial actions. */
inline TowerData make_tower(std::vector<ClassGroupRecord> records, bool totally_ramified = true) {
    if (records.empty()) throw std::invalid_argument("make_tower: no levels");
    if (records[0].norm_to)
        throw std::invalid_argument("make_tower: level 0 must not carry a norm map");
    for (std::size_t n = 0; n < records.size(); ++n) {
        ClassGroupRecord &rec = records[n];
        if (!detail::is_three_group(rec.s_class_group))
            throw std::invalid_argument("make_tower: level " + std::to_string(n) +
                                        " group is not a 3-group");
        bool has_gamma = false;
        for (const auto &[name, m] : rec.galois_actions)
            if (name == "gamma") has_gamma = true;
        if (!has_gamma)
            rec.galois_actions.emplace_back(
                "gamma", IntMatrix::identity(rec.s_class_group.rank()));
    }
    for (const auto &[name, m] : records[0].galois_actions)
        if (name == "gamma" &&
            !detail::matrices_equal_mod(m, IntMatrix::identity(records[0].s_class_group.rank()),
                                        records[0].s_class_group.invariants()))
            throw std::invalid_argument("make_tower: level 0 gamma must act trivially");
    validate_record(records[0]);
    for (std::size_t n = 1; n < records.size(); ++n) {
        if (!records[n].norm_to)
            throw std::invalid_argument("make_tower: level " + std::to_string(n) +
                                        " is missing its norm map");
        if (records[n].norm_to->first != records[n - 1].field.label)
            throw std::invalid_argument("make_tower: norm target mismatch at level " +
                                        std::to_string(n));
        const ClassGroupRecord &below = records[n - 1];
        RecordResolver resolver = [&below](const std::string &label) {
            return label == below.field.label ? std::optional<ClassGroupRecord>(below)
                                              : std::optional<ClassGroupRecord>();
        };
        validate_record(records[n], resolver);
        if (totally_ramified && !hom_is_surjective(detail::tower_norm(records[n], below)))
            throw std::invalid_argument("make_tower: norm at level " + std::to_string(n) +
                                        " not surjective despite total ramification");
    }
    for (std::size_t n = 0; n + 1 < records.size(); ++n)
        if (records[n].stable &&
            !hom_is_isomorphism(detail::tower_norm(records[n + 1], records[n])))
            throw std::invalid_argument("make_tower: stable marker at level " + std::to_string(n) +
                                        " contradicted by a non-isomorphic norm");
    TowerData t;
    t.base = records[0].field;
    t.records = std::move(records);
    t.totally_ramified = totally_ramified;
    return t;
}

/* Smallest level whose record is marked stable or whose incoming norm is an
 * isomorphism. Under total ramification the groups can only keep growing, so
 * one isomorphic descent step certifies stabilization. Absence is a value. */
inline std::optional<long> detect_stabilization(const TowerData &t) {
    for (std::size_t n = 0; n < t.records.size(); ++n) {
        if (t.records[n].stable) return static_cast<long>(n);
        if (n + 1 < t.records.size() &&
            hom_is_isomorphism(detail::tower_norm(t.records[n + 1], t.records[n])))
            return static_cast<long>(n);
    }
    return std::nullopt;
}

namespace detail {

inline long stabilized_level_or_throw(const TowerData &t) {
    if (!t.totally_ramified) throw std::runtime_error("n0 > 0 unsupported");
    std::optional<long> stab = detect_stabilization(t);
    if (!stab)
        throw std::runtime_error("not stabilized at n_max " +
                                 std::to_string(t.records.size() - 1));
    return *stab;
}

}  // namespace detail

/* Promotes the record at a stabilized level to a Galois module: the finite
 * stage stands in for the projective limit from that level on. The modulus is
 * the group exponent (at least 3), so twists and eigenspaces are available. */
inline FiniteGaloisModule x_prime_finite_level(const TowerData &t, long level) {
    std::optional<long> stab = detect_stabilization(t);
    if (!stab)
        throw std::runtime_error("x_prime_finite_level: not stabilized at n_max " +
                                 std::to_string(t.records.size() - 1));
    if (level < *stab)
        throw std::invalid_argument("x_prime_finite_level: level below stabilization");
    if (level >= static_cast<long>(t.records.size()))
        throw std::invalid_argument("x_prime_finite_level: level out of range");
    const ClassGroupRecord &rec = t.records[static_cast<std::size_t>(level)];
    std::map<std::string, GroupHom> actors;
    for (const auto &[name, m] : rec.galois_actions)
        actors.emplace(name, GroupHom(rec.s_class_group, rec.s_class_group, m));
    Int q = rec.s_class_group.exponent();
    if (q < 3) q = 3;
    return FiniteGaloisModule(rec.s_class_group, std::move(actors), q);
}

namespace detail {

struct PsiParts {
    FiniteGaloisModule module;   /* X' at the finite level */
    QuotientResult coinv;        /* (X')_Gamma */
    GroupHom to_base;            /* induced (X')_Gamma -> A'_0 */
    SubgroupResult kernel;       /* Psi with its inclusion */
};

inline PsiParts psi_parts(const TowerData &t, long level) {
    FiniteGaloisModule m = x_prime_finite_level(t, level);
    QuotientResult co = coinvariants(m, std::vector<std::string>{"gamma"});
    GroupHom nu =
        GroupHom::identity(t.records[static_cast<std::size_t>(level)].s_class_group);
    for (long i = level; i >= 1; --i)
        nu = tower_norm(t.records[static_cast<std::size_t>(i)],
                        t.records[static_cast<std::size_t>(i - 1)])
                 .compose(nu);
    GroupHom down = hom_through_quotient(co, nu);
    SubgroupResult ker = hom_kernel(down);
    return PsiParts{std::move(m), std::move(co), std::move(down), std::move(ker)};
}

}  // namespace detail

/* Psi = ker((X')_Gamma -> A'_0), computed at the stabilized level (or at any
 * requested level at or above it; the result does not depend on the choice). */
inline PsiResult psi(const TowerData &t, std::optional<long> at_level = std::nullopt) {
    long detected = detail::stabilized_level_or_throw(t);
    long level = at_level ? *at_level : detected;
    detail::PsiParts parts = detail::psi_parts(t, level);
    if (!detail::is_three_group(parts.kernel.group))
        throw std::logic_error("psi: kernel is not a 3-group");
    PsiResult out;
    out.group = parts.kernel.group;
    out.level = level;
    out.assurance = detail::weakest_assurance(t.records, level);
    return out;
}

/* One prime above 3 in the field attached to the defining polynomial. */
inline bool single_prime_above_3(const NumberFieldDesc &k) {
    Int d = poly_discriminant(k.poly);
    if (d % 9 == 0 && !dedekind_maximal_at(k.poly, Int(3)))
        throw std::runtime_error("single_prime_above_3: equation order not maximal at 3");
    return split_prime(k.poly, Int(3)).size() == 1;
}

/* The omega^{-j} eigenspace of Psi for the involution delta, j odd. Towers
 * without a delta action are base-field towers where the twist is invisible,
 * so Psi itself comes back. */
inline FiniteAbelianGroup psi_twisted_delta(const TowerData &t, long j = 1) {
    if (((j % 2) + 2) % 2 == 0)
        throw std::invalid_argument("psi_twisted_delta: even twist requires base-field data");
    long level = detail::stabilized_level_or_throw(t);
    detail::PsiParts parts = detail::psi_parts(t, level);
    if (!parts.module.has_actor("delta")) return parts.kernel.group;
    GroupHom delta_q = descend_endo(parts.coinv.projection, parts.module.actor("delta"));
    GroupHom delta_psi = restrict_endo(parts.kernel.inclusion, delta_q);
    Int q = parts.kernel.group.exponent();
    if (q < 3) q = 3;
    FiniteGaloisModule psim(parts.kernel.group, {{"delta", delta_psi}}, q);
    return eigenspace(psim, "delta", 2, q - 1).module.group();
}

/* Kernel of ((X'/3)(j))_G -> ((A'_0/3)(j))_Delta at twist level 1, j odd.
 * Mod 3 the cyclotomic character is trivial on gamma and is the quadratic
 * character on delta. Vanishing of the twisted Psi forces this kernel to
 * vanish; that implication is asserted on every run. */
inline FiniteAbelianGroup criterion_kernel_m1(const TowerData &t, long j = 1) {
    if (((j % 2) + 2) % 2 == 0)
        throw std::invalid_argument("criterion_kernel_m1: even twist requires base-field data");
    long level = detail::stabilized_level_or_throw(t);
    FiniteGaloisModule m = x_prime_finite_level(t, level);
    const ClassGroupRecord &top = t.records[static_cast<std::size_t>(level)];
    const ClassGroupRecord &base = t.records[0];
    auto actor_or_identity = [](const ClassGroupRecord &rec, const std::string &name) {
        for (const auto &[n, mm] : rec.galois_actions)
            if (n == name) return GroupHom(rec.s_class_group, rec.s_class_group, mm);
        if (rec.s_class_group.rank() > 0)
            throw std::invalid_argument("criterion_kernel_m1: missing " + name + " action");
        return GroupHom::identity(rec.s_class_group);
    };
    GroupHom gamma_up = actor_or_identity(top, "gamma");
    GroupHom delta_up = actor_or_identity(top, "delta");
    GroupHom delta_down = actor_or_identity(base, "delta");
    auto mod3 = [](const FiniteAbelianGroup &g) {
        return FiniteAbelianGroup(std::vector<Int>(g.rank(), Int(3)));
    };
    FiniteAbelianGroup up3 = mod3(m.group());
    FiniteAbelianGroup down3 = mod3(base.s_class_group);
    CyclotomicCharacterTable chi(Int(3), 1, {{"gamma", Int(1)}, {"delta", Int(-1)}});
    FiniteGaloisModule m3(up3,
                          {{"gamma", GroupHom(up3, up3, gamma_up.matrix())},
                           {"delta", GroupHom(up3, up3, delta_up.matrix())}},
                          Int(3));
    QuotientResult coup = coinvariants(tate_twist(m3, j, chi));
    FiniteGaloisModule d3(down3, {{"delta", GroupHom(down3, down3, delta_down.matrix())}},
                          Int(3));
    QuotientResult codown = coinvariants(tate_twist(d3, j, chi));
    GroupHom nu = GroupHom::identity(top.s_class_group);
    for (long i = level; i >= 1; --i)
        nu = detail::tower_norm(t.records[static_cast<std::size_t>(i)],
                                t.records[static_cast<std::size_t>(i - 1)])
                 .compose(nu);
    GroupHom nu3(up3, down3, nu.matrix());
    GroupHom induced = detail::hom_through_quotient(coup, codown.projection.compose(nu3));
    FiniteAbelianGroup kernel = hom_kernel(induced).group;
    FiniteAbelianGroup twisted = psi_twisted_delta(t, j);
    if (twisted.is_trivial() && !kernel.is_trivial())
        throw std::logic_error("criterion_kernel_m1: nonzero kernel with vanishing twisted psi");
    return kernel;
}

}  // namespace wildtame
