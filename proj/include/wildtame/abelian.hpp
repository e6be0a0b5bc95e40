#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wildtame/int_matrix.hpp"

namespace wildtame {

/* Finite abelian group in invariant-factor form: Z/d1 x ... x Z/dr with
 * 2 <= d1 | d2 | ... | dr. The empty list is the trivial group (never [1]).
 * Elements are coordinate vectors, coordinate i taken mod d_i. */
class FiniteAbelianGroup {
  public:
    FiniteAbelianGroup() = default;

    explicit FiniteAbelianGroup(std::vector<Int> invariants) : inv_(std::move(invariants)) {
        for (std::size_t i = 0; i < inv_.size(); ++i) {
            if (inv_[i] < 2)
                throw std::invalid_argument("FiniteAbelianGroup: invariant factors must be >= 2");
            if (i + 1 < inv_.size() && inv_[i + 1] % inv_[i] != 0)
                throw std::invalid_argument("FiniteAbelianGroup: invariant factors must form a divisibility chain");
        }
    }

    /* Accepts factors in any order (each >= 2) and renormalizes to the chain. */
    static FiniteAbelianGroup from_factors(const std::vector<Int> &factors);

    const std::vector<Int> &invariants() const { return inv_; }
    std::size_t rank() const { return inv_.size(); }
    bool is_trivial() const { return inv_.empty(); }

    Int order() const {
        Int o = 1;
        for (const Int &d : inv_) o *= d;
        return o;
    }

    Int exponent() const { return inv_.empty() ? Int(1) : inv_.back(); }

    /* number of invariant factors divisible by p */
    std::size_t p_rank(const Int &p) const {
        std::size_t r = 0;
        for (const Int &d : inv_)
            if (d % p == 0) ++r;
        return r;
    }

    std::vector<Int> reduce(std::vector<Int> x) const {
        if (x.size() != inv_.size())
            throw std::invalid_argument("FiniteAbelianGroup::reduce: coordinate size mismatch");
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = mod_floor(x[i], inv_[i]);
        return x;
    }

    std::vector<Int> zero() const { return std::vector<Int>(inv_.size(), Int(0)); }

    std::vector<Int> add(const std::vector<Int> &a, const std::vector<Int> &b) const {
        std::vector<Int> c(inv_.size());
        for (std::size_t i = 0; i < inv_.size(); ++i) c[i] = mod_floor(a[i] + b[i], inv_[i]);
        return c;
    }

    std::vector<Int> scale(const Int &n, const std::vector<Int> &a) const {
        std::vector<Int> c(inv_.size());
        for (std::size_t i = 0; i < inv_.size(); ++i) c[i] = mod_floor(n * a[i], inv_[i]);
        return c;
    }

    bool is_zero_elem(const std::vector<Int> &a) const {
        for (std::size_t i = 0; i < inv_.size(); ++i)
            if (mod_floor(a[i], inv_[i]) != 0) return false;
        return true;
    }

    Int element_order(const std::vector<Int> &a) const {
        Int o = 1;
        for (std::size_t i = 0; i < inv_.size(); ++i) {
            Int ai = mod_floor(a[i], inv_[i]);
            if (ai != 0) o = lcm_int(o, inv_[i] / gcd_int(ai, inv_[i]));
        }
        return o;
    }

    /* Every element, generated in lexicographic coordinate order.
     * Only sane for small groups; used by oracles and subgroup search. */
    std::vector<std::vector<Int>> all_elements() const {
        std::vector<std::vector<Int>> out;
        out.push_back(zero());
        for (std::size_t i = 0; i < inv_.size(); ++i) {
            std::vector<std::vector<Int>> next;
            for (Int v = 0; v < inv_[i]; ++v)
                for (const auto &e : out) {
                    auto f = e;
                    f[i] = v;
                    next.push_back(std::move(f));
                }
            out = std::move(next);
        }
        return out;
    }

    bool operator==(const FiniteAbelianGroup &o) const { return inv_ == o.inv_; }

  private:
    std::vector<Int> inv_;
};

inline bool iso_type_equal(const FiniteAbelianGroup &a, const FiniteAbelianGroup &b) {
    return a.invariants() == b.invariants();
}

/* Homomorphism between finite abelian groups, matrix on invariant-factor
 * generators (column-vector convention). Construction checks the congruence
 * d_src[j] * M[i][j] == 0 mod d_dst[i], which is exactly well-definedness. */
class GroupHom {
  public:
    GroupHom() = default;

    GroupHom(FiniteAbelianGroup src, FiniteAbelianGroup dst, IntMatrix mat)
        : src_(std::move(src)), dst_(std::move(dst)), mat_(std::move(mat)) {
        if (mat_.rows() != dst_.rank() || mat_.cols() != src_.rank())
            throw std::invalid_argument("GroupHom: matrix dimensions do not match groups");
        for (std::size_t i = 0; i < mat_.rows(); ++i)
            for (std::size_t j = 0; j < mat_.cols(); ++j)
                if (mod_floor(src_.invariants()[j] * mat_.at(i, j), dst_.invariants()[i]) != 0)
                    throw std::invalid_argument("GroupHom: matrix does not define a homomorphism");
        for (std::size_t i = 0; i < mat_.rows(); ++i)
            for (std::size_t j = 0; j < mat_.cols(); ++j)
                mat_.at(i, j) = mod_floor(mat_.at(i, j), dst_.invariants()[i]);
    }

    static GroupHom identity(const FiniteAbelianGroup &g) {
        return GroupHom(g, g, IntMatrix::identity(g.rank()));
    }

    static GroupHom zero(const FiniteAbelianGroup &src, const FiniteAbelianGroup &dst) {
        return GroupHom(src, dst, IntMatrix(dst.rank(), src.rank()));
    }

    const FiniteAbelianGroup &source() const { return src_; }
    const FiniteAbelianGroup &target() const { return dst_; }
    const IntMatrix &matrix() const { return mat_; }

    std::vector<Int> apply(const std::vector<Int> &x) const {
        return dst_.reduce(mat_.apply(src_.reduce(x)));
    }

    GroupHom compose(const GroupHom &inner) const {
        if (!(inner.dst_ == src_))
            throw std::invalid_argument("GroupHom::compose: middle groups differ");
        return GroupHom(inner.src_, dst_, mat_ * inner.mat_);
    }

    GroupHom operator+(const GroupHom &o) const {
        if (!(src_ == o.src_) || !(dst_ == o.dst_))
            throw std::invalid_argument("GroupHom: sum of homs with different ends");
        return GroupHom(src_, dst_, mat_ + o.mat_);
    }

    GroupHom operator-(const GroupHom &o) const {
        if (!(src_ == o.src_) || !(dst_ == o.dst_))
            throw std::invalid_argument("GroupHom: difference of homs with different ends");
        return GroupHom(src_, dst_, mat_ - o.mat_);
    }

    bool equals(const GroupHom &o) const {
        if (!(src_ == o.src_) || !(dst_ == o.dst_)) return false;
        for (std::size_t i = 0; i < mat_.rows(); ++i)
            for (std::size_t j = 0; j < mat_.cols(); ++j)
                if (mod_floor(mat_.at(i, j) - o.mat_.at(i, j), dst_.invariants()[i]) != 0)
                    return false;
        return true;
    }

  private:
    FiniteAbelianGroup src_, dst_;
    IntMatrix mat_;
};

struct GroupPresentation {
    FiniteAbelianGroup group;
    /* projection Z^c -> group in the constructing basis: coordinates of the
     * image of the j-th ambient generator sit in column j */
    IntMatrix projection;
};

/* Z^c modulo the row space of rel (rows are relations among c generators).
 * Rejects infinite quotients. */
inline GroupPresentation group_from_relations(const IntMatrix &rel) {
    std::size_t c = rel.cols();
    SnfResult s = snf(rel.transpose());  /* columns of rel^T span the relation lattice */
    /* Z^c / im(rel^T) ~ Z^c / im(D) via z -> U z */
    std::size_t n = std::min(s.d.rows(), s.d.cols());
    std::vector<Int> invs;
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < c; ++i) {
        Int di = i < n ? s.d.at(i, i) : Int(0);
        if (di == 0)
            throw std::invalid_argument("group_from_relations: quotient is infinite");
        if (di > 1) {
            invs.push_back(di);
            keep.push_back(i);
        }
    }
    FiniteAbelianGroup g{invs};
    IntMatrix proj(invs.size(), c);
    for (std::size_t i = 0; i < keep.size(); ++i)
        for (std::size_t j = 0; j < c; ++j)
            proj.at(i, j) = mod_floor(s.u.at(keep[i], j), invs[i]);
    return {g, proj};
}

inline GroupPresentation group_from_relations(std::size_t n_generators, const IntMatrix &rel) {
    if (rel.cols() != n_generators)
        throw std::invalid_argument("group_from_relations: relation width != generator count");
    return group_from_relations(rel);
}

inline FiniteAbelianGroup FiniteAbelianGroup::from_factors(const std::vector<Int> &factors) {
    std::size_t n = factors.size();
    IntMatrix diag(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (factors[i] < 2)
            throw std::invalid_argument("FiniteAbelianGroup::from_factors: factors must be >= 2");
        diag.at(i, i) = factors[i];
    }
    return group_from_relations(diag).group;
}

struct SubgroupResult {
    FiniteAbelianGroup group;
    GroupHom inclusion;  /* group -> ambient */
};

/* Subgroup of `ambient` generated by the columns of `gens`. */
inline SubgroupResult subgroup_from_generators(const FiniteAbelianGroup &ambient,
                                               const IntMatrix &gens) {
    if (gens.rows() != ambient.rank())
        throw std::invalid_argument("subgroup_from_generators: generator size mismatch");
    std::size_t k = gens.cols(), m = ambient.rank();
    /* relations among the k generators: v with gens*v in the ambient relation lattice */
    IntMatrix stacked(m, k + m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) stacked.at(i, j) = gens.at(i, j);
        stacked.at(i, k + i) = ambient.invariants()[i];
    }
    IntMatrix ker = kernel_lattice(stacked);
    IntMatrix rel(ker.cols(), k);
    for (std::size_t j = 0; j < ker.cols(); ++j)
        for (std::size_t i = 0; i < k; ++i) rel.at(j, i) = ker.at(i, j);
    GroupPresentation pres = group_from_relations(rel);
    /* generators of the presented group, expressed in the ambient group:
     * solve projection * X = I over the presented invariants */
    std::size_t r = pres.group.rank();
    IntMatrix incl(m, r);
    {
        /* pres.projection maps Z^k onto the subgroup coordinates; a right
         * inverse section exists because the projection is onto */
        std::size_t kk = k, rr = r;
        IntMatrix big(rr, kk + rr);
        for (std::size_t i = 0; i < rr; ++i) {
            for (std::size_t j = 0; j < kk; ++j) big.at(i, j) = pres.projection.at(i, j);
            big.at(i, kk + i) = pres.group.invariants()[i];
        }
        for (std::size_t col = 0; col < rr; ++col) {
            std::vector<Int> e(rr, Int(0));
            e[col] = 1;
            auto sol = solve_integer(big, e);
            if (!sol)
                throw std::runtime_error("subgroup_from_generators: projection section missing");
            /* lift the section through gens into the ambient group */
            for (std::size_t i = 0; i < m; ++i) {
                Int acc = 0;
                for (std::size_t j = 0; j < kk; ++j) acc += gens.at(i, j) * (*sol)[j];
                incl.at(i, col) = mod_floor(acc, ambient.invariants()[i]);
            }
        }
    }
    return {pres.group, GroupHom(pres.group, ambient, incl)};
}

struct QuotientResult {
    FiniteAbelianGroup group;
    GroupHom projection;  /* ambient -> quotient */
};

/* ambient modulo the subgroup generated by the columns of `gens`. */
inline QuotientResult quotient_by_generators(const FiniteAbelianGroup &ambient,
                                             const IntMatrix &gens) {
    if (gens.rows() != ambient.rank())
        throw std::invalid_argument("quotient_by_generators: generator size mismatch");
    std::size_t m = ambient.rank(), k = gens.cols();
    IntMatrix rel(k + m, m);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t i = 0; i < m; ++i) rel.at(j, i) = gens.at(i, j);
    for (std::size_t i = 0; i < m; ++i) rel.at(k + i, i) = ambient.invariants()[i];
    GroupPresentation pres = group_from_relations(rel);
    return {pres.group, GroupHom(ambient, pres.group, pres.projection)};
}

inline SubgroupResult hom_kernel(const GroupHom &f) {
    std::size_t r = f.source().rank(), m = f.target().rank();
    IntMatrix stacked(m, r + m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < r; ++j) stacked.at(i, j) = f.matrix().at(i, j);
        stacked.at(i, r + i) = f.target().invariants()[i];
    }
    IntMatrix ker = kernel_lattice(stacked);
    IntMatrix gens(r, ker.cols());
    for (std::size_t j = 0; j < ker.cols(); ++j)
        for (std::size_t i = 0; i < r; ++i)
            gens.at(i, j) = mod_floor(ker.at(i, j), f.source().invariants()[i]);
    return subgroup_from_generators(f.source(), gens);
}

inline QuotientResult hom_cokernel(const GroupHom &f) {
    return quotient_by_generators(f.target(), f.matrix());
}

inline SubgroupResult hom_image(const GroupHom &f) {
    return subgroup_from_generators(f.target(), f.matrix());
}

inline bool hom_is_injective(const GroupHom &f) { return hom_kernel(f).group.is_trivial(); }

inline bool hom_is_surjective(const GroupHom &f) { return hom_cokernel(f).group.is_trivial(); }

inline bool hom_is_isomorphism(const GroupHom &f) {
    return f.source().order() == f.target().order() && hom_is_injective(f);
}

/* p-Sylow subgroup: invariant factors are the p-power parts. */
inline FiniteAbelianGroup sylow(const FiniteAbelianGroup &g, const Int &p) {
    if (!is_prime(p)) throw std::invalid_argument("sylow: p must be prime");
    std::vector<Int> invs;
    for (const Int &d : g.invariants()) {
        long v = valuation(d, p);
        if (v > 0) invs.push_back(pow_int(p, static_cast<unsigned long>(v)));
    }
    return FiniteAbelianGroup{invs};
}

/* Sylow inclusion: the p-part embeds by scaling each generator by the
 * prime-to-p cofactor's inverse... concretely e_i -> (d_i/p^v) * u * e_i with
 * u inverting d_i/p^v mod p^v, which lands a generator of the p-part. */
inline SubgroupResult sylow_subgroup(const FiniteAbelianGroup &g, const Int &p) {
    std::vector<std::size_t> idx;
    std::vector<Int> invs;
    for (std::size_t i = 0; i < g.rank(); ++i) {
        long v = valuation(g.invariants()[i], p);
        if (v > 0) {
            idx.push_back(i);
            invs.push_back(pow_int(p, static_cast<unsigned long>(v)));
        }
    }
    FiniteAbelianGroup s{invs};
    IntMatrix incl(g.rank(), invs.size());
    for (std::size_t j = 0; j < idx.size(); ++j) {
        Int cof = g.invariants()[idx[j]] / invs[j];
        incl.at(idx[j], j) = cof;
    }
    return {s, GroupHom(s, g, incl)};
}

/* All p-parts, ascending primes. */
inline std::vector<std::pair<Int, FiniteAbelianGroup>> sylow_decomposition(
    const FiniteAbelianGroup &g) {
    std::vector<std::pair<Int, FiniteAbelianGroup>> out;
    if (g.is_trivial()) return out;
    for (auto &[p, e] : factorize(g.order())) out.emplace_back(p, sylow(g, p));
    return out;
}

struct DirectSumResult {
    FiniteAbelianGroup group;
    std::vector<GroupHom> inclusions;
    std::vector<GroupHom> projections;
};

/* Direct sum, renormalized to a divisibility chain via SNF of the diagonal. */
inline DirectSumResult direct_sum(const std::vector<FiniteAbelianGroup> &parts) {
    std::vector<Int> concat;
    for (const auto &g : parts)
        for (const Int &d : g.invariants()) concat.push_back(d);
    std::size_t n = concat.size();
    IntMatrix diag(n, n);
    for (std::size_t i = 0; i < n; ++i) diag.at(i, i) = concat[i];
    GroupPresentation pres = group_from_relations(diag);
    DirectSumResult out;
    out.group = pres.group;
    /* pres.projection: Z^n -> group; component maps restrict it */
    std::size_t off = 0;
    for (const auto &g : parts) {
        std::size_t r = g.rank();
        IntMatrix inc(out.group.rank(), r);
        for (std::size_t j = 0; j < r; ++j)
            for (std::size_t i = 0; i < out.group.rank(); ++i)
                inc.at(i, j) = pres.projection.at(i, off + j);
        out.inclusions.emplace_back(g, out.group, inc);
        off += r;
    }
    /* projections: solve for each part q_i with q_i . inc_i = id, q_i . inc_j = 0.
     * The concatenated inclusion matrix is invertible over the chain; invert by
     * solving columnwise. */
    std::size_t total = out.group.rank();
    IntMatrix full(total, n);
    off = 0;
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const IntMatrix &inc = out.inclusions[pi].matrix();
        for (std::size_t j = 0; j < inc.cols(); ++j)
            for (std::size_t i = 0; i < total; ++i) full.at(i, off + j) = inc.at(i, j);
        off += inc.cols();
    }
    /* solve full * X = I_total modulo the chain: stack moduli columns */
    IntMatrix big(total, n + total);
    for (std::size_t i = 0; i < total; ++i) {
        for (std::size_t j = 0; j < n; ++j) big.at(i, j) = full.at(i, j);
        big.at(i, n + i) = out.group.invariants()[i];
    }
    IntMatrix xall(n, total);
    for (std::size_t col = 0; col < total; ++col) {
        std::vector<Int> e(total, Int(0));
        e[col] = 1;
        auto sol = solve_integer(big, e);
        if (!sol) throw std::runtime_error("direct_sum: inclusion matrix not invertible");
        for (std::size_t i = 0; i < n; ++i) xall.at(i, col) = (*sol)[i];
    }
    off = 0;
    for (const auto &g : parts) {
        std::size_t r = g.rank();
        IntMatrix proj(r, total);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < total; ++j)
                proj.at(i, j) = mod_floor(xall.at(off + i, j), g.invariants()[i]);
        out.projections.emplace_back(out.group, g, proj);
        off += r;
    }
    return out;
}

inline std::string invariants_to_string(const FiniteAbelianGroup &g) {
    if (g.is_trivial()) return "0";
    std::string s;
    for (std::size_t i = 0; i < g.rank(); ++i) {
        if (i) s += " x ";
        s += "Z/" + g.invariants()[i].str();
    }
    return s;
}

}  // namespace wildtame
