#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "wildtame/abelian.hpp"
#include "wildtame/int_matrix.hpp"

using namespace wildtame;

namespace {

IntMatrix random_matrix(std::mt19937 &rng, std::size_t maxdim, int lo, int hi) {
    std::uniform_int_distribution<std::size_t> dim(1, maxdim);
    std::uniform_int_distribution<int> val(lo, hi);
    IntMatrix m(dim(rng), dim(rng));
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) m.at(i, j) = val(rng);
    return m;
}

std::vector<Int> snf_diagonal(const IntMatrix &a) {
    SnfResult s = snf(a);
    std::vector<Int> d;
    for (std::size_t i = 0; i < std::min(a.rows(), a.cols()); ++i) d.push_back(s.d.at(i, i));
    return d;
}

FiniteAbelianGroup random_group(std::mt19937 &rng) {
    std::uniform_int_distribution<int> count(0, 3);
    std::uniform_int_distribution<int> factor(2, 24);
    std::vector<Int> f;
    int n = count(rng);
    for (int i = 0; i < n; ++i) f.emplace_back(factor(rng));
    return FiniteAbelianGroup::from_factors(f);
}

GroupHom random_hom(std::mt19937 &rng, const FiniteAbelianGroup &src,
                    const FiniteAbelianGroup &dst) {
    std::uniform_int_distribution<int> val(-6, 6);
    IntMatrix m(dst.rank(), src.rank());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            Int ti = dst.invariants()[i], sj = src.invariants()[j];
            Int step = ti / gcd_int(ti, sj);
            m.at(i, j) = step * val(rng);
        }
    return GroupHom(src, dst, m);
}

}  // namespace

TEST_CASE("snf frozen values") {
    /* expected diagonals computed with an independent CAS */
    struct Case {
        std::vector<std::vector<Int>> a;
        std::vector<Int> d;
    };
    std::vector<Case> cases = {
        {{{2, 4}, {4, 2}}, {2, 6}},
        {{{6, 4, 2}, {2, 8, 10}, {4, 4, 4}}, {2, 4, 4}},
        {{{12, 8}, {4, 10}, {6, 6}}, {2, 2}},
        {{{2, 1}, {0, 6}}, {1, 12}},
        {{{5, 0, 0}, {0, 5, 0}, {0, 0, 5}}, {5, 5, 5}},
        {{{0, 0}, {0, 0}}, {0, 0}},
        {{{3, 7, 11}, {13, 17, 19}}, {1, 2}},
        {{{-7, -17}, {-13, -19}, {-2, 1}}, {1, 1}},
        {{{-4, 2, 15}, {4, -19, 19}}, {1, 17}},
        {{{6, -18, 7}, {20, 8, -10}, {20, 13, 16}}, {1, 1, 11608}},
        {{{17, 10, 9, 8}, {-10, 6, -19, 20}, {14, 0, 2, 1}, {-10, -2, 3, 5}}, {1, 1, 1, 34680}},
    };
    for (const auto &c : cases) {
        IntMatrix a = IntMatrix::from_rows(c.a);
        REQUIRE(snf_diagonal(a) == c.d);
    }
}

TEST_CASE("snf trivial examples") {
    REQUIRE(snf_diagonal(IntMatrix::identity(3)) == std::vector<Int>{1, 1, 1});
    IntMatrix diag23(2, 2);
    diag23.at(0, 0) = 2;
    diag23.at(1, 1) = 3;
    REQUIRE(snf_diagonal(diag23) == std::vector<Int>{1, 6});
    IntMatrix diag33(2, 2);
    diag33.at(0, 0) = 3;
    diag33.at(1, 1) = 3;
    REQUIRE(snf_diagonal(diag33) == std::vector<Int>{3, 3});
}

TEST_CASE("snf properties on random matrices") {
    std::mt19937 rng(20260815);
    for (int iter = 0; iter < 300; ++iter) {
        IntMatrix a = random_matrix(rng, 6, -50, 50);
        SnfResult s = snf(a);
        REQUIRE(s.u * a * s.v == s.d);
        REQUIRE(abs_int(s.u.det()) == 1);
        REQUIRE(abs_int(s.v.det()) == 1);
        std::size_t n = std::min(a.rows(), a.cols());
        for (std::size_t i = 0; i < n; ++i) {
            REQUIRE(s.d.at(i, i) >= 0);
            for (std::size_t j = 0; j < s.d.cols(); ++j)
                if (j != i) REQUIRE(s.d.at(i, j) == 0);
            if (i + 1 < n && s.d.at(i + 1, i + 1) != 0) {
                REQUIRE(s.d.at(i, i) != 0);
                REQUIRE(s.d.at(i + 1, i + 1) % s.d.at(i, i) == 0);
            }
        }
    }
}

TEST_CASE("hnf examples and properties") {
    SECTION("identity") {
        HnfResult r = hnf(IntMatrix::identity(2));
        REQUIRE(r.h == IntMatrix::identity(2));
        REQUIRE(r.u == IntMatrix::identity(2));
    }
    SECTION("worked 2x2") {
        IntMatrix a = IntMatrix::from_rows({{2, 4}, {4, 2}});
        HnfResult r = hnf(a);
        REQUIRE(r.h.at(0, 0) == 2);
        REQUIRE(r.h.at(1, 1) == 6);
        REQUIRE(r.h.at(1, 0) == 0);
        REQUIRE(abs_int(r.u.det()) == 1);
        REQUIRE(r.u * a == r.h);
    }
    SECTION("zero matrix") {
        IntMatrix z(2, 2);
        HnfResult r = hnf(z);
        REQUIRE(r.h == z);
        REQUIRE(r.u == IntMatrix::identity(2));
    }
    SECTION("random") {
        std::mt19937 rng(987123);
        for (int iter = 0; iter < 300; ++iter) {
            IntMatrix a = random_matrix(rng, 6, -50, 50);
            HnfResult r = hnf(a);
            REQUIRE(r.u * a == r.h);
            REQUIRE(abs_int(r.u.det()) == 1);
            /* echelon with positive pivots, entries above reduced */
            std::size_t prev_col = 0;
            bool first = true;
            for (std::size_t i = 0; i < r.rank; ++i) {
                std::size_t j = 0;
                while (j < r.h.cols() && r.h.at(i, j) == 0) ++j;
                REQUIRE(j < r.h.cols());
                REQUIRE(r.h.at(i, j) > 0);
                if (!first) REQUIRE(j > prev_col);
                prev_col = j;
                first = false;
                for (std::size_t k = 0; k < i; ++k) {
                    REQUIRE(r.h.at(k, j) >= 0);
                    REQUIRE(r.h.at(k, j) < r.h.at(i, j));
                }
            }
            for (std::size_t i = r.rank; i < r.h.rows(); ++i)
                for (std::size_t j = 0; j < r.h.cols(); ++j) REQUIRE(r.h.at(i, j) == 0);
        }
    }
}

TEST_CASE("group_from_relations examples") {
    REQUIRE(group_from_relations(1, IntMatrix::from_rows({{9}})).group.invariants() ==
            std::vector<Int>{9});
    REQUIRE(group_from_relations(2, IntMatrix::from_rows({{3, 0}, {0, 3}})).group.invariants() ==
            std::vector<Int>{3, 3});
    REQUIRE(group_from_relations(2, IntMatrix::from_rows({{2, 1}, {0, 6}})).group.invariants() ==
            std::vector<Int>{12});
    REQUIRE_THROWS(group_from_relations(2, IntMatrix::from_rows({{2, 1}})));
}

TEST_CASE("group_from_relations projection is a presentation map") {
    /* the recorded projection must kill every relation row */
    std::mt19937 rng(5150);
    std::uniform_int_distribution<int> val(-9, 9);
    int built = 0;
    while (built < 200) {
        std::uniform_int_distribution<std::size_t> dim(1, 4);
        std::size_t c = dim(rng);
        IntMatrix rel(c + 1, c);
        for (std::size_t i = 0; i < rel.rows(); ++i)
            for (std::size_t j = 0; j < rel.cols(); ++j) rel.at(i, j) = val(rng);
        GroupPresentation pres;
        try {
            pres = group_from_relations(rel);
        } catch (const std::invalid_argument &) {
            continue;  /* infinite quotient draw */
        }
        ++built;
        for (std::size_t i = 0; i < rel.rows(); ++i) {
            std::vector<Int> row(c);
            for (std::size_t j = 0; j < c; ++j) row[j] = rel.at(i, j);
            REQUIRE(pres.group.is_zero_elem(pres.projection.apply(row)));
        }
        /* presentation invariance: permute rows, add a row multiple */
        IntMatrix rel2 = rel;
        rel2.swap_rows(0, rel.rows() - 1);
        rel2.add_row(0, 1, 3);
        REQUIRE(group_from_relations(rel2).group.invariants() == pres.group.invariants());
    }
}

TEST_CASE("hom kernel and cokernel examples") {
    FiniteAbelianGroup z9{{Int(9)}};
    GroupHom mul3(z9, z9, IntMatrix::from_rows({{3}}));
    REQUIRE(hom_kernel(mul3).group.invariants() == std::vector<Int>{3});
    REQUIRE(hom_cokernel(mul3).group.invariants() == std::vector<Int>{3});

    GroupHom id = GroupHom::identity(z9);
    REQUIRE(hom_kernel(id).group.is_trivial());
    REQUIRE(hom_cokernel(id).group.is_trivial());

    FiniteAbelianGroup z3z3{{Int(3), Int(3)}};
    FiniteAbelianGroup z3{{Int(3)}};
    GroupHom sum(z3z3, z3, IntMatrix::from_rows({{1, 1}}));
    REQUIRE(hom_kernel(sum).group.invariants() == std::vector<Int>{3});
    REQUIRE(hom_cokernel(sum).group.is_trivial());
}

TEST_CASE("kernel image order bookkeeping on random homs") {
    std::mt19937 rng(424242);
    for (int iter = 0; iter < 250; ++iter) {
        FiniteAbelianGroup src = random_group(rng), dst = random_group(rng);
        GroupHom f = random_hom(rng, src, dst);
        auto ker = hom_kernel(f);
        auto img = hom_image(f);
        auto cok = hom_cokernel(f);
        REQUIRE(ker.group.order() * img.group.order() == src.order());
        REQUIRE(img.group.order() * cok.group.order() == dst.order());
        /* inclusion maps land where claimed */
        for (std::size_t j = 0; j < ker.group.rank(); ++j) {
            std::vector<Int> e = ker.group.zero();
            e[j] = 1;
            REQUIRE(dst.is_zero_elem(f.apply(ker.inclusion.apply(e))));
        }
    }
}

TEST_CASE("sylow examples and properties") {
    FiniteAbelianGroup z12{{Int(12)}};
    REQUIRE(sylow(z12, 3).invariants() == std::vector<Int>{3});
    FiniteAbelianGroup g = FiniteAbelianGroup::from_factors({Int(12), Int(18)});
    REQUIRE(sylow(g, 3).invariants() == std::vector<Int>{3, 9});
    REQUIRE(sylow(FiniteAbelianGroup{}, 3).is_trivial());
    REQUIRE_THROWS(sylow(z12, 4));

    std::mt19937 rng(777);
    for (int iter = 0; iter < 200; ++iter) {
        FiniteAbelianGroup h = random_group(rng);
        auto decomp = sylow_decomposition(h);
        std::vector<FiniteAbelianGroup> parts;
        for (auto &[p, part] : decomp) parts.push_back(part);
        REQUIRE(iso_type_equal(direct_sum(parts).group, h));
    }
}

TEST_CASE("direct_sum and iso_type examples") {
    FiniteAbelianGroup z3{{Int(3)}};
    FiniteAbelianGroup z3z3{{Int(3), Int(3)}};
    auto s = direct_sum({z3z3, z3});
    REQUIRE(s.group.invariants() == std::vector<Int>{3, 3, 3});

    auto z6 = direct_sum({FiniteAbelianGroup{{Int(2)}}, z3});
    REQUIRE(z6.group.invariants() == std::vector<Int>{6});

    REQUIRE(iso_type_equal(FiniteAbelianGroup::from_factors({Int(9), Int(3)}),
                           FiniteAbelianGroup::from_factors({Int(3), Int(9)})));
    REQUIRE(!iso_type_equal(FiniteAbelianGroup{{Int(3), Int(3), Int(3)}},
                            FiniteAbelianGroup::from_factors({Int(9), Int(3)})));
}

TEST_CASE("direct_sum structure maps") {
    std::mt19937 rng(31337);
    for (int iter = 0; iter < 200; ++iter) {
        FiniteAbelianGroup a = random_group(rng), b = random_group(rng);
        auto s = direct_sum({a, b});
        REQUIRE(s.group.order() == a.order() * b.order());
        REQUIRE(s.projections[0].compose(s.inclusions[0]).equals(GroupHom::identity(a)));
        REQUIRE(s.projections[1].compose(s.inclusions[1]).equals(GroupHom::identity(b)));
        REQUIRE(s.projections[0].compose(s.inclusions[1]).equals(GroupHom::zero(b, a)));
    }
}

TEST_CASE("subgroup and quotient round trips") {
    std::mt19937 rng(999);
    std::uniform_int_distribution<int> val(-5, 5);
    for (int iter = 0; iter < 200; ++iter) {
        FiniteAbelianGroup g = random_group(rng);
        IntMatrix gens(g.rank(), 2);
        for (std::size_t i = 0; i < g.rank(); ++i) {
            gens.at(i, 0) = val(rng);
            gens.at(i, 1) = val(rng);
        }
        auto sub = subgroup_from_generators(g, gens);
        auto quo = quotient_by_generators(g, gens);
        REQUIRE(sub.group.order() * quo.group.order() == g.order());
        /* inclusion followed by projection is zero */
        REQUIRE(quo.projection.compose(sub.inclusion).equals(
            GroupHom::zero(sub.group, quo.group)));
        /* the generating columns are hit by the inclusion */
        for (std::size_t j = 0; j < 2; ++j) {
            auto img = hom_image(sub.inclusion);
            REQUIRE(img.group.order() == sub.group.order());
        }
    }
}
