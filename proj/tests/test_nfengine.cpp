#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wildtame/nfengine.hpp"

using namespace wildtame;
using Catch::Matchers::ContainsSubstring;

namespace {

Int random_fundamental(std::mt19937 &rng, long lo, long hi, bool negative) {
    std::uniform_int_distribution<long> pick(lo, hi);
    for (;;) {
        long d = pick(rng);
        if (d == 0 || d == 1) continue;
        Int delta = negative ? Int(-d) : Int(d);
        if (!is_square_free(delta)) continue;
        return fundamental_discriminant(delta).D;
    }
}

QuadDiscriminant qd_from_disc(const Int &D) {
    QuadDiscriminant q;
    q.D = D;
    q.delta = mod_floor(D, 4) == 1 ? D : D / 4;
    return q;
}

Poly random_monic(std::mt19937 &rng, long deg, int height) {
    std::uniform_int_distribution<int> coeff(-height, height);
    Poly f(deg + 1);
    for (long i = 0; i < deg; ++i) f[i] = Int(coeff(rng));
    f[deg] = 1;
    return f;
}

std::filesystem::path fresh_dir(const std::string &tag) {
    static int counter = 0;
    auto p = std::filesystem::temp_directory_path() /
             ("wildtame_nftest_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

std::filesystem::path write_file(const std::filesystem::path &dir, const std::string &name,
                                 const std::string &text) {
    auto p = dir / name;
    std::ofstream out(p, std::ios::binary);
    out << text;
    return p;
}

IntMatrix mat(std::size_t r, std::size_t c, std::initializer_list<long> entries) {
    IntMatrix m(r, c);
    auto it = entries.begin();
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j) m.at(i, j) = Int(*it++);
    return m;
}

bool records_equal(const ClassGroupRecord &a, const ClassGroupRecord &b) {
    return serialize_record(a) == serialize_record(b);
}

}  // namespace

TEST_CASE("canonical defining polynomials") {
    /* the balanced representative of the real cyclotomic cubic */
    Poly psi9{Int(1), Int(-3), Int(0), Int(1)};
    CHECK(canonical_defining_poly(psi9) == Poly{Int(-1), Int(-3), Int(0), Int(1)});

    /* trace coefficient is balanced by an integer shift */
    CHECK(canonical_defining_poly(Poly{Int(2), Int(2), Int(1)}) ==
          Poly{Int(1), Int(0), Int(1)});
    CHECK(canonical_defining_poly(Poly{Int(0), Int(0), Int(1)}) == Poly{Int(0), Int(0), Int(1)});

    CHECK_THROWS_AS(canonical_defining_poly(Poly{Int(1), Int(2)}), std::invalid_argument);
    CHECK_THROWS_AS(canonical_defining_poly(Poly{Int(5)}), std::invalid_argument);

    std::mt19937 rng(4101);
    std::uniform_int_distribution<long> deg(1, 5);
    std::uniform_int_distribution<int> shift(-6, 6);
    for (int iter = 0; iter < 200; ++iter) {
        Poly f = random_monic(rng, deg(rng), 9);
        Poly c = canonical_defining_poly(f);
        /* idempotent, shift-invariant, mirror-invariant */
        CHECK(canonical_defining_poly(c) == c);
        CHECK(canonical_defining_poly(poly_translate(f, Int(shift(rng)))) == c);
        CHECK(canonical_defining_poly(poly_mirror(f)) == c);
        /* balanced trace coefficient */
        long n = poly_deg(c);
        CHECK(2 * c[n - 1] > -Int(n));
        CHECK(2 * c[n - 1] <= Int(n));
    }
}

TEST_CASE("layer field construction") {
    NumberFieldDesc base_q = field_rationals();
    CHECK(layer_field(base_q, 0) == base_q);

    NumberFieldDesc l1 = layer_field(base_q, 1);
    CHECK(l1.label == "Q.l1");
    CHECK(l1.poly == Poly{Int(-1), Int(-3), Int(0), Int(1)});
    CHECK(l1.degree == 3);
    CHECK(l1.r1 == 3);
    CHECK(l1.r2 == 0);

    SECTION("imaginary quadratic base") {
        QuadDiscriminant q = fundamental_discriminant(Int(-14));
        REQUIRE(q.D == -56);
        NumberFieldDesc l = layer_field(q, 1);
        CHECK(l.label == "qf(-56).l1");
        CHECK(l.degree == 6);
        CHECK(l.r1 == 0);
        CHECK(l.r2 == 3);
        CHECK(l.poly ==
              Poly{Int(2744), Int(0), Int(1764), Int(0), Int(84), Int(0), Int(1)});
        Int d = abs_int(poly_discriminant(l.poly));
        for (long p : {2, 3, 7})
            while (d % p == 0) d /= p;
        CHECK(d == 1);
    }

    SECTION("real quadratic base") {
        NumberFieldDesc l = layer_field(fundamental_discriminant(Int(5)), 1);
        CHECK(l.degree == 6);
        CHECK(l.r1 == 6);
        CHECK(l.r2 == 0);
    }

    SECTION("second layer over the rationals") {
        NumberFieldDesc l2 = layer_field(base_q, 2, Int(3), 2);
        CHECK(l2.degree == 9);
        CHECK(l2.poly == Poly{Int(-1), Int(9), Int(0), Int(-30), Int(0), Int(27), Int(0),
                              Int(-9), Int(0), Int(1)});
    }

    SECTION("guards") {
        CHECK_THROWS_AS(layer_field(base_q, 1, Int(5)), std::invalid_argument);
        CHECK_THROWS_AS(layer_field(base_q, -1), std::invalid_argument);
        CHECK_THROWS_AS(layer_field(base_q, 2), std::invalid_argument);  /* above max level */
        CHECK_THROWS_AS(layer_field(fundamental_discriminant(Int(-14)), 2, Int(3), 2),
                        std::invalid_argument);  /* degree 18 */
        /* the layer over its own layer collapses: no generator of full degree */
        CHECK_THROWS_WITH(layer_field(layer_field(base_q, 1), 1),
                          ContainsSubstring("degenerate compositum"));
    }

    SECTION("ramification of the compositum") {
        /* the polynomial discriminant is the field one times a square index;
         * away from 3 and the base discriminant only the square part survives */
        std::mt19937 rng(4102);
        std::uniform_int_distribution<int> sign(0, 1);
        for (int iter = 0; iter < 200; ++iter) {
            Int D = random_fundamental(rng, 2, 400, sign(rng) == 0);
            NumberFieldDesc l = layer_field(qd_from_disc(D), 1);
            CHECK(l.degree == 6);
            CHECK(l.r1 == (D > 0 ? 6 : 0));
            Int d = abs_int(poly_discriminant(l.poly));
            REQUIRE(d != 0);
            for (const auto &[p, e] : factorize(abs_int(3 * D)))
                while (d % p == 0) d /= p;
            CHECK(is_square(d));
        }
    }
}

TEST_CASE("generic class group engine") {
    SECTION("real cubic layer of the rationals is pinned trivial") {
        ClassGroupRecord rec = class_group_generic(layer_field(field_rationals(), 1));
        CHECK(rec.s_class_group.rank() == 0);
        CHECK(rec.assurance == "pinned");
        CHECK(rec.provenance == "computed");
        bool found = false;
        for (const auto &[k, v] : rec.extra_invariants)
            if (k == "sclassnumber") {
                found = true;
                CHECK(v == 1);
            }
        CHECK(found);
    }

    SECTION("agrees with the form class groups across all small discriminants") {
        for (long d = -500; d <= 500; ++d) {
            if (d == 0 || d == 1) continue;
            if (!is_fundamental_discriminant(Int(d))) continue;
            QuadDiscriminant q = qd_from_disc(Int(d));
            FiniteAbelianGroup expected = s_class_group(q, Int(3));
            ClassGroupRecord rec = class_group_generic(field_quadratic(q));
            INFO("D = " << d);
            CHECK(rec.s_class_group == sylow(expected, Int(3)));
            CHECK(rec.assurance == "pinned");
            Int full(-1);
            for (const auto &[k, v] : rec.extra_invariants)
                if (k == "sclassnumber") full = v;
            CHECK(full == expected.order());
        }
    }

    SECTION("agrees with the form class groups on random larger discriminants") {
        std::mt19937 rng(4103);
        std::uniform_int_distribution<int> sign(0, 1);
        for (int iter = 0; iter < 30; ++iter) {
            Int D = random_fundamental(rng, 500, 2500, sign(rng) == 0);
            QuadDiscriminant q = qd_from_disc(D);
            ClassGroupRecord rec = class_group_generic(field_quadratic(q));
            INFO("D = " << D);
            CHECK(rec.s_class_group == sylow(s_class_group(q, Int(3)), Int(3)));
            CHECK(rec.assurance == "pinned");
        }
    }

    SECTION("degree three with a nonempty factor base stays heuristic") {
        NumberFieldDesc K = make_field("cubic283", Poly{Int(-1), Int(4), Int(0), Int(1)});
        ClassGroupRecord rec = class_group_generic(K);
        CHECK(rec.assurance == "heuristic");
        EngineOptions want_pinned;
        want_pinned.requested_assurance = "pinned";
        CHECK_THROWS_WITH(class_group_generic(K, want_pinned),
                          ContainsSubstring("cannot certify assurance"));
    }

    SECTION("guards and failure modes") {
        NumberFieldDesc big = layer_field(fundamental_discriminant(Int(-14)), 1);
        CHECK_THROWS_WITH(class_group_generic(big),
                          ContainsSubstring("discriminant above configured bound"));

        NumberFieldDesc deg9 = layer_field(field_rationals(), 2, Int(3), 2);
        CHECK_THROWS_WITH(class_group_generic(deg9), ContainsSubstring("degree above 6"));

        EngineOptions tiny;
        tiny.max_search_height = 1;
        CHECK_THROWS_WITH(
            class_group_generic(field_quadratic(qd_from_disc(Int(-239))), tiny),
            ContainsSubstring("insufficient relations"));

        EngineOptions trusted;
        trusted.requested_assurance = "ingested-trusted";
        CHECK_THROWS_WITH(class_group_generic(field_quadratic(qd_from_disc(Int(-23))), trusted),
                          ContainsSubstring("cannot certify assurance"));

        EngineOptions bad;
        bad.requested_assurance = "gold";
        CHECK_THROWS_AS(class_group_generic(field_quadratic(qd_from_disc(Int(-23))), bad),
                        std::invalid_argument);

        EngineOptions pinned_ok;
        pinned_ok.requested_assurance = "pinned";
        CHECK(class_group_generic(field_quadratic(qd_from_disc(Int(-23))), pinned_ok)
                  .assurance == "pinned");
    }
}

TEST_CASE("record serialization round trip") {
    std::mt19937 rng(4104);
    std::uniform_int_distribution<int> coin(0, 1), entry(-9, 9), nonneg(0, 99);
    const std::vector<Poly> pool = {
        Poly{Int(7), Int(1)},
        Poly{Int(1), Int(0), Int(1)},
        Poly{Int(1), Int(-1), Int(1)},
        Poly{Int(-2), Int(0), Int(1)},
        Poly{Int(-1), Int(-3), Int(0), Int(1)},
        Poly{Int(-1), Int(-1), Int(0), Int(1)},
        Poly{Int(1), Int(0), Int(0), Int(0), Int(1)},
    };
    const std::vector<std::string> assurances = {"heuristic", "pinned", "ingested-trusted"};
    std::uniform_int_distribution<std::size_t> pick_poly(0, pool.size() - 1);
    std::uniform_int_distribution<int> pick_assur(0, 2), chain_len(0, 3), small(2, 9),
        mult(1, 3), rows_pick(0, 2);

    for (int iter = 0; iter < 200; ++iter) {
        ClassGroupRecord rec;
        rec.field = make_field("fld" + std::to_string(iter), pool[pick_poly(rng)]);
        std::vector<Int> inv;
        Int d = 1;
        int len = chain_len(rng);
        for (int i = 0; i < len; ++i) {
            d = (i == 0) ? Int(small(rng)) : d * mult(rng);
            if (i > 0 && d == inv.back()) d *= 2;
            if (i > 0 && d < inv.back() * 2) d = inv.back() * 2;
            inv.push_back(d);
        }
        rec.s_class_group = FiniteAbelianGroup(inv);
        std::size_t r = rec.s_class_group.rank();
        int nact = rows_pick(rng);
        for (int a = 0; a < nact; ++a) {
            IntMatrix m(r, r);
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j) m.at(i, j) = Int(entry(rng));
            rec.galois_actions.emplace_back(a == 0 ? "gamma" : "delta", std::move(m));
        }
        if (coin(rng)) {
            std::size_t nrows = r == 0 ? 0 : static_cast<std::size_t>(rows_pick(rng));
            IntMatrix m(nrows, r);
            for (std::size_t i = 0; i < nrows; ++i)
                for (std::size_t j = 0; j < r; ++j) m.at(i, j) = Int(entry(rng));
            rec.norm_to = std::make_pair("base" + std::to_string(iter), std::move(m));
        }
        rec.provenance = coin(rng) ? "computed" : "ingested";
        rec.assurance = assurances[pick_assur(rng)];
        rec.stable = coin(rng) == 1;
        if (coin(rng)) rec.extra_invariants.emplace_back("sclassnumber", Int(nonneg(rng)));
        if (coin(rng)) rec.extra_invariants.emplace_back("k2order3", Int(nonneg(rng)));

        std::string text = serialize_record(rec);
        ClassGroupRecord back = parse_record(text);
        CHECK(serialize_record(back) == text);
        CHECK(back.field == rec.field);
        CHECK(back.s_class_group == rec.s_class_group);
        CHECK(back.provenance == rec.provenance);
        CHECK(back.assurance == rec.assurance);
        CHECK(back.stable == rec.stable);
        CHECK(back.galois_actions.size() == rec.galois_actions.size());
        CHECK(back.norm_to.has_value() == rec.norm_to.has_value());
        CHECK(back.extra_invariants == rec.extra_invariants);
    }
}

TEST_CASE("record parsing rejects malformed input") {
    const std::string good =
        "WTREC 1\nfield qf(-23) 2 6 -1 1\ngroup 3\nprovenance computed\n";
    CHECK_NOTHROW(parse_record(good));

    CHECK_THROWS_WITH(parse_record("WTREC 2\nfield q 1 0 1\ngroup\nprovenance computed\n"),
                      ContainsSubstring("missing WTREC 1 header"));
    CHECK_THROWS_WITH(parse_record("WTREC 1\nfield qf(-23) 3 6 -1 1\ngroup\nprovenance x\n"),
                      ContainsSubstring("degree does not match"));
    CHECK_THROWS_WITH(parse_record("WTREC 1\nfield q 1 0 1\ngroup 3 2\nprovenance computed\n"),
                      ContainsSubstring("invariant factors"));
    CHECK_THROWS_WITH(
        parse_record("WTREC 1\nfield q 1 0 1\ngroup 3\naction gamma 1 0\nprovenance x\n"),
        ContainsSubstring("rank^2 entries"));
    CHECK_THROWS_WITH(
        parse_record("WTREC 1\nfield q 1 0 1\ngroup 3 3\nnorm_to base 1 2 3\nprovenance x\n"),
        ContainsSubstring("not a multiple of the rank"));
    CHECK_THROWS_WITH(
        parse_record("WTREC 1\nfield q 1 0 1\ngroup\nnorm_to base 1\nprovenance x\n"),
        ContainsSubstring("trivial group"));
    CHECK_THROWS_WITH(parse_record("WTREC 1\nfield q 1 0 1\ngroup 3\nprovenance a b\n"),
                      ContainsSubstring("provenance needs one token"));
    CHECK_THROWS_WITH(parse_record(good + "flavor vanilla\n"),
                      ContainsSubstring("unknown directive"));
    CHECK_THROWS_WITH(parse_record("WTREC 1\nfield q 1 0 1\ngroup 3\n"),
                      ContainsSubstring("provenance are required"));
    CHECK_THROWS_WITH(parse_record("WTREC 1\nfield q 1 0 x\ngroup 3\nprovenance computed\n"),
                      ContainsSubstring("malformed integer"));
    CHECK_THROWS_WITH(parse_record(good + "stable yes\n"),
                      ContainsSubstring("stable takes the single value 1"));
    CHECK_THROWS_WITH(parse_record(good + "assurance gold\n"),
                      ContainsSubstring("unknown assurance level"));
    /* reducible field polynomial is rejected at parse time */
    CHECK_THROWS_WITH(parse_record("WTREC 1\nfield q 2 1 2 1\ngroup\nprovenance computed\n"),
                      ContainsSubstring("not irreducible"));
}

TEST_CASE("record validation") {
    auto base_rec = [](const std::string &label, const std::vector<Int> &inv) {
        ClassGroupRecord rec;
        rec.field = make_field(label, Poly{Int(1), Int(-1), Int(1)});
        rec.s_class_group = FiniteAbelianGroup(inv);
        return rec;
    };

    SECTION("rank two record with an involution and the identity") {
        ClassGroupRecord rec = base_rec("K1", {Int(3), Int(3)});
        rec.galois_actions.emplace_back("delta", mat(2, 2, {2, 0, 0, 2}));
        rec.galois_actions.emplace_back("gamma", mat(2, 2, {1, 0, 0, 1}));
        CHECK_NOTHROW(validate_record(rec));
    }

    SECTION("non-commuting actions are rejected") {
        ClassGroupRecord rec = base_rec("K1", {Int(3), Int(3)});
        rec.galois_actions.emplace_back("delta", mat(2, 2, {0, 1, 1, 0}));
        rec.galois_actions.emplace_back("gamma", mat(2, 2, {1, 1, 0, 1}));
        CHECK_THROWS_WITH(validate_record(rec), ContainsSubstring("do not commute"));
    }

    SECTION("non-invertible action is rejected") {
        ClassGroupRecord rec = base_rec("K1", {Int(3)});
        rec.galois_actions.emplace_back("gamma", mat(1, 1, {0}));
        CHECK_THROWS_WITH(validate_record(rec), ContainsSubstring("not invertible"));
    }

    SECTION("action breaking the invariant chain is rejected") {
        ClassGroupRecord rec = base_rec("K1", {Int(3), Int(9)});
        rec.galois_actions.emplace_back("gamma", mat(2, 2, {1, 0, 1, 1}));
        CHECK_THROWS_WITH(validate_record(rec),
                          ContainsSubstring("inconsistent with the invariant factors"));
    }

    SECTION("wrong shape action is rejected") {
        ClassGroupRecord rec = base_rec("K1", {Int(3), Int(3)});
        rec.galois_actions.emplace_back("gamma", mat(1, 1, {1}));
        CHECK_THROWS_WITH(validate_record(rec), ContainsSubstring("not rank x rank"));
    }

    SECTION("empty group accepts anything consistent") {
        ClassGroupRecord rec = base_rec("K1", {});
        rec.galois_actions.emplace_back("gamma", IntMatrix(0, 0));
        CHECK_NOTHROW(validate_record(rec));
    }

    SECTION("norm_to needs a resolvable target") {
        ClassGroupRecord rec = base_rec("up", {Int(3)});
        rec.norm_to = std::make_pair("down", mat(1, 1, {1}));
        CHECK_THROWS_WITH(validate_record(rec), ContainsSubstring("no resolver"));
        RecordResolver empty = [](const std::string &) {
            return std::optional<ClassGroupRecord>{};
        };
        CHECK_THROWS_WITH(validate_record(rec, empty),
                          ContainsSubstring("norm_to target unresolved: down"));
    }

    SECTION("norm_to equivariance matches a direct check") {
        std::mt19937 rng(4105);
        std::uniform_int_distribution<int> e3(0, 2), c_pick(1, 2);
        int seen_good = 0, seen_bad = 0;
        for (int iter = 0; iter < 200; ++iter) {
            IntMatrix up(2, 2);
            for (;;) {
                for (std::size_t i = 0; i < 2; ++i)
                    for (std::size_t j = 0; j < 2; ++j) up.at(i, j) = Int(e3(rng));
                Int det = up.at(0, 0) * up.at(1, 1) - up.at(0, 1) * up.at(1, 0);
                if (mod_floor(det, Int(3)) != 0) break;
            }
            Int c = Int(c_pick(rng));
            IntMatrix nm(1, 2);
            nm.at(0, 0) = Int(e3(rng));
            nm.at(0, 1) = Int(e3(rng));

            ClassGroupRecord down;
            down.field = make_field("down", Poly{Int(1), Int(1), Int(1)});
            down.s_class_group = FiniteAbelianGroup({Int(3)});
            IntMatrix dm(1, 1);
            dm.at(0, 0) = c;
            down.galois_actions.emplace_back("gamma", dm);

            ClassGroupRecord rec;
            rec.field = make_field("up", Poly{Int(1), Int(-1), Int(1)});
            rec.s_class_group = FiniteAbelianGroup({Int(3), Int(3)});
            rec.galois_actions.emplace_back("gamma", up);
            rec.norm_to = std::make_pair("down", nm);

            RecordResolver resolver = [&](const std::string &label) {
                return label == "down" ? std::optional<ClassGroupRecord>(down)
                                       : std::optional<ClassGroupRecord>{};
            };
            bool equivariant = true;
            for (std::size_t j = 0; j < 2; ++j) {
                Int lhs = nm.at(0, 0) * up.at(0, j) + nm.at(0, 1) * up.at(1, j);
                Int rhs = c * nm.at(0, j);
                if (mod_floor(lhs - rhs, Int(3)) != 0) equivariant = false;
            }
            if (equivariant) {
                ++seen_good;
                CHECK_NOTHROW(validate_record(rec, resolver));
            } else {
                ++seen_bad;
                CHECK_THROWS_WITH(validate_record(rec, resolver),
                                  ContainsSubstring("not equivariant"));
            }
        }
        CHECK(seen_good >= 10);
        CHECK(seen_bad >= 10);
    }
}

TEST_CASE("record ingestion") {
    auto dir = fresh_dir("ingest");
    const std::string k1_text =
        "WTREC 1\n"
        "field K1 2 1 -1 1\n"
        "group 3 3\n"
        "action delta 2 0 0 2\n"
        "action gamma 1 0 0 1\n"
        "provenance computed\n";

    SECTION("accepted record is marked ingested and upgraded to trusted") {
        auto p = write_file(dir, "k1.wtrec", k1_text);
        ClassGroupRecord rec = ingest_record(p);
        CHECK(rec.provenance == "ingested");
        CHECK(rec.assurance == "ingested-trusted");
        CHECK(rec.s_class_group == FiniteAbelianGroup({Int(3), Int(3)}));
        CHECK(rec.galois_actions.size() == 2);
        /* validation-complete: the returned record re-validates as is */
        CHECK_NOTHROW(validate_record(rec));

        /* idempotent: re-ingesting the serialized record reproduces it */
        auto p2 = write_file(dir, "k1b.wtrec", serialize_record(rec));
        ClassGroupRecord again = ingest_record(p2);
        CHECK(records_equal(rec, again));
    }

    SECTION("explicit assurance is preserved") {
        auto p = write_file(dir, "pin.wtrec",
                            "WTREC 1\nfield q 1 0 1\ngroup\nprovenance computed\n"
                            "assurance pinned\n");
        CHECK(ingest_record(p).assurance == "pinned");
    }

    SECTION("non-commuting actions are rejected at ingest") {
        auto p = write_file(dir, "bad.wtrec",
                            "WTREC 1\nfield K1 2 1 -1 1\ngroup 3 3\n"
                            "action delta 0 1 1 0\naction gamma 1 1 0 1\n"
                            "provenance computed\n");
        CHECK_THROWS_WITH(ingest_record(p), ContainsSubstring("do not commute"));
    }

    SECTION("empty group record is accepted") {
        auto p = write_file(dir, "triv.wtrec",
                            "WTREC 1\nfield q 1 0 1\ngroup\nprovenance computed\n");
        ClassGroupRecord rec = ingest_record(p);
        CHECK(rec.s_class_group.order() == 1);
    }

    SECTION("missing file") {
        CHECK_THROWS_WITH(ingest_record(dir / "absent.wtrec"),
                          ContainsSubstring("cannot open"));
    }

    std::filesystem::remove_all(dir);
}

TEST_CASE("cache store") {
    auto dir = fresh_dir("cache");
    CacheStore cache(dir);

    ClassGroupRecord rec;
    rec.field = make_field("qf(-23)", Poly{Int(6), Int(-1), Int(1)});
    rec.s_class_group = FiniteAbelianGroup({Int(3)});
    rec.assurance = "pinned";
    rec.extra_invariants.emplace_back("sclassnumber", Int(3));

    SECTION("cold miss, then put and bit-exact get") {
        CHECK(!cache.get("qf(-23)", "l0").has_value());
        CHECK(cache.put(rec, "l0"));
        auto back = cache.get("qf(-23)", "l0");
        REQUIRE(back.has_value());
        CHECK(records_equal(*back, rec));
        /* distinct parameters hash to distinct entries */
        CHECK(!cache.get("qf(-23)", "l1").has_value());
    }

    SECTION("corrupt entries are ignored") {
        CHECK(cache.put(rec, "l0"));
        write_file(dir, cache.entry_path("qf(-23)", "l0").filename().string(), "garbage\n");
        CHECK(!cache.get("qf(-23)", "l0").has_value());
        /* and never block a rewrite */
        CHECK(cache.put(rec, "l0"));
        CHECK(cache.get("qf(-23)", "l0").has_value());
    }

    SECTION("higher assurance shadows, lower does not") {
        ClassGroupRecord heur = rec;
        heur.assurance = "heuristic";
        ClassGroupRecord trusted = rec;
        trusted.assurance = "ingested-trusted";
        trusted.provenance = "ingested";

        CHECK(cache.put(rec, "l0"));          /* pinned */
        CHECK(!cache.put(heur, "l0"));        /* refused: lower assurance */
        CHECK(cache.get("qf(-23)", "l0")->assurance == "pinned");
        CHECK(cache.put(trusted, "l0"));      /* accepted: higher assurance */
        auto back = cache.get("qf(-23)", "l0");
        CHECK(back->assurance == "ingested-trusted");
        CHECK(back->provenance == "ingested");
        CHECK(cache.put(trusted, "l0"));      /* equal assurance overwrites */
    }

    std::filesystem::remove_all(dir);
}
