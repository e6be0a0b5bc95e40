#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "wildtame/lvalues.hpp"

using namespace wildtame;

namespace {

Int random_fundamental_positive(std::mt19937 &rng, long lo, long hi) {
    std::uniform_int_distribution<long> pick(lo, hi);
    for (;;) {
        long d = pick(rng);
        if (d < 2) continue;
        if (!is_square_free(Int(d))) continue;
        return fundamental_discriminant(Int(d)).D;
    }
}

/* same defining sum over a period F that is a multiple of the conductor */
Rational b2_over_period(const DirichletCharacter &chi, const Int &F) {
    Int s0 = 0, s1 = 0, s2 = 0;
    for (Int a = 1; a <= F; ++a) {
        int c = chi(a);
        if (c == 0) continue;
        s0 += c;
        s1 += c * a;
        s2 += c * a * a;
    }
    return Rational(s2, F) - Rational(s1) + Rational(F * s0, 6);
}

std::vector<long> primes_below(long n) {
    std::vector<char> sieve(n, 1);
    std::vector<long> out;
    for (long p = 2; p < n; ++p) {
        if (!sieve[p]) continue;
        out.push_back(p);
        for (long q = p * p; q < n; q += p) sieve[q] = 0;
    }
    return out;
}

}  // namespace

TEST_CASE("kronecker matches the frozen oracle table") {
    /* rows: n from -6 to 19 */
    struct Row {
        long D;
        int vals[26];
    };
    const Row table[] = {
        {-23, {-1, 1, -1, -1, -1, -1, 0, 1, 1, 1, 1, -1, 1,
               -1, 1,  1,  -1, -1, 1,  1, -1, -1, 1, -1, 1, -1}},
        {-4, {0, -1, 0, 1, 0, -1, 0, 1, 0, -1, 0, 1, 0,
              -1, 0, 1, 0, -1, 0, 1, 0, -1, 0, 1, 0, -1}},
        {-239, {-1, -1, -1, -1, -1, -1, 0, 1, 1, 1, 1, 1, 1,
                -1, 1,  1,  1,  1,  1,  -1, -1, 1, 1, 1, 1, -1}},
        {5, {1, 0, 1, -1, -1, 1, 0, 1, -1, -1, 1, 0, 1,
             -1, -1, 1, 0, 1, -1, -1, 1, 0, 1, -1, -1, 1}},
        {8, {0, -1, 0, -1, 0, 1, 0, 1, 0, -1, 0, -1, 0,
             1, 0, 1, 0, -1, 0, -1, 0, 1, 0, 1, 0, -1}},
        {12, {0, -1, 0, 0, 0, 1, 0, 1, 0, 0, 0, -1, 0,
              -1, 0, 0, 0, 1, 0, 1, 0, 0, 0, -1, 0, -1}},
        {168, {0, -1, 0, 0, 0, 1, 0, 1, 0, 0, 0, -1, 0,
               0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 1, 0, 1}},
        {717, {0, -1, 1, 0, -1, 1, 0, 1, -1, 0, 1, -1, 0,
               -1, -1, 0, 1, -1, 0, -1, 1, 0, 1, -1, 0, -1}},
    };
    for (const Row &row : table)
        for (int i = 0; i < 26; ++i)
            REQUIRE(kronecker(Int(row.D), Int(i - 6)) == row.vals[i]);
}

TEST_CASE("kronecker identities") {
    std::mt19937 rng(2001);
    std::uniform_int_distribution<long> dd(-400, 400), nn(-50, 50);
    int done = 0;
    while (done < 200) {
        long d = dd(rng);
        if (!is_fundamental_discriminant(Int(d))) continue;
        Int D(d);
        REQUIRE(kronecker(D, Int(1)) == 1);
        REQUIRE(kronecker(D, Int(-1)) == (D > 0 ? 1 : -1));
        Int n(nn(rng)), m(nn(rng));
        REQUIRE(kronecker(D, n) * kronecker(D, m) == kronecker(D, n * m));
        if (n > 0) REQUIRE(kronecker(D, n) == kronecker(D, n + abs_int(D)));
        ++done;
    }
    CHECK(kronecker(Int(-4), Int(3)) == -1);
    CHECK_THROWS_AS(kronecker_character(Int(45)), std::invalid_argument);
    CHECK_THROWS_AS(kronecker_character(Int(18)), std::invalid_argument);
    CHECK(kronecker_character(Int(1)).conductor == 1);
    CHECK(kronecker_character(Int(-23)).odd());
}

TEST_CASE("generalized Bernoulli numbers against the oracle") {
    CHECK(bernoulli_b2_chi(kronecker_character(Int(1))) == Rational(1, 6));
    CHECK(bernoulli_b2_chi(kronecker_character(Int(5))) == Rational(4, 5));
    CHECK(bernoulli_b2_chi(kronecker_character(Int(8))) == 2);
    CHECK(bernoulli_b2_chi(kronecker_character(Int(12))) == 4);
    CHECK(bernoulli_b2_chi(kronecker_character(Int(40))) == 28);
    CHECK(bernoulli_b2_chi(kronecker_character(Int(316))) == 672);
    CHECK(bernoulli_b2_chi(kronecker_character(Int(168))) == 216);
    CHECK(bernoulli_b2_chi(kronecker_character(Int(717))) == 1440);
    CHECK(bernoulli_b2_chi(kronecker_character(Int(-4))) == 0);
    CHECK(bernoulli_b2_chi(kronecker_character(Int(-23))) == 0);
    CHECK(bernoulli_b2_chi(kronecker_character(Int(-239))) == 0);
}

TEST_CASE("defining sum is period independent") {
    DirichletCharacter chi8 = kronecker_character(Int(8));
    Rational b8 = bernoulli_b2_chi(chi8);
    CHECK(b2_over_period(chi8, Int(16)) == b8);
    CHECK(b2_over_period(chi8, Int(24)) == b8);

    DirichletCharacter chi5 = kronecker_character(Int(5));
    Rational b5 = bernoulli_b2_chi(chi5);
    CHECK(b2_over_period(chi5, Int(15)) == b5);
    CHECK(b2_over_period(chi5, Int(20)) == b5);
}

TEST_CASE("parity vanishing across all small fundamental discriminants") {
    for (long d = -1000; d <= 1000; ++d) {
        if (!is_fundamental_discriminant(Int(d))) continue;
        Rational b = bernoulli_b2_chi(kronecker_character(Int(d)));
        REQUIRE((b == 0) == (d < 0));
    }
}

TEST_CASE("zeta values at minus one") {
    CHECK(zeta_k_minus1(Int(5)) == Rational(1, 30));
    CHECK(zeta_k_minus1(Int(8)) == Rational(1, 12));
    CHECK(zeta_k_minus1(Int(12)) == Rational(1, 6));
    CHECK_THROWS_WITH(zeta_k_minus1(Int(-4)),
                      Catch::Matchers::ContainsSubstring("totally real"));
    CHECK_THROWS_AS(zeta_k_minus1(Int(0)), std::invalid_argument);
    CHECK_THROWS_AS(zeta_k_minus1(Int(-23)), std::invalid_argument);

    std::mt19937 rng(2002);
    for (int it = 0; it < 200; ++it) {
        Int D = random_fundamental_positive(rng, 2, 600);
        Rational z = zeta_k_minus1(D);
        REQUIRE(z > 0);
        REQUIRE(24 * z == bernoulli_b2_chi(kronecker_character(D)));
    }
}

TEST_CASE("k2 order paper anchors") {
    CHECK(k2_order_3part(Int(717)) == 2);
    CHECK(k2_order_3part(Int(42)) == 3);
    CHECK(k2_order_3part(Int(4227)) == 3);
    CHECK(k2_order_3part(Int(4974)) == 3);
}

TEST_CASE("k2 order domain checks") {
    CHECK_THROWS_AS(k2_order_3part(Int(-21)), std::invalid_argument);
    CHECK_THROWS_AS(k2_order_3part(Int(0)), std::invalid_argument);
    CHECK_THROWS_AS(k2_order_3part(Int(715)), std::invalid_argument);
    CHECK_THROWS_AS(k2_order_3part(Int(718)), std::invalid_argument);
    CHECK_THROWS_AS(k2_order_3part(Int(60)), std::invalid_argument);

    std::mt19937 rng(2003);
    std::uniform_int_distribution<long> mm(0, 220);
    int done = 0;
    while (done < 200) {
        Int delta = 9 * mm(rng) + 6;
        if (!is_square_free(delta)) continue;
        long v = k2_order_3part(delta);
        REQUIRE(v >= 0);
        Rational b = 24 * zeta_k_minus1(fundamental_discriminant(delta).D);
        REQUIRE(mod_floor(boost::multiprecision::denominator(b), 3) != 0);
        ++done;
    }
}

TEST_CASE("euler product sanity") {
    /* functional equation for even primitive chi: L(2, chi) = pi^2 B2,chi / f^(3/2);
     * truncating the Euler product at P leaves relative error below 2/P */
    std::vector<long> ps = primes_below(2000);
    Real pi = 4 * atan(Real(1));
    std::mt19937 rng(2004);
    std::set<long> used;
    int done = 0;
    while (done < 20) {
        Int D = random_fundamental_positive(rng, 2, 400);
        if (!used.insert(to_long(D)).second) continue;
        DirichletCharacter chi = kronecker_character(D);
        Real prod = 1;
        for (long p : ps) {
            int c = chi(Int(p));
            if (c == 0) continue;
            prod /= 1 - Real(c) / (Real(p) * Real(p));
        }
        Rational b = bernoulli_b2_chi(chi);
        Real exact = Real(boost::multiprecision::numerator(b).str()) /
                     Real(boost::multiprecision::denominator(b).str());
        Real f(abs_int(D).str());
        Real predicted = prod * f * sqrt(f) / (pi * pi);
        REQUIRE(abs(predicted - exact) < abs(exact) * Real("0.003"));
        ++done;
    }
}
