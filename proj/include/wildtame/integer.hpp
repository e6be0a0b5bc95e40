#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace wildtame {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int abs_int(const Int &a) { return a < 0 ? Int(-a) : a; }

inline Int gcd_int(Int a, Int b) {
    a = abs_int(a);
    b = abs_int(b);
    while (b != 0) {
        Int r = a % b;
        a = b;
        b = r;
    }
    return a;
}

inline Int lcm_int(const Int &a, const Int &b) {
    if (a == 0 || b == 0) return 0;
    return abs_int(a / gcd_int(a, b) * b);
}

/* g = gcd(a,b) >= 0 with g = u*a + v*b. */
struct XgcdResult {
    Int g, u, v;
};

inline XgcdResult xgcd(const Int &a, const Int &b) {
    Int old_r = a, r = b;
    Int old_u = 1, u = 0;
    Int old_v = 0, v = 1;
    while (r != 0) {
        Int q = old_r / r;
        Int t;
        t = old_r - q * r; old_r = r; r = t;
        t = old_u - q * u; old_u = u; u = t;
        t = old_v - q * v; old_v = v; v = t;
    }
    if (old_r < 0) { old_r = -old_r; old_u = -old_u; old_v = -old_v; }
    return {old_r, old_u, old_v};
}

/* Least nonnegative residue. */
inline Int mod_floor(const Int &a, const Int &m) {
    if (m <= 0) throw std::invalid_argument("mod_floor: modulus must be positive");
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

inline Int mod_inverse(const Int &a, const Int &m) {
    auto e = xgcd(mod_floor(a, m), m);
    if (e.g != 1) throw std::invalid_argument("mod_inverse: not invertible");
    return mod_floor(e.u, m);
}

inline Int pow_mod(Int base, Int exp, const Int &m) {
    if (exp < 0) throw std::invalid_argument("pow_mod: negative exponent");
    Int result = 1;
    base = mod_floor(base, m);
    while (exp > 0) {
        if ((exp & 1) != 0) result = result * base % m;
        base = base * base % m;
        exp >>= 1;
    }
    return result;
}

inline Int pow_int(Int base, unsigned long exp) {
    Int result = 1;
    while (exp > 0) {
        if (exp & 1) result *= base;
        base *= base;
        exp >>= 1;
    }
    return result;
}

/* v_p(n) for n != 0. */
inline long valuation(Int n, const Int &p) {
    if (n == 0) throw std::invalid_argument("valuation: zero argument");
    if (p < 2) throw std::invalid_argument("valuation: prime must be >= 2");
    long v = 0;
    n = abs_int(n);
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

inline Int isqrt_int(const Int &n) {
    if (n < 0) throw std::invalid_argument("isqrt_int: negative argument");
    if (n == 0) return 0;
    Int x = Int(1) << ((msb(n) / 2) + 1);
    for (;;) {
        Int y = (x + n / x) >> 1;
        if (y >= x) break;
        x = y;
    }
    return x;
}

inline bool is_square(const Int &n) {
    if (n < 0) return false;
    Int r = isqrt_int(n);
    return r * r == n;
}

/* Deterministic Miller-Rabin, valid for all n < 3.3e24 (covers every value
 * this library feeds it; inputs are factor-base primes and trial divisors). */
inline bool is_prime(const Int &n) {
    if (n < 2) return false;
    for (int p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    Int d = n - 1;
    long s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (int a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
        Int x = pow_mod(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (long i = 0; i + 1 < s; ++i) {
            x = x * x % n;
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

/* Trial-division factorization, ascending primes with exponents.
 * Intended for the small integers this library meets (|n| <= ~1e14). */
inline std::vector<std::pair<Int, long>> factorize(Int n) {
    if (n == 0) throw std::invalid_argument("factorize: zero argument");
    n = abs_int(n);
    std::vector<std::pair<Int, long>> out;
    for (Int p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        if (n % p == 0) {
            long e = 0;
            while (n % p == 0) {
                n /= p;
                ++e;
            }
            out.emplace_back(p, e);
        }
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

inline bool is_square_free(const Int &n) {
    if (n == 0) return false;
    for (auto &[p, e] : factorize(n))
        if (e > 1) return false;
    return true;
}

/* Kronecker symbol (a|n), full extension of Jacobi to all integers n. */
inline int kronecker(Int a, Int n) {
    if (n == 0) return (a == 1 || a == -1) ? 1 : 0;
    if ((a & 1) == 0 && (n & 1) == 0) return 0;
    int result = 1;
    if (n < 0) {
        n = -n;
        if (a < 0) result = -result;
    }
    long v = 0;
    while ((n & 1) == 0) {
        n >>= 1;
        ++v;
    }
    if (v & 1) {
        Int am8 = mod_floor(a, 8);
        if (am8 == 3 || am8 == 5) result = -result;
    }
    a = mod_floor(a, n);
    while (a != 0) {
        v = 0;
        while ((a & 1) == 0) {
            a >>= 1;
            ++v;
        }
        if (v & 1) {
            Int nm8 = n & 7;
            if (nm8 == 3 || nm8 == 5) result = -result;
        }
        if ((a & 3) == 3 && (n & 3) == 3) result = -result;
        Int t = n % a;
        n = a;
        a = t;
    }
    return n == 1 ? result : 0;
}

inline long to_long(const Int &n) {
    return n.convert_to<long>();
}

}  // namespace wildtame
