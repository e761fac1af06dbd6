#include <ntheight/poly.hpp>
#include <ntheight/rational.hpp>

#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace ntheight;
using ntheight::testing::thrown_code;

TEST_CASE("rational strings round trip and stay canonical") {
    REQUIRE(rat_to_string(BigRational(22, 7)) == "22/7");
    BigRational m2(-6, 3); // mpq_class does not canonicalize on construction
    m2.canonicalize();
    REQUIRE(rat_to_string(m2) == "-2");
    REQUIRE(rat_to_string(BigRational(0)) == "0");
    REQUIRE(rat_from_string("22/7") == BigRational(22, 7));
    REQUIRE(rat_from_string("6/4") == BigRational(3, 2));
    REQUIRE(rat_from_string("-5") == BigRational(-5));

    REQUIRE(thrown_code([] { rat_from_string(""); }) == errc::config_error);
    REQUIRE(thrown_code([] { rat_from_string("x"); }) == errc::config_error);
    REQUIRE(thrown_code([] { rat_from_string("1/0"); }) == errc::config_error);
}

TEST_CASE("integer and rational valuations") {
    REQUIRE(valuation_int(BigInt(360), BigInt(2)) == 3);
    REQUIRE(valuation_int(BigInt(360), BigInt(3)) == 2);
    REQUIRE(valuation_int(BigInt(360), BigInt(5)) == 1);
    REQUIRE(valuation_int(BigInt(360), BigInt(7)) == 0);
    REQUIRE(valuation_rat(BigRational(49, 3), BigInt(7)) == 2);
    REQUIRE(valuation_rat(BigRational(1, 49), BigInt(7)) == -2);
    REQUIRE(valuation_rat(BigRational(-14, 9), BigInt(3)) == -2);
}

TEST_CASE("primality helpers") {
    REQUIRE(is_probable_prime(BigInt(2)));
    REQUIRE(is_probable_prime(BigInt(97)));
    REQUIRE(!is_probable_prime(BigInt(1)));
    REQUIRE(!is_probable_prime(BigInt(561))); // Carmichael number
    REQUIRE(next_prime_above(BigInt(1)) == 2);
    REQUIRE(next_prime_above(BigInt(7)) == 11);
    REQUIRE(next_prime_above(BigInt(89)) == 97);
}

TEST_CASE("factorization of small and trial-range integers") {
    std::map<BigInt, long> f840{{BigInt(2), 3}, {BigInt(3), 1}, {BigInt(5), 1}, {BigInt(7), 1}};
    REQUIRE(factor_int(BigInt(840)) == f840);
    REQUIRE(factor_int(BigInt(1)).empty());
    std::map<BigInt, long> fm12{{BigInt(2), 2}, {BigInt(3), 1}};
    REQUIRE(factor_int(BigInt(-12)) == fm12);
    REQUIRE(thrown_code([] { factor_int(BigInt(0)); }) == errc::zero_element);

    // exponent bookkeeping across the trial range boundary
    BigInt n = pow_int(BigInt(101), 3) * BigInt(99991); // 99991 is prime, just under 1e5
    std::map<BigInt, long> fn{{BigInt(101), 3}, {BigInt(99991), 1}};
    REQUIRE(factor_int(n) == fn);
}

TEST_CASE("factorization beyond the trial range uses the rho stage") {
    BigInt p1 = next_prime_above(BigInt(10000000));  // 10000019
    BigInt p2 = next_prime_above(BigInt(20000000));  // 20000003
    std::map<BigInt, long> expect{{p1, 1}, {p2, 1}};
    REQUIRE(factor_int(p1 * p2) == expect);

    // a square of a prime beyond the trial range
    BigInt q = next_prime_above(BigInt(1000000));  // 1000003
    std::map<BigInt, long> sq{{q, 2}};
    REQUIRE(factor_int(q * q) == sq);
}

TEST_CASE("hopeless factorizations fail fast instead of spinning") {
    // two ~45-digit primes: the product is past the desk-scale size gate and
    // is rejected before any rho work starts
    BigInt a = next_prime_above(pow_int(BigInt(10), 44));
    BigInt b = next_prime_above(3 * pow_int(BigInt(10), 44));
    REQUIRE(thrown_code([&] { factor_int(a * b); }) == errc::internal_error);

    // inside the size gate but with no small factor: the step budget runs out
    BigInt c = next_prime_above(pow_int(BigInt(10), 34));
    BigInt d = next_prime_above(7 * pow_int(BigInt(10), 34));
    REQUIRE(thrown_code([&] { factor_int(c * d); }) == errc::internal_error);
}

TEST_CASE("prime power recognition and divisor lists") {
    BigInt p;
    long f = 0;
    split_prime_power(BigInt(49), p, f);
    REQUIRE(p == 7);
    REQUIRE(f == 2);
    split_prime_power(BigInt(13), p, f);
    REQUIRE(p == 13);
    REQUIRE(f == 1);
    REQUIRE(thrown_code([] {
        BigInt pp;
        long ff;
        split_prime_power(BigInt(12), pp, ff);
    }) == errc::invalid_argument);
    REQUIRE(thrown_code([] {
        BigInt pp;
        long ff;
        split_prime_power(BigInt(1), pp, ff);
    }) == errc::invalid_argument);

    std::vector<BigInt> d12{BigInt(1), BigInt(2), BigInt(3), BigInt(4), BigInt(6), BigInt(12)};
    REQUIRE(all_divisors(BigInt(12)) == d12);
    std::vector<BigInt> pd{BigInt(2), BigInt(3)};
    REQUIRE(prime_divisors(BigInt(-12)) == pd);
    REQUIRE(prime_divisors(BigInt(1)).empty());
}

TEST_CASE("resultants and discriminants on pinned polynomials") {
    QPoly f({BigRational(2), BigRational(-3), BigRational(1)}); // (x-1)(x-2)
    QPoly g({BigRational(-1), BigRational(1)});                 // x - 1
    REQUIRE(sgn(resultant(f, g)) == 0);

    QPoly a({BigRational(-2), BigRational(0), BigRational(1)}); // x^2 - 2
    QPoly b({BigRational(-3), BigRational(0), BigRational(1)}); // x^2 - 3
    REQUIRE(resultant(a, b) == BigRational(1));

    REQUIRE(discriminant_int(ZPoly({BigInt(1), BigInt(0), BigInt(1)})) == -4);  // x^2 + 1
    REQUIRE(discriminant_int(ZPoly({BigInt(-2), BigInt(0), BigInt(1)})) == 8);  // x^2 - 2
    REQUIRE(discriminant_int(ZPoly({BigInt(-2), BigInt(0), BigInt(0), BigInt(1)})) == -108);
}

TEST_CASE("polynomial division invariants") {
    QPoly a({BigRational(1), BigRational(2), BigRational(3), BigRational(4)});
    QPoly b({BigRational(-1), BigRational(1)});
    QPoly q, r;
    divrem(a, b, q, r);
    REQUIRE(r.degree() <= 0);
    // remainder at a root equals the evaluation: a(1) = 1+2+3+4
    REQUIRE(r.coeff(0) == BigRational(10));
    REQUIRE(poly_gcd(a, b).degree() == 0);

    QPoly c({BigRational(2), BigRational(-3), BigRational(1)});
    QPoly d({BigRational(-2), BigRational(2)}); // 2(x - 1), shares the root 1
    QPoly g = poly_gcd(c, d);
    REQUIRE(g.degree() == 1);
    REQUIRE(is_squarefree(c));
    QPoly sq = c * c;
    REQUIRE(!is_squarefree(sq));
}
