#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "s2bias/chargroup.hpp"
#include "s2bias/error.hpp"
#include "s2bias/lfunc.hpp"

using namespace s2bias;
using std::numbers::pi;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::consistency;
}

Character quad(std::uint64_t q) {
  for (const auto& c : build_group(q))
    if (c.is_real() && !c.is_principal()) return c;
  throw std::logic_error("none");
}

}  // namespace

TEST(Bernoulli, LowOrderValues) {
  EXPECT_EQ(detail::bernoulli_rational(1), std::make_pair(1LL, 6LL));
  EXPECT_EQ(detail::bernoulli_rational(2), std::make_pair(-1LL, 30LL));
  EXPECT_EQ(detail::bernoulli_rational(3), std::make_pair(1LL, 42LL));
  EXPECT_EQ(detail::bernoulli_rational(6), std::make_pair(-691LL, 2730LL));
  EXPECT_EQ(detail::bernoulli_rational(16).second, 510LL);
}

// B_2k/(2k)! = 2 (-1)^(k+1) zeta(2k) / (2 pi)^(2k).
TEST(Bernoulli, AgreesWithZetaAtEvenIntegers) {
  for (unsigned k = 1; k <= 16; ++k) {
    const double z = oracle::zeta_alternating(2.0 * k);
    const double expected = 2.0 * ((k % 2) ? 1 : -1) * z / std::pow(2 * pi, 2.0 * k);
    EXPECT_NEAR(static_cast<double>(detail::bernoulli_over_factorial(k)) / expected, 1.0, 1e-12) << k;
  }
}

TEST(Hurwitz, Examples) {
  const auto z2 = hurwitz_zeta(2, 1);
  EXPECT_NEAR(z2.value.real(), pi * pi / 6, 1e-10);
  EXPECT_LE(z2.error_bound, kDefaultTolerance);
  EXPECT_EQ(z2.character_id, "hurwitz(1)");
  EXPECT_NEAR(hurwitz_zeta(2, 0.5).value.real(), pi * pi / 2, 1e-10);
  EXPECT_NEAR(hurwitz_zeta(0.5, 1).value.real(), oracle::zeta_alternating(0.5), 1e-10);
  EXPECT_NEAR(hurwitz_zeta(0.5, 1).value.real(), -1.4603545, 1e-7);
}

TEST(Hurwitz, MatchesAlternatingOracleAcrossArguments) {
  for (double s : {0.25, 0.5, 0.75, 1.5, 2.0, 3.0, 7.5}) {
    const auto r = hurwitz_zeta(s, 1, 1e-12);
    EXPECT_NEAR(r.value.real(), oracle::zeta_alternating(s), 1e-11) << s;
  }
}

// zeta(s, a) + zeta(s, a + 1/2) = 2^s zeta(s, 2a) for a <= 1/2.
TEST(Hurwitz, DuplicationFormula) {
  for (double s : {0.5, 2.0, 3.5}) {
    for (double a : {0.1, 0.25, 0.4, 0.5}) {
      const double lhs = hurwitz_zeta(s, a).value.real() + hurwitz_zeta(s, a + 0.5).value.real();
      const double rhs = std::pow(2.0, s) * hurwitz_zeta(s, 2 * a).value.real();
      EXPECT_NEAR(lhs, rhs, 1e-9 * std::max(1.0, std::abs(rhs))) << s << " " << a;
    }
  }
}

TEST(Hurwitz, Errors) {
  EXPECT_EQ(kind_of([] { hurwitz_zeta(1, 0.5); }), ErrorKind::pole);
  EXPECT_EQ(kind_of([] { hurwitz_zeta(0, 0.5); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { hurwitz_zeta(2, 0); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { hurwitz_zeta(2, 1.5); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { hurwitz_zeta(2, 1, 1e-16); }), ErrorKind::precision);
}

TEST(LValue, PublishedValuesModThreeAndFive) {
  const auto chi3 = quad(3);
  EXPECT_NEAR(l_value(chi3, 0.5).value.real(), 0.480, 0.001);
  EXPECT_NEAR(l_value(twist_by_chi_minus4(chi3), 0.5).value.real(), 0.498, 0.001);
  const auto chi5 = quad(5);
  EXPECT_NEAR(l_value(chi5, 0.5).value.real(), 0.231, 0.001);
  EXPECT_NEAR(l_value(twist_by_chi_minus4(chi5), 0.5).value.real(), 1.679, 0.001);
}

TEST(LValue, ChiMinus4) {
  EXPECT_NEAR(l_value(chi_minus4(), 1).value.real(), pi / 4, 1e-10);
  for (double s : {0.5, 1.0, 2.0, 3.0})
    EXPECT_NEAR(l_value(chi_minus4(), s).value.real(), oracle::l_chi4_alternating(s), 1e-10) << s;
}

TEST(LValue, PrincipalPoleAndIds) {
  EXPECT_EQ(kind_of([] { l_value(principal_character(7), 1); }), ErrorKind::pole);
  EXPECT_EQ(kind_of([] { l_value(chi_minus4(), 0); }), ErrorKind::domain);
  EXPECT_EQ(l_value(quad(3), 2).character_id, "3#1");
  EXPECT_DOUBLE_EQ(l_value(quad(3), 2).s, 2.0);
}

// Principal characters: zeta(s) prod_{p | q} (1 - p^-s).
TEST(LValue, PrincipalRemovesEulerFactors) {
  for (double s : {0.5, 2.0}) {
    const double z = oracle::zeta_alternating(s);
    EXPECT_NEAR(l_value(principal_character(6), s).value.real(),
                z * (1 - std::pow(2.0, -s)) * (1 - std::pow(3.0, -s)), 1e-10);
  }
}

TEST(LValue, HurwitzAgreesWithTrivialCharacter) {
  for (double s : {0.5, 2.0, 4.0, 8.0}) {
    EXPECT_NEAR(hurwitz_zeta(s, 1).value.real(), l_value(principal_character(1), s).value.real(),
                1e-12);
  }
}

TEST(LValue, RealCharactersAreExactlyReal) {
  for (std::uint64_t q = 1; q <= 40; ++q) {
    for (const auto& c : real_characters(q)) {
      for (double s : {0.5, 2.0}) {
        if (c.is_principal() && s == 1.0) continue;
        EXPECT_EQ(l_value(c, s).value.imag(), 0.0) << c.id();
      }
    }
  }
}

TEST(LValue, ComplexCharacterMatchesDirectSeries) {
  // A character of order 4 mod 5 at s = 3: the series converges fast enough
  // to sum directly.
  const auto g = build_group(5);
  for (const auto& c : g) {
    if (c.is_real()) continue;
    std::complex<double> direct;
    for (std::int64_t n = 200000; n >= 1; --n) direct += c(n) * std::pow(static_cast<double>(n), -3.0);
    const auto r = l_value(c, 3);
    EXPECT_NEAR(std::abs(r.value - direct), 0.0, 1e-10) << c.id();
    EXPECT_GT(std::abs(r.value.imag()), 1e-3);
  }
}

TEST(LValue, EulerProductConsistencyAtTwo) {
  const std::uint64_t P = 100000;
  const auto primes = oracle::plain_primes(P);
  const double tail = 1.0 / static_cast<double>(P);  // >= sum_{n>P} n^-2
  for (std::uint64_t q = 1; q <= 20; ++q) {
    for (const auto& c : real_characters(q)) {
      double log_prod = 0;
      for (auto p : primes) log_prod += std::log(euler_factor(c, p, 2).real());
      const double L = l_value(c, 2).value.real();
      EXPECT_LE(std::abs(std::exp(log_prod) - L), std::abs(L) * std::expm1(tail)) << c.id();
    }
  }
}

TEST(LValue, LiftFromThreeToFifteen) {
  const auto chi = quad(3);
  const auto lifted = lift(chi, 15);
  for (double s : {0.5, 2.0}) {
    const double expected = l_value(chi, s).value.real() * (1 - chi.real_value(5) * std::pow(5.0, -s));
    EXPECT_NEAR(l_value(lifted, s).value.real(), expected, 1e-10) << s;
  }
}

TEST(LHalfProduct, Examples) {
  EXPECT_NEAR(l_half_product(quad(3)), 0.489, 0.002);
  EXPECT_NEAR(l_half_product(quad(5)), 0.623, 0.003);
  EXPECT_EQ(kind_of([] { l_half_product(principal_character(1)); }), ErrorKind::domain);
  EXPECT_EQ(kind_of([] { l_half_product(principal_character(3)); }), ErrorKind::domain);
  // chi_-4 twisted is principal mod 4.
  EXPECT_EQ(kind_of([] { l_half_product(chi_minus4()); }), ErrorKind::domain);
  const auto g = build_group(5);
  for (const auto& c : g)
    if (!c.is_real()) EXPECT_EQ(kind_of([&] { l_half_product(c); }), ErrorKind::domain);
}

TEST(LHalfProduct, NonNegativeForSmallModuli) {
  for (std::uint64_t q = 3; q <= 30; ++q) {
    for (const auto& c : real_characters(q)) {
      if (c.is_principal() || twist_by_chi_minus4(c).is_principal()) continue;
      EXPECT_GE(l_half_product(c), 0.0) << c.id();
    }
  }
}

TEST(EulerFactor, Examples) {
  EXPECT_NEAR(euler_factor(principal_character(1), 2, 2).real(), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(euler_factor(principal_character(1), 3, 2, EulerFactorKind::two_squares).real(),
              81.0 / 80.0, 1e-15);
  EXPECT_NEAR(euler_factor(chi_minus4(), 3, 1).real(), 0.75, 1e-15);
  EXPECT_NEAR(euler_factor(principal_character(1), 5, 2, EulerFactorKind::two_squares).real(),
              25.0 / 24.0, 1e-15);
  EXPECT_NEAR(euler_factor(principal_character(3), 3, 2).real(), 1.0, 0.0);
  EXPECT_EQ(kind_of([] { euler_factor(chi_minus4(), 9, 2); }), ErrorKind::domain);
}
