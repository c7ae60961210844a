#pragma once

// Hurwitz zeta and Dirichlet L-values at real s > 0 via Euler-Maclaurin
// summation with an explicit remainder bound.

#include <complex>
#include <cstdint>
#include <string>

#include "s2bias/chargroup.hpp"

namespace s2bias {

inline constexpr double kDefaultTolerance = 1e-10;
inline constexpr double kMinTolerance = 1e-14;

struct LValueResult {
  std::complex<double> value;
  double error_bound = 0.0;
  double s = 0.0;
  std::string character_id;  // "q#i..." or "hurwitz(a)"
};

// zeta(s, a) = sum_{n>=0} (n + a)^-s, continued to 0 < s < 1.
// Throws pole for s == 1, domain for s <= 0 or a outside (0, 1],
// precision when the bound cannot be brought below tol.
LValueResult hurwitz_zeta(double s, double a, double tol = kDefaultTolerance);

// L(s, chi) for the character at its own modulus (imprimitive characters keep
// their missing Euler factors). s == 1 is allowed for non-principal chi.
LValueResult l_value(const Character& chi, double s, double tol = kDefaultTolerance);

// sqrt(L(1/2, chi) L(1/2, chi chi_-4)), non-negative branch. chi must be real
// and neither chi nor chi chi_-4 principal. A product that is negative beyond
// its error bound raises ErrorKind::grh_violation.
double l_half_product(const Character& chi, double tol = kDefaultTolerance);

enum class EulerFactorKind {
  l_function,   // (1 - chi(p) p^-s)^-1
  two_squares,  // local factor of sum 1_S(n) chi(n) n^-s
};

std::complex<double> euler_factor(const Character& chi, std::uint64_t p, double s,
                                  EulerFactorKind kind = EulerFactorKind::l_function);

namespace detail {

// B_2k / (2k)! for k = 1..16, from exact rationals.
long double bernoulli_over_factorial(unsigned k);
// Exact B_2k as numerator / denominator, k = 1..16.
std::pair<long long, long long> bernoulli_rational(unsigned k);

struct ShiftedSum {
  long double value;
  double error_bound;
};

// sum_{n>=0} (n*step + offset)^-s. When s == 1 the a-independent pole term
// 1/(step*(s-1)) is dropped, leaving the constant of the Laurent expansion.
ShiftedSum shifted_power_sum(double s, double step, double offset, double tol);

}  // namespace detail

}  // namespace s2bias
