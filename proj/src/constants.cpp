#include "s2bias/constants.hpp"

#include <cmath>
#include <numbers>

#include "s2bias/arith.hpp"
#include "s2bias/error.hpp"
#include "s2bias/lfunc.hpp"

namespace s2bias::constants {

namespace {

constexpr double kTol = 1e-13;

// (1 - chi(2)/sqrt 2)^(-1/2); 1 when chi(2) = 0.
double two_adic_factor(const Character& chi) {
  return std::pow(1.0 - chi.real_value(2) / std::numbers::sqrt2, -0.5);
}

double half_value(const Character& chi, LConvention convention) {
  if (convention == LConvention::primitive) return l_value(primitive_of(chi), 0.5, kTol).value.real();
  return l_value(chi, 0.5, kTol).value.real();
}

double half_product(const Character& chi, LConvention convention) {
  if (convention == LConvention::imprimitive) return l_half_product(chi, kTol);
  const double product = half_value(chi, convention) * half_value(twist_by_chi_minus4(chi), convention);
  if (product < -1e-12)
    fail(ErrorKind::grh_violation, "negative L(1/2) product for primitive of " + chi.id());
  return std::sqrt(std::max(product, 0.0));
}

void check_units(std::uint64_t q, std::int64_t a, std::int64_t b) {
  if (q == 0) fail(ErrorKind::domain, "invalid modulus 0");
  if (arith::gcd(arith::mod(a, q), q) != 1 || arith::gcd(arith::mod(b, q), q) != 1)
    fail(ErrorKind::domain, "residues must be coprime to the modulus");
}

// Product over p | q, p = 3 mod 4, of (1 - p^-2)^(1/4).
double divisor_quarter_correction(std::uint64_t q) {
  double out = 1.0;
  for (const auto& pp : arith::factorize(q)) {
    if (pp.prime % 4 == 3) {
      const auto p = static_cast<double>(pp.prime);
      out *= std::pow(1.0 - 1.0 / (p * p), 0.25);
    }
  }
  return out;
}

}  // namespace

double landau_ramanujan(unsigned k_max) {
  if (k_max < 1) fail(ErrorKind::domain, "landau_ramanujan requires k_max >= 1");
  const Character zeta_char = principal_character(1);
  const Character chi4 = chi_minus4();
  long double log_k = -0.5L * std::log(2.0L);
  for (unsigned k = 1; k <= k_max; ++k) {
    const double s = std::ldexp(1.0, static_cast<int>(k));
    const long double zeta = l_value(zeta_char, s, kTol).value.real();
    const long double l4 = l_value(chi4, s, kTol).value.real();
    const long double two = std::log1p(-std::pow(2.0L, -static_cast<long double>(s)));
    log_k += std::ldexp(1.0L, -static_cast<int>(k) - 1) * (std::log(zeta) + two - std::log(l4));
  }
  return static_cast<double>(std::exp(log_k));
}

double three_mod_four_quarter_product() {
  static const double value = std::sqrt(std::numbers::sqrt2 * landau_ramanujan());
  return value;
}

double gamma_quarter() {
  // Gamma(1/4)^2 = (2 pi)^(3/2) / AGM(1, sqrt 2)
  static const double value = [] {
    long double a = 1.0L;
    long double g = std::sqrt(2.0L);
    for (int i = 0; i < 64 && std::fabs(a - g) > 1e-19L * a; ++i) {
      const long double next = (a + g) / 2;
      g = std::sqrt(a * g);
      a = next;
    }
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    return static_cast<double>(std::sqrt(std::pow(two_pi, 1.5L) / a));
  }();
  return value;
}

double c_q(std::uint64_t q) {
  if (q == 0) fail(ErrorKind::domain, "invalid modulus 0");
  double out = 2.0 * std::pow(std::numbers::pi, -0.25) / gamma_quarter() *
               three_mod_four_quarter_product();
  for (const auto& pp : arith::factorize(q)) {
    if (pp.prime % 4 == 3) out *= std::sqrt(1.0 - 1.0 / static_cast<double>(pp.prime));
  }
  return out;
}

double g_half(const Character& chi) {
  if (!chi.is_real()) fail(ErrorKind::domain, "g_half requires a real character");
  const std::uint64_t q = chi.modulus();
  double out = two_adic_factor(chi);
  if (q % 2 == 1) out *= std::pow(0.5, 0.25);
  return out * three_mod_four_quarter_product() * divisor_quarter_correction(q);
}

BiasConstant c_qab(std::uint64_t q, std::int64_t a, std::int64_t b, LConvention convention) {
  check_units(q, a, b);
  const std::uint64_t g4 = arith::gcd(4, q);
  if (arith::mod(a, g4) != 1 % g4 || arith::mod(b, g4) != 1 % g4)
    fail(ErrorKind::domain, "a and b must be 1 mod gcd(4, q): S misses 3 mod 4");

  BiasConstant out{q, a, b, BiasKind::two_squares, 0.0, {}};
  const CharacterGroup group = build_group(q);
  for (std::size_t i = 0; i < group.size(); ++i) {
    const Character& chi = group[i];
    if (!chi.is_real() || chi.is_principal() || twist_by_chi_minus4(chi).is_principal()) continue;
    const int diff = chi.real_value(a) - chi.real_value(b);
    double term = 0.0;
    if (diff != 0) term = diff * two_adic_factor(chi) * half_product(chi, convention);
    out.per_character_terms.push_back({i, chi.id(), term});
    out.value += term;
  }
  return out;
}

BiasConstant d_qab(std::uint64_t q, std::int64_t a, std::int64_t b, LConvention convention) {
  check_units(q, a, b);
  BiasConstant out{q, a, b, BiasKind::omega, 0.0, {}};
  const CharacterGroup group = build_group(q);
  for (std::size_t i = 0; i < group.size(); ++i) {
    const Character& chi = group[i];
    if (!chi.is_real() || chi.is_principal()) continue;
    const int diff = chi.real_value(a) - chi.real_value(b);
    double term = 0.0;
    if (diff != 0) term = diff * half_value(chi, convention);
    out.per_character_terms.push_back({i, chi.id(), term});
    out.value += term;
  }
  return out;
}

double verify_local_identity(std::uint64_t p, double s, const Character& chi) {
  if (!(s > 1)) fail(ErrorKind::domain, "verify_local_identity requires s > 1");
  if (!arith::is_prime(p)) fail(ErrorKind::domain, "verify_local_identity requires a prime");

  const auto lhs = euler_factor(chi, p, s, EulerFactorKind::two_squares);

  const Character twisted = twist_by_chi_minus4(chi);
  const auto ip = static_cast<std::int64_t>(p);
  std::complex<double> log_rhs =
      0.5 * (std::log(euler_factor(chi, p, s)) + std::log(euler_factor(twisted, p, s)));
  if (p == 2) log_rhs -= 0.5 * std::log(1.0 - chi(2) * std::pow(2.0, -s));

  for (unsigned k = 1; k < 64; ++k) {
    const double sk = std::ldexp(s, static_cast<int>(k));
    // Factors of level k differ from 1 by at most p^(-2^k s).
    if (std::pow(static_cast<double>(p), -sk) < 1e-17) break;
    const std::uint64_t e = std::uint64_t{1} << k;
    const Character chi_k = power(chi, e);
    const Character chi_k_twisted = twist_by_chi_minus4(chi_k);
    std::complex<double> level = std::log(euler_factor(chi_k, p, sk)) -
                                 std::log(euler_factor(chi_k_twisted, p, sk));
    if (p == 2) level += std::log(1.0 - chi_k(ip) * std::pow(2.0, -sk));
    log_rhs += std::ldexp(1.0, -static_cast<int>(k) - 1) * level;
  }
  return std::abs(lhs - std::exp(log_rhs));
}

MainTermCoefficient main_term_coefficient(std::uint64_t q, const Character& chi_in) {
  if (!chi_in.is_real() || chi_in.is_principal())
    fail(ErrorKind::domain, "main_term_coefficient requires a real non-principal character");
  if (q == 0 || q % chi_in.modulus() != 0)
    fail(ErrorKind::domain, "character modulus must divide q");
  const Character chi = chi_in.modulus() == q ? chi_in : lift(chi_in, q);

  const double root = l_half_product(chi, kTol);
  MainTermCoefficient out;
  out.route_a = c_q(q) * two_adic_factor(chi) * root;

  // M(1/2, chi) = 2 sqrt(L L') prod_{p|q}(1-1/p)^(1/4) L(1, chi_0 chi_-4)^(-1/4) G(1/2, chi)
  double divisor = 1.0;
  for (const auto& pp : arith::factorize(q)) divisor *= std::pow(1.0 - 1.0 / static_cast<double>(pp.prime), 0.25);
  const double l_one = l_value(twist_by_chi_minus4(principal_character(q)), 1.0, kTol).value.real();
  const double m_half = 2.0 * root * divisor * std::pow(l_one, -0.25) * g_half(chi);
  out.route_b = std::pow(2.0, -0.25) * m_half / gamma_quarter();
  out.residual = std::fabs(out.route_a - out.route_b);
  return out;
}

}  // namespace s2bias::constants
