#include "s2bias/lfunc.hpp"

#include <array>
#include <cfloat>
#include <cmath>

#include "s2bias/arith.hpp"
#include "s2bias/error.hpp"

namespace s2bias {

namespace detail {

namespace {

constexpr std::array<std::pair<long long, long long>, 16> kBernoulli = {{
    {1, 6},
    {-1, 30},
    {1, 42},
    {-1, 30},
    {5, 66},
    {-691, 2730},
    {7, 6},
    {-3617, 510},
    {43867, 798},
    {-174611, 330},
    {854513, 138},
    {-236364091, 2730},
    {8553103, 6},
    {-23749461029LL, 870},
    {8615841276005LL, 14322},
    {-7709321041217LL, 510},
}};

// Euler-Maclaurin correction terms actually summed; the next one bounds the
// remainder.
constexpr unsigned kCorrectionTerms = 15;
constexpr double kMaxCutoff = 1 << 24;

}  // namespace

std::pair<long long, long long> bernoulli_rational(unsigned k) {
  if (k < 1 || k > kBernoulli.size()) fail(ErrorKind::domain, "Bernoulli index out of range");
  return kBernoulli[k - 1];
}

long double bernoulli_over_factorial(unsigned k) {
  const auto [num, den] = bernoulli_rational(k);
  long double fact = 1.0L;
  for (unsigned i = 2; i <= 2 * k; ++i) fact *= static_cast<long double>(i);
  return static_cast<long double>(num) / static_cast<long double>(den) / fact;
}

ShiftedSum shifted_power_sum(double s, double step, double offset, double tol) {
  const long double ls = s;
  const long double lstep = step;
  const bool at_pole = (s == 1.0);

  for (double cutoff = 8;; cutoff *= 2) {
    const long double u = cutoff * lstep + offset;
    const long double u_pow = std::pow(u, -ls);
    const long double ratio = lstep / u;

    // Rising factorial s(s+1)...(s+2k-2) times ratio^(2k-1), built incrementally.
    long double poch = ls;
    long double ratio_pow = ratio;
    long double corrections = 0.0L;
    long double abs_terms = 0.0L;
    long double remainder = 0.0L;
    for (unsigned k = 1; k <= kCorrectionTerms + 1; ++k) {
      const long double term = bernoulli_over_factorial(k) * poch * u_pow * ratio_pow;
      if (k <= kCorrectionTerms) {
        corrections += term;
        abs_terms += std::fabs(term);
      } else {
        remainder = std::fabs(term);
      }
      poch *= (ls + 2 * k - 1) * (ls + 2 * k);
      ratio_pow *= ratio * ratio;
    }
    if (remainder > tol / 4 && cutoff < kMaxCutoff) continue;

    long double head = 0.0L;
    const auto count = static_cast<std::uint64_t>(cutoff);
    for (std::uint64_t n = 0; n < count; ++n) {
      const long double term = std::pow(static_cast<long double>(n) * lstep + offset, -ls);
      head += term;
    }
    abs_terms += head;

    const long double integral =
        at_pole ? -std::log(u) / lstep : std::pow(u, 1.0L - ls) / (lstep * (ls - 1.0L));
    const long double value = head + integral + u_pow / 2 + corrections;
    abs_terms += std::fabs(integral) + u_pow / 2;

    const long double rounding = abs_terms * (cutoff + 64) * LDBL_EPSILON;
    return {value, static_cast<double>(remainder + rounding)};
  }
}

}  // namespace detail

namespace {

void check_tolerance(double tol) {
  if (!(tol > 0) || !std::isfinite(tol)) fail(ErrorKind::domain, "tolerance must be positive");
  if (tol < kMinTolerance) fail(ErrorKind::precision, "tolerance below 1e-14 is not attainable");
}

}  // namespace

LValueResult hurwitz_zeta(double s, double a, double tol) {
  if (!(s > 0) || !std::isfinite(s)) fail(ErrorKind::domain, "hurwitz_zeta requires s > 0");
  if (s == 1.0) fail(ErrorKind::pole, "hurwitz_zeta has a pole at s = 1");
  if (!(a > 0 && a <= 1)) fail(ErrorKind::domain, "hurwitz_zeta requires 0 < a <= 1");
  check_tolerance(tol);

  const auto sum = detail::shifted_power_sum(s, 1.0, a, tol / 2);
  const auto value = static_cast<double>(sum.value);
  const double bound = sum.error_bound + DBL_EPSILON * std::fabs(value);
  if (!std::isfinite(value) || bound > tol)
    fail(ErrorKind::precision, "hurwitz_zeta: tolerance not attainable");
  char id[64];
  std::snprintf(id, sizeof id, "hurwitz(%.17g)", a);
  return {{value, 0.0}, bound, s, id};
}

LValueResult l_value(const Character& chi, double s, double tol) {
  if (!(s > 0) || !std::isfinite(s)) fail(ErrorKind::domain, "l_value requires s > 0");
  check_tolerance(tol);
  const std::uint64_t q = chi.modulus();

  if (chi.is_principal()) {
    if (s == 1.0) fail(ErrorKind::pole, "L(s, principal) has a pole at s = 1");
    const auto zeta = hurwitz_zeta(s, 1.0, tol / 2);
    double factor = 1.0;
    for (const auto& pp : arith::factorize(q)) factor *= 1.0 - std::pow(static_cast<double>(pp.prime), -s);
    const double value = zeta.value.real() * factor;
    const double bound = zeta.error_bound * factor + 2 * DBL_EPSILON * std::fabs(value);
    if (bound > tol) fail(ErrorKind::precision, "l_value: tolerance not attainable");
    return {{value, 0.0}, bound, s, chi.id()};
  }

  const double per_term = tol / 2 / static_cast<double>(chi.group_order());
  const auto step = static_cast<double>(q);
  double bound = 0.0;
  std::complex<double> value;
  if (chi.is_real()) {
    long double acc = 0.0L;
    for (std::uint64_t r = 1; r <= q; ++r) {
      const int c = chi.real_value(static_cast<std::int64_t>(r));
      if (c == 0) continue;
      const auto sum = detail::shifted_power_sum(s, step, static_cast<double>(r), per_term);
      acc += c * sum.value;
      bound += sum.error_bound;
    }
    value = {static_cast<double>(acc), 0.0};
  } else {
    std::complex<long double> acc;
    for (std::uint64_t r = 1; r <= q; ++r) {
      if (chi.exponent(static_cast<std::int64_t>(r)) == Character::kZero) continue;
      const auto c = chi(static_cast<std::int64_t>(r));
      const auto sum = detail::shifted_power_sum(s, step, static_cast<double>(r), per_term);
      acc += std::complex<long double>(c.real(), c.imag()) * sum.value;
      bound += sum.error_bound;
    }
    value = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
  }
  bound += 2 * DBL_EPSILON * std::abs(value);
  if (!std::isfinite(std::abs(value)) || bound > tol)
    fail(ErrorKind::precision, "l_value: tolerance not attainable");
  return {value, bound, s, chi.id()};
}

double l_half_product(const Character& chi, double tol) {
  if (!chi.is_real()) fail(ErrorKind::domain, "l_half_product requires a real character");
  if (chi.is_principal()) fail(ErrorKind::domain, "l_half_product rejects the principal character");
  const Character twisted = twist_by_chi_minus4(chi);
  if (twisted.is_principal())
    fail(ErrorKind::domain, "l_half_product rejects chi with chi*chi_-4 principal");

  const auto l1 = l_value(chi, 0.5, tol);
  const auto l2 = l_value(twisted, 0.5, tol);
  const double a = l1.value.real();
  const double b = l2.value.real();
  const double product = a * b;
  const double bound = std::fabs(a) * l2.error_bound + std::fabs(b) * l1.error_bound +
                       l1.error_bound * l2.error_bound;
  if (product < -bound)
    fail(ErrorKind::grh_violation, "L(1/2, chi) L(1/2, chi chi_-4) < 0 for " + chi.id());
  return std::sqrt(std::max(product, 0.0));
}

std::complex<double> euler_factor(const Character& chi, std::uint64_t p, double s,
                                  EulerFactorKind kind) {
  if (!arith::is_prime(p)) fail(ErrorKind::domain, "euler_factor requires a prime");
  if (!(s > 0)) fail(ErrorKind::domain, "euler_factor requires s > 0");
  const auto ip = static_cast<std::int64_t>(p);
  const double ps = std::pow(static_cast<double>(p), -s);
  std::complex<double> z = chi(ip) * ps;
  if (kind == EulerFactorKind::two_squares && p % 4 == 3) z = chi(ip) * chi(ip) * ps * ps;
  return 1.0 / (1.0 - z);
}

}  // namespace s2bias
