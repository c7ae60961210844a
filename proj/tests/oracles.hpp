#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library's evaluation paths.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <vector>

namespace oracle {

inline std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b) {
    a %= b;
    std::swap(a, b);
  }
  return a;
}

inline std::vector<std::uint64_t> plain_primes(std::uint64_t limit) {
  std::vector<char> comp(limit + 1, 0);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (comp[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) comp[j] = 1;
  }
  return out;
}

// Trial-division factorization: prime -> exponent.
inline std::map<std::uint64_t, unsigned> factor(std::uint64_t n) {
  std::map<std::uint64_t, unsigned> f;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    while (n % d == 0) {
      ++f[d];
      n /= d;
    }
  }
  if (n > 1) ++f[n];
  return f;
}

inline unsigned omega(std::uint64_t n) { return static_cast<unsigned>(factor(n).size()); }

inline unsigned big_omega(std::uint64_t n) {
  unsigned t = 0;
  for (auto [p, e] : factor(n)) t += e;
  return t;
}

// Direct search for a^2 + b^2 = n.
inline bool is_sum_of_two_squares(std::uint64_t n) {
  for (std::uint64_t a = 0; a * a <= n; ++a) {
    const std::uint64_t r = n - a * a;
    auto b = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(r)));
    while (b * b > r) --b;
    while ((b + 1) * (b + 1) <= r) ++b;
    if (b * b == r) return true;
  }
  return false;
}

inline bool is_square_mod(std::uint64_t a, std::uint64_t q) {
  for (std::uint64_t x = 0; x < q; ++x) {
    if (x * x % q == a % q) return true;
  }
  return false;
}

// Units u with u^2 = 1 mod q.
inline std::size_t count_involutions(std::uint64_t q) {
  std::size_t c = 0;
  for (std::uint64_t x = 0; x < q; ++x) {
    if (gcd(x, q) == 1 && x * x % q == 1 % q) ++c;
  }
  return c;
}

// sum_{k>=0} (-1)^k a(k), Cohen-Rodriguez Villegas-Zagier acceleration.
inline double alternating_sum(const std::function<double(std::uint64_t)>& a, int n = 60) {
  double d = std::pow(3.0 + std::sqrt(8.0), n);
  d = (d + 1.0 / d) / 2.0;
  double b = -1.0;
  double c = -d;
  double s = 0.0;
  for (int k = 0; k < n; ++k) {
    c = b - c;
    s += c * a(static_cast<std::uint64_t>(k));
    b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0));
  }
  return s / d;
}

// zeta(s) = eta(s) / (1 - 2^(1-s)).
inline double zeta_alternating(double s) {
  const double eta = alternating_sum([s](std::uint64_t k) { return std::pow(double(k + 1), -s); });
  return eta / (1.0 - std::pow(2.0, 1.0 - s));
}

// L(s, chi_-4) = sum (-1)^k (2k+1)^-s.
inline double l_chi4_alternating(double s) {
  return alternating_sum([s](std::uint64_t k) { return std::pow(double(2 * k + 1), -s); });
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double eps, int depth = 50) {
  std::function<double(double, double, double, double, double, double, int)> rec =
      [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
        const double mid = (lo + hi) / 2;
        const double lm = (lo + mid) / 2;
        const double rm = (mid + hi) / 2;
        const double flm = f(lm);
        const double frm = f(rm);
        const double left = (mid - lo) / 6 * (flo + 4 * flm + fmid);
        const double right = (hi - mid) / 6 * (fmid + 4 * frm + fhi);
        if (d <= 0 || std::fabs(left + right - whole) <= 15 * eps)
          return left + right + (left + right - whole) / 15;
        return rec(lo, mid, flo, flm, fmid, left, d - 1) + rec(mid, hi, fmid, frm, fhi, right, d - 1);
      };
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f((a + b) / 2);
  return rec(a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), depth);
}

// Gamma(1/4) = int_0^inf t^(-3/4) e^-t dt = 4 int_0^inf exp(-u^4) du.
inline double gamma_quarter_quadrature() {
  return 4.0 * adaptive_simpson([](double u) { return std::exp(-std::pow(u, 4)); }, 0.0, 7.0, 1e-15);
}

// prod_{p = 3 mod 4, p <= limit, p not dividing `skip`} (1 - p^-2)^(exponent),
// times the tail correction exp(exponent * -sum_{p>limit, p=3(4)} p^-2) with the
// prime-number-theorem estimate sum_{p > P, p = 3 (4)} p^-2 ~ 1 / (2 P log P).
inline double three_mod_four_product(std::uint64_t limit, double exponent, std::uint64_t skip = 1) {
  long double log_prod = 0.0L;
  for (auto p : plain_primes(limit)) {
    if (p % 4 != 3 || skip % p == 0) continue;
    log_prod += exponent * std::log1p(-1.0L / (static_cast<long double>(p) * p));
  }
  const double big_p = static_cast<double>(limit);
  const double tail = 1.0 / (2.0 * big_p * std::log(big_p));
  return static_cast<double>(std::exp(log_prod - exponent * tail));
}

inline double landau_ramanujan_prime_product(std::uint64_t limit = 1000000) {
  return three_mod_four_product(limit, -0.5) / std::numbers::sqrt2;
}

}  // namespace oracle
