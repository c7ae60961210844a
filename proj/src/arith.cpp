#include "s2bias/arith.hpp"

#include <cmath>

#include "s2bias/error.hpp"

namespace s2bias::arith {

std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  if (m == 1) return 0;
  unsigned __int128 result = 1;
  unsigned __int128 b = base % m;
  while (exp > 0) {
    if (exp & 1) result = result * b % m;
    b = b * b % m;
    exp >>= 1;
  }
  return static_cast<std::uint64_t>(result);
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<PrimePower> factorize(std::uint64_t n) {
  std::vector<PrimePower> out;
  for (std::uint64_t p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p != 0) continue;
    PrimePower pp{p, 0, 1};
    while (n % p == 0) {
      n /= p;
      ++pp.exponent;
      pp.value *= p;
    }
    out.push_back(pp);
  }
  if (n > 1) out.push_back({n, 1, n});
  return out;
}

std::uint64_t euler_phi(std::uint64_t n) {
  std::uint64_t phi = n;
  for (const auto& pp : factorize(n)) phi = phi / pp.prime * (pp.prime - 1);
  return phi;
}

std::vector<std::uint32_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint32_t> primes;
  if (limit < 2) return primes;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(static_cast<std::uint32_t>(i));
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return primes;
}

std::uint64_t primitive_root_odd_prime_power(std::uint64_t p, unsigned k) {
  if (p == 2 || !is_prime(p)) fail(ErrorKind::domain, "primitive root requested for non-odd-prime");
  const auto factors = factorize(p - 1);
  std::uint64_t g = 2;
  for (;; ++g) {
    bool ok = true;
    for (const auto& f : factors) {
      if (powmod(g, (p - 1) / f.prime, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) break;
  }
  // A root mod p lifts to every p^k unless g^(p-1) = 1 mod p^2.
  if (k >= 2 && powmod(g, p - 1, p * p) == 1) g += p;
  return g;
}

}  // namespace s2bias::arith
