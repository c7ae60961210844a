#pragma once

// Small integer number-theory helpers shared by the character, sieve and
// constant modules. All routines work on 64-bit unsigned values and assume
// operands below 2^32 wherever a product is formed.

#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

namespace s2bias::arith {

struct PrimePower {
  std::uint64_t prime;
  unsigned exponent;
  std::uint64_t value;  // prime^exponent
};

std::uint64_t isqrt(std::uint64_t n);

inline std::uint64_t gcd(std::uint64_t a, std::uint64_t b) { return std::gcd(a, b); }
inline std::uint64_t lcm(std::uint64_t a, std::uint64_t b) { return std::lcm(a, b); }

// Canonical residue of n modulo m (m >= 1), also for negative n.
inline std::uint64_t mod(std::int64_t n, std::uint64_t m) {
  const auto sm = static_cast<std::int64_t>(m);
  std::int64_t r = n % sm;
  return static_cast<std::uint64_t>(r < 0 ? r + sm : r);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

bool is_prime(std::uint64_t n);

// Trial-division factorization, primes in increasing order.
std::vector<PrimePower> factorize(std::uint64_t n);

std::uint64_t euler_phi(std::uint64_t n);

// Primes p <= limit, by a plain sieve of Eratosthenes.
std::vector<std::uint32_t> primes_up_to(std::uint64_t limit);

// Smallest primitive root modulo p^k for an odd prime p.
std::uint64_t primitive_root_odd_prime_power(std::uint64_t p, unsigned k);

}  // namespace s2bias::arith
