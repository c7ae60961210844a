#pragma once

// Dirichlet characters modulo q, stored exactly as exponents of a common
// root of unity: value(n) = exp(2*pi*i * e(n) / order) or zero when
// gcd(n, q) > 1.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace s2bias {

class Character {
 public:
  static constexpr std::int32_t kZero = -1;

  // `exponents` holds one entry per residue 0..modulus-1, each kZero or an
  // exponent modulo `order`. The order is reduced to the true order of the
  // character, so two equal characters compare equal.
  Character(std::uint64_t modulus, std::uint64_t order, std::vector<std::int32_t> exponents,
            std::string id);

  std::uint64_t modulus() const noexcept { return modulus_; }
  std::uint64_t order() const noexcept { return order_; }
  std::uint64_t group_order() const noexcept { return group_order_; }
  bool is_principal() const noexcept { return order_ == 1; }
  bool is_real() const noexcept { return order_ <= 2; }
  const std::string& id() const noexcept { return id_; }
  std::span<const std::int32_t> exponents() const noexcept { return exponents_; }

  std::int32_t exponent(std::int64_t n) const;

  // -1, 0 or +1. Only meaningful for real characters; throws otherwise.
  int real_value(std::int64_t n) const;

  std::complex<double> operator()(std::int64_t n) const;

  friend bool operator==(const Character& x, const Character& y) {
    return x.modulus_ == y.modulus_ && x.order_ == y.order_ && x.exponents_ == y.exponents_;
  }

 private:
  std::uint64_t modulus_;
  std::uint64_t order_;
  std::uint64_t group_order_;
  std::vector<std::int32_t> exponents_;
  std::string id_;
};

std::complex<double> eval(const Character& chi, std::int64_t n);

// exp(2*pi*i * e / m) with exact values at multiples of a quarter turn.
std::complex<double> root_of_unity(std::int64_t e, std::uint64_t m);

Character principal_character(std::uint64_t q);
Character chi_minus4();

// The character mod lcm(q1, q2) with value chi(n) * psi(n).
Character multiply(const Character& chi, const Character& psi);
// chi induced to a multiple of its modulus.
Character lift(const Character& chi, std::uint64_t modulus);
Character power(const Character& chi, std::uint64_t k);
Character twist_by_chi_minus4(const Character& chi);
// The primitive character inducing chi (modulus = conductor).
Character primitive_of(const Character& chi);

class CharacterGroup {
 public:
  CharacterGroup(std::uint64_t modulus, std::vector<Character> characters);

  std::uint64_t modulus() const noexcept { return modulus_; }
  std::size_t size() const noexcept { return characters_.size(); }
  const std::vector<Character>& characters() const noexcept { return characters_; }
  const Character& operator[](std::size_t i) const { return characters_.at(i); }

  auto begin() const { return characters_.begin(); }
  auto end() const { return characters_.end(); }

 private:
  std::uint64_t modulus_;
  std::vector<Character> characters_;
};

// All phi(q) characters, ordered lexicographically on their exponent tuples
// over the CRT generators; index 0 is the principal character.
CharacterGroup build_group(std::uint64_t q);

std::vector<Character> real_characters(std::uint64_t q);

bool is_quadratic_residue(std::int64_t a, std::uint64_t q);

}  // namespace s2bias
