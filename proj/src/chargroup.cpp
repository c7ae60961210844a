#include "s2bias/chargroup.hpp"

#include <numbers>

#include "s2bias/arith.hpp"
#include "s2bias/error.hpp"

namespace s2bias {

Character::Character(std::uint64_t modulus, std::uint64_t order,
                     std::vector<std::int32_t> exponents, std::string id)
    : modulus_(modulus), order_(order), group_order_(0), exponents_(std::move(exponents)),
      id_(std::move(id)) {
  if (modulus_ == 0) fail(ErrorKind::domain, "character modulus must be positive");
  if (order_ == 0) fail(ErrorKind::domain, "character order must be positive");
  if (exponents_.size() != modulus_) fail(ErrorKind::domain, "character table has wrong length");

  std::uint64_t common = order_;
  for (auto& e : exponents_) {
    if (e == kZero) continue;
    if (e < 0 || static_cast<std::uint64_t>(e) >= order_)
      fail(ErrorKind::domain, "character exponent out of range");
    common = arith::gcd(common, static_cast<std::uint64_t>(e));
    ++group_order_;
  }
  order_ /= common;
  for (auto& e : exponents_) {
    if (e != kZero) e = static_cast<std::int32_t>(static_cast<std::uint64_t>(e) / common);
  }
}

std::int32_t Character::exponent(std::int64_t n) const {
  return exponents_[arith::mod(n, modulus_)];
}

int Character::real_value(std::int64_t n) const {
  if (!is_real()) fail(ErrorKind::domain, "real_value on a non-real character " + id_);
  const auto e = exponent(n);
  if (e == kZero) return 0;
  return e == 0 ? 1 : -1;
}

std::complex<double> Character::operator()(std::int64_t n) const {
  const auto e = exponent(n);
  if (e == kZero) return {0.0, 0.0};
  return root_of_unity(e, order_);
}

std::complex<double> eval(const Character& chi, std::int64_t n) { return chi(n); }

std::complex<double> root_of_unity(std::int64_t e, std::uint64_t m) {
  const std::uint64_t r = arith::mod(e, m);
  if ((4 * r) % m == 0) {
    switch ((4 * r) / m) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, 1.0};
      case 2: return {-1.0, 0.0};
      default: return {0.0, -1.0};
    }
  }
  const double angle = 2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(m);
  return std::polar(1.0, angle);
}

Character principal_character(std::uint64_t q) {
  if (q == 0) fail(ErrorKind::domain, "modulus must be positive");
  std::vector<std::int32_t> e(q);
  for (std::uint64_t n = 0; n < q; ++n) e[n] = arith::gcd(n, q) == 1 ? 0 : Character::kZero;
  return Character(q, 1, std::move(e), std::to_string(q) + "#0");
}

Character chi_minus4() {
  return Character(4, 2, {Character::kZero, 0, Character::kZero, 1}, "4#1");
}

Character multiply(const Character& chi, const Character& psi) {
  const std::uint64_t q = arith::lcm(chi.modulus(), psi.modulus());
  const std::uint64_t m = arith::lcm(chi.order(), psi.order());
  const std::uint64_t s1 = m / chi.order();
  const std::uint64_t s2 = m / psi.order();
  std::vector<std::int32_t> e(q);
  for (std::uint64_t n = 0; n < q; ++n) {
    const auto a = chi.exponent(static_cast<std::int64_t>(n));
    const auto b = psi.exponent(static_cast<std::int64_t>(n));
    if (a == Character::kZero || b == Character::kZero) {
      e[n] = Character::kZero;
    } else {
      e[n] = static_cast<std::int32_t>((a * s1 + b * s2) % m);
    }
  }
  return Character(q, m, std::move(e), chi.id() + "*" + psi.id());
}

Character lift(const Character& chi, std::uint64_t modulus) {
  if (modulus == 0 || modulus % chi.modulus() != 0)
    fail(ErrorKind::domain, "lift target must be a multiple of the modulus");
  Character lifted = multiply(chi, principal_character(modulus));
  return Character(lifted.modulus(), lifted.order(),
                   std::vector<std::int32_t>(lifted.exponents().begin(), lifted.exponents().end()),
                   chi.id() + "^" + std::to_string(modulus));
}

Character power(const Character& chi, std::uint64_t k) {
  std::vector<std::int32_t> e(chi.exponents().begin(), chi.exponents().end());
  for (auto& v : e) {
    if (v != Character::kZero) v = static_cast<std::int32_t>((v * (k % chi.order())) % chi.order());
  }
  return Character(chi.modulus(), chi.order(), std::move(e),
                   chi.id() + "**" + std::to_string(k));
}

Character twist_by_chi_minus4(const Character& chi) {
  Character t = multiply(chi, chi_minus4());
  return Character(t.modulus(), t.order(),
                   std::vector<std::int32_t>(t.exponents().begin(), t.exponents().end()),
                   chi.id() + "*chi_-4");
}

Character primitive_of(const Character& chi) {
  const std::uint64_t q = chi.modulus();
  for (std::uint64_t d = 1; d <= q; ++d) {
    if (q % d != 0) continue;
    bool induced = true;
    for (std::uint64_t n = 1; n < q && induced; n += d) {
      if (arith::gcd(n, q) == 1 && chi.exponent(static_cast<std::int64_t>(n)) != 0) induced = false;
    }
    if (!induced) continue;
    std::vector<std::int32_t> e(d, Character::kZero);
    for (std::uint64_t r = 0; r < d; ++r) {
      if (arith::gcd(r, d) != 1) continue;
      for (std::uint64_t n = r; n < q; n += d) {
        if (arith::gcd(n, q) == 1) {
          e[r] = chi.exponent(static_cast<std::int64_t>(n));
          break;
        }
      }
    }
    return Character(d, chi.order(), std::move(e), chi.id() + "/prim" + std::to_string(d));
  }
  return chi;
}

CharacterGroup::CharacterGroup(std::uint64_t modulus, std::vector<Character> characters)
    : modulus_(modulus), characters_(std::move(characters)) {}

namespace {

// One cyclic factor of (Z/qZ)*, seen through the residue n mod `prime_power`.
struct CyclicComponent {
  std::uint64_t prime_power;
  std::uint64_t order;
  std::vector<std::int64_t> dlog;  // -1 on non-units
};

std::vector<CyclicComponent> unit_group_components(std::uint64_t q) {
  std::vector<CyclicComponent> out;
  for (const auto& pp : arith::factorize(q)) {
    const std::uint64_t pk = pp.value;
    if (pp.prime != 2) {
      const std::uint64_t g = arith::primitive_root_odd_prime_power(pp.prime, pp.exponent);
      CyclicComponent c{pk, pk / pp.prime * (pp.prime - 1), std::vector<std::int64_t>(pk, -1)};
      std::uint64_t x = 1;
      for (std::uint64_t i = 0; i < c.order; ++i) {
        c.dlog[x] = static_cast<std::int64_t>(i);
        x = x * g % pk;
      }
      out.push_back(std::move(c));
    } else if (pp.exponent == 2) {
      out.push_back({4, 2, {-1, 0, -1, 1}});
    } else if (pp.exponent >= 3) {
      // (Z/2^k)* = <-1> x <5>
      CyclicComponent sign{pk, 2, std::vector<std::int64_t>(pk, -1)};
      CyclicComponent five{pk, pk / 4, std::vector<std::int64_t>(pk, -1)};
      std::uint64_t x = 1;
      for (std::uint64_t b = 0; b < five.order; ++b) {
        sign.dlog[x] = 0;
        five.dlog[x] = static_cast<std::int64_t>(b);
        sign.dlog[pk - x] = 1;
        five.dlog[pk - x] = static_cast<std::int64_t>(b);
        x = x * 5 % pk;
      }
      out.push_back(std::move(sign));
      out.push_back(std::move(five));
    }
  }
  return out;
}

}  // namespace

CharacterGroup build_group(std::uint64_t q) {
  if (q == 0) fail(ErrorKind::domain, "invalid modulus 0");
  const auto components = unit_group_components(q);

  std::uint64_t exponent = 1;
  std::uint64_t size = 1;
  for (const auto& c : components) {
    exponent = arith::lcm(exponent, c.order);
    size *= c.order;
  }

  std::vector<Character> chars;
  chars.reserve(size);
  std::vector<std::uint64_t> tuple(components.size(), 0);
  for (std::uint64_t index = 0; index < size; ++index) {
    std::vector<std::int32_t> e(q);
    for (std::uint64_t n = 0; n < q; ++n) {
      if (arith::gcd(n, q) != 1) {
        e[n] = Character::kZero;
        continue;
      }
      std::uint64_t acc = 0;
      for (std::size_t j = 0; j < components.size(); ++j) {
        const auto& c = components[j];
        const auto l = static_cast<std::uint64_t>(c.dlog[n % c.prime_power]);
        acc = (acc + tuple[j] * l % c.order * (exponent / c.order)) % exponent;
      }
      e[n] = static_cast<std::int32_t>(acc);
    }
    chars.emplace_back(q, exponent, std::move(e), std::to_string(q) + "#" + std::to_string(index));

    // Odometer, last component fastest.
    for (std::size_t j = components.size(); j-- > 0;) {
      if (++tuple[j] < components[j].order) break;
      tuple[j] = 0;
    }
  }
  return CharacterGroup(q, std::move(chars));
}

std::vector<Character> real_characters(std::uint64_t q) {
  std::vector<Character> out;
  for (const auto& chi : build_group(q)) {
    if (chi.is_real()) out.push_back(chi);
  }
  return out;
}

bool is_quadratic_residue(std::int64_t a, std::uint64_t q) {
  if (q == 0) fail(ErrorKind::domain, "invalid modulus 0");
  if (arith::gcd(arith::mod(a, q), q) != 1)
    fail(ErrorKind::domain, "is_quadratic_residue requires gcd(a, q) = 1");
  for (const auto& chi : real_characters(q)) {
    if (chi.real_value(a) != 1) return false;
  }
  return true;
}

}  // namespace s2bias
