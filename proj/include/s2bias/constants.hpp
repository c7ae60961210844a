#pragma once

// Explicit constants governing the bias of sums of two squares in residue
// classes: the Landau-Ramanujan constant, Gamma(1/4), C_q, G(1/2, chi),
// the bias constants C_{q,a,b} and D_{q,a,b}, and local Euler-factor
// identity checks.

#include <cstdint>
#include <string>
#include <vector>

#include "s2bias/chargroup.hpp"

namespace s2bias::constants {

inline constexpr unsigned kDefaultKMax = 12;

// K = 2^-1/2 prod_{k=1..k_max} (zeta(2^k)(1 - 2^-2^k) / L(2^k, chi_-4))^(2^-k-1)
double landau_ramanujan(unsigned k_max = kDefaultKMax);

// prod_{p = 3 mod 4} (1 - p^-2)^(-1/4), routed through K.
double three_mod_four_quarter_product();

double gamma_quarter();

// C_q = 2 pi^-1/4 / Gamma(1/4) prod_{p=3(4)} (1-p^-2)^-1/4 prod_{p|q, p=3(4)} (1-1/p)^1/2
double c_q(std::uint64_t q);

// G(1/2, chi) for a real character chi (at chi's own modulus).
double g_half(const Character& chi);

enum class BiasKind { two_squares, omega };

// Which characters feed the L-values: the modulus-q characters as written
// (imprimitive, missing Euler factors) or the primitive characters inducing
// them.
enum class LConvention { imprimitive, primitive };

struct CharacterTerm {
  std::size_t char_index;
  std::string char_id;
  double value;
};

struct BiasConstant {
  std::uint64_t q = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
  BiasKind kind = BiasKind::two_squares;
  double value = 0.0;
  std::vector<CharacterTerm> per_character_terms;
};

BiasConstant c_qab(std::uint64_t q, std::int64_t a, std::int64_t b,
                   LConvention convention = LConvention::imprimitive);

BiasConstant d_qab(std::uint64_t q, std::int64_t a, std::int64_t b,
                   LConvention convention = LConvention::imprimitive);

// |F_p(s, chi) - R_p(s, chi)| where F_p is the local factor of
// sum 1_S(n) chi(n) n^-s and R_p the local factor of the chi-twisted
// Shanks / Flajolet-Vardi product. Requires s > 1 and p prime.
double verify_local_identity(std::uint64_t p, double s, const Character& chi);

struct MainTermCoefficient {
  double route_a = 0.0;  // C_q (1 - chi(2)/sqrt 2)^-1/2 sqrt(L L')
  double route_b = 0.0;  // 2^-1/4 M(1/2, chi) / Gamma(1/4)
  double residual = 0.0;
};

// Coefficient of sqrt(x)/(log x)^(3/4) in sum_{n<=x, n in S} chi(n), by two
// independent assemblies. chi must be real and non-principal; it is lifted
// to modulus q when its modulus divides q.
MainTermCoefficient main_term_coefficient(std::uint64_t q, const Character& chi);

}  // namespace s2bias::constants
