#pragma once

// Residue-class races: running per-class totals of a weight (membership in
// S, omega, Omega), the set of n where one class leads, and the fit against
// the predicted main term.

#include <cstdint>
#include <vector>

#include "s2bias/sieve.hpp"

namespace s2bias {

struct RacePair {
  std::int64_t a;
  std::int64_t b;
};

struct RaceSeries {
  std::uint64_t q = 0;
  std::int64_t a = 0;
  std::int64_t b = 0;
  Weight weight = Weight::indicator_s;
  std::uint64_t limit = 0;

  std::vector<std::uint64_t> checkpoints;
  std::vector<std::uint64_t> count_a;
  std::vector<std::uint64_t> count_b;
  std::vector<std::int64_t> diff_at_checkpoint;

  // Over n = 1..limit. "Lead" is count_a > count_b for indicator_s and
  // big_omega, and count_a < count_b for omega.
  std::uint64_t lead_count = 0;
  std::uint64_t tie_count = 0;
  std::uint64_t trail_count = 0;

  double lead_density() const { return static_cast<double>(lead_count) / static_cast<double>(limit); }
  double tie_density() const { return static_cast<double>(tie_count) / static_cast<double>(limit); }
  double trail_density() const { return static_cast<double>(trail_count) / static_cast<double>(limit); }
};

// Throws ErrorKind::domain when a pair is not admissible for the weight.
void validate_race(std::uint64_t q, const RacePair& pair, Weight weight);

// Checkpoint grid stride, stride*2, ..., always ending at limit.
std::vector<std::uint64_t> checkpoint_grid(std::uint64_t limit, std::uint64_t stride);

// One ascending scan over [1, limit] shared by all pairs.
std::vector<RaceSeries> run_races(std::uint64_t q, const std::vector<RacePair>& pairs,
                                  std::uint64_t limit, Weight weight,
                                  std::uint64_t checkpoint_stride,
                                  const SieveOptions& sieve = {}, SieveStats* stats = nullptr);

RaceSeries run_race(std::uint64_t q, std::int64_t a, std::int64_t b, std::uint64_t limit,
                    Weight weight, std::uint64_t checkpoint_stride, const SieveOptions& sieve = {});

struct Table2Entry {
  std::int64_t a;
  std::int64_t b;
  double published_percent;
};

// The 24 published (a, b) entries for q = 15 at 10^7.
const std::vector<Table2Entry>& table2_published();

struct Table2Row {
  std::int64_t a;
  std::int64_t b;
  double lead_percent;
  double published_percent;
  std::uint64_t tie_count;
};

std::vector<Table2Row> table2(std::uint64_t limit, const SieveOptions& sieve = {},
                              SieveStats* stats = nullptr);

struct ResidualWindow {
  std::uint64_t lo;
  std::uint64_t hi;
  std::size_t samples;
  double mean_abs_e;      // mean |E(x)| (log x)^(3/4) / sqrt x
  double mean_sq_e;       // mean of the square of the same
  double mean_sq_E_over_X;  // (1/X) mean |E(x)|^2, X = lo
  double reference;         // X / (log X)^(5/2), for the trend only
};

struct BiasReport {
  RaceSeries series;
  double predicted_coefficient = 0.0;  // phi(q)^-1 C_q C_{q,a,b}
  std::vector<double> predicted_main_term;  // per checkpoint
  std::vector<double> residual;             // E(x) per checkpoint
  double lead_density = 0.0;
  double tie_density = 0.0;
  std::vector<ResidualWindow> residual_stats;  // dyadic windows j = 0..5
};

// Uses the computed phi(q)^-1 C_q C_{q,a,b}. Requires weight indicator_s.
BiasReport main_term_fit(const RaceSeries& series);
BiasReport main_term_fit(const RaceSeries& series, double predicted_coefficient);

double predicted_coefficient(std::uint64_t q, std::int64_t a, std::int64_t b);

// S(x;3,1) - S(x;3,2) at a dense grid (default stride limit / 10^4).
RaceSeries figure3_series(std::uint64_t limit, std::uint64_t stride = 0,
                          const SieveOptions& sieve = {});

}  // namespace s2bias
