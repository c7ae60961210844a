#include "s2bias/race.hpp"

#include <cmath>

#include "s2bias/arith.hpp"
#include "s2bias/constants.hpp"
#include "s2bias/error.hpp"

namespace s2bias {

void validate_race(std::uint64_t q, const RacePair& pair, Weight weight) {
  if (q == 0) fail(ErrorKind::domain, "invalid modulus 0");
  const std::uint64_t a = arith::mod(pair.a, q);
  const std::uint64_t b = arith::mod(pair.b, q);
  if (arith::gcd(a, q) != 1 || arith::gcd(b, q) != 1)
    fail(ErrorKind::domain, "race residues must be coprime to the modulus");
  if (weight == Weight::indicator_s) {
    const std::uint64_t g = arith::gcd(4, q);
    if (a % g != 1 % g || b % g != 1 % g)
      fail(ErrorKind::domain, "race residues must be 1 mod gcd(4, q) for sums of two squares");
  }
}

std::vector<std::uint64_t> checkpoint_grid(std::uint64_t limit, std::uint64_t stride) {
  if (stride == 0) fail(ErrorKind::domain, "checkpoint stride must be positive");
  std::vector<std::uint64_t> grid;
  grid.reserve(limit / stride + 1);
  for (std::uint64_t x = stride; x <= limit; x += stride) grid.push_back(x);
  if (grid.empty() || grid.back() != limit) grid.push_back(limit);
  return grid;
}

namespace {

enum class Standing : std::uint8_t { lead, tie, trail };

Standing standing(std::uint64_t ca, std::uint64_t cb, Weight weight) {
  if (ca == cb) return Standing::tie;
  const bool a_ahead = weight == Weight::omega ? ca < cb : ca > cb;
  return a_ahead ? Standing::lead : Standing::trail;
}

void credit(RaceSeries& s, Standing st, std::uint64_t run) {
  switch (st) {
    case Standing::lead: s.lead_count += run; break;
    case Standing::tie: s.tie_count += run; break;
    case Standing::trail: s.trail_count += run; break;
  }
}

}  // namespace

std::vector<RaceSeries> run_races(std::uint64_t q, const std::vector<RacePair>& pairs,
                                  std::uint64_t limit, Weight weight,
                                  std::uint64_t checkpoint_stride, const SieveOptions& sieve,
                                  SieveStats* stats) {
  for (const auto& p : pairs) validate_race(q, p, weight);
  if (limit < q) fail(ErrorKind::domain, "race limit must be at least the modulus");
  const auto grid = checkpoint_grid(limit, checkpoint_stride);

  const std::size_t k = pairs.size();
  std::vector<RaceSeries> out(k);
  std::vector<std::uint64_t> ra(k), rb(k);
  std::vector<std::vector<std::size_t>> touching(q);
  for (std::size_t i = 0; i < k; ++i) {
    auto& s = out[i];
    s.q = q;
    s.a = pairs[i].a;
    s.b = pairs[i].b;
    s.weight = weight;
    s.limit = limit;
    s.checkpoints = grid;
    s.count_a.reserve(grid.size());
    s.count_b.reserve(grid.size());
    s.diff_at_checkpoint.reserve(grid.size());
    ra[i] = arith::mod(pairs[i].a, q);
    rb[i] = arith::mod(pairs[i].b, q);
    touching[ra[i]].push_back(i);
    if (rb[i] != ra[i]) touching[rb[i]].push_back(i);
  }

  // Standings only change when a touched class gains weight, so each pair
  // keeps its current standing and the n at which it began.
  std::vector<std::uint64_t> counts(q, 0);
  std::vector<Standing> current(k, Standing::tie);
  std::vector<std::uint64_t> since(k, 1);
  std::size_t next_checkpoint = 0;

  SieveOptions opts = sieve;
  opts.with_additive = weight != Weight::indicator_s;
  const SieveStats st = for_each_block(1, limit + 1, opts, [&](const SieveBlock& block) {
    std::uint64_t r = block.lo % q;
    for (std::size_t off = 0; off < block.size(); ++off) {
      const std::uint64_t n = block.lo + off;
      std::uint64_t w = 0;
      switch (weight) {
        case Weight::indicator_s: w = block.in_s.test(off); break;
        case Weight::omega: w = block.omega[off]; break;
        case Weight::big_omega: w = block.big_omega[off]; break;
      }
      if (w != 0) {
        counts[r] += w;
        for (const std::size_t i : touching[r]) {
          const Standing now = standing(counts[ra[i]], counts[rb[i]], weight);
          if (now != current[i]) {
            credit(out[i], current[i], n - since[i]);
            current[i] = now;
            since[i] = n;
          }
        }
      }
      if (next_checkpoint < grid.size() && n == grid[next_checkpoint]) {
        for (std::size_t i = 0; i < k; ++i) {
          out[i].count_a.push_back(counts[ra[i]]);
          out[i].count_b.push_back(counts[rb[i]]);
          out[i].diff_at_checkpoint.push_back(static_cast<std::int64_t>(counts[ra[i]]) -
                                              static_cast<std::int64_t>(counts[rb[i]]));
        }
        ++next_checkpoint;
      }
      if (++r == q) r = 0;
    }
  });
  for (std::size_t i = 0; i < k; ++i) credit(out[i], current[i], limit + 1 - since[i]);
  if (stats) *stats = st;
  return out;
}

RaceSeries run_race(std::uint64_t q, std::int64_t a, std::int64_t b, std::uint64_t limit,
                    Weight weight, std::uint64_t checkpoint_stride, const SieveOptions& sieve) {
  return run_races(q, {{a, b}}, limit, weight, checkpoint_stride, sieve).front();
}

const std::vector<Table2Entry>& table2_published() {
  static const std::vector<Table2Entry> entries = {
      {1, 2, 93.99},  {1, 7, 99.99},  {1, 8, 86.12},   {1, 11, 99.98},  {1, 13, 99.99},
      {1, 14, 99.99}, {4, 2, 96.28},  {4, 7, 99.97},   {4, 8, 90.72},   {4, 11, 99.99},
      {4, 13, 99.99}, {4, 14, 99.96}, {2, 7, 99.90},   {2, 11, 99.85},  {2, 13, 99.93},
      {2, 14, 99.90}, {7, 8, 0.03},   {7, 11, 57.99},  {7, 14, 57.99},  {8, 11, 99.52},
      {8, 13, 99.96}, {8, 14, 99.99}, {11, 13, 40.19}, {13, 14, 59.23},
  };
  return entries;
}

std::vector<Table2Row> table2(std::uint64_t limit, const SieveOptions& sieve, SieveStats* stats) {
  std::vector<RacePair> pairs;
  for (const auto& e : table2_published()) pairs.push_back({e.a, e.b});
  const auto series = run_races(15, pairs, limit, Weight::indicator_s, limit, sieve, stats);
  std::vector<Table2Row> rows;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto& e = table2_published()[i];
    rows.push_back({e.a, e.b, 100.0 * series[i].lead_density(), e.published_percent,
                    series[i].tie_count});
  }
  return rows;
}

double predicted_coefficient(std::uint64_t q, std::int64_t a, std::int64_t b) {
  const double cqab = constants::c_qab(q, a, b).value;
  return constants::c_q(q) * cqab / static_cast<double>(arith::euler_phi(q));
}

BiasReport main_term_fit(const RaceSeries& series) {
  return main_term_fit(series, predicted_coefficient(series.q, series.a, series.b));
}

BiasReport main_term_fit(const RaceSeries& series, double coefficient) {
  if (series.weight != Weight::indicator_s)
    fail(ErrorKind::domain, "main_term_fit applies to the sums-of-two-squares race");
  BiasReport report;
  report.series = series;
  report.predicted_coefficient = coefficient;
  report.lead_density = series.lead_density();
  report.tie_density = series.tie_density();

  const std::size_t m = series.checkpoints.size();
  report.predicted_main_term.assign(m, 0.0);
  report.residual.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const auto x = static_cast<double>(series.checkpoints[i]);
    const double main = x > 1 ? coefficient * std::sqrt(x) * std::pow(std::log(x), -0.75) : 0.0;
    report.predicted_main_term[i] = main;
    report.residual[i] = static_cast<double>(series.diff_at_checkpoint[i]) - main;
  }

  for (unsigned j = 0; j <= 5; ++j) {
    ResidualWindow w{series.limit >> (j + 1), series.limit >> j, 0, 0.0, 0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < m; ++i) {
      const std::uint64_t xi = series.checkpoints[i];
      if (xi <= 1 || xi < w.lo || xi > w.hi) continue;
      const auto x = static_cast<double>(xi);
      const double e = report.residual[i] * std::pow(std::log(x), 0.75) / std::sqrt(x);
      w.mean_abs_e += std::fabs(e);
      w.mean_sq_e += e * e;
      w.mean_sq_E_over_X += report.residual[i] * report.residual[i];
      ++w.samples;
    }
    if (w.samples > 0) {
      const auto cnt = static_cast<double>(w.samples);
      w.mean_abs_e /= cnt;
      w.mean_sq_e /= cnt;
      w.mean_sq_E_over_X /= cnt * static_cast<double>(std::max<std::uint64_t>(w.lo, 1));
    }
    if (w.lo > 1) {
      const auto big_x = static_cast<double>(w.lo);
      w.reference = big_x / std::pow(std::log(big_x), 2.5);
    }
    report.residual_stats.push_back(w);
  }
  return report;
}

RaceSeries figure3_series(std::uint64_t limit, std::uint64_t stride, const SieveOptions& sieve) {
  if (stride == 0) stride = std::max<std::uint64_t>(1, limit / 10000);
  return run_race(3, 1, 2, limit, Weight::indicator_s, stride, sieve);
}

}  // namespace s2bias
