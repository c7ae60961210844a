#include "s2bias/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "s2bias/arith.hpp"
#include "s2bias/chargroup.hpp"
#include "s2bias/constants.hpp"
#include "s2bias/error.hpp"
#include "s2bias/lfunc.hpp"
#include "s2bias/sieve.hpp"

namespace s2bias::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v, int digits = 17) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

const std::set<std::string> kFlagKeys = {"omega", "real-only", "verify", "no-svg"};

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

std::vector<std::pair<std::string, std::string>> read_config_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::usage, "cannot read config file: " + path.string());
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      fail(ErrorKind::usage, path.string() + ":" + std::to_string(lineno) + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(ErrorKind::usage, path.string() + ":" + std::to_string(lineno) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
  std::optional<std::string> config;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) fail(ErrorKind::usage, "--config requires a file name");
      config = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config = args[i].substr(9);
    }
  }
  if (!config) return args;

  auto given = [&](const std::string& key) {
    const std::string flag = "--" + key;
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
      return a == flag || a.rfind(flag + "=", 0) == 0;
    });
  };
  std::vector<std::string> merged = args;
  for (const auto& [key, value] : read_config_file(*config)) {
    if (key == "config") fail(ErrorKind::usage, "config files cannot include other config files");
    if (given(key)) continue;
    if (kFlagKeys.count(key)) {
      if (value == "true" || value == "1" || value == "yes" || value == "on") {
        merged.push_back("--" + key);
      } else if (!(value == "false" || value == "0" || value == "no" || value == "off")) {
        fail(ErrorKind::usage, "config key '" + key + "' expects a boolean, got '" + value + "'");
      }
      continue;
    }
    merged.push_back("--" + key + "=" + value);
  }
  return merged;
}

RacePair parse_pair(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) fail(ErrorKind::usage, "pair must be written a,b: '" + text + "'");
  try {
    std::size_t used_a = 0;
    std::size_t used_b = 0;
    const std::string sa = trim(text.substr(0, comma));
    const std::string sb = trim(text.substr(comma + 1));
    const long long a = std::stoll(sa, &used_a);
    const long long b = std::stoll(sb, &used_b);
    if (used_a != sa.size() || used_b != sb.size()) throw std::invalid_argument(text);
    return {a, b};
  } catch (const std::logic_error&) {
    fail(ErrorKind::usage, "pair must be two integers a,b: '" + text + "'");
  }
}

Weight parse_weight(const std::string& text) {
  if (text == "s" || text == "indicator_s") return Weight::indicator_s;
  if (text == "omega") return Weight::omega;
  if (text == "big_omega" || text == "Omega") return Weight::big_omega;
  fail(ErrorKind::usage, "unknown weight '" + text + "' (expected s, omega or big_omega)");
}

// ---------------------------------------------------------------------------
// Emission helpers

std::string svg_line_plot(const std::vector<SvgSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label) {
  constexpr double kWidth = 900, kHeight = 500;
  constexpr double kLeft = 80, kRight = 20, kTop = 40, kBottom = 60;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  }
  if (!(x0 < x1)) {
    x0 = std::isfinite(x0) ? x0 - 1 : 0;
    x1 = x0 + 2;
  }
  if (!(y0 < y1)) {
    y0 = std::isfinite(y0) ? y0 - 1 : 0;
    y1 = y0 + 2;
  }
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kTop + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
    << "</text>\n";
  // Axes box and ticks.
  o << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x0 + (x1 - x0) * i / 5;
    const double yv = y0 + (y1 - y0) * i / 5;
    o << "<text x=\"" << fmt_double(px(xv), 6) << "\" y=\"" << kTop + ph + 18
      << "\" text-anchor=\"middle\">" << fmt_double(xv, 4) << "</text>\n";
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << fmt_double(py(yv) + 4, 6)
      << "\" text-anchor=\"end\">" << fmt_double(yv, 4) << "</text>\n";
  }
  if (y0 < 0 && y1 > 0) {
    o << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + pw << "\" y1=\"" << fmt_double(py(0), 6)
      << "\" y2=\"" << fmt_double(py(0), 6) << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
  }
  o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">"
    << x_label << "</text>\n";
  o << "<text transform=\"translate(18," << kTop + ph / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << y_label << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i) o << ' ';
      o << fmt_double(px(s.points[i].first), 6) << ',' << fmt_double(py(s.points[i].second), 6);
    }
    o << "\"/>\n";
    const double ly = kTop + 16 + 16 * static_cast<double>(k);
    o << "<line x1=\"" << kLeft + 10 << "\" x2=\"" << kLeft + 30 << "\" y1=\"" << ly - 4 << "\" y2=\""
      << ly - 4 << "\" stroke=\"" << s.color << "\"/>\n";
    o << "<text x=\"" << kLeft + 36 << "\" y=\"" << ly << "\">" << s.label << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string race_csv(const RaceSeries& series, const BiasReport* fit) {
  std::string out = "x,count_a,count_b,diff,predicted_main_term,residual\n";
  for (std::size_t i = 0; i < series.checkpoints.size(); ++i) {
    out += std::to_string(series.checkpoints[i]) + ',' + std::to_string(series.count_a[i]) + ',' +
           std::to_string(series.count_b[i]) + ',' + std::to_string(series.diff_at_checkpoint[i]) + ',';
    if (fit) out += fmt_double(fit->predicted_main_term[i], 12) + ',' + fmt_double(fit->residual[i], 12);
    else out += ',';
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// L-value cache

LValueCache::LValueCache(fs::path path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::uint64_t q = 0;
    std::size_t idx = 0;
    std::string s_text;
    Entry e{};
    if (!(ls >> q >> idx >> s_text >> e.re >> e.im >> e.error_bound)) continue;
    entries_.emplace_back(std::to_string(q) + ' ' + std::to_string(idx) + ' ' + s_text, e);
  }
}

std::string LValueCache::key(std::uint64_t q, std::size_t index, double s) {
  return std::to_string(q) + ' ' + std::to_string(index) + ' ' + fmt_double(s);
}

std::optional<LValueCache::Entry> LValueCache::find(std::uint64_t q, std::size_t index, double s) const {
  const auto k = key(q, index, s);
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it)
    if (it->first == k) return it->second;
  return std::nullopt;
}

void LValueCache::insert(std::uint64_t q, std::size_t index, double s, const Entry& e) {
  const auto k = key(q, index, s);
  entries_.emplace_back(k, e);
  if (!path_.parent_path().empty()) fs::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::app);
  if (!out) fail(ErrorKind::resource, "cannot write L-value cache: " + path_.string());
  out << k << ' ' << fmt_double(e.re) << ' ' << fmt_double(e.im) << ' ' << fmt_double(e.error_bound)
      << '\n';
}

// ---------------------------------------------------------------------------
// Subcommands

namespace {

struct Context {
  RunConfig cfg;
  std::ostream& out;
  std::vector<std::string> files;
  SieveStats sieve;
  bool wrote_output = false;

  SieveOptions sieve_options() const {
    SieveOptions o;
    o.segment_length = cfg.segment_length;
    if (cfg.segments > 0) o.segment_length = std::max<std::uint64_t>(1, (cfg.limit + cfg.segments - 1) / cfg.segments);
    o.workers = cfg.workers;
    if (auto dir = cache_dir()) o.cache_dir = *dir;
    return o;
  }

  std::optional<fs::path> cache_dir() const {
    if (!cfg.cache_dir.empty()) return fs::path(cfg.cache_dir);
    if (const char* env = std::getenv(kCacheEnv); env && *env) return fs::path(env);
    return std::nullopt;
  }

  void add_stats(const SieveStats& s) {
    sieve.blocks_sieved += s.blocks_sieved;
    sieve.blocks_loaded += s.blocks_loaded;
    sieve.sieve_seconds += s.sieve_seconds;
    sieve.load_seconds += s.load_seconds;
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorKind::resource, "cannot create output directory " + dir.string() + ": " + ec.message());
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorKind::resource, "cannot write " + (dir / name).string());
    f << content;
    if (!f) fail(ErrorKind::resource, "failed writing " + (dir / name).string());
    files.push_back(name);
    wrote_output = true;
  }
};

ordered_json config_json(const RunConfig& c) {
  ordered_json j;
  j["subcommand"] = c.subcommand;
  j["limit"] = c.limit;
  j["modulus"] = c.modulus;
  j["pairs"] = c.pairs;
  j["weight"] = c.weight;
  j["segment_length"] = c.segment_length;
  j["segments"] = c.segments;
  j["workers"] = c.workers;
  j["cache_dir"] = c.cache_dir;
  j["output_dir"] = c.output_dir;
  j["tol"] = c.tol;
  j["stride"] = c.stride;
  j["s"] = c.s;
  j["char_index"] = c.char_index;
  j["prime_limit"] = c.prime_limit;
  j["omega"] = c.omega;
  j["real_only"] = c.real_only;
  j["verify"] = c.verify;
  j["no_svg"] = c.no_svg;
  j["config_file"] = c.config_file;
  return j;
}

ordered_json series_json(const RaceSeries& s) {
  ordered_json j;
  j["q"] = s.q;
  j["a"] = s.a;
  j["b"] = s.b;
  j["weight"] = to_string(s.weight);
  j["limit"] = s.limit;
  j["lead_count"] = s.lead_count;
  j["tie_count"] = s.tie_count;
  j["trail_count"] = s.trail_count;
  j["lead_density"] = s.lead_density();
  j["tie_density"] = s.tie_density();
  j["trail_density"] = s.trail_density();
  j["checkpoint_count"] = s.checkpoints.size();
  j["final_diff"] = s.diff_at_checkpoint.empty() ? 0 : s.diff_at_checkpoint.back();
  return j;
}

ordered_json report_json(const BiasReport& r) {
  ordered_json j = series_json(r.series);
  j["predicted_coefficient"] = r.predicted_coefficient;
  ordered_json windows = ordered_json::array();
  for (const auto& w : r.residual_stats) {
    windows.push_back({{"lo", w.lo},
                       {"hi", w.hi},
                       {"samples", w.samples},
                       {"mean_abs_e", w.mean_abs_e},
                       {"mean_sq_e", w.mean_sq_e},
                       {"mean_sq_E_over_X", w.mean_sq_E_over_X},
                       {"reference", w.reference}});
  }
  j["residual_windows"] = windows;
  return j;
}

std::string race_stem(const RaceSeries& s) {
  return "race_q" + std::to_string(s.q) + "_" + std::to_string(s.a) + "_" + std::to_string(s.b) + "_" +
         to_string(s.weight);
}

SvgSeries diff_curve(const RaceSeries& s) {
  SvgSeries c{"diff(x)", "#1f4e9c", {}};
  for (std::size_t i = 0; i < s.checkpoints.size(); ++i)
    c.points.emplace_back(static_cast<double>(s.checkpoints[i]), static_cast<double>(s.diff_at_checkpoint[i]));
  return c;
}

SvgSeries main_term_curve(const RaceSeries& s, const BiasReport& fit) {
  SvgSeries c{"predicted main term", "#c0392b", {}};
  for (std::size_t i = 0; i < s.checkpoints.size(); ++i)
    if (s.checkpoints[i] > 1) c.points.emplace_back(static_cast<double>(s.checkpoints[i]), fit.predicted_main_term[i]);
  return c;
}

std::string percent(double density) { return fmt_double(100.0 * density, 8); }

Character character_at(std::uint64_t q, std::size_t index) {
  const auto g = build_group(q);
  if (index >= g.size())
    fail(ErrorKind::usage, "character index " + std::to_string(index) + " out of range for modulus " +
                               std::to_string(q) + " (" + std::to_string(g.size()) + " characters)");
  return g[index];
}

void require_modulus(const RunConfig& c) {
  if (c.modulus == 0) fail(ErrorKind::usage, "--modulus is required and must be positive");
}

std::vector<RacePair> validated_pairs(const RunConfig& c, Weight w) {
  std::vector<RacePair> pairs;
  for (const auto& p : c.pairs) pairs.push_back(parse_pair(p));
  for (const auto& p : pairs) {
    try {
      validate_race(c.modulus, p, w);
    } catch (const Error& e) {
      fail(ErrorKind::usage, e.what());
    }
  }
  if (c.limit < c.modulus) fail(ErrorKind::usage, "--limit must be at least the modulus");
  return pairs;
}

// chars --modulus q
void cmd_chars(Context& ctx) {
  require_modulus(ctx.cfg);
  const auto g = build_group(ctx.cfg.modulus);
  ctx.out << "index,id,order,real,principal,conductor,exponents\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& c = g[i];
    if (ctx.cfg.real_only && !c.is_real()) continue;
    std::string ex;
    for (auto e : c.exponents()) {
      if (!ex.empty()) ex += ' ';
      ex += e == Character::kZero ? std::string("*") : std::to_string(e);
    }
    ctx.out << i << ',' << c.id() << ',' << c.order() << ',' << (c.is_real() ? 1 : 0) << ','
            << (c.is_principal() ? 1 : 0) << ',' << primitive_of(c).modulus() << ',' << ex << '\n';
  }
}

// lvalue --modulus q --char-index i --s VALUE [--tol T]
void cmd_lvalue(Context& ctx) {
  const auto& c = ctx.cfg;
  require_modulus(c);
  const auto chi = character_at(c.modulus, c.char_index);
  std::optional<LValueCache> cache;
  if (auto dir = ctx.cache_dir()) cache.emplace(*dir / "lvalues.txt");
  LValueCache::Entry e{};
  std::optional<LValueCache::Entry> hit;
  if (cache) hit = cache->find(c.modulus, c.char_index, c.s);
  if (hit && hit->error_bound <= c.tol) {
    e = *hit;
  } else {
    const auto r = l_value(chi, c.s, c.tol);
    e = {r.value.real(), r.value.imag(), r.error_bound};
    if (cache) cache->insert(c.modulus, c.char_index, c.s, e);
  }
  ctx.out << "modulus,char_index,character,s,value_re,value_im,error_bound\n";
  ctx.out << c.modulus << ',' << c.char_index << ',' << chi.id() << ',' << fmt_double(c.s) << ','
          << fmt_double(e.re, 15) << ',' << fmt_double(e.im, 15) << ',' << fmt_double(e.error_bound, 3)
          << '\n';
}

ordered_json bias_json(const constants::BiasConstant& bc) {
  ordered_json terms = ordered_json::array();
  for (const auto& t : bc.per_character_terms)
    terms.push_back({{"char_index", t.char_index}, {"character", t.char_id}, {"value", t.value}});
  return {{"value", bc.value}, {"per_character_terms", terms}};
}

ordered_json constants_json(std::uint64_t q, const std::vector<std::string>& pair_texts, bool omega) {
  using namespace constants;
  ordered_json j;
  j["modulus"] = q;
  j["landau_ramanujan"] = landau_ramanujan();
  j["gamma_quarter"] = gamma_quarter();
  j["c_q"] = c_q(q);
  ordered_json chars = ordered_json::array();
  const auto g = build_group(q);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto& chi = g[i];
    if (!chi.is_real() || chi.is_principal()) continue;
    ordered_json cj;
    cj["index"] = i;
    cj["id"] = chi.id();
    cj["conductor"] = primitive_of(chi).modulus();
    cj["chi_at_2"] = chi.real_value(2);
    cj["l_half"] = l_value(chi, 0.5).value.real();
    const auto twist = twist_by_chi_minus4(chi);
    if (!twist.is_principal()) {
      cj["l_half_twist"] = l_value(twist, 0.5).value.real();
      cj["l_half_primitive"] = l_value(primitive_of(chi), 0.5).value.real();
      cj["l_half_twist_primitive"] = l_value(primitive_of(twist), 0.5).value.real();
      cj["g_half"] = g_half(chi);
      const auto m = main_term_coefficient(q, chi);
      cj["main_term"] = {{"route_a", m.route_a}, {"route_b", m.route_b}, {"residual", m.residual}};
    }
    chars.push_back(cj);
  }
  j["real_characters"] = chars;
  ordered_json pairs = ordered_json::array();
  for (const auto& text : pair_texts) {
    const auto p = parse_pair(text);
    ordered_json pj;
    pj["a"] = p.a;
    pj["b"] = p.b;
    pj["kind"] = omega ? "omega" : "two_squares";
    try {
      if (omega) {
        pj["imprimitive"] = bias_json(d_qab(q, p.a, p.b, LConvention::imprimitive));
        pj["primitive"] = bias_json(d_qab(q, p.a, p.b, LConvention::primitive));
      } else {
        pj["imprimitive"] = bias_json(c_qab(q, p.a, p.b, LConvention::imprimitive));
        pj["primitive"] = bias_json(c_qab(q, p.a, p.b, LConvention::primitive));
        pj["normalized_coefficient"] = predicted_coefficient(q, p.a, p.b);
      }
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::domain) fail(ErrorKind::usage, e.what());
      throw;
    }
    pairs.push_back(pj);
  }
  j["pairs"] = pairs;
  return j;
}

// constants --modulus q [--pair a,b]... [--omega]
void cmd_constants(Context& ctx) {
  require_modulus(ctx.cfg);
  const auto j = constants_json(ctx.cfg.modulus, ctx.cfg.pairs, ctx.cfg.omega);
  ctx.out << j.dump(2) << '\n';
}

// sieve --limit N [--segments k] [--verify]
void cmd_sieve(Context& ctx) {
  const auto& c = ctx.cfg;
  std::uint64_t count_s = 0, sum_omega = 0, sum_big_omega = 0, mismatches = 0;
  auto opts = ctx.sieve_options();
  opts.with_additive = true;
  ctx.add_stats(for_each_block(1, c.limit + 1, opts, [&](const SieveBlock& b) {
    count_s += b.in_s.count();
    for (auto v : b.omega) sum_omega += v;
    for (auto v : b.big_omega) sum_big_omega += v;
    if (c.verify && sieve_two_squares_multiplicative(b.lo, b.hi) != b.in_s) ++mismatches;
  }));
  const double n = static_cast<double>(c.limit);
  ordered_json j;
  j["limit"] = c.limit;
  j["count_s"] = count_s;
  j["sum_omega"] = sum_omega;
  j["sum_big_omega"] = sum_big_omega;
  j["landau_ratio"] = static_cast<double>(count_s) * std::sqrt(std::log(n)) / (constants::landau_ramanujan() * n);
  j["verified"] = c.verify;
  ctx.write("sieve.json", j.dump(2) + "\n");
  ctx.out << j.dump(2) << '\n';
  if (mismatches)
    fail(ErrorKind::consistency, "lattice and multiplicative sieves disagree on " + std::to_string(mismatches) + " block(s)");
}

// race --modulus q --pair a,b [--pair ...] --limit N [--weight w] [--stride k]
ordered_json do_race(Context& ctx, std::uint64_t q, const std::vector<std::string>& pair_texts, Weight w,
                     bool print) {
  RunConfig c = ctx.cfg;
  c.modulus = q;
  c.pairs = pair_texts;
  const auto pairs = validated_pairs(c, w);
  const std::uint64_t stride = c.stride ? c.stride : std::max<std::uint64_t>(1, c.limit / 100);
  SieveStats st;
  const auto all = run_races(q, pairs, c.limit, w, stride, ctx.sieve_options(), &st);
  ctx.add_stats(st);
  ordered_json arr = ordered_json::array();
  if (print) ctx.out << "q,a,b,weight,lead_percent,tie_count,final_diff\n";
  for (const auto& s : all) {
    std::optional<BiasReport> fit;
    ordered_json j;
    if (w == Weight::indicator_s) {
      fit = main_term_fit(s);
      j = report_json(*fit);
    } else {
      j = series_json(s);
      j["bias_constant"] = constants::d_qab(q, s.a, s.b).value;
    }
    const auto stem = race_stem(s);
    ctx.write(stem + ".csv", race_csv(s, fit ? &*fit : nullptr));
    if (!c.no_svg) {
      std::vector<SvgSeries> curves = {diff_curve(s)};
      if (fit) curves.push_back(main_term_curve(s, *fit));
      ctx.write(stem + ".svg", svg_line_plot(curves,
                                             "Race mod " + std::to_string(q) + ": " + std::to_string(s.a) +
                                                 " vs " + std::to_string(s.b) + " (" + to_string(w) + ")",
                                             "x", "count_a - count_b"));
    }
    if (print)
      ctx.out << q << ',' << s.a << ',' << s.b << ',' << to_string(w) << ',' << percent(s.lead_density()) << ','
              << s.tie_count << ',' << (s.diff_at_checkpoint.empty() ? 0 : s.diff_at_checkpoint.back()) << '\n';
    arr.push_back(j);
  }
  return arr;
}

void cmd_race(Context& ctx) {
  require_modulus(ctx.cfg);
  if (ctx.cfg.pairs.empty()) fail(ErrorKind::usage, "race needs at least one --pair a,b");
  const auto arr = do_race(ctx, ctx.cfg.modulus, ctx.cfg.pairs, parse_weight(ctx.cfg.weight), true);
  ctx.write("race.json", ordered_json{{"races", arr}}.dump(2) + "\n");
}

// table2 --limit N
ordered_json do_table2(Context& ctx, bool print) {
  SieveStats st;
  const auto rows = table2(ctx.cfg.limit, ctx.sieve_options(), &st);
  ctx.add_stats(st);
  std::string csv = "a,b,lead_percent,published_percent,difference,tie_count,c_15ab\n";
  ordered_json arr = ordered_json::array();
  for (const auto& r : rows) {
    const double c15 = constants::c_qab(15, r.a, r.b).value;
    csv += std::to_string(r.a) + ',' + std::to_string(r.b) + ',' + fmt_double(r.lead_percent, 8) + ',' +
           fmt_double(r.published_percent, 4) + ',' + fmt_double(r.lead_percent - r.published_percent, 6) + ',' +
           std::to_string(r.tie_count) + ',' + fmt_double(c15, 10) + '\n';
    arr.push_back({{"a", r.a},
                   {"b", r.b},
                   {"lead_percent", r.lead_percent},
                   {"published_percent", r.published_percent},
                   {"tie_count", r.tie_count},
                   {"c_15ab", c15}});
  }
  ctx.write("table2.csv", csv);
  const ordered_json j = {{"q", 15}, {"limit", ctx.cfg.limit}, {"rows", arr}};
  ctx.write("table2.json", j.dump(2) + "\n");
  if (print) ctx.out << csv;
  return j;
}

void cmd_table2(Context& ctx) { do_table2(ctx, true); }

// martin --limit N [--modulus q --pair a,b]
ordered_json do_martin(Context& ctx, bool print) {
  const std::uint64_t q = ctx.cfg.modulus ? ctx.cfg.modulus : 4;
  const std::vector<std::string> pairs = ctx.cfg.pairs.empty() ? std::vector<std::string>{"1,3"} : ctx.cfg.pairs;
  ordered_json j;
  j["omega"] = do_race(ctx, q, pairs, Weight::omega, false);
  j["big_omega"] = do_race(ctx, q, pairs, Weight::big_omega, false);
  std::string csv = "weight,q,a,b,lead_percent,tie_count,bias_constant\n";
  for (const char* key : {"omega", "big_omega"}) {
    for (const auto& r : j[key]) {
      csv += std::string(key) + ',' + std::to_string(q) + ',' + std::to_string(r["a"].get<std::int64_t>()) + ',' +
             std::to_string(r["b"].get<std::int64_t>()) + ',' + percent(r["lead_density"].get<double>()) + ',' +
             std::to_string(r["tie_count"].get<std::uint64_t>()) + ',' +
             fmt_double(r["bias_constant"].get<double>(), 10) + '\n';
    }
  }
  ctx.write("martin.csv", csv);
  ctx.write("martin.json", j.dump(2) + "\n");
  if (print) ctx.out << csv;
  return j;
}

void cmd_martin(Context& ctx) { do_martin(ctx, true); }

// figure3 --limit N [--stride k]
ordered_json do_figure3(Context& ctx, bool print) {
  const auto& c = ctx.cfg;
  const std::uint64_t stride = c.stride ? c.stride : std::max<std::uint64_t>(1, c.limit / 10000);
  SieveStats st;
  const auto all = run_races(3, {{1, 2}}, std::max<std::uint64_t>(c.limit, 3), Weight::indicator_s, stride,
                             ctx.sieve_options(), &st);
  ctx.add_stats(st);
  const auto fit = main_term_fit(all[0]);
  ctx.write("figure3.csv", race_csv(all[0], &fit));
  if (!c.no_svg)
    ctx.write("figure3.svg", svg_line_plot({diff_curve(all[0]), main_term_curve(all[0], fit)},
                                           "S(x;3,1) - S(x;3,2)", "x", "difference"));
  const auto j = report_json(fit);
  ctx.write("figure3.json", j.dump(2) + "\n");
  if (print) ctx.out << j.dump(2) << '\n';
  return j;
}

void cmd_figure3(Context& ctx) { do_figure3(ctx, true); }

// verify-identity [--prime-limit P] [--s S] [--modulus q]
constexpr double kIdentityTolerance = 1e-12;

void cmd_verify_identity(Context& ctx) {
  const auto& c = ctx.cfg;
  std::vector<Character> chars;
  if (c.modulus) {
    for (const auto& chi : build_group(c.modulus)) chars.push_back(chi);
  } else {
    chars = {principal_character(1), chi_minus4(), build_group(3)[1]};
  }
  if (c.s <= 1) fail(ErrorKind::usage, "--s must exceed 1 for the local identity check");
  double worst = 0;
  ctx.out << "p,character,residual\n";
  for (auto p : arith::primes_up_to(c.prime_limit)) {
    for (const auto& chi : chars) {
      const double r = constants::verify_local_identity(p, c.s, chi);
      worst = std::max(worst, r);
      ctx.out << p << ',' << chi.id() << ',' << fmt_double(r, 3) << '\n';
    }
  }
  ctx.out << "# max residual " << fmt_double(worst, 3) << '\n';
  if (!(worst < kIdentityTolerance))
    fail(ErrorKind::consistency, "local identity residual " + fmt_double(worst, 3) + " exceeds 1e-12");
}

// report --limit N: every experiment at one limit.
void cmd_report(Context& ctx) {
  ordered_json j;
  j["limit"] = ctx.cfg.limit;
  j["constants"] = {{"q3", constants_json(3, {"1,2"}, false)},
                    {"q5", constants_json(5, {"1,2", "1,3", "4,2", "4,3"}, false)},
                    {"q4_omega", constants_json(4, {"1,3"}, true)}};
  j["table2"] = do_table2(ctx, false);
  j["q5_races"] = do_race(ctx, 5, {"1,2", "1,3", "4,2", "4,3"}, Weight::indicator_s, false);
  j["figure3"] = do_figure3(ctx, false);
  RunConfig saved = ctx.cfg;
  ctx.cfg.modulus = 0;
  ctx.cfg.pairs.clear();
  j["martin"] = do_martin(ctx, false);
  ctx.cfg = saved;
  ctx.write("report.json", j.dump(2) + "\n");
  ctx.out << "table2 (q=15, N=" << ctx.cfg.limit << "):\n";
  for (const auto& r : j["table2"]["rows"])
    ctx.out << "  " << r["a"].get<int>() << " vs " << r["b"].get<int>() << ": "
            << fmt_double(r["lead_percent"].get<double>(), 6) << "% (published "
            << fmt_double(r["published_percent"].get<double>(), 4) << "%)\n";
  ctx.out << "q=5 races:\n";
  for (const auto& r : j["q5_races"])
    ctx.out << "  " << r["a"].get<int>() << " vs " << r["b"].get<int>() << ": "
            << percent(r["lead_density"].get<double>()) << "%\n";
  ctx.out << "q=3 (1,2): " << percent(j["figure3"]["lead_density"].get<double>()) << "%\n";
  ctx.out << "files written to " << ctx.cfg.output_dir << '\n';
}

void write_manifest(Context& ctx, double wall_seconds) {
  ordered_json m;
  m["tool"] = "s2bias";
  m["version"] = kVersion;
  m["subcommand"] = ctx.cfg.subcommand;
  m["config"] = config_json(ctx.cfg);
  m["wall_seconds"] = wall_seconds;
  m["sieve"] = {{"blocks_sieved", ctx.sieve.blocks_sieved},
                {"blocks_loaded", ctx.sieve.blocks_loaded},
                {"sieve_seconds", ctx.sieve.sieve_seconds},
                {"load_seconds", ctx.sieve.load_seconds}};
  m["files"] = ctx.files;
  ctx.write("manifest.json", m.dump(2) + "\n");
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Residue-class races for sums of two squares", "s2bias"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", cfg.config_file, "key=value settings file; flags take precedence");
  };
  auto add_sieve = [&](CLI::App* sub) {
    sub->add_option("--segment-length", cfg.segment_length, "sieve segment length")
        ->check(CLI::Range(std::uint64_t{1}, kMaxBlockLength));
    sub->add_option("--segments", cfg.segments, "split the range into this many segments")
        ->check(CLI::PositiveNumber);
    sub->add_option("--workers", cfg.workers, "sieve worker threads (default: all cores)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--cache", cfg.cache_dir, std::string("block cache directory (default: $") + kCacheEnv + ")");
    sub->add_option("--output", cfg.output_dir, "output directory");
  };
  auto add_limit = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--limit", cfg.limit, "upper end N of the range 1..N")
                  ->check(CLI::Range(std::uint64_t{1}, kMaxSieveLimit - 1));
    if (required) o->required();
  };
  auto add_modulus = [&](CLI::App* sub, bool required) {
    auto* o = sub->add_option("--modulus", cfg.modulus, "modulus q")->check(CLI::PositiveNumber);
    if (required) o->required();
  };

  auto* chars = app.add_subcommand("chars", "list the Dirichlet characters modulo q");
  add_modulus(chars, true);
  chars->add_flag("--real-only", cfg.real_only, "only real characters");
  add_config(chars);

  auto* lvalue = app.add_subcommand("lvalue", "evaluate L(s, chi) for one character");
  add_modulus(lvalue, true);
  lvalue->add_option("--char-index", cfg.char_index, "character index in canonical order")->required();
  lvalue->add_option("--s", cfg.s, "real argument s > 0")->required();
  lvalue->add_option("--tol", cfg.tol, "requested error bound")->check(CLI::PositiveNumber);
  lvalue->add_option("--cache", cfg.cache_dir, "directory holding lvalues.txt");
  add_config(lvalue);

  auto* consts = app.add_subcommand("constants", "bias constants as JSON");
  add_modulus(consts, true);
  consts->add_option("--pair", cfg.pairs, "residues a,b (repeatable)");
  consts->add_flag("--omega", cfg.omega, "D_{q,a,b} instead of C_{q,a,b}");
  add_config(consts);

  auto* sieve = app.add_subcommand("sieve", "sieve 1..N and summarize");
  add_limit(sieve, true);
  sieve->add_flag("--verify", cfg.verify, "cross-check against the multiplicative sieve");
  add_sieve(sieve);
  add_config(sieve);

  auto* race = app.add_subcommand("race", "run residue-class races");
  add_modulus(race, true);
  race->add_option("--pair", cfg.pairs, "residues a,b (repeatable)")->required();
  add_limit(race, false);
  race->add_option("--weight", cfg.weight, "s, omega or big_omega");
  race->add_option("--stride", cfg.stride, "checkpoint stride (default N/100)")->check(CLI::PositiveNumber);
  race->add_flag("--no-svg", cfg.no_svg, "skip plots");
  add_sieve(race);
  add_config(race);

  auto* t2 = app.add_subcommand("table2", "lead percentages for q = 15");
  add_limit(t2, false);
  add_sieve(t2);
  add_config(t2);

  auto* martin = app.add_subcommand("martin", "omega and Omega races (default q = 4, 1 vs 3)");
  add_limit(martin, false);
  add_modulus(martin, false);
  martin->add_option("--pair", cfg.pairs, "residues a,b (repeatable)");
  martin->add_flag("--no-svg", cfg.no_svg, "skip plots");
  add_sieve(martin);
  add_config(martin);

  auto* fig3 = app.add_subcommand("figure3", "S(x;3,1) - S(x;3,2) series, CSV and SVG");
  add_limit(fig3, false);
  fig3->add_option("--stride", cfg.stride, "checkpoint stride (default N/10^4)")->check(CLI::PositiveNumber);
  fig3->add_flag("--no-svg", cfg.no_svg, "skip the plot");
  add_sieve(fig3);
  add_config(fig3);

  auto* ident = app.add_subcommand("verify-identity", "check the product identity prime by prime");
  ident->add_option("--prime-limit", cfg.prime_limit, "largest prime checked")->check(CLI::PositiveNumber);
  ident->add_option("--s", cfg.s, "real argument s > 1");
  add_modulus(ident, false);
  add_config(ident);

  auto* report = app.add_subcommand("report", "run every experiment at one limit");
  add_limit(report, false);
  report->add_flag("--no-svg", cfg.no_svg, "skip plots");
  add_sieve(report);
  add_config(report);

  const auto start = std::chrono::steady_clock::now();
  try {
    std::vector<std::string> args = merge_config(raw_args);
    std::reverse(args.begin(), args.end());
    try {
      app.parse(args);
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      for (auto* sub : app.get_subcommands()) out << sub->help();
      return 0;
    } catch (const CLI::CallForVersion&) {
      out << kVersion << '\n';
      return 0;
    } catch (const CLI::ParseError& e) {
      err << "s2bias: " << e.what() << '\n';
      return exit_code(ErrorKind::usage);
    }

    CLI::App* chosen = app.get_subcommands().front();
    cfg.subcommand = chosen->get_name();
    parse_weight(cfg.weight);
    Context ctx{cfg, out, {}, {}, false};
    const std::map<std::string, void (*)(Context&)> dispatch = {
        {"chars", cmd_chars},   {"lvalue", cmd_lvalue},   {"constants", cmd_constants},
        {"sieve", cmd_sieve},   {"race", cmd_race},       {"table2", cmd_table2},
        {"martin", cmd_martin}, {"figure3", cmd_figure3}, {"verify-identity", cmd_verify_identity},
        {"report", cmd_report}};
    dispatch.at(cfg.subcommand)(ctx);
    if (ctx.wrote_output)
      write_manifest(ctx, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    return 0;
  } catch (const Error& e) {
    err << "s2bias: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    err << "s2bias: resource error: " << e.what() << '\n';
    return exit_code(ErrorKind::resource);
  } catch (const std::bad_alloc&) {
    err << "s2bias: resource error: out of memory\n";
    return exit_code(ErrorKind::resource);
  }
}

}  // namespace s2bias::cli
