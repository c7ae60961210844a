#pragma once
// Command-line front end: argument and config-file handling, experiment
// dispatch, and CSV / JSON / SVG emission.
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "s2bias/race.hpp"

namespace s2bias::cli {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kCacheEnv = "S2BIAS_CACHE_DIR";

struct RunConfig {
  std::string subcommand;
  std::uint64_t limit = 10000000;
  std::uint64_t modulus = 0;
  std::vector<std::string> pairs;  // "a,b"
  std::string weight = "s";
  std::uint64_t segment_length = kDefaultSegmentLength;
  std::uint64_t segments = 0;  // when set, overrides segment_length
  unsigned workers = 0;
  std::string cache_dir;  // empty: none (or the environment default)
  std::string output_dir = "s2bias-out";
  double tol = 1e-10;
  std::uint64_t stride = 0;  // 0: per-subcommand default
  double s = 2.0;
  std::size_t char_index = 0;
  std::uint64_t prime_limit = 100;
  bool omega = false;
  bool real_only = false;
  bool verify = false;
  bool no_svg = false;
  std::string config_file;
};

// Flat key=value lines; '#' starts a comment; blank lines ignored.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::filesystem::path& path);

// Appends settings from the --config file that the command line does not
// already give. Keys are long option names without the leading dashes.
std::vector<std::string> merge_config(const std::vector<std::string>& args);

RacePair parse_pair(const std::string& text);
Weight parse_weight(const std::string& text);

struct SvgSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};
std::string svg_line_plot(const std::vector<SvgSeries>& series, const std::string& title,
                          const std::string& x_label, const std::string& y_label);

// Race checkpoints as CSV: x,count_a,count_b,diff,predicted_main_term,residual.
// The last two columns are empty when no main-term fit applies.
std::string race_csv(const RaceSeries& series, const BiasReport* fit);

// Persistent text cache of L-values, one entry per line:
//   q char_index s value_re value_im error_bound
class LValueCache {
 public:
  explicit LValueCache(std::filesystem::path path);
  struct Entry {
    double re;
    double im;
    double error_bound;
  };
  std::optional<Entry> find(std::uint64_t q, std::size_t index, double s) const;
  void insert(std::uint64_t q, std::size_t index, double s, const Entry& e);

 private:
  static std::string key(std::uint64_t q, std::size_t index, double s);
  std::filesystem::path path_;
  std::vector<std::pair<std::string, Entry>> entries_;
};

// Runs the tool and returns its exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace s2bias::cli
