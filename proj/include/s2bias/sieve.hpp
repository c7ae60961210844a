#pragma once

// Segmented sieves for the set S of sums of two squares and for the prime
// factor counts omega / Omega, plus a versioned on-disk block cache.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace s2bias {

class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const noexcept { return size_; }
  bool test(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i) noexcept { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) noexcept { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
  std::size_t count() const noexcept;

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> words() noexcept { return words_; }

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

enum class Weight { indicator_s, omega, big_omega };

const char* to_string(Weight w);

// Half-open range [lo, hi) with membership in S and, optionally, omega and
// Omega tables (empty when not computed).
struct SieveBlock {
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;
  BitVector in_s;
  std::vector<std::uint8_t> omega;
  std::vector<std::uint8_t> big_omega;

  std::size_t size() const noexcept { return static_cast<std::size_t>(hi - lo); }
  bool has_additive() const noexcept { return !omega.empty() || size() == 0; }
  bool contains_s(std::uint64_t n) const { return in_s.test(static_cast<std::size_t>(n - lo)); }
};

struct AdditiveTables {
  std::vector<std::uint8_t> omega;
  std::vector<std::uint8_t> big_omega;
};

// Largest block a single call may populate.
inline constexpr std::uint64_t kMaxBlockLength = std::uint64_t{1} << 28;
// Residual arithmetic is 32-bit.
inline constexpr std::uint64_t kMaxSieveLimit = std::uint64_t{1} << 32;
inline constexpr std::uint64_t kDefaultSegmentLength = std::uint64_t{1} << 24;

// n = a^2 + b^2 with a, b >= 0, by marking lattice points.
BitVector sieve_two_squares_lattice(std::uint64_t lo, std::uint64_t hi);

// Every prime p = 3 mod 4 divides n to an even power.
BitVector sieve_two_squares_multiplicative(std::uint64_t lo, std::uint64_t hi);

AdditiveTables sieve_additive(std::uint64_t lo, std::uint64_t hi);

// Versions taking precomputed base primes (all primes <= sqrt(hi - 1)).
BitVector sieve_two_squares_multiplicative(std::uint64_t lo, std::uint64_t hi,
                                           std::span<const std::uint32_t> base_primes);
AdditiveTables sieve_additive(std::uint64_t lo, std::uint64_t hi,
                              std::span<const std::uint32_t> base_primes);

SieveBlock sieve_block(std::uint64_t lo, std::uint64_t hi, bool with_additive = true);

// Totals of the chosen weight per residue class modulo q over the block.
std::vector<std::uint64_t> count_by_residue(const SieveBlock& block, std::uint64_t q, Weight weight);

// File layout (little endian):
//   "S2SQ" | version u8 | kinds u8 | reserved u16 | lo u64 | hi u64
//   in_s bit-packed (bit k of byte k/8 <-> lo + k) | omega bytes | Omega bytes
//   CRC-32 of everything above, u32
inline constexpr std::uint8_t kCacheVersion = 1;
inline constexpr std::uint8_t kPayloadInS = 1;
inline constexpr std::uint8_t kPayloadOmega = 2;
inline constexpr std::uint8_t kPayloadBigOmega = 4;

void cache_store(const SieveBlock& block, const std::filesystem::path& path);
SieveBlock cache_load(const std::filesystem::path& path);

struct SieveOptions {
  std::uint64_t segment_length = kDefaultSegmentLength;
  unsigned workers = 0;  // 0: hardware concurrency
  bool with_additive = true;
  std::optional<std::filesystem::path> cache_dir;
};

struct SieveStats {
  std::size_t blocks_sieved = 0;
  std::size_t blocks_loaded = 0;
  double sieve_seconds = 0.0;  // summed over sieved blocks
  double load_seconds = 0.0;   // summed over blocks read from the cache
};

// Covers [lo, hi) with segments sieved by a worker pool and delivers them to
// `consume` in ascending order. With a cache directory, blocks are loaded
// from / stored to it.
SieveStats for_each_block(std::uint64_t lo, std::uint64_t hi, const SieveOptions& options,
                          const std::function<void(const SieveBlock&)>& consume);

std::filesystem::path cache_file_name(const std::filesystem::path& dir, std::uint64_t lo,
                                      std::uint64_t hi);

}  // namespace s2bias
