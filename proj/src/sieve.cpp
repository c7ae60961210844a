#include "s2bias/sieve.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstring>
#include <fstream>
#include <future>
#include <numeric>
#include <thread>

#include "s2bias/arith.hpp"
#include "s2bias/error.hpp"

namespace s2bias {

std::size_t BitVector::count() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

const char* to_string(Weight w) {
  switch (w) {
    case Weight::indicator_s: return "indicator_s";
    case Weight::omega: return "omega";
    case Weight::big_omega: return "big_omega";
  }
  return "unknown";
}

namespace {

constexpr std::uint64_t kChunk = std::uint64_t{1} << 18;

void check_range(std::uint64_t lo, std::uint64_t hi) {
  if (lo < 1 || lo >= hi) fail(ErrorKind::domain, "sieve range must satisfy 1 <= lo < hi");
  if (hi > kMaxSieveLimit) fail(ErrorKind::resource, "sieve range exceeds 2^32");
  if (hi - lo > kMaxBlockLength) fail(ErrorKind::resource, "sieve block exceeds memory budget");
}

std::vector<std::uint32_t> base_primes_for(std::uint64_t hi) {
  return arith::primes_up_to(arith::isqrt(hi - 1));
}

// Visits every prime power p^k <= hi - 1 dividing some n in [lo, hi), with p
// from `primes`; `hit(offset, p, first_power)` fires once per (n, p^k). The
// cofactor left after removing all those primes is passed to `rest(offset, r)`:
// it is 1 or a single prime larger than sqrt(hi - 1).
template <class Hit, class Rest>
void walk_prime_powers(std::uint64_t lo, std::uint64_t hi, std::span<const std::uint32_t> primes,
                       Hit&& hit, Rest&& rest) {
  std::vector<std::uint32_t> residual;
  for (std::uint64_t c_lo = lo; c_lo < hi; c_lo += kChunk) {
    const std::uint64_t c_hi = std::min(hi, c_lo + kChunk);
    residual.resize(c_hi - c_lo);
    std::iota(residual.begin(), residual.end(), static_cast<std::uint32_t>(c_lo));
    const std::uint64_t base = c_lo - lo;
    for (const std::uint32_t p : primes) {
      if (std::uint64_t{p} * p > c_hi - 1) break;
      for (std::uint64_t pk = p; pk < c_hi; pk *= p) {
        for (std::uint64_t m = (c_lo + pk - 1) / pk * pk; m < c_hi; m += pk) {
          residual[m - c_lo] /= p;
          hit(base + (m - c_lo), p, pk == p);
        }
        if (pk > (c_hi - 1) / p) break;
      }
    }
    for (std::size_t i = 0; i < residual.size(); ++i) rest(base + i, residual[i]);
  }
}

}  // namespace

BitVector sieve_two_squares_lattice(std::uint64_t lo, std::uint64_t hi) {
  check_range(lo, hi);
  BitVector bits(hi - lo);
  // Pairs a <= b cover every representation.
  for (std::uint64_t a = 0; 2 * a * a < hi; ++a) {
    const std::uint64_t a2 = a * a;
    std::uint64_t b = a;
    if (lo > a2) {
      const std::uint64_t need = lo - a2;
      std::uint64_t r = arith::isqrt(need);
      if (r * r < need) ++r;
      b = std::max(b, r);
    }
    for (std::uint64_t n = a2 + b * b; n < hi; ++b, n = a2 + b * b) bits.set(n - lo);
  }
  return bits;
}

BitVector sieve_two_squares_multiplicative(std::uint64_t lo, std::uint64_t hi) {
  check_range(lo, hi);
  return sieve_two_squares_multiplicative(lo, hi, base_primes_for(hi));
}

BitVector sieve_two_squares_multiplicative(std::uint64_t lo, std::uint64_t hi,
                                           std::span<const std::uint32_t> base_primes) {
  check_range(lo, hi);
  // Odd total exponent over primes 3 mod 4 marks exclusion; tracked per prime
  // as a parity flip at each prime-power hit.
  std::vector<std::uint8_t> parity(hi - lo, 0);
  std::vector<std::uint8_t> excluded(hi - lo, 0);
  walk_prime_powers(
      lo, hi, base_primes,
      [&](std::size_t i, std::uint32_t p, bool first) {
        if (p % 4 != 3) return;
        if (first) {
          // Settle the previous prime's parity before starting a new one.
          excluded[i] |= parity[i];
          parity[i] = 0;
        }
        parity[i] ^= 1;
      },
      [&](std::size_t i, std::uint32_t r) {
        excluded[i] |= parity[i];
        if (r > 1 && r % 4 == 3) excluded[i] = 1;
      });
  BitVector bits(hi - lo);
  for (std::size_t i = 0; i < excluded.size(); ++i) {
    if (!excluded[i]) bits.set(i);
  }
  return bits;
}

AdditiveTables sieve_additive(std::uint64_t lo, std::uint64_t hi) {
  check_range(lo, hi);
  return sieve_additive(lo, hi, base_primes_for(hi));
}

AdditiveTables sieve_additive(std::uint64_t lo, std::uint64_t hi,
                              std::span<const std::uint32_t> base_primes) {
  check_range(lo, hi);
  AdditiveTables t{std::vector<std::uint8_t>(hi - lo, 0), std::vector<std::uint8_t>(hi - lo, 0)};
  walk_prime_powers(
      lo, hi, base_primes,
      [&](std::size_t i, std::uint32_t, bool first) {
        ++t.big_omega[i];
        if (first) ++t.omega[i];
      },
      [&](std::size_t i, std::uint32_t r) {
        if (r > 1) {
          ++t.omega[i];
          ++t.big_omega[i];
        }
      });
  return t;
}

namespace {

SieveBlock make_block(std::uint64_t lo, std::uint64_t hi, bool with_additive,
                      std::span<const std::uint32_t> primes) {
  SieveBlock block;
  block.lo = lo;
  block.hi = hi;
  block.in_s = sieve_two_squares_lattice(lo, hi);
  if (with_additive) {
    auto t = sieve_additive(lo, hi, primes);
    block.omega = std::move(t.omega);
    block.big_omega = std::move(t.big_omega);
  }
  return block;
}

}  // namespace

SieveBlock sieve_block(std::uint64_t lo, std::uint64_t hi, bool with_additive) {
  check_range(lo, hi);
  return make_block(lo, hi, with_additive, base_primes_for(hi));
}

std::vector<std::uint64_t> count_by_residue(const SieveBlock& block, std::uint64_t q, Weight weight) {
  if (q == 0) fail(ErrorKind::domain, "invalid modulus 0");
  if (weight != Weight::indicator_s && !block.has_additive())
    fail(ErrorKind::resource, "block has no omega tables");
  std::vector<std::uint64_t> totals(q, 0);
  std::uint64_t r = block.lo % q;
  for (std::size_t i = 0; i < block.size(); ++i) {
    switch (weight) {
      case Weight::indicator_s: totals[r] += block.in_s.test(i); break;
      case Weight::omega: totals[r] += block.omega[i]; break;
      case Weight::big_omega: totals[r] += block.big_omega[i]; break;
    }
    if (++r == q) r = 0;
  }
  return totals;
}

// ---------------------------------------------------------------------------
// Cache files

namespace {

constexpr char kMagic[4] = {'S', '2', 'S', 'Q'};
constexpr std::size_t kHeaderSize = 24;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint32_t checksum(const std::uint8_t* data, std::size_t n) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths.
  while (n > 0) {
    const auto part = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    crc = crc32(crc, data, part);
    data += part;
    n -= part;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

void cache_store(const SieveBlock& block, const std::filesystem::path& path) {
  const std::size_t n = block.size();
  if (block.in_s.size() != n) fail(ErrorKind::consistency, "block bitset size mismatch");
  std::uint8_t kinds = kPayloadInS;
  if (!block.omega.empty()) kinds |= kPayloadOmega;
  if (!block.big_omega.empty()) kinds |= kPayloadBigOmega;

  std::vector<std::uint8_t> buf;
  buf.reserve(kHeaderSize + n / 8 + 2 * n + 8);
  buf.insert(buf.end(), kMagic, kMagic + 4);
  buf.push_back(kCacheVersion);
  buf.push_back(kinds);
  buf.push_back(0);
  buf.push_back(0);
  put_u64(buf, block.lo);
  put_u64(buf, block.hi);
  const std::size_t packed = (n + 7) / 8;
  const auto words = block.in_s.words();
  for (std::size_t i = 0; i < packed; ++i) {
    buf.push_back(static_cast<std::uint8_t>(words[i / 8] >> (8 * (i % 8))));
  }
  buf.insert(buf.end(), block.omega.begin(), block.omega.end());
  buf.insert(buf.end(), block.big_omega.begin(), block.big_omega.end());
  const std::uint32_t crc = checksum(buf.data(), buf.size());
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::resource, "cannot open cache file for writing: " + path.string());
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(ErrorKind::resource, "failed writing cache file: " + path.string());
}

SieveBlock cache_load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::resource, "cannot open cache file: " + path.string());
  in.seekg(0, std::ios::end);
  std::vector<std::uint8_t> buf(static_cast<std::size_t>(std::max<std::streamoff>(0, in.tellg())));
  in.seekg(0, std::ios::beg);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!in) fail(ErrorKind::resource, "failed reading cache file: " + path.string());

  if (buf.size() < kHeaderSize) fail(ErrorKind::cache_truncated, "cache header truncated");
  if (std::memcmp(buf.data(), kMagic, 4) != 0) fail(ErrorKind::cache_version, "not a sieve cache file");
  if (buf[4] != kCacheVersion)
    fail(ErrorKind::cache_version, "cache format version " + std::to_string(buf[4]) + " unsupported");
  const std::uint8_t kinds = buf[5];
  SieveBlock block;
  block.lo = get_u64(&buf[8]);
  block.hi = get_u64(&buf[16]);
  if (!(kinds & kPayloadInS) || block.hi < block.lo || block.hi - block.lo > kMaxBlockLength)
    fail(ErrorKind::cache_checksum, "cache header is corrupt");

  const std::size_t n = block.size();
  const std::size_t packed = (n + 7) / 8;
  std::size_t expected = kHeaderSize + packed + 4;
  if (kinds & kPayloadOmega) expected += n;
  if (kinds & kPayloadBigOmega) expected += n;
  if (buf.size() < expected) fail(ErrorKind::cache_truncated, "cache payload truncated");
  if (buf.size() > expected) fail(ErrorKind::cache_checksum, "cache file has trailing bytes");

  const std::size_t body = expected - 4;
  std::uint32_t stored = 0;
  for (int i = 3; i >= 0; --i) stored = (stored << 8) | buf[body + i];
  if (stored != checksum(buf.data(), body)) fail(ErrorKind::cache_checksum, "cache checksum mismatch");

  block.in_s = BitVector(n);
  auto words = block.in_s.words();
  if constexpr (std::endian::native == std::endian::little) {
    std::memcpy(words.data(), &buf[kHeaderSize], packed);
  } else {
    for (std::size_t i = 0; i < packed; ++i) {
      words[i / 8] |= std::uint64_t{buf[kHeaderSize + i]} << (8 * (i % 8));
    }
  }
  std::size_t pos = kHeaderSize + packed;
  if (kinds & kPayloadOmega) {
    block.omega.assign(buf.begin() + static_cast<std::ptrdiff_t>(pos),
                       buf.begin() + static_cast<std::ptrdiff_t>(pos + n));
    pos += n;
  }
  if (kinds & kPayloadBigOmega) {
    block.big_omega.assign(buf.begin() + static_cast<std::ptrdiff_t>(pos),
                           buf.begin() + static_cast<std::ptrdiff_t>(pos + n));
  }
  return block;
}

std::filesystem::path cache_file_name(const std::filesystem::path& dir, std::uint64_t lo,
                                      std::uint64_t hi) {
  return dir / ("s2sq_" + std::to_string(lo) + "_" + std::to_string(hi) + ".bin");
}

// ---------------------------------------------------------------------------
// Segmented driver

SieveStats for_each_block(std::uint64_t lo, std::uint64_t hi, const SieveOptions& options,
                          const std::function<void(const SieveBlock&)>& consume) {
  if (lo < 1 || lo >= hi) fail(ErrorKind::domain, "sieve range must satisfy 1 <= lo < hi");
  if (hi > kMaxSieveLimit) fail(ErrorKind::resource, "sieve range exceeds 2^32");
  if (options.segment_length == 0 || options.segment_length > kMaxBlockLength)
    fail(ErrorKind::resource, "segment length outside memory budget");
  unsigned workers = options.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  if (options.cache_dir) std::filesystem::create_directories(*options.cache_dir);

  const auto primes = base_primes_for(hi);
  SieveStats stats;

  struct Produced {
    SieveBlock block;
    bool loaded;
    double seconds;
  };
  auto timed_sieve = [&](std::uint64_t b_lo, std::uint64_t b_hi) {
    const auto t0 = std::chrono::steady_clock::now();
    SieveBlock b = make_block(b_lo, b_hi, options.with_additive, primes);
    return Produced{std::move(b), false,
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
  };
  auto produce = [&](std::uint64_t b_lo, std::uint64_t b_hi) -> Produced {
    if (options.cache_dir) {
      const auto path = cache_file_name(*options.cache_dir, b_lo, b_hi);
      if (std::filesystem::exists(path)) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
          SieveBlock cached = cache_load(path);
          if (cached.lo == b_lo && cached.hi == b_hi &&
              (!options.with_additive || cached.has_additive()))
            return {std::move(cached), true,
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
        } catch (const Error&) {
          // Unreadable cache entries are rebuilt below.
        }
      }
      Produced fresh = timed_sieve(b_lo, b_hi);
      cache_store(fresh.block, path);
      return fresh;
    }
    return timed_sieve(b_lo, b_hi);
  };

  std::uint64_t next = lo;
  while (next < hi) {
    std::vector<std::future<Produced>> wave;
    for (unsigned w = 0; w < workers && next < hi; ++w) {
      const std::uint64_t b_lo = next;
      const std::uint64_t b_hi = std::min(hi, next + options.segment_length);
      next = b_hi;
      wave.push_back(std::async(workers == 1 ? std::launch::deferred : std::launch::async,
                                produce, b_lo, b_hi));
    }
    std::vector<Produced> done;
    done.reserve(wave.size());
    for (auto& f : wave) done.push_back(f.get());
    for (auto& d : done) {
      if (d.loaded) {
        ++stats.blocks_loaded;
        stats.load_seconds += d.seconds;
      } else {
        ++stats.blocks_sieved;
        stats.sieve_seconds += d.seconds;
      }
      consume(d.block);
    }
  }
  return stats;
}

}  // namespace s2bias
