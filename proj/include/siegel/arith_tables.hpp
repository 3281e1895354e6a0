#pragma once

// Segmented sieving of the base arithmetic functions (Liouville, von
// Mangoldt, Moebius, divisor count, smallest prime factor) over windows
// [lo, hi], plus the factorization utilities used by the approximants.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace siegel {

inline constexpr std::uint64_t kDefaultWindowSize = std::uint64_t{1} << 24;
inline constexpr std::uint64_t kMaxHi = (std::uint64_t{1} << 63) - 1;

struct PrimePower {
  std::uint64_t p = 0;
  std::uint32_t e = 0;

  bool operator==(const PrimePower&) const = default;
};

using Factorization = std::vector<PrimePower>;

std::uint64_t isqrt(std::uint64_t n);

// All primes p <= n, ascending.
std::vector<std::uint64_t> primes_up_to(std::uint64_t n);

// All primes in [lo, hi], ascending (segmented).
std::vector<std::uint64_t> primes_in(std::uint64_t lo, std::uint64_t hi);

bool is_prime(std::uint64_t n);

// Trial-division factorization, primes ascending. factorize(1) is empty.
Factorization factorize(std::uint64_t n);

std::uint64_t big_omega(const Factorization& f);

// All divisors d of the factored number with d <= bound, ascending.
std::vector<std::uint64_t> divisors_of(const Factorization& f, std::uint64_t bound);

// Sorted list of all d | n with d <= bound.
std::vector<std::uint64_t> divisors_up_to(std::uint64_t n, std::uint64_t bound);

struct SmoothRough {
  std::uint64_t smooth = 1;
  std::uint64_t rough = 1;
};

// n = n_(<=z) * n_(>z).
SmoothRough smooth_rough_split(std::uint64_t n, double z);

struct LandreauFactorization {
  std::uint64_t rough = 1;
  std::vector<std::uint64_t> parts;
};

// Greedy factorization n = rough * parts[0] * ... with every part z-smooth
// and <= y, all parts except possibly the last one > y/z. Requires y > z > 1.
LandreauFactorization landreau_factor(std::uint64_t n, double y, double z);

struct ArithTable {
  std::uint64_t lo = 1;
  std::uint64_t hi = 1;
  std::vector<std::int8_t> lambda;
  std::vector<double> mangoldt;
  std::vector<std::int8_t> mu;
  std::vector<std::uint32_t> tau;
  std::vector<std::uint64_t> spf;

  std::size_t size() const { return static_cast<std::size_t>(hi - lo + 1); }
  bool contains(std::uint64_t n) const { return n >= lo && n <= hi; }
  std::size_t index(std::uint64_t n) const { return static_cast<std::size_t>(n - lo); }

  int liouville(std::uint64_t n) const { return lambda[index(n)]; }
  double von_mangoldt(std::uint64_t n) const { return mangoldt[index(n)]; }
  int moebius(std::uint64_t n) const { return mu[index(n)]; }
  std::uint32_t divisor_count(std::uint64_t n) const { return tau[index(n)]; }
  std::uint64_t smallest_prime_factor(std::uint64_t n) const { return spf[index(n)]; }

  bool operator==(const ArithTable&) const = default;
};

// Throws ConfigError on lo < 1, lo > hi, hi > 2^63-1 or a window larger than
// max_window entries.
ArithTable build_window(std::uint64_t lo, std::uint64_t hi,
                        std::uint64_t max_window = kDefaultWindowSize);

// Binary window cache: little-endian header {"SGL1", version, lo, hi, length
// of each array} followed by the raw arrays.
inline constexpr std::uint32_t kCacheFormatVersion = 1;

void save_window(const ArithTable& table, const std::filesystem::path& path);
ArithTable load_window(const std::filesystem::path& path);

// File name for the cache entry of (lo, hi, format version).
std::filesystem::path cache_path(const std::filesystem::path& dir, std::uint64_t lo,
                                 std::uint64_t hi);

// Loads the window from dir if a valid entry exists, otherwise builds and
// stores it.
ArithTable cached_window(const std::filesystem::path& dir, std::uint64_t lo, std::uint64_t hi,
                         std::uint64_t max_window = kDefaultWindowSize);

// Complete prime factorizations of every n in [lo, hi] in CSR layout.
class FactorWindow {
 public:
  FactorWindow() = default;
  FactorWindow(std::uint64_t lo, std::uint64_t hi, std::uint64_t max_window = kDefaultWindowSize);

  std::uint64_t lo() const { return lo_; }
  std::uint64_t hi() const { return hi_; }
  std::size_t size() const { return static_cast<std::size_t>(hi_ - lo_ + 1); }

  std::span<const PrimePower> factors(std::uint64_t n) const {
    const std::size_t i = static_cast<std::size_t>(n - lo_);
    return {factors_.data() + offset_[i], factors_.data() + offset_[i + 1]};
  }

 private:
  std::uint64_t lo_ = 1;
  std::uint64_t hi_ = 0;
  std::vector<std::uint32_t> offset_;
  std::vector<PrimePower> factors_;
};

}  // namespace siegel
