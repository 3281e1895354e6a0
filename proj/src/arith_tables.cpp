#include "siegel/arith_tables.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <string>

#include "siegel/error.hpp"

namespace siegel {

namespace {

using u64 = std::uint64_t;
using u128 = unsigned __int128;

u64 mulmod(u64 a, u64 b, u64 m) { return static_cast<u64>(static_cast<u128>(a) * b % m); }

u64 powmod(u64 a, u64 e, u64 m) {
  u64 r = 1 % m;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod(r, a, m);
    a = mulmod(a, a, m);
    e >>= 1;
  }
  return r;
}

std::vector<u64> simple_sieve(u64 limit) {
  std::vector<u64> primes;
  if (limit < 2) return primes;
  primes.push_back(2);
  // odd-only bitmap: index i <-> 2i+3
  const u64 count = limit >= 3 ? (limit - 3) / 2 + 1 : 0;
  std::vector<bool> composite(count, false);
  for (u64 i = 0; i < count; ++i) {
    if (composite[i]) continue;
    const u64 p = 2 * i + 3;
    primes.push_back(p);
    if (p > limit / p) continue;
    for (u64 j = (p * p - 3) / 2; j < count; j += p) composite[j] = true;
  }
  return primes;
}

// Base primes are shared between windows; the list only ever grows.
class BasePrimeCache {
 public:
  std::shared_ptr<const std::vector<u64>> get(u64 limit) {
    std::lock_guard lock(mutex_);
    if (!primes_ || limit > limit_) {
      const u64 target = std::max<u64>(limit, std::max<u64>(limit_ * 2, u64{1} << 16));
      primes_ = std::make_shared<const std::vector<u64>>(simple_sieve(target));
      limit_ = target;
    }
    return primes_;
  }

 private:
  std::mutex mutex_;
  std::shared_ptr<const std::vector<u64>> primes_;
  u64 limit_ = 0;
};

BasePrimeCache& base_cache() {
  static BasePrimeCache cache;
  return cache;
}

void check_window(u64 lo, u64 hi, u64 max_window) {
  if (lo < 1) throw ConfigError("window: lo must be >= 1");
  if (lo > hi) throw ConfigError("window: lo > hi");
  if (hi > kMaxHi) throw ConfigError("overflow: hi exceeds 2^63-1");
  if (hi - lo >= max_window) {
    throw ConfigError("window-too-large: " + std::to_string(hi - lo + 1) + " entries > " +
                      std::to_string(max_window));
  }
}

// Largest power p^k <= hi, iterated by the callers; guards u64 overflow.
bool next_power(u64& pk, u64 p, u64 hi) {
  if (pk > hi / p) return false;
  pk *= p;
  return true;
}

}  // namespace

u64 isqrt(u64 n) {
  u64 r = static_cast<u64>(std::sqrt(static_cast<long double>(n)));
  while (r > 0 && r > n / r) --r;
  while ((r + 1) <= n / (r + 1)) ++r;
  return r;
}

std::vector<u64> primes_up_to(u64 n) {
  auto base = base_cache().get(n);
  auto end = std::upper_bound(base->begin(), base->end(), n);
  return {base->begin(), end};
}

std::vector<u64> primes_in(u64 lo, u64 hi) {
  std::vector<u64> out;
  if (hi < 2 || lo > hi) return out;
  lo = std::max<u64>(lo, 2);
  const auto base = base_cache().get(isqrt(hi));
  constexpr u64 kSegment = u64{1} << 22;
  std::vector<std::uint8_t> composite;
  for (u64 seg_lo = lo;; seg_lo += kSegment) {
    const u64 seg_hi = (hi - seg_lo < kSegment) ? hi : seg_lo + kSegment - 1;
    composite.assign(static_cast<std::size_t>(seg_hi - seg_lo + 1), 0);
    for (u64 p : *base) {
      if (p > seg_hi / p) break;
      u64 start = std::max(p * p, (seg_lo + p - 1) / p * p);
      for (u64 m = start; m <= seg_hi; m += p) composite[m - seg_lo] = 1;
    }
    for (u64 i = 0; i < composite.size(); ++i) {
      if (!composite[i]) out.push_back(seg_lo + i);
    }
    if (seg_hi == hi) break;
  }
  return out;
}

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (u64 a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    u64 x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

Factorization factorize(u64 n) {
  Factorization f;
  auto take = [&](u64 p) {
    std::uint32_t e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    if (e) f.push_back({p, e});
    return e > 0;
  };
  take(2);
  take(3);
  bool prime_rest = is_prime(n);
  for (u64 p = 5; !prime_rest && p <= n / p; p += 6) {
    if (take(p) | take(p + 2)) prime_rest = is_prime(n);
  }
  if (n > 1) f.push_back({n, 1});
  return f;
}

u64 big_omega(const Factorization& f) {
  u64 total = 0;
  for (const auto& pp : f) total += pp.e;
  return total;
}

std::vector<u64> divisors_of(const Factorization& f, u64 bound) {
  std::vector<u64> divs{1};
  if (bound < 1) return {};
  for (const auto& [p, e] : f) {
    const std::size_t base_count = divs.size();
    for (std::size_t i = 0; i < base_count; ++i) {
      u64 d = divs[i];
      for (std::uint32_t j = 0; j < e; ++j) {
        if (d > bound / p) break;
        d *= p;
        divs.push_back(d);
      }
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

std::vector<u64> divisors_up_to(u64 n, u64 bound) {
  if (n < 1) throw ConfigError("divisors_up_to: n must be >= 1");
  return divisors_of(factorize(n), bound);
}

SmoothRough smooth_rough_split(u64 n, double z) {
  SmoothRough out;
  for (const auto& [p, e] : factorize(n)) {
    u64 pe = 1;
    for (std::uint32_t j = 0; j < e; ++j) pe *= p;
    if (static_cast<double>(p) <= z) {
      out.smooth *= pe;
    } else {
      out.rough *= pe;
    }
  }
  return out;
}

LandreauFactorization landreau_factor(u64 n, double y, double z) {
  if (!(z > 1.0) || !(y > z)) throw ConfigError("invalid-thresholds: need y > z > 1");
  if (n < 1) throw ConfigError("landreau_factor: n must be >= 1");
  LandreauFactorization out;
  std::vector<u64> small;  // prime factors <= z with multiplicity
  for (const auto& [p, e] : factorize(n)) {
    for (std::uint32_t j = 0; j < e; ++j) {
      if (static_cast<double>(p) <= z) {
        small.push_back(p);
      } else {
        out.rough *= p;
      }
    }
  }
  long double remaining = 1;
  for (u64 p : small) remaining *= p;
  std::size_t next = 0;
  while (next < small.size()) {
    if (remaining <= y) {
      u64 part = 1;
      for (; next < small.size(); ++next) part *= small[next];
      out.parts.push_back(part);
      break;
    }
    // Grow a factor until the next prime would push it past y; it then
    // exceeds y/z because every prime is <= z.
    u64 part = 1;
    while (next < small.size() && static_cast<long double>(part) * small[next] <= y) {
      part *= small[next++];
    }
    out.parts.push_back(part);
    remaining /= part;
  }
  return out;
}

ArithTable build_window(u64 lo, u64 hi, u64 max_window) {
  check_window(lo, hi, max_window);
  const std::size_t size = static_cast<std::size_t>(hi - lo + 1);
  const auto base = base_cache().get(isqrt(hi));

  std::vector<u64> prod(size, 1);
  std::vector<std::uint8_t> omega(size, 0), big(size, 0);

  ArithTable t;
  t.lo = lo;
  t.hi = hi;
  t.tau.assign(size, 1);
  t.spf.assign(size, 0);

  for (u64 p : *base) {
    if (p > hi / p) break;
    const u64 first = (lo + p - 1) / p * p;
    for (u64 m = first; m <= hi; m += p) {
      const std::size_t i = m - lo;
      prod[i] *= p;
      ++omega[i];
      ++big[i];
      t.tau[i] *= 2;
      if (t.spf[i] == 0) t.spf[i] = p;
    }
    u64 pk = p;
    for (std::uint32_t k = 2; next_power(pk, p, hi); ++k) {
      for (u64 m = (lo + pk - 1) / pk * pk; m <= hi; m += pk) {
        const std::size_t i = m - lo;
        prod[i] *= p;
        ++big[i];
        t.tau[i] = t.tau[i] / k * (k + 1);
      }
    }
  }

  t.lambda.resize(size);
  t.mu.resize(size);
  t.mangoldt.assign(size, 0.0);
  for (std::size_t i = 0; i < size; ++i) {
    const u64 n = lo + i;
    const u64 rem = n / prod[i];
    if (rem > 1) {
      ++omega[i];
      ++big[i];
      t.tau[i] *= 2;
      if (t.spf[i] == 0) t.spf[i] = rem;
    }
    if (n == 1) t.spf[i] = 1;
    t.lambda[i] = (big[i] & 1) ? -1 : 1;
    t.mu[i] = (big[i] != omega[i]) ? 0 : ((omega[i] & 1) ? -1 : 1);
    if (omega[i] == 1) t.mangoldt[i] = std::log(static_cast<double>(t.spf[i]));
  }
  return t;
}

namespace {

constexpr std::array<char, 4> kMagic{'S', 'G', 'L', '1'};

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
}

template <typename T>
void write_array(std::ofstream& out, const std::vector<T>& v) {
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(T)));
}

template <typename T>
void read_array(std::ifstream& in, std::vector<T>& v, u64 len) {
  v.resize(static_cast<std::size_t>(len));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(len * sizeof(T)));
}

void require_little_endian() {
  if constexpr (std::endian::native != std::endian::little) {
    throw ComputationError("window cache requires a little-endian host");
  }
}

}  // namespace

void save_window(const ArithTable& t, const std::filesystem::path& path) {
  require_little_endian();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ComputationError("cannot write window cache " + path.string());
  out.write(kMagic.data(), kMagic.size());
  write_pod(out, kCacheFormatVersion);
  write_pod(out, t.lo);
  write_pod(out, t.hi);
  for (u64 len : {t.lambda.size(), t.mangoldt.size(), t.mu.size(), t.tau.size(), t.spf.size()}) {
    write_pod(out, len);
  }
  write_array(out, t.lambda);
  write_array(out, t.mangoldt);
  write_array(out, t.mu);
  write_array(out, t.tau);
  write_array(out, t.spf);
  if (!out) throw ComputationError("short write to window cache " + path.string());
}

ArithTable load_window(const std::filesystem::path& path) {
  require_little_endian();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ComputationError("cannot open window cache " + path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  std::uint32_t version = 0;
  read_pod(in, version);
  if (!in || magic != kMagic || version != kCacheFormatVersion) {
    throw ComputationError("bad window cache header in " + path.string());
  }
  ArithTable t;
  read_pod(in, t.lo);
  read_pod(in, t.hi);
  std::array<u64, 5> len{};
  for (auto& l : len) read_pod(in, l);
  const u64 expected = t.hi >= t.lo ? t.hi - t.lo + 1 : 0;
  for (u64 l : len) {
    if (!in || l != expected) throw ComputationError("inconsistent window cache " + path.string());
  }
  read_array(in, t.lambda, len[0]);
  read_array(in, t.mangoldt, len[1]);
  read_array(in, t.mu, len[2]);
  read_array(in, t.tau, len[3]);
  read_array(in, t.spf, len[4]);
  if (!in) throw ComputationError("truncated window cache " + path.string());
  return t;
}

std::filesystem::path cache_path(const std::filesystem::path& dir, u64 lo, u64 hi) {
  return dir / ("window_v" + std::to_string(kCacheFormatVersion) + "_" + std::to_string(lo) + "_" +
                std::to_string(hi) + ".sgl");
}

ArithTable cached_window(const std::filesystem::path& dir, u64 lo, u64 hi, u64 max_window) {
  const auto path = cache_path(dir, lo, hi);
  if (std::filesystem::exists(path)) {
    try {
      return load_window(path);
    } catch (const ComputationError&) {
      // fall through and rebuild a corrupt entry
    }
  }
  ArithTable t = build_window(lo, hi, max_window);
  std::filesystem::create_directories(dir);
  save_window(t, path);
  return t;
}

FactorWindow::FactorWindow(u64 lo, u64 hi, u64 max_window) : lo_(lo), hi_(hi) {
  check_window(lo, hi, max_window);
  const std::size_t size = static_cast<std::size_t>(hi - lo + 1);
  const auto base = base_cache().get(isqrt(hi));

  std::vector<u64> prod(size, 1);
  std::vector<std::uint32_t> count(size, 0);
  for (u64 p : *base) {
    if (p > hi / p) break;
    for (u64 m = (lo + p - 1) / p * p; m <= hi; m += p) {
      prod[m - lo] *= p;
      ++count[m - lo];
    }
    u64 pk = p;
    while (next_power(pk, p, hi)) {
      for (u64 m = (lo + pk - 1) / pk * pk; m <= hi; m += pk) prod[m - lo] *= p;
    }
  }
  offset_.assign(size + 1, 0);
  for (std::size_t i = 0; i < size; ++i) {
    const u64 rem = (lo + i) / prod[i];
    offset_[i + 1] = offset_[i] + count[i] + (rem > 1 ? 1 : 0);
  }
  factors_.resize(offset_[size]);
  std::vector<std::uint32_t> cursor(offset_.begin(), offset_.end() - 1);
  for (u64 p : *base) {
    if (p > hi / p) break;
    for (u64 m = (lo + p - 1) / p * p; m <= hi; m += p) {
      factors_[cursor[m - lo]++] = {p, 1};
    }
    u64 pk = p;
    while (next_power(pk, p, hi)) {
      for (u64 m = (lo + pk - 1) / pk * pk; m <= hi; m += pk) {
        ++factors_[cursor[m - lo] - 1].e;
      }
    }
  }
  for (std::size_t i = 0; i < size; ++i) {
    const u64 rem = (lo + i) / prod[i];
    if (rem > 1) factors_[cursor[i]++] = {rem, 1};
  }
}

}  // namespace siegel
