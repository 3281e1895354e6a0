#include "siegel/crt.hpp"

#include <numeric>

#include "siegel/error.hpp"

namespace siegel {

namespace {

using i128 = __int128;

// Inverse of a modulo m for gcd(a, m) = 1.
i128 inverse_mod(i128 a, i128 m) {
  i128 old_r = a % m, r = m, old_s = 1, s = 0;
  if (old_r < 0) old_r += m;
  while (r != 0) {
    const i128 q = old_r / r;
    i128 t = old_r - q * r;
    old_r = r;
    r = t;
    t = old_s - q * s;
    old_s = s;
    s = t;
  }
  i128 inv = old_s % m;
  return inv < 0 ? inv + m : inv;
}

}  // namespace

std::optional<ResidueClass> crt_merge(std::span<const Congruence> pairs) {
  i128 a = 0, d = 1;
  for (const auto& c : pairs) {
    if (c.modulus == 0) throw ConfigError("crt_merge: modulus must be >= 1");
    const i128 m = c.modulus;
    i128 r = -static_cast<i128>(c.shift % c.modulus);
    r %= m;
    if (r < 0) r += m;
    const i128 g = std::gcd(static_cast<std::uint64_t>(d), c.modulus);
    i128 diff = (r - a) % g;
    if (diff != 0) return std::nullopt;
    // a + d * t = r (mod m)  =>  t = ((r - a)/g) * inv(d/g) (mod m/g)
    const i128 mg = m / g;
    i128 t = ((r - a) / g) % mg;
    if (t < 0) t += mg;
    if (mg > 1) t = t * inverse_mod((d / g) % mg, mg) % mg;
    else t = 0;
    const i128 lcm = d * mg;
    if (lcm > (static_cast<i128>(1) << 63)) throw ConfigError("crt_merge: modulus overflow");
    a = (a + d * t) % lcm;
    d = lcm;
  }
  return ResidueClass{static_cast<std::uint64_t>(a), static_cast<std::uint64_t>(d)};
}

}  // namespace siegel
