#pragma once

#include <cstdint>
#include <optional>
#include <span>

namespace siegel {

struct Congruence {
  std::uint64_t modulus = 1;  // d_j
  std::uint64_t shift = 0;    // h_j: the condition is d_j | n + h_j
};

struct ResidueClass {
  std::uint64_t residue = 0;  // a, with 0 <= a < modulus
  std::uint64_t modulus = 1;  // lcm of all d_j

  bool operator==(const ResidueClass&) const = default;
};

// Merges the conditions d_j | n + h_j into a single class n = a (mod lcm).
// Returns nullopt when some gcd(d_i, d_j) does not divide h_i - h_j.
// Throws ConfigError on a zero modulus or when the lcm overflows 2^63.
std::optional<ResidueClass> crt_merge(std::span<const Congruence> pairs);

}  // namespace siegel
