#pragma once

// Arithmetic view of the segment tree over <1, T>: a vertex of height h
// covers an aligned dyadic block of 2^h trials. Nothing is materialised; a
// vertex is identified by its height and extreme leaves.

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "reset/errors.hpp"
#include "reset/segment.hpp"

namespace reset::segtree {

struct Vertex {
  unsigned height;
  std::uint64_t first;  // leftmost leaf
  std::uint64_t last;   // rightmost leaf

  Segment segment() const { return {first, last}; }
  std::uint64_t size() const { return std::uint64_t{1} << height; }
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

/// The height-h vertex whose block holds `leaf`.
inline Vertex vertex_at(std::uint64_t leaf, unsigned height) {
  detail::require(leaf >= 1, "leaves are 1-based");
  const std::uint64_t first = (((leaf - 1) >> height) << height) + 1;
  return {height, first, first + (std::uint64_t{1} << height) - 1};
}

inline Vertex parent(const Vertex& v) { return vertex_at(v.first, v.height + 1); }

inline std::pair<Vertex, Vertex> children(const Vertex& v) {
  detail::require(v.height >= 1, "leaves have no children");
  const std::uint64_t half = std::uint64_t{1} << (v.height - 1);
  return {{v.height - 1, v.first, v.first + half - 1}, {v.height - 1, v.first + half, v.last}};
}

/// Constants of the switching-regret bound.
struct Constants {
  double c;      // sqrt2 / (sqrt2 - 1)
  double d;      // sqrt(8 ln 2) / (3 - 2 sqrt2)
  double alpha;  // 2 sqrt(ln 2) / (sqrt2 - 1)
  double xi;     // 1 / (sqrt2 - 1)

  static Constants evaluate() {
    const double r2 = std::numbers::sqrt2;
    return {r2 / (r2 - 1.0), std::sqrt(8.0 * std::numbers::ln2) / (3.0 - 2.0 * r2),
            2.0 * std::sqrt(std::numbers::ln2) / (r2 - 1.0), 1.0 / (r2 - 1.0)};
  }
};

inline const Constants kConstants = Constants::evaluate();

/// Maximal aligned dyadic blocks partitioning <q, s>: every returned vertex
/// lies inside the segment and its parent does not. Built greedily from the
/// left by taking the largest aligned block that still fits.
inline std::vector<Vertex> fundamental_decomposition(std::uint64_t q, std::uint64_t s,
                                                     std::uint64_t horizon) {
  detail::require(horizon >= 1 && std::has_single_bit(horizon), "horizon must be a power of two");
  detail::require(1 <= q && q <= s && s <= horizon, "segment must satisfy 1 <= q <= s <= T");
  const auto max_height = static_cast<unsigned>(std::countr_zero(horizon));
  std::vector<Vertex> out;
  std::uint64_t cursor = q;
  while (cursor <= s) {
    // Alignment caps the height at the trailing zeros of cursor - 1.
    unsigned h = cursor == 1 ? max_height
                             : std::min<unsigned>(max_height, std::countr_zero(cursor - 1));
    while (cursor + (std::uint64_t{1} << h) - 1 > s) --h;
    out.push_back({h, cursor, cursor + (std::uint64_t{1} << h) - 1});
    cursor += std::uint64_t{1} << h;
  }
  return out;
}

inline std::vector<Vertex> fundamental_decomposition(const Segment& segment,
                                                     std::uint64_t horizon) {
  return fundamental_decomposition(segment.first, segment.last, horizon);
}

/// sum over v of sqrt(2^h(v)).
inline double block_sqrt_sum(std::span<const Vertex> decomposition) {
  double total = 0.0;
  for (const auto& v : decomposition) total += std::sqrt(static_cast<double>(v.size()));
  return total;
}

/// Both sides of sum_{k in Z} sqrt(2^k) <= xi sqrt(sum_{k in Z} 2^k).
inline std::pair<double, double> height_sum_check(std::span<const unsigned> exponents) {
  detail::require(!exponents.empty(), "exponent set must be nonempty");
  std::set<unsigned> seen;
  double lhs = 0.0;
  double total = 0.0;
  for (unsigned k : exponents) {
    detail::require(k < 1024, "exponent too large for double");
    detail::require(seen.insert(k).second, "exponents must be distinct");
    lhs += std::pow(std::numbers::sqrt2, static_cast<double>(k));
    total += std::ldexp(1.0, static_cast<int>(k));
  }
  return {lhs, kConstants.xi * std::sqrt(total)};
}

/// (c gamma + d) * sum_k sqrt(length_k).
inline double switching_bound(std::span<const std::uint64_t> segment_lengths, double gamma) {
  double root_sum = 0.0;
  for (auto len : segment_lengths) {
    detail::require(len >= 1, "segment lengths must be positive");
    root_sum += std::sqrt(static_cast<double>(len));
  }
  return (kConstants.c * gamma + kConstants.d) * root_sum;
}

}  // namespace reset::segtree
