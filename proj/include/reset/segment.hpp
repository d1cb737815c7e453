#pragma once

#include <cstdint>
#include <vector>

#include "reset/errors.hpp"

namespace reset {

/// Inclusive range of 1-based trials <first, last>.
struct Segment {
  std::uint64_t first;
  std::uint64_t last;

  std::uint64_t length() const { return last - first + 1; }
  bool contains(std::uint64_t trial) const { return first <= trial && trial <= last; }
  bool contains(const Segment& other) const { return first <= other.first && other.last <= last; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

/// Partition of <1, T> into contiguous segments, stored as the boundary
/// sequence 1 = sigma_1 < sigma_2 < ... < sigma_{k+1} = T + 1.
class Segmentation {
 public:
  static Segmentation from_boundaries(std::vector<std::uint64_t> boundaries) {
    detail::require(boundaries.size() >= 2, "segmentation needs at least one segment");
    detail::require(boundaries.front() == 1, "segmentation must start at trial 1");
    for (std::size_t k = 1; k < boundaries.size(); ++k) {
      detail::require(boundaries[k] > boundaries[k - 1], "segment boundaries must increase");
    }
    return Segmentation(std::move(boundaries));
  }

  static Segmentation from_lengths(const std::vector<std::uint64_t>& lengths) {
    std::vector<std::uint64_t> boundaries{1};
    for (auto len : lengths) {
      detail::require(len >= 1, "segment lengths must be positive");
      boundaries.push_back(boundaries.back() + len);
    }
    return from_boundaries(std::move(boundaries));
  }

  static Segmentation whole(std::uint64_t horizon) { return from_lengths({horizon}); }

  std::uint64_t horizon() const { return boundaries_.back() - 1; }
  std::size_t size() const { return boundaries_.size() - 1; }
  const std::vector<std::uint64_t>& boundaries() const { return boundaries_; }

  Segment operator[](std::size_t k) const { return {boundaries_[k], boundaries_[k + 1] - 1}; }

  std::vector<Segment> segments() const {
    std::vector<Segment> out;
    out.reserve(size());
    for (std::size_t k = 0; k < size(); ++k) out.push_back((*this)[k]);
    return out;
  }

  std::vector<std::uint64_t> lengths() const {
    std::vector<std::uint64_t> out;
    for (std::size_t k = 0; k < size(); ++k) out.push_back((*this)[k].length());
    return out;
  }

  /// Index of the segment holding `trial`.
  std::size_t segment_of(std::uint64_t trial) const {
    detail::require(trial >= 1 && trial <= horizon(), "trial outside the segmentation");
    std::size_t lo = 0;
    std::size_t hi = size();
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      if (boundaries_[mid] <= trial) lo = mid; else hi = mid;
    }
    return lo;
  }

 private:
  explicit Segmentation(std::vector<std::uint64_t> boundaries) : boundaries_(std::move(boundaries)) {}
  std::vector<std::uint64_t> boundaries_;
};

}  // namespace reset
