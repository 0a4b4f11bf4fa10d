#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ipl/measure.hpp"

namespace ipl {

/// Unordered set partition of {0, ..., k-1}. Blocks are bitmasks, sorted by
/// their smallest element.
class SetPartition {
 public:
  using block_type = std::uint32_t;
  static constexpr std::size_t kMaxElements = 10;

  SetPartition() = default;
  SetPartition(std::size_t k, std::vector<block_type> blocks);

  std::size_t ground_size() const { return k_; }
  std::size_t size() const { return blocks_.size(); }
  const std::vector<block_type>& blocks() const { return blocks_; }
  /// Union of all blocks.
  block_type support() const;

  /// B ≼ A: every block of *this lies inside a block of `coarser`.
  bool refines(const SetPartition& coarser) const;

  std::string to_string() const;

  friend bool operator==(const SetPartition&, const SetPartition&) = default;

 private:
  std::size_t k_ = 0;
  std::vector<block_type> blocks_;
};

/// Every partition of {0,...,k-1} exactly once, in restricted-growth-string order.
/// 1 <= k <= 10.
std::vector<SetPartition> partitions_of(std::size_t k);

/// Every partition of the elements of `subset` (a bitmask over {0,...,k-1}).
std::vector<SetPartition> partitions_of_subset(std::size_t k, SetPartition::block_type subset);

/// Möbius function of the partition lattice: Π_i (-1)^{n_i - 1}(n_i - 1)! where
/// n_i is the number of blocks of B inside the i-th block of A; 0 unless B ≼ A.
long long moebius_partition(const SetPartition& b, const SetPartition& a);

/// Values on every nonempty subset of {0,...,k-1}, keyed by bitmask.
class MomentTable {
 public:
  MomentTable() = default;
  explicit MomentTable(std::size_t k);

  std::size_t k() const { return k_; }
  double& operator[](SetPartition::block_type subset) { return values_.at(subset); }
  double operator[](SetPartition::block_type subset) const { return values_.at(subset); }
  SetPartition::block_type full() const { return static_cast<SetPartition::block_type>((1u << k_) - 1); }

 private:
  std::size_t k_ = 0;
  std::vector<double> values_;  // index 0 unused
};

/// C(A) = Σ_{B partition of A} (-1)^{|B|-1}(|B|-1)! Π F(B_i)
MomentTable correlations_from_moments(const MomentTable& moments);
/// F(A) = Σ_{B partition of A} Π C(B_i)
MomentTable moments_from_correlations(const MomentTable& correlations);

/// k-point correlation of ω at strictly increasing `sites` with the given values,
/// from the moments F(S') = ω(⟨S'⟩)/‖ω‖ over the subsets S' of the sites, scaled
/// back by ‖ω‖. Throws for non-contiguous sites.
double site_correlation(const Measure& w, std::span<const std::size_t> sites,
                        std::span<const std::size_t> values);

}  // namespace ipl
