#pragma once

#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <span>
#include <string>
#include <vector>

namespace ipl {

/// A set of links encoded as a bitmask. Link i sits between sites i and i+1.
class LinkSet {
 public:
  using mask_type = std::uint32_t;

  constexpr LinkSet() = default;
  constexpr explicit LinkSet(mask_type bits) : bits_(bits) {}

  static LinkSet of(std::initializer_list<std::size_t> links);
  /// All links 0..n_links-1.
  static constexpr LinkSet full(std::size_t n_links) {
    return LinkSet(n_links == 0 ? 0u : static_cast<mask_type>((std::uint64_t{1} << n_links) - 1));
  }

  constexpr mask_type bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr bool contains(std::size_t link) const { return ((bits_ >> link) & 1u) != 0; }
  constexpr bool is_subset_of(LinkSet other) const { return (bits_ & ~other.bits_) == 0; }

  /// Complement relative to the full link set of a space with `n_links` links.
  constexpr LinkSet complement(std::size_t n_links) const {
    return LinkSet(full(n_links).bits_ ^ bits_);
  }

  constexpr LinkSet with(std::size_t link) const { return LinkSet(bits_ | (mask_type{1} << link)); }

  friend constexpr LinkSet operator|(LinkSet a, LinkSet b) { return LinkSet(a.bits_ | b.bits_); }
  friend constexpr LinkSet operator&(LinkSet a, LinkSet b) { return LinkSet(a.bits_ & b.bits_); }
  friend constexpr LinkSet operator-(LinkSet a, LinkSet b) { return LinkSet(a.bits_ & ~b.bits_); }
  friend constexpr auto operator<=>(LinkSet, LinkSet) = default;

  std::vector<std::size_t> links() const;
  std::string to_string() const;

 private:
  mask_type bits_ = 0;
};

/// Iterable view over all submasks of a LinkSet in ascending bit-pattern order.
class SubsetRange {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = LinkSet;
    using difference_type = std::ptrdiff_t;
    using pointer = const LinkSet*;
    using reference = LinkSet;

    iterator() = default;
    iterator(LinkSet::mask_type mask, LinkSet::mask_type current, bool done)
        : mask_(mask), current_(current), done_(done) {}

    LinkSet operator*() const { return LinkSet(current_); }
    iterator& operator++() {
      if (current_ == mask_) {
        done_ = true;
      } else {
        // next submask in increasing numeric order
        current_ = (current_ - mask_) & mask_;
      }
      return *this;
    }
    iterator operator++(int) {
      auto copy = *this;
      ++*this;
      return copy;
    }
    friend bool operator==(const iterator& a, const iterator& b) {
      return a.done_ == b.done_ && (a.done_ || a.current_ == b.current_);
    }

   private:
    LinkSet::mask_type mask_ = 0;
    LinkSet::mask_type current_ = 0;
    bool done_ = true;
  };

  explicit SubsetRange(LinkSet mask) : mask_(mask.bits()) {}
  iterator begin() const { return iterator(mask_, 0, false); }
  iterator end() const { return iterator(mask_, 0, true); }

 private:
  LinkSet::mask_type mask_;
};

/// All 2^|mask| submasks, ascending.
inline SubsetRange subsets_of(LinkSet mask) { return SubsetRange(mask); }

/// Möbius function of the Boolean lattice: (-1)^{|A-B|} if B ⊆ A, otherwise 0.
int moebius_subset(LinkSet b, LinkSet a);

/// Half-open range of consecutive sites [first, last).
struct SiteBlock {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const { return last - first; }
  bool contains(std::size_t site) const { return site >= first && site < last; }
  friend bool operator==(const SiteBlock&, const SiteBlock&) = default;
};

/// Ordered partition of the sites into contiguous blocks.
class OrderedPartition {
 public:
  explicit OrderedPartition(std::vector<SiteBlock> blocks);

  const std::vector<SiteBlock>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  std::size_t n_sites() const { return blocks_.empty() ? 0 : blocks_.back().last; }

  /// True if every block of *this lies inside a block of `coarser`.
  bool refines(const OrderedPartition& coarser) const;

  friend bool operator==(const OrderedPartition&, const OrderedPartition&) = default;

 private:
  std::vector<SiteBlock> blocks_;
};

/// Product type space X = X_0 × ... × X_n with mixed-radix flat indexing.
/// Site 0 is the most significant digit.
class TypeSpace {
 public:
  static constexpr std::size_t kDefaultMaxStates = std::size_t{1} << 20;
  static constexpr std::size_t kMaxLinks = 16;

  TypeSpace() = default;
  explicit TypeSpace(std::vector<std::size_t> cardinalities,
                     std::size_t max_states = kDefaultMaxStates);

  std::size_t n_sites() const { return cardinalities_.size(); }
  std::size_t n_links() const { return n_sites() == 0 ? 0 : n_sites() - 1; }
  std::size_t total_size() const { return total_size_; }
  std::size_t cardinality(std::size_t site) const { return cardinalities_.at(site); }
  const std::vector<std::size_t>& cardinalities() const { return cardinalities_; }
  /// Flat-index distance between neighbouring values at `site`.
  std::size_t stride(std::size_t site) const { return strides_[site]; }

  LinkSet all_links() const { return LinkSet::full(n_links()); }
  bool is_valid(LinkSet links) const { return links.is_subset_of(all_links()); }

  std::size_t flat_index(std::span<const std::size_t> coords) const;
  std::vector<std::size_t> coords_of(std::size_t index) const;
  std::size_t digit(std::size_t index, std::size_t site) const {
    return (index / strides_[site]) % cardinalities_[site];
  }

  /// Space of the given sites (in the given order).
  TypeSpace subspace(std::span<const std::size_t> sites) const;
  TypeSpace subspace(SiteBlock block) const;

  friend bool operator==(const TypeSpace& a, const TypeSpace& b) {
    return a.cardinalities_ == b.cardinalities_;
  }

 private:
  std::vector<std::size_t> cardinalities_;
  std::vector<std::size_t> strides_;
  std::size_t total_size_ = 0;
};

/// Ordered partition N_G induced by cutting the sites at every link in `cuts`.
OrderedPartition partition_of(const TypeSpace& space, LinkSet cuts);

std::string coords_label(std::span<const std::size_t> coords);

}  // namespace ipl
