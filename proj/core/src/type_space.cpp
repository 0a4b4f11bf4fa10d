#include "ipl/type_space.hpp"

#include <stdexcept>

namespace ipl {

LinkSet LinkSet::of(std::initializer_list<std::size_t> links) {
  mask_type bits = 0;
  for (auto link : links) {
    if (link >= TypeSpace::kMaxLinks) {
      throw std::out_of_range("link index " + std::to_string(link) + " exceeds the link cap");
    }
    bits |= mask_type{1} << link;
  }
  return LinkSet(bits);
}

std::vector<std::size_t> LinkSet::links() const {
  std::vector<std::size_t> out;
  for (auto bits = bits_; bits != 0; bits &= bits - 1) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(bits)));
  }
  return out;
}

std::string LinkSet::to_string() const {
  std::string s = "{";
  bool first = true;
  for (auto link : links()) {
    if (!first) s += ',';
    s += std::to_string(link);
    first = false;
  }
  return s + "}";
}

int moebius_subset(LinkSet b, LinkSet a) {
  if (!b.is_subset_of(a)) return 0;
  return ((a - b).size() % 2 == 0) ? 1 : -1;
}

OrderedPartition::OrderedPartition(std::vector<SiteBlock> blocks) : blocks_(std::move(blocks)) {
  std::size_t expected = 0;
  for (const auto& b : blocks_) {
    if (b.first != expected || b.last <= b.first) {
      throw std::invalid_argument("ordered partition blocks must be contiguous, ordered and nonempty");
    }
    expected = b.last;
  }
}

bool OrderedPartition::refines(const OrderedPartition& coarser) const {
  if (n_sites() != coarser.n_sites()) return false;
  std::size_t j = 0;
  for (const auto& b : blocks_) {
    while (j < coarser.blocks_.size() && coarser.blocks_[j].last <= b.first) ++j;
    if (j == coarser.blocks_.size()) return false;
    const auto& c = coarser.blocks_[j];
    if (b.first < c.first || b.last > c.last) return false;
  }
  return true;
}

TypeSpace::TypeSpace(std::vector<std::size_t> cardinalities, std::size_t max_states)
    : cardinalities_(std::move(cardinalities)) {
  if (cardinalities_.empty()) {
    throw std::invalid_argument("type space needs at least one site");
  }
  if (cardinalities_.size() - 1 > kMaxLinks) {
    throw std::invalid_argument("type space has " + std::to_string(cardinalities_.size() - 1) +
                                " links; at most " + std::to_string(kMaxLinks) + " are supported");
  }
  total_size_ = 1;
  for (std::size_t i = 0; i < cardinalities_.size(); ++i) {
    if (cardinalities_[i] < 2) {
      throw std::invalid_argument("site " + std::to_string(i) +
                                  " has fewer than 2 states; drop the site instead");
    }
    if (total_size_ > max_states / cardinalities_[i]) {
      throw std::invalid_argument("type space exceeds the state cap of " +
                                  std::to_string(max_states));
    }
    total_size_ *= cardinalities_[i];
  }
  strides_.assign(cardinalities_.size(), 1);
  for (std::size_t i = cardinalities_.size() - 1; i > 0; --i) {
    strides_[i - 1] = strides_[i] * cardinalities_[i];
  }
}

std::size_t TypeSpace::flat_index(std::span<const std::size_t> coords) const {
  if (coords.size() != n_sites()) {
    throw std::out_of_range("expected " + std::to_string(n_sites()) + " coordinates, got " +
                            std::to_string(coords.size()));
  }
  std::size_t index = 0;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (coords[i] >= cardinalities_[i]) {
      throw std::out_of_range("coordinate " + std::to_string(coords[i]) + " at site " +
                              std::to_string(i) + " exceeds cardinality " +
                              std::to_string(cardinalities_[i]));
    }
    index += coords[i] * strides_[i];
  }
  return index;
}

std::vector<std::size_t> TypeSpace::coords_of(std::size_t index) const {
  if (index >= total_size_) {
    throw std::out_of_range("flat index " + std::to_string(index) + " out of range");
  }
  std::vector<std::size_t> coords(n_sites());
  for (std::size_t i = 0; i < coords.size(); ++i) coords[i] = digit(index, i);
  return coords;
}

TypeSpace TypeSpace::subspace(std::span<const std::size_t> sites) const {
  std::vector<std::size_t> cards;
  cards.reserve(sites.size());
  for (auto s : sites) {
    if (s >= n_sites()) throw std::out_of_range("site " + std::to_string(s) + " out of range");
    cards.push_back(cardinalities_[s]);
  }
  return TypeSpace(std::move(cards), total_size_);
}

TypeSpace TypeSpace::subspace(SiteBlock block) const {
  if (block.last > n_sites() || block.first >= block.last) {
    throw std::out_of_range("site block out of range");
  }
  return TypeSpace(std::vector<std::size_t>(cardinalities_.begin() + static_cast<std::ptrdiff_t>(block.first),
                                            cardinalities_.begin() + static_cast<std::ptrdiff_t>(block.last)),
                   total_size_);
}

OrderedPartition partition_of(const TypeSpace& space, LinkSet cuts) {
  if (!space.is_valid(cuts)) {
    throw std::invalid_argument("link set " + cuts.to_string() + " is not valid for this space");
  }
  std::vector<SiteBlock> blocks;
  std::size_t first = 0;
  for (std::size_t link = 0; link < space.n_links(); ++link) {
    if (cuts.contains(link)) {
      blocks.push_back({first, link + 1});
      first = link + 1;
    }
  }
  blocks.push_back({first, space.n_sites()});
  return OrderedPartition(std::move(blocks));
}

std::string coords_label(std::span<const std::size_t> coords) {
  std::string s = "(";
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (i != 0) s += ';';
    s += std::to_string(coords[i]);
  }
  return s + ")";
}

}  // namespace ipl
