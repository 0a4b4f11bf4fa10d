#include "ipl/correlations.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <stdexcept>

namespace ipl {

SetPartition::SetPartition(std::size_t k, std::vector<block_type> blocks)
    : k_(k), blocks_(std::move(blocks)) {
  if (k_ > kMaxElements) throw std::invalid_argument("set partitions support at most 10 elements");
  block_type seen = 0;
  for (auto b : blocks_) {
    if (b == 0) throw std::invalid_argument("set partition has an empty block");
    if ((seen & b) != 0) throw std::invalid_argument("set partition blocks overlap");
    if ((b >> k_) != 0) throw std::invalid_argument("set partition block exceeds the ground set");
    seen |= b;
  }
  std::sort(blocks_.begin(), blocks_.end(),
            [](block_type a, block_type b) { return std::countr_zero(a) < std::countr_zero(b); });
}

SetPartition::block_type SetPartition::support() const {
  block_type s = 0;
  for (auto b : blocks_) s |= b;
  return s;
}

bool SetPartition::refines(const SetPartition& coarser) const {
  if (support() != coarser.support()) return false;
  return std::all_of(blocks_.begin(), blocks_.end(), [&](block_type b) {
    return std::any_of(coarser.blocks_.begin(), coarser.blocks_.end(),
                       [b](block_type a) { return (b & ~a) == 0; });
  });
}

std::string SetPartition::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    if (i != 0) s += ',';
    s += '{';
    bool first = true;
    for (std::size_t e = 0; e < k_; ++e) {
      if ((blocks_[i] >> e) & 1u) {
        if (!first) s += ',';
        s += std::to_string(e + 1);
        first = false;
      }
    }
    s += '}';
  }
  return s + "}";
}

std::vector<SetPartition> partitions_of_subset(std::size_t k, SetPartition::block_type subset) {
  if (k == 0 || k > SetPartition::kMaxElements) {
    throw std::invalid_argument("partition ground set size must lie in 1..10");
  }
  std::vector<std::size_t> elements;
  for (std::size_t e = 0; e < k; ++e) {
    if ((subset >> e) & 1u) elements.push_back(e);
  }
  if (elements.empty()) throw std::invalid_argument("cannot partition the empty set");

  const std::size_t n = elements.size();
  std::vector<SetPartition> out;
  // restricted growth string: label[0] = 0, label[i] <= 1 + max(label[0..i-1])
  std::vector<std::size_t> label(n, 0);
  std::vector<std::size_t> prefix_max(n, 0);
  while (true) {
    const std::size_t n_blocks = prefix_max[n - 1] + 1;
    std::vector<SetPartition::block_type> blocks(n_blocks, 0);
    for (std::size_t i = 0; i < n; ++i) blocks[label[i]] |= SetPartition::block_type{1} << elements[i];
    out.emplace_back(k, std::move(blocks));

    bool advanced = false;
    for (std::size_t i = n; i-- > 1;) {
      if (label[i] <= prefix_max[i - 1]) {
        ++label[i];
        prefix_max[i] = std::max(prefix_max[i - 1], label[i]);
        for (std::size_t j = i + 1; j < n; ++j) {
          label[j] = 0;
          prefix_max[j] = prefix_max[i];
        }
        advanced = true;
        break;
      }
    }
    if (!advanced) return out;
  }
}

std::vector<SetPartition> partitions_of(std::size_t k) {
  if (k == 0 || k > SetPartition::kMaxElements) {
    throw std::invalid_argument("partition ground set size must lie in 1..10");
  }
  return partitions_of_subset(k, static_cast<SetPartition::block_type>((1u << k) - 1));
}

long long moebius_partition(const SetPartition& b, const SetPartition& a) {
  if (!b.refines(a)) return 0;
  long long value = 1;
  for (auto block : a.blocks()) {
    long long inside = 0;
    for (auto fine : b.blocks()) {
      if ((fine & ~block) == 0) ++inside;
    }
    // (-1)^{n-1} (n-1)!
    long long factorial = 1;
    for (long long j = 2; j < inside; ++j) factorial *= j;
    value *= ((inside - 1) % 2 == 0 ? 1 : -1) * factorial;
  }
  return value;
}

MomentTable::MomentTable(std::size_t k) : k_(k) {
  if (k == 0 || k > SetPartition::kMaxElements) {
    throw std::invalid_argument("moment tables support 1..10 elements");
  }
  values_.assign(std::size_t{1} << k, 0.0);
}

namespace {

template <typename Weight>
MomentTable partition_transform(const MomentTable& in, Weight weight) {
  MomentTable out(in.k());
  for (SetPartition::block_type subset = 1; subset <= in.full(); ++subset) {
    double total = 0.0;
    for (const auto& p : partitions_of_subset(in.k(), subset)) {
      double term = weight(p.size());
      for (auto block : p.blocks()) term *= in[block];
      total += term;
    }
    out[subset] = total;
  }
  return out;
}

}  // namespace

MomentTable correlations_from_moments(const MomentTable& moments) {
  return partition_transform(moments, [](std::size_t blocks) {
    double factorial = 1.0;
    for (std::size_t j = 2; j < blocks; ++j) factorial *= static_cast<double>(j);
    return ((blocks - 1) % 2 == 0 ? 1.0 : -1.0) * factorial;
  });
}

MomentTable moments_from_correlations(const MomentTable& correlations) {
  return partition_transform(correlations, [](std::size_t) { return 1.0; });
}

double site_correlation(const Measure& w, std::span<const std::size_t> sites,
                        std::span<const std::size_t> values) {
  if (sites.empty() || sites.size() != values.size()) {
    throw std::invalid_argument("site correlation needs one value per site");
  }
  if (sites.size() > SetPartition::kMaxElements) {
    throw std::invalid_argument("site correlation supports at most 10 sites");
  }
  for (std::size_t i = 1; i < sites.size(); ++i) {
    if (sites[i] != sites[i - 1] + 1) {
      throw std::invalid_argument("site correlation requires contiguous sites in increasing order");
    }
  }
  const double norm = w.mass();
  if (norm == 0.0) return 0.0;

  const std::size_t k = sites.size();
  MomentTable moments(k);
  for (SetPartition::block_type subset = 1; subset <= moments.full(); ++subset) {
    std::map<std::size_t, std::size_t> assignment;
    for (std::size_t i = 0; i < k; ++i) {
      if ((subset >> i) & 1u) assignment.emplace(sites[i], values[i]);
    }
    moments[subset] = cylinder_value(w, Cylinder(std::move(assignment))) / norm;
  }
  return norm * correlations_from_moments(moments)[moments.full()];
}

}  // namespace ipl
