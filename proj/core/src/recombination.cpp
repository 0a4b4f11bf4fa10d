#include "ipl/recombination.hpp"

#include "ipl/errors.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ipl {

RecombinationRates::RecombinationRates(std::vector<double> rho) : rho_(std::move(rho)) {
  for (std::size_t i = 0; i < rho_.size(); ++i) {
    if (!(rho_[i] > 0.0) || !std::isfinite(rho_[i])) {
      throw ValidationError("recombination rate at link " + std::to_string(i) + " is " +
                            std::to_string(rho_[i]) +
                            "; rates must satisfy rho > 0 (merge the two sites into one if "
                            "the link never recombines)");
    }
  }
}

double RecombinationRates::total(LinkSet links) const {
  double s = 0.0;
  for (auto link : links.links()) s += rho_.at(link);
  return s;
}

SignedMeasure recombine_link(const SignedMeasure& w, std::size_t link) {
  const auto& space = w.space();
  if (link >= space.n_links()) {
    throw std::invalid_argument("link " + std::to_string(link) + " out of range for a space with " +
                                std::to_string(space.n_links()) + " links");
  }
  const double norm = w.variation_norm();
  if (norm == 0.0) return SignedMeasure(space);
  const auto head = marginal(w, SiteBlock{0, link + 1});
  const auto tail = marginal(w, SiteBlock{link + 1, space.n_sites()});
  const SignedMeasure factors[] = {head, tail};
  auto out = product(space, partition_of(space, LinkSet::of({link})), factors);
  out *= 1.0 / norm;
  return out;
}

Measure recombine_link(const Measure& w, std::size_t link) {
  return Measure(recombine_link(w.as_signed(), link));
}

Measure recombine_set(const Measure& w, LinkSet links) {
  const auto& space = w.space();
  if (!space.is_valid(links)) {
    throw std::invalid_argument("link set " + links.to_string() + " is not valid for this space");
  }
  if (links.empty()) return w;
  const double norm = w.mass();
  if (norm == 0.0) return Measure::zero(space);
  const auto partition = partition_of(space, links);
  std::vector<SignedMeasure> factors;
  factors.reserve(partition.size());
  for (const auto& block : partition.blocks()) factors.push_back(marginal(w.as_signed(), block));
  auto out = product(space, partition, factors);
  out *= std::pow(norm, -static_cast<double>(links.size()));
  return Measure(std::move(out));
}

namespace {

void check_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be nonnegative, got " + std::to_string(t));
}

}  // namespace

double coeff_a(LinkSet g, double t, const RecombinationRates& rates) {
  check_time(t);
  double value = 1.0;
  for (std::size_t link = 0; link < rates.n_links(); ++link) {
    const double rt = rates[link] * t;
    value *= g.contains(link) ? -std::expm1(-rt) : std::exp(-rt);
  }
  return value;
}

double coeff_b(LinkSet k, double t, const RecombinationRates& rates) {
  check_time(t);
  return std::exp(-rates.total(k.complement(rates.n_links())) * t);
}

CoefficientTable coefficient_table(double t, const RecombinationRates& rates) {
  check_time(t);
  const std::size_t count = std::size_t{1} << rates.n_links();
  CoefficientTable table;
  table.time = t;
  table.a.resize(count);
  table.b.resize(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    const LinkSet g(static_cast<LinkSet::mask_type>(mask));
    table.a[mask] = coeff_a(g, t, rates);
    table.b[mask] = coeff_b(g, t, rates);
  }
  return table;
}

RecombinationSolver::RecombinationSolver(Measure initial, RecombinationRates rates)
    : initial_(std::move(initial)), rates_(std::move(rates)) {
  const auto& space = initial_.space();
  if (rates_.n_links() != space.n_links()) {
    throw std::invalid_argument("expected " + std::to_string(space.n_links()) +
                                " recombination rates, got " + std::to_string(rates_.n_links()));
  }
  const std::size_t count = std::size_t{1} << space.n_links();
  composites_.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    composites_.push_back(recombine_set(initial_, LinkSet(static_cast<LinkSet::mask_type>(mask))));
  }
}

Measure RecombinationSolver::at(double t) const {
  check_time(t);
  SignedMeasure out(initial_.space());
  for (std::size_t mask = 0; mask < composites_.size(); ++mask) {
    const double a = coeff_a(LinkSet(static_cast<LinkSet::mask_type>(mask)), t, rates_);
    if (a != 0.0) out.add_scaled(a, composites_[mask]);
  }
  return Measure(std::move(out));
}

Measure solve_recombination(const Measure& initial, double t, const RecombinationRates& rates) {
  check_time(t);
  return RecombinationSolver(initial, rates).at(t);
}

SignedMeasure t_operator(const Measure& w, LinkSet g) {
  const auto& space = w.space();
  if (!space.is_valid(g)) {
    throw std::invalid_argument("link set " + g.to_string() + " is not valid for this space");
  }
  SignedMeasure out(space);
  for (auto extra : subsets_of(g.complement(space.n_links()))) {
    const LinkSet h = g | extra;
    out.add_scaled(moebius_subset(g, h), recombine_set(w, h));
  }
  return out;
}

std::vector<SignedMeasure> t_operators(const Measure& w) {
  const auto& space = w.space();
  const std::size_t count = std::size_t{1} << space.n_links();
  std::vector<SignedMeasure> t;
  t.reserve(count);
  for (std::size_t mask = 0; mask < count; ++mask) {
    t.push_back(recombine_set(w, LinkSet(static_cast<LinkSet::mask_type>(mask))).as_signed());
  }
  // superset Möbius transform, one link at a time
  for (std::size_t link = 0; link < space.n_links(); ++link) {
    const std::size_t bit = std::size_t{1} << link;
    for (std::size_t mask = 0; mask < count; ++mask) {
      if ((mask & bit) == 0) t[mask] -= t[mask | bit];
    }
  }
  return t;
}

double kpoint_function(const Measure& w, LinkSet g, const Cylinder& c) {
  return cylinder_value(t_operator(w, g), c);
}

namespace {

void check_span(const TypeSpace& space, std::span<const std::size_t> sites, bool contiguous) {
  if (sites.empty()) throw std::invalid_argument("site span must be nonempty");
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (sites[i] >= space.n_sites()) {
      throw std::invalid_argument("site " + std::to_string(sites[i]) + " out of range");
    }
    if (i > 0 && sites[i] <= sites[i - 1]) {
      throw std::invalid_argument("span sites must be strictly increasing");
    }
    if (contiguous && i > 0 && sites[i] != sites[i - 1] + 1) {
      throw std::invalid_argument(
          "linkage disequilibria are defined for contiguous spans only; site " +
          std::to_string(sites[i - 1]) + " is followed by " + std::to_string(sites[i]) +
          " (only G = {a < j1} u {a > jk} gives an independent, non-vanishing k-point function)");
    }
  }
}

}  // namespace

LinkSet span_link_set(const TypeSpace& space, std::span<const std::size_t> sites) {
  check_span(space, sites, false);
  LinkSet g;
  // link i lies between sites i and i+1: left of j1 iff i < j1, right of jk iff i >= jk
  for (std::size_t link = 0; link < space.n_links(); ++link) {
    if (link < sites.front() || link >= sites.back()) g = g.with(link);
  }
  return g;
}

std::map<std::vector<std::size_t>, double> linkage_disequilibria(
    const Measure& w, std::span<const std::size_t> sites) {
  const auto& space = w.space();
  check_span(space, sites, true);
  const auto t = t_operator(w, span_link_set(space, sites));

  std::map<std::vector<std::size_t>, double> out;
  std::vector<std::size_t> values(sites.size(), 1);
  while (true) {
    std::map<std::size_t, std::size_t> assignment;
    for (std::size_t i = 0; i < sites.size(); ++i) assignment.emplace(sites[i], values[i]);
    out.emplace(values, cylinder_value(t, Cylinder(std::move(assignment))));
    // odometer over 1..M-1 at every site, last site fastest
    std::size_t pos = sites.size();
    while (pos > 0) {
      --pos;
      if (++values[pos] < space.cardinality(sites[pos])) break;
      values[pos] = 1;
      if (pos == 0) return out;
    }
  }
}

std::size_t linkage_disequilibrium_count(const TypeSpace& space) {
  const std::size_t n = space.n_sites();
  std::size_t total = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::size_t term = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) term *= space.cardinality(i) - 1;
    }
    total += term;
  }
  return total;
}

DecayPair decay_check(const Measure& initial, LinkSet g, double t, const RecombinationRates& rates) {
  auto evolved = t_operator(solve_recombination(initial, t, rates), g);
  auto predicted = t_operator(initial, g);
  predicted *= coeff_b(g, t, rates);
  return {std::move(evolved), std::move(predicted)};
}

}  // namespace ipl
