#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "ipl/measure.hpp"
#include "ipl/type_space.hpp"

namespace ipl {

/// Crossover rates ρ_α (1/time), one per link, all strictly positive.
class RecombinationRates {
 public:
  RecombinationRates() = default;
  explicit RecombinationRates(std::vector<double> rho);

  std::size_t n_links() const { return rho_.size(); }
  double operator[](std::size_t link) const { return rho_[link]; }
  const std::vector<double>& values() const { return rho_; }
  /// Σ_{α ∈ links} ρ_α
  double total(LinkSet links) const;

  friend bool operator==(const RecombinationRates&, const RecombinationRates&) = default;

 private:
  std::vector<double> rho_;
};

/// Coefficient functions a_G(t) and b_G(t) for every G ⊆ L at one time, indexed by mask.
struct CoefficientTable {
  double time = 0.0;
  std::vector<double> a;
  std::vector<double> b;

  double a_of(LinkSet g) const { return a[g.bits()]; }
  double b_of(LinkSet g) const { return b[g.bits()]; }
};

/// Elementary recombinator R_α(ω) = (π_{<α}ω ⊗ π_{>α}ω)/‖ω‖, with R_α(0) = 0.
/// Defined for signed measures with ‖·‖ the variation norm.
SignedMeasure recombine_link(const SignedMeasure& w, std::size_t link);
Measure recombine_link(const Measure& w, std::size_t link);

/// Composite recombinator R_G on the positive cone: the product of the block
/// marginals of N_G divided by ‖ω‖^{|G|}.
Measure recombine_set(const Measure& w, LinkSet links);

/// a_G(t) = exp(-Σ_{α∉G} ρ_α t) · Π_{β∈G} (1 - exp(-ρ_β t)); the probability that
/// exactly the links in G have seen a crossover by time t.
double coeff_a(LinkSet g, double t, const RecombinationRates& rates);
/// b_K(t) = exp(-Σ_{α∉K} ρ_α t) = Σ_{G⊆K} a_G(t).
double coeff_b(LinkSet k, double t, const RecombinationRates& rates);
CoefficientTable coefficient_table(double t, const RecombinationRates& rates);

/// Solution of the pure recombination equation from a fixed initial measure.
/// All 2^|L| composite recombinators of ω0 are built once; evaluation at a
/// time only recombines them with the a_G(t).
class RecombinationSolver {
 public:
  RecombinationSolver(Measure initial, RecombinationRates rates);

  const Measure& initial() const { return initial_; }
  const RecombinationRates& rates() const { return rates_; }
  const Measure& composite(LinkSet g) const { return composites_.at(g.bits()); }

  /// ω_t = Σ_G a_G(t) R_G(ω0)
  Measure at(double t) const;

 private:
  Measure initial_;
  RecombinationRates rates_;
  std::vector<Measure> composites_;
};

Measure solve_recombination(const Measure& initial, double t, const RecombinationRates& rates);

/// T_G(ω) = Σ_{H⊇G} (-1)^{|H-G|} R_H(ω).
SignedMeasure t_operator(const Measure& w, LinkSet g);
/// T_G(ω) for every G, reusing one set of composite recombinators. Indexed by mask.
std::vector<SignedMeasure> t_operators(const Measure& w);

/// F_G = T_G(ω)(c).
double kpoint_function(const Measure& w, LinkSet g, const Cylinder& c);

/// The decoupling link set for a site span j_1 < ... < j_k:
/// G = {α < j_1} ∪ {α > j_k}.
LinkSet span_link_set(const TypeSpace& space, std::span<const std::size_t> sites);

/// Linkage disequilibria of a contiguous span of sites: F_G for the span's link
/// set, one value per assignment with every site's value in 1..M_i-1
/// (value 0 is the dependent choice and is dropped).
std::map<std::vector<std::size_t>, double> linkage_disequilibria(
    const Measure& w, std::span<const std::size_t> sites);

/// Σ_{D ⊆ N} Π_{i∈D} (M_i - 1), the number of linkage disequilibria including the
/// empty span (total mass). Equals |X|.
std::size_t linkage_disequilibrium_count(const TypeSpace& space);

struct DecayPair {
  SignedMeasure evolved;    // T_G(ω_t)
  SignedMeasure predicted;  // b_G(t) T_G(ω_0)
};
DecayPair decay_check(const Measure& initial, LinkSet g, double t, const RecombinationRates& rates);

}  // namespace ipl
