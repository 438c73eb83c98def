#pragma once

#include <compare>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "starkqfi/types.hpp"

namespace starkqfi {

/// Occupation-number configuration of bosons on a one-dimensional lattice.
class FockState {
 public:
  FockState() = default;
  explicit FockState(std::vector<int> occupations);

  int sites() const { return static_cast<int>(occupations_.size()); }
  int particles() const;
  int operator[](int site) const { return occupations_[static_cast<std::size_t>(site)]; }
  int max_occupation() const;
  const std::vector<int>& occupations() const { return occupations_; }

  /// Compact text form: "01010" when every occupation is a single digit,
  /// otherwise comma-separated integers ("0,12,3").
  std::string to_string() const;
  static FockState parse(std::string_view text);

  friend bool operator==(const FockState&, const FockState&) = default;
  friend auto operator<=>(const FockState&, const FockState&) = default;

 private:
  std::vector<int> occupations_;
};

/// Number of ways to place `particles` bosons on `sites` sites,
/// (L+N-1)!/(N!(L-1)!). Throws std::domain_error for sites < 1 or
/// particles < 0 and std::overflow_error if the count does not fit in Index.
Index dimension(int sites, int particles);

/// Fixed-particle-number Fock space with a lexicographic ranking.
///
/// States are ordered lexicographically on (n_0, n_1, ..., n_{L-1}), so
/// index 0 is [0,...,0,N] and the last index is [N,0,...,0]. Ranking uses
/// the combinatorial number system with a table of sector sizes; rank and
/// unrank cost O(L) and O(L+N) respectively. The occupation table of all
/// states is materialized once so operator assembly and diagonal
/// observables can read it directly.
class FockBasis {
 public:
  FockBasis(int sites, int particles);

  int sites() const { return sites_; }
  int particles() const { return particles_; }
  Index dimension() const { return dimension_; }

  /// Throws std::invalid_argument when the state is not in this sector.
  Index rank(const FockState& state) const;
  /// Throws std::out_of_range for index outside [0, dimension).
  FockState unrank(Index index) const;

  bool contains(const FockState& state) const;

  /// Rank of an occupation array known to lie in this sector (no checks).
  Index rank_unchecked(std::span<const int> occupations) const;

  /// dimension() x sites() table, row i holds the occupations of state i.
  const Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>& occupations() const {
    return table_;
  }
  int occupation(Index state, int site) const { return table_(state, site); }
  FockState state(Index index) const;

  /// Basis vector |state> as a dense normalized vector.
  StateVector basis_vector(const FockState& state) const;

 private:
  // Number of configurations of `particles` bosons on `sites` sites, for
  // sites in [0, L] and particles in [0, N].
  Index count(int sites, int particles) const {
    return counts_(sites, particles);
  }
  int sites_;
  int particles_;
  Index dimension_;
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> counts_;
  Eigen::Array<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> table_;
};

/// N singly occupied sites with one vacant site between neighbours,
/// centred in the lattice; leftover odd space goes to the upper end, i.e.
/// the pattern is shifted toward lower site indices. For N = 0 the empty
/// lattice is returned. Throws std::length_error when L < 2N-1.
FockState staggered_initial_state(int sites, int particles);

}  // namespace starkqfi
