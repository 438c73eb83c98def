#include "starkqfi/basis.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace starkqfi {

FockState::FockState(std::vector<int> occupations) : occupations_(std::move(occupations)) {
  for (int n : occupations_) {
    if (n < 0) throw std::invalid_argument("FockState: negative occupation");
  }
}

int FockState::particles() const {
  return std::accumulate(occupations_.begin(), occupations_.end(), 0);
}

int FockState::max_occupation() const {
  return occupations_.empty() ? 0 : *std::max_element(occupations_.begin(), occupations_.end());
}

std::string FockState::to_string() const {
  std::string out;
  if (max_occupation() <= 9) {
    for (int n : occupations_) out.push_back(static_cast<char>('0' + n));
    return out;
  }
  for (std::size_t i = 0; i < occupations_.size(); ++i) {
    if (i) out.push_back(',');
    out += std::to_string(occupations_[i]);
  }
  return out;
}

FockState FockState::parse(std::string_view text) {
  std::vector<int> occ;
  if (text.find(',') == std::string_view::npos) {
    for (char c : text) {
      if (c < '0' || c > '9') throw std::invalid_argument("FockState::parse: bad digit");
      occ.push_back(c - '0');
    }
    return FockState(std::move(occ));
  }
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + end, value);
    if (ec != std::errc{} || ptr != text.data() + end) {
      throw std::invalid_argument("FockState::parse: bad integer");
    }
    occ.push_back(value);
    pos = end + 1;
  }
  return FockState(std::move(occ));
}

Index dimension(int sites, int particles) {
  if (sites < 1) throw std::domain_error("dimension: need at least one site");
  if (particles < 0) throw std::domain_error("dimension: negative particle number");
  // C(L+N-1, k) with k = min(N, L-1); every partial product is itself a
  // binomial coefficient so the division is exact.
  const long long n = static_cast<long long>(sites) + particles - 1;
  const long long k = std::min<long long>(particles, sites - 1);
  __int128 result = 1;
  constexpr auto limit = static_cast<__int128>(std::numeric_limits<Index>::max());
  for (long long i = 1; i <= k; ++i) {
    result = result * (n - k + i) / i;
    if (result > limit) throw std::overflow_error("dimension: Hilbert space too large");
  }
  return static_cast<Index>(result);
}

FockBasis::FockBasis(int sites, int particles)
    : sites_(sites), particles_(particles), dimension_(starkqfi::dimension(sites, particles)) {
  // Every entry is bounded by dimension_, so the recurrence cannot overflow.
  counts_.setZero(sites_ + 1, particles_ + 1);
  counts_(0, 0) = 1;
  for (int k = 1; k <= sites_; ++k) {
    counts_(k, 0) = 1;
    for (int r = 1; r <= particles_; ++r) counts_(k, r) = counts_(k - 1, r) + counts_(k, r - 1);
  }

  table_.resize(dimension_, sites_);
  for (Index i = 0; i < dimension_; ++i) {
    Index rest = i;
    int remaining = particles_;
    for (int site = 0; site + 1 < sites_; ++site) {
      const int after = sites_ - site - 1;
      int v = 0;
      while (rest >= count(after, remaining - v)) {
        rest -= count(after, remaining - v);
        ++v;
      }
      table_(i, site) = v;
      remaining -= v;
    }
    table_(i, sites_ - 1) = remaining;
  }
}

bool FockBasis::contains(const FockState& state) const {
  if (state.sites() != sites_) return false;
  return state.particles() == particles_;
}

Index FockBasis::rank_unchecked(std::span<const int> occupations) const {
  Index acc = 0;
  int remaining = particles_;
  for (int site = 0; site + 1 < sites_; ++site) {
    const int after = sites_ - site - 1;
    const int n = occupations[static_cast<std::size_t>(site)];
    acc += count(after + 1, remaining) - count(after + 1, remaining - n);
    remaining -= n;
  }
  return acc;
}

Index FockBasis::rank(const FockState& state) const {
  if (!contains(state)) {
    throw std::invalid_argument("FockBasis::rank: state " + state.to_string() +
                                " is not in the (L=" + std::to_string(sites_) +
                                ", N=" + std::to_string(particles_) + ") sector");
  }
  return rank_unchecked(state.occupations());
}

FockState FockBasis::unrank(Index index) const {
  if (index < 0 || index >= dimension_) {
    throw std::out_of_range("FockBasis::unrank: index " + std::to_string(index) +
                            " outside [0, " + std::to_string(dimension_) + ")");
  }
  return state(index);
}

FockState FockBasis::state(Index index) const {
  std::vector<int> occ(static_cast<std::size_t>(sites_));
  for (int site = 0; site < sites_; ++site) occ[static_cast<std::size_t>(site)] = table_(index, site);
  return FockState(std::move(occ));
}

StateVector FockBasis::basis_vector(const FockState& state) const {
  StateVector v = StateVector::Zero(dimension_);
  v(rank(state)) = 1.0;
  return v;
}

FockState staggered_initial_state(int sites, int particles) {
  if (sites < 1) throw std::domain_error("staggered_initial_state: need at least one site");
  if (particles < 0) throw std::domain_error("staggered_initial_state: negative particle number");
  std::vector<int> occ(static_cast<std::size_t>(sites), 0);
  if (particles == 0) return FockState(std::move(occ));
  const int width = 2 * particles - 1;
  if (sites < width) {
    throw std::length_error("staggered_initial_state: " + std::to_string(particles) +
                            " particles need at least " + std::to_string(width) + " sites");
  }
  const int offset = (sites - width) / 2;
  for (int k = 0; k < particles; ++k) occ[static_cast<std::size_t>(offset + 2 * k)] = 1;
  return FockState(std::move(occ));
}

}  // namespace starkqfi
