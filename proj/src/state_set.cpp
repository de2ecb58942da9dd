#include "infoagg/state_set.hpp"

#include <bit>
#include <stdexcept>

namespace infoagg {

StateSet::StateSet(std::size_t universe)
    : universe_(universe), words_((universe + 63) / 64, 0) {}

StateSet::StateSet(std::size_t universe, std::initializer_list<StateIndex> members)
    : StateSet(universe) {
  for (auto s : members) insert(s);
}

StateSet StateSet::full(std::size_t universe) {
  StateSet s(universe);
  for (std::size_t i = 0; i < universe; ++i) s.insert(i);
  return s;
}

bool StateSet::contains(StateIndex s) const noexcept {
  if (s >= universe_) return false;
  return (words_[s / 64] >> (s % 64)) & 1u;
}

void StateSet::insert(StateIndex s) {
  if (s >= universe_) throw std::out_of_range("state index outside universe");
  words_[s / 64] |= std::uint64_t{1} << (s % 64);
}

void StateSet::erase(StateIndex s) {
  if (s >= universe_) return;
  words_[s / 64] &= ~(std::uint64_t{1} << (s % 64));
}

std::size_t StateSet::count() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

bool StateSet::empty() const noexcept {
  for (auto w : words_)
    if (w != 0) return false;
  return true;
}

bool StateSet::is_subset_of(const StateSet& other) const noexcept {
  if (universe_ != other.universe_) return false;
  for (std::size_t i = 0; i < words_.size(); ++i)
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  return true;
}

std::vector<StateIndex> StateSet::members() const {
  std::vector<StateIndex> out;
  out.reserve(count());
  for_each([&](StateIndex s) { out.push_back(s); });
  return out;
}

StateSet& StateSet::operator&=(const StateSet& other) {
  if (universe_ != other.universe_) throw std::invalid_argument("state set universe mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

StateSet& StateSet::operator|=(const StateSet& other) {
  if (universe_ != other.universe_) throw std::invalid_argument("state set universe mismatch");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

} // namespace infoagg
