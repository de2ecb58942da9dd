#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace infoagg {

using StateIndex = std::size_t;

// Fixed-universe bitmask over state indices [0, universe).
class StateSet {
public:
  StateSet() = default;
  explicit StateSet(std::size_t universe);
  StateSet(std::size_t universe, std::initializer_list<StateIndex> members);

  static StateSet full(std::size_t universe);

  std::size_t universe() const noexcept { return universe_; }
  bool contains(StateIndex s) const noexcept;
  void insert(StateIndex s);
  void erase(StateIndex s);

  std::size_t count() const noexcept;
  bool empty() const noexcept;
  bool is_subset_of(const StateSet& other) const noexcept;

  std::vector<StateIndex> members() const;

  template <typename F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits != 0) {
        const int tz = __builtin_ctzll(bits);
        f(static_cast<StateIndex>(w * 64 + static_cast<std::size_t>(tz)));
        bits &= bits - 1;
      }
    }
  }

  StateSet& operator&=(const StateSet& other);
  StateSet& operator|=(const StateSet& other);
  friend StateSet operator&(StateSet a, const StateSet& b) { return a &= b; }
  friend StateSet operator|(StateSet a, const StateSet& b) { return a |= b; }
  friend bool operator==(const StateSet&, const StateSet&) = default;

private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

} // namespace infoagg
