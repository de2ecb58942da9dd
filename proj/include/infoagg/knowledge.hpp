#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "infoagg/state_set.hpp"

namespace infoagg {

// Posterior comparison tolerance used when matching announced prices to
// cell posteriors. Preset posteriors are dyadic rationals.
inline constexpr double kPosteriorTolerance = 1e-9;

class KnowledgeError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class StructureId { Easy, Medium, Hard, VeryHard };

inline constexpr StructureId kAllPresets[] = {StructureId::Easy, StructureId::Medium,
                                              StructureId::Hard, StructureId::VeryHard};

std::string_view structure_code(StructureId id);   // "t3s111y2", ...
std::string_view structure_label(StructureId id);  // "Easy", ...
int complexity_level(StructureId id);              // 1 (easiest) .. 4
// Accepts either the label (case-insensitive) or the structure code.
std::optional<StructureId> parse_structure_id(std::string_view text);

// Binary signal space. State k enumerates realizations in descending binary
// order, so for three signals a = (1,1,1), b = (1,1,0), ..., h = (0,0,0).
struct StateSpace {
  std::vector<std::string> signal_names;
  std::vector<std::string> state_names;

  static StateSpace binary(std::vector<std::string> signals);

  std::size_t size() const noexcept { return state_names.size(); }
  int signal_value(StateIndex state, std::size_t signal) const;
  std::optional<StateIndex> find(std::string_view state_name) const;
};

struct Prior {
  std::vector<double> weights;

  static Prior uniform(std::size_t n);
  void validate(std::size_t n) const;
};

class Partition {
public:
  Partition() = default;
  Partition(std::size_t universe, std::vector<StateSet> cells);

  // Cells are the level sets of the listed signals, ordered by first member.
  static Partition induced_by_signals(const StateSpace& space, std::span<const std::size_t> signals);

  const std::vector<StateSet>& cells() const noexcept { return cells_; }
  std::size_t cell_index_of(StateIndex s) const { return owner_.at(s); }
  const StateSet& cell_of(StateIndex s) const { return cells_[cell_index_of(s)]; }

private:
  std::vector<StateSet> cells_;
  std::vector<std::size_t> owner_;
};

struct Security {
  std::vector<double> payoff;
  double operator()(StateIndex s) const { return payoff.at(s); }
};

using PublicEvent = StateSet;

struct InfoStructure {
  std::string name;
  StateSpace space;
  Prior prior;
  std::vector<Partition> partitions;  // one per trader
  Security security;
  StateIndex true_state = 0;
  std::optional<StructureId> preset;
  // Signals each trader observes, when the partition is signal-induced.
  std::vector<std::vector<std::size_t>> observed_signals;

  std::size_t trader_count() const noexcept { return partitions.size(); }
  std::size_t state_count() const noexcept { return space.size(); }
  PublicEvent everything() const { return StateSet::full(space.size()); }
  InfoStructure with_true_state(StateIndex s) const;

  bool join_is_discrete() const;
  // Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

InfoStructure make_structure(StructureId preset);

double event_mass(const InfoStructure& structure, const StateSet& event);

// E[X | event] under the structure's prior.
double conditional_expectation(const InfoStructure& structure, const StateSet& event);

// Posterior of `trader` (0-based) at the true state given a public event.
double trader_posterior(const InfoStructure& structure, std::size_t trader,
                        const PublicEvent& public_event);

// Observers keep the trader's cells whose posterior (given the public event)
// equals the announced price.
PublicEvent refine_public_event(const InfoStructure& structure, std::size_t trader,
                                double announced, const PublicEvent& public_event,
                                double tolerance = kPosteriorTolerance);

// Distinct posteriors the trader could hold across cells that meet the
// public event with positive mass, ascending.
std::vector<double> candidate_posteriors(const InfoStructure& structure, std::size_t trader,
                                         const PublicEvent& public_event);

struct TraceStep {
  int round = 0;           // 1-based
  std::size_t trader = 0;  // 0-based
  double price = 0.0;
  PublicEvent public_event;
};

// Myopic common-knowledge dynamics; `rounds` defaults to one turn per trader.
std::vector<TraceStep> myopic_trace(const InfoStructure& structure, int rounds = 0);

// "{a,b,c,d}" using the state names.
std::string describe_event(const InfoStructure& structure, const StateSet& event);

} // namespace infoagg
