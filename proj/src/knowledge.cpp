#include "infoagg/knowledge.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

namespace infoagg {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string default_state_name(std::size_t k, std::size_t n) {
  if (n <= 26) return std::string(1, static_cast<char>('a' + k));
  return fmt::format("s{}", k);
}

} // namespace

std::string_view structure_code(StructureId id) {
  switch (id) {
    case StructureId::Easy: return "t3s111y2";
    case StructureId::Medium: return "t3s110";
    case StructureId::Hard: return "t3s111";
    case StructureId::VeryHard: return "t3s111o2ye2";
  }
  return "";
}

std::string_view structure_label(StructureId id) {
  switch (id) {
    case StructureId::Easy: return "Easy";
    case StructureId::Medium: return "Medium";
    case StructureId::Hard: return "Hard";
    case StructureId::VeryHard: return "VeryHard";
  }
  return "";
}

int complexity_level(StructureId id) { return static_cast<int>(id) + 1; }

std::optional<StructureId> parse_structure_id(std::string_view text) {
  const auto t = lower(text);
  for (auto id : kAllPresets) {
    if (t == lower(structure_label(id)) || t == structure_code(id)) return id;
  }
  if (t == "very_hard" || t == "very-hard") return StructureId::VeryHard;
  return std::nullopt;
}

StateSpace StateSpace::binary(std::vector<std::string> signals) {
  if (signals.empty() || signals.size() > 16)
    throw std::invalid_argument("state space needs between 1 and 16 signals");
  StateSpace sp;
  sp.signal_names = std::move(signals);
  const std::size_t n = std::size_t{1} << sp.signal_names.size();
  sp.state_names.reserve(n);
  for (std::size_t k = 0; k < n; ++k) sp.state_names.push_back(default_state_name(k, n));
  return sp;
}

int StateSpace::signal_value(StateIndex state, std::size_t signal) const {
  const std::size_t n = signal_names.size();
  if (signal >= n || state >= size()) throw std::out_of_range("signal or state out of range");
  const std::size_t code = (size() - 1) - state;
  return static_cast<int>((code >> (n - 1 - signal)) & 1u);
}

std::optional<StateIndex> StateSpace::find(std::string_view state_name) const {
  for (std::size_t k = 0; k < state_names.size(); ++k)
    if (state_names[k] == state_name) return k;
  return std::nullopt;
}

Prior Prior::uniform(std::size_t n) {
  return Prior{std::vector<double>(n, 1.0 / static_cast<double>(n))};
}

void Prior::validate(std::size_t n) const {
  if (weights.size() != n) throw std::invalid_argument("prior size does not match state space");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("prior weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("prior weights must sum to 1");
}

Partition::Partition(std::size_t universe, std::vector<StateSet> cells)
    : cells_(std::move(cells)), owner_(universe, universe) {
  for (std::size_t c = 0; c < cells_.size(); ++c) {
    const auto& cell = cells_[c];
    if (cell.universe() != universe) throw std::invalid_argument("partition cell has wrong universe");
    if (cell.empty()) throw std::invalid_argument("partition cells must be nonempty");
    cell.for_each([&](StateIndex s) {
      if (owner_[s] != universe) throw std::invalid_argument("partition cells must be disjoint");
      owner_[s] = c;
    });
  }
  for (std::size_t s = 0; s < universe; ++s)
    if (owner_[s] == universe) throw std::invalid_argument("partition must cover every state");
}

Partition Partition::induced_by_signals(const StateSpace& space,
                                        std::span<const std::size_t> signals) {
  std::vector<StateSet> cells;
  std::vector<std::vector<int>> keys;
  for (StateIndex s = 0; s < space.size(); ++s) {
    std::vector<int> key;
    for (auto sig : signals) key.push_back(space.signal_value(s, sig));
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) {
      keys.push_back(key);
      cells.emplace_back(space.size());
      cells.back().insert(s);
    } else {
      cells[static_cast<std::size_t>(it - keys.begin())].insert(s);
    }
  }
  return Partition(space.size(), std::move(cells));
}

InfoStructure InfoStructure::with_true_state(StateIndex s) const {
  if (s >= space.size()) throw std::out_of_range("true state out of range");
  InfoStructure copy = *this;
  copy.true_state = s;
  return copy;
}

bool InfoStructure::join_is_discrete() const {
  for (StateIndex s = 0; s < space.size(); ++s) {
    auto meet = everything();
    for (const auto& p : partitions) meet &= p.cell_of(s);
    if (meet.count() != 1) return false;
  }
  return true;
}

void InfoStructure::validate() const {
  const auto n = space.size();
  if (n == 0) throw std::invalid_argument("empty state space");
  prior.validate(n);
  if (partitions.empty()) throw std::invalid_argument("structure needs at least one trader");
  for (const auto& p : partitions) {
    std::size_t covered = 0;
    for (const auto& c : p.cells()) {
      if (c.universe() != n) throw std::invalid_argument("partition universe mismatch");
      covered += c.count();
    }
    if (covered != n) throw std::invalid_argument("partition does not cover the state space");
  }
  if (security.payoff.size() != n) throw std::invalid_argument("payoff size does not match state space");
  for (double x : security.payoff)
    if (!std::isfinite(x)) throw std::invalid_argument("payoff must be finite");
  if (true_state >= n) throw std::invalid_argument("true state out of range");
  if (!observed_signals.empty() && observed_signals.size() != partitions.size())
    throw std::invalid_argument("observed signal list must have one entry per trader");
  if (!join_is_discrete())
    throw std::invalid_argument("pooled trader information must identify every state");
}

InfoStructure make_structure(StructureId preset) {
  InfoStructure s;
  s.name = std::string(structure_code(preset));
  s.preset = preset;
  s.space = StateSpace::binary({"d_a", "d_b", "d_c"});
  s.prior = Prior::uniform(s.space.size());

  if (preset == StructureId::VeryHard) {
    s.observed_signals = {{1, 2}, {0, 2}, {0, 1}};
  } else {
    s.observed_signals = {{0}, {1}, {2}};
  }
  for (const auto& sig : s.observed_signals)
    s.partitions.push_back(Partition::induced_by_signals(s.space, sig));

  switch (preset) {
    case StructureId::Easy:
      s.security.payoff = {1, 1, 1, 0, 1, 0, 0, 0};
      s.true_state = 0;
      break;
    case StructureId::Medium:
      s.security.payoff = {1, 0, 0, 0, 0, 0, 0, 0};
      s.true_state = 1;
      break;
    case StructureId::Hard:
      s.security.payoff = {1, 0, 0, 0, 0, 0, 0, 0};
      s.true_state = 0;
      break;
    case StructureId::VeryHard:
      s.security.payoff = {0, 1, 1, 0, 1, 0, 0, 0};
      s.true_state = 0;
      break;
  }
  return s;
}

double event_mass(const InfoStructure& structure, const StateSet& event) {
  double mass = 0.0;
  event.for_each([&](StateIndex s) { mass += structure.prior.weights[s]; });
  return mass;
}

double conditional_expectation(const InfoStructure& structure, const StateSet& event) {
  double mass = 0.0;
  double value = 0.0;
  event.for_each([&](StateIndex s) {
    mass += structure.prior.weights[s];
    value += structure.prior.weights[s] * structure.security.payoff[s];
  });
  if (!(mass > 0.0)) throw KnowledgeError("conditioning on null event");
  return value / mass;
}

double trader_posterior(const InfoStructure& structure, std::size_t trader,
                        const PublicEvent& public_event) {
  const auto& cell = structure.partitions.at(trader).cell_of(structure.true_state);
  const auto known = cell & public_event;
  if (!(event_mass(structure, known) > 0.0)) throw KnowledgeError("inconsistent public event");
  return conditional_expectation(structure, known);
}

PublicEvent refine_public_event(const InfoStructure& structure, std::size_t trader,
                                double announced, const PublicEvent& public_event,
                                double tolerance) {
  PublicEvent kept(structure.state_count());
  for (const auto& cell : structure.partitions.at(trader).cells()) {
    const auto piece = cell & public_event;
    if (!(event_mass(structure, piece) > 0.0)) continue;
    if (std::abs(conditional_expectation(structure, piece) - announced) <= tolerance) kept |= piece;
  }
  if (kept.empty()) throw KnowledgeError("announcement inconsistent with structure");
  return kept;
}

std::vector<double> candidate_posteriors(const InfoStructure& structure, std::size_t trader,
                                         const PublicEvent& public_event) {
  std::vector<double> out;
  for (const auto& cell : structure.partitions.at(trader).cells()) {
    const auto piece = cell & public_event;
    if (!(event_mass(structure, piece) > 0.0)) continue;
    const double e = conditional_expectation(structure, piece);
    const bool seen = std::any_of(out.begin(), out.end(), [&](double x) {
      return std::abs(x - e) <= kPosteriorTolerance;
    });
    if (!seen) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<TraceStep> myopic_trace(const InfoStructure& structure, int rounds) {
  const int m = static_cast<int>(structure.trader_count());
  if (rounds <= 0) rounds = m;
  std::vector<TraceStep> trace;
  trace.reserve(static_cast<std::size_t>(rounds));
  auto pub = structure.everything();
  for (int r = 1; r <= rounds; ++r) {
    const auto trader = static_cast<std::size_t>((r - 1) % m);
    const double price = trader_posterior(structure, trader, pub);
    pub = refine_public_event(structure, trader, price, pub);
    trace.push_back(TraceStep{r, trader, price, pub});
  }
  return trace;
}

std::string describe_event(const InfoStructure& structure, const StateSet& event) {
  std::string out = "{";
  bool first = true;
  event.for_each([&](StateIndex s) {
    if (!first) out += ',';
    out += structure.space.state_names[s];
    first = false;
  });
  out += '}';
  return out;
}

} // namespace infoagg
