#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "infoagg/lmsr.hpp"

namespace infoagg {

enum class Action { Buy, Sell, Hold };
enum class Objective { Myopic, Strategic };

std::string_view action_name(Action a);        // "BUY" / "SELL" / "HOLD"
std::string_view objective_name(Objective o);  // "myopic" / "strategic"
std::optional<Action> parse_action(std::string_view text);
std::optional<Objective> parse_objective(std::string_view text);

// "trader_1" for trader index 0.
std::string trader_name(std::size_t trader);

struct Decision {
  Action action = Action::Hold;
  Side side = Side::Yes;
  std::int64_t size = 0;
  std::string public_justification;
  std::string private_reasoning;

  static Decision hold(std::string reasoning = {}) {
    Decision d;
    d.private_reasoning = std::move(reasoning);
    return d;
  }
};

// Opaque per-market instrument identifiers for the Yes and No shares.
struct InstrumentIds {
  std::int64_t yes = 4702;
  std::int64_t no = 4703;

  std::int64_t id(Side s) const { return s == Side::Yes ? yes : no; }
  std::optional<Side> side_of(std::int64_t id) const {
    if (id == yes) return Side::Yes;
    if (id == no) return Side::No;
    return std::nullopt;
  }
};

struct Trade {
  int round = 0;             // 1-based
  std::size_t trader = 0;    // 0-based
  Action action = Action::Hold;
  Side side = Side::Yes;
  std::int64_t requested = 0;
  std::int64_t executed = 0;
  double price_before = 0.0;  // Yes price
  double price_after = 0.0;
  double cost = 0.0;          // cash paid; negative when selling
  double cash_after = 0.0;
  std::string timestamp;
  std::string note;
};

struct Comment {
  int round = 0;
  std::size_t trader = 0;
  std::string text;
  std::string timestamp;
};

struct Reasoning {
  int round = 0;
  std::size_t trader = 0;
  std::string text;
};

} // namespace infoagg
