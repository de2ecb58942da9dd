#include "infoagg/types.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include <fmt/format.h>

namespace infoagg {

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

} // namespace

std::string_view action_name(Action a) {
  switch (a) {
    case Action::Buy: return "BUY";
    case Action::Sell: return "SELL";
    case Action::Hold: return "HOLD";
  }
  return "HOLD";
}

std::string_view objective_name(Objective o) {
  return o == Objective::Myopic ? "myopic" : "strategic";
}

std::optional<Action> parse_action(std::string_view text) {
  const auto t = upper(text);
  if (t == "BUY") return Action::Buy;
  if (t == "SELL") return Action::Sell;
  if (t == "HOLD") return Action::Hold;
  return std::nullopt;
}

std::optional<Objective> parse_objective(std::string_view text) {
  const auto t = upper(text);
  if (t == "MYOPIC") return Objective::Myopic;
  if (t == "STRATEGIC") return Objective::Strategic;
  return std::nullopt;
}

std::string trader_name(std::size_t trader) { return fmt::format("trader_{}", trader + 1); }

} // namespace infoagg
