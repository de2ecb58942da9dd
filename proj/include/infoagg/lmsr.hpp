#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace infoagg {

inline constexpr double kDefaultBeta = 0.01;
// Myopic targets of 0 or 1 are clipped into [kTargetClamp, 1 - kTargetClamp].
inline constexpr double kTargetClamp = 5e-5;

enum class Side { Yes, No };

inline Side opposite(Side s) { return s == Side::Yes ? Side::No : Side::Yes; }
std::string_view side_name(Side s);  // "Yes" / "No"

// Outstanding Yes/No quantities of a binary LMSR market.
struct MarketState {
  double q_yes = 0.0;
  double q_no = 0.0;
  double beta = kDefaultBeta;

  double price_of_yes() const;
  // Defined as 1 - price_of_yes() so the pair sums to one exactly.
  double price_of_no() const;
  double price(Side s) const { return s == Side::Yes ? price_of_yes() : price_of_no(); }
  // ln(price(s)), accurate even when the price underflows in linear space.
  double log_price(Side s) const;
  double shares(Side s) const { return s == Side::Yes ? q_yes : q_no; }
};

// Signed share change on one side: positive buys, negative sells.
struct TradeDelta {
  Side side = Side::Yes;
  double shares = 0.0;
};

double price_of_yes(const MarketState& m);

// C(q) = (1/beta) ln(e^{beta q_yes} + e^{beta q_no})
double cost_function(const MarketState& m);

MarketState apply(const MarketState& m, const TradeDelta& d);

// C(q + d) - C(q): positive for buys, negative (cash returned) for sells.
double trade_cost(const MarketState& m, const TradeDelta& d);

// Market maker offset shares for an opening price; throws std::invalid_argument
// unless 0 < p0 < 1.
MarketState offset_for_price(double p0, double beta = kDefaultBeta);

double clip_target(double target, double clamp = kTargetClamp);

struct TargetMove {
  Side side = Side::Yes;    // side to buy
  double exact = 0.0;       // shares needed before truncation (>= 0)
  std::int64_t whole = 0;   // truncated toward zero
};

// Shares to buy so the Yes price reaches clip(target). Buys Yes when the
// target is above the current price and No otherwise.
TargetMove shares_to_target(const MarketState& m, double target, double clamp = kTargetClamp);

// Settlement of a single position at resolution.
double settle_profit(Side side, double shares, double cost, Side outcome);

// Largest whole number of `side` shares whose purchase costs at most `cash`.
std::int64_t max_affordable(const MarketState& m, double cash, Side side);

struct Portfolio {
  double cash = 0.0;
  std::int64_t yes_shares = 0;
  std::int64_t no_shares = 0;

  std::int64_t holding(Side s) const { return s == Side::Yes ? yes_shares : no_shares; }
  std::int64_t& holding(Side s) { return s == Side::Yes ? yes_shares : no_shares; }
};

struct ImpactRow {
  bool buy = true;
  std::string_view qualifier;  // "", "around 25%", "max buyable", ...
  std::int64_t shares = 0;
  double price_before = 0.0;   // price of the traded side
  double price_after = 0.0;
  double percent_change = 0.0; // relative change of the traded side's price
  double cost = 0.0;           // cash paid (negative for sells)
};

struct SideImpact {
  Side side = Side::Yes;
  std::int64_t max_buy = 0;
  double max_buy_cost = 0.0;
  std::int64_t max_sell = 0;
  std::vector<ImpactRow> rows;
};

struct ImpactPreview {
  SideImpact yes;
  SideImpact no;
  const SideImpact& of(Side s) const { return s == Side::Yes ? yes : no; }
};

// Buy/sell 1, 5, 10, 20 shares and about 25/50/75/100% of the maximum
// buyable or sellable quantity, per side.
ImpactPreview impact_preview(const MarketState& m, const Portfolio& portfolio);

} // namespace infoagg
