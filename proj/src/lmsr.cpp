#include "infoagg/lmsr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace infoagg {

namespace {

double log_sum_exp(double a, double b) {
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// ln(1 / (1 + e^{-x}))
double log_sigmoid(double x) {
  return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

} // namespace

std::string_view side_name(Side s) { return s == Side::Yes ? "Yes" : "No"; }

double MarketState::price_of_yes() const { return sigmoid(beta * (q_yes - q_no)); }

double MarketState::price_of_no() const { return 1.0 - price_of_yes(); }

double MarketState::log_price(Side s) const {
  const double x = beta * (q_yes - q_no);
  return s == Side::Yes ? log_sigmoid(x) : log_sigmoid(-x);
}

double price_of_yes(const MarketState& m) { return m.price_of_yes(); }

double cost_function(const MarketState& m) {
  return log_sum_exp(m.beta * m.q_yes, m.beta * m.q_no) / m.beta;
}

MarketState apply(const MarketState& m, const TradeDelta& d) {
  MarketState out = m;
  (d.side == Side::Yes ? out.q_yes : out.q_no) += d.shares;
  return out;
}

double trade_cost(const MarketState& m, const TradeDelta& d) {
  if (d.shares == 0.0) return 0.0;
  const double base = std::min(m.q_yes, m.q_no);
  // Shift both quantities by the same amount; C(q + c) = C(q) + c.
  MarketState shifted{m.q_yes - base, m.q_no - base, m.beta};
  return cost_function(apply(shifted, d)) - cost_function(shifted);
}

MarketState offset_for_price(double p0, double beta) {
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("initial price must lie in (0,1)");
  if (!(beta > 0.0)) throw std::invalid_argument("liquidity parameter must be positive");
  const double diff = std::log(p0 / (1.0 - p0)) / beta;
  MarketState m;
  m.beta = beta;
  if (diff >= 0) m.q_yes = diff; else m.q_no = -diff;
  return m;
}

double clip_target(double target, double clamp) {
  return std::clamp(target, clamp, 1.0 - clamp);
}

TargetMove shares_to_target(const MarketState& m, double target, double clamp) {
  const double t = clip_target(target, clamp);
  const double target_diff = std::log(t / (1.0 - t)) / m.beta;
  const double delta = target_diff - (m.q_yes - m.q_no);
  TargetMove move;
  move.side = delta >= 0 ? Side::Yes : Side::No;
  move.exact = std::abs(delta);
  // Truncate toward zero; values within 1e-9 of an integer count as that integer.
  move.whole = static_cast<std::int64_t>(std::floor(move.exact + 1e-9));
  return move;
}

double settle_profit(Side side, double shares, double cost, Side outcome) {
  return (side == outcome ? shares : 0.0) - cost;
}

std::int64_t max_affordable(const MarketState& m, double cash, Side side) {
  if (!(cash > 0.0)) return 0;
  auto cost_of = [&](std::int64_t n) {
    return trade_cost(m, TradeDelta{side, static_cast<double>(n)});
  };
  if (cost_of(1) > cash) return 0;
  std::int64_t lo = 1;
  std::int64_t hi = 2;
  constexpr std::int64_t kCap = std::int64_t{1} << 52;
  while (cost_of(hi) <= cash) {
    lo = hi;
    if (hi >= kCap) return hi;
    hi *= 2;
  }
  // cost_of(lo) <= cash < cost_of(hi)
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (cost_of(mid) <= cash) lo = mid; else hi = mid;
  }
  return lo;
}

namespace {

ImpactRow make_row(const MarketState& m, Side side, bool buy, std::string_view qualifier,
                   std::int64_t shares) {
  const TradeDelta d{side, buy ? static_cast<double>(shares) : -static_cast<double>(shares)};
  const MarketState after = apply(m, d);
  ImpactRow row;
  row.buy = buy;
  row.qualifier = qualifier;
  row.shares = shares;
  row.price_before = m.price(side);
  row.price_after = after.price(side);
  row.percent_change = std::expm1(after.log_price(side) - m.log_price(side)) * 100.0;
  row.cost = trade_cost(m, d);
  return row;
}

SideImpact side_impact(const MarketState& m, const Portfolio& p, Side side) {
  static constexpr std::int64_t kFixed[] = {1, 5, 10, 20};
  static constexpr struct { double fraction; std::string_view label; } kFractions[] = {
      {0.25, "around 25%"}, {0.50, "around 50%"}, {0.75, "around 75%"}};

  SideImpact out;
  out.side = side;
  out.max_buy = max_affordable(m, p.cash, side);
  out.max_buy_cost = trade_cost(m, TradeDelta{side, static_cast<double>(out.max_buy)});
  out.max_sell = std::max<std::int64_t>(0, p.holding(side));

  for (bool buy : {true, false}) {
    const std::int64_t bound = buy ? out.max_buy : out.max_sell;
    if (bound <= 0) continue;
    for (auto n : kFixed)
      if (n <= bound) out.rows.push_back(make_row(m, side, buy, "", n));
    for (const auto& f : kFractions) {
      const auto n = static_cast<std::int64_t>(std::floor(f.fraction * static_cast<double>(bound)));
      if (n >= 1) out.rows.push_back(make_row(m, side, buy, f.label, n));
    }
    out.rows.push_back(make_row(m, side, buy, buy ? "max buyable" : "max sellable", bound));
  }
  return out;
}

} // namespace

ImpactPreview impact_preview(const MarketState& m, const Portfolio& portfolio) {
  return ImpactPreview{side_impact(m, portfolio, Side::Yes), side_impact(m, portfolio, Side::No)};
}

} // namespace infoagg
