#pragma once

// The market behind the exemplar prompt: Easy structure, six rounds,
// comments on, strategic objective, opening price 0.5; trader_1 is about to
// act in round 4 after Yes buys of 534, 500 and 500.

#include <string>

#include "infoagg/engine.hpp"

namespace fixture {

inline const char* kComment1 =
    "Based on my analysis, I believe the probability of Company X exceeding 1 million in profits "
    "is significantly higher than the current market price of 0.50 suggests. I am taking a "
    "substantial position in Yes shares.";
inline const char* kComment2 =
    "I believe the probability of Company X exceeding 1 million in profits is substantially "
    "higher than the current market price reflects. Given the market dynamics and available "
    "information, I am taking a significant position in Yes shares to capitalize on this "
    "opportunity.";
inline const char* kComment3 =
    "I believe the probability of Company X exceeding 1 million in profits is very high. My "
    "analysis indicates a substantial likelihood of success, and the current market pricing "
    "presents a compelling opportunity. I am taking a significant position in Yes shares.";
// Stored exactly as it survives in the exemplar.
inline const char* kReasoning1 =
    "I know d_a is true. For the market to resolve Yes, at least 2 of 3 dimensions must be true. "
    "Since d_a is true, I need at least 1 more dimension (d_b or d_c) to be true. The probability "
    "of at least one of d_b or d_c being true is 1 - P(both false) = 1 - 0.25 = 0.75. My true "
    "belief q = 0.75, but current price p = 0.50. This is a significant edge. I should buy Yes "
    "shares aggressively. Buying around 534 shares (50";

inline infoagg::MarketConfig config(bool disclosure = false) {
  infoagg::MarketConfig c;
  c.market_id = "5gw55w";
  c.structure = infoagg::make_structure(infoagg::StructureId::Easy);
  c.rounds = 6;
  c.initial_price = 0.5;
  c.comments_allowed = true;
  c.objective = infoagg::Objective::Strategic;
  c.disclosure = disclosure;
  return c;
}

inline infoagg::AgentContext context(bool disclosure = false) {
  using namespace infoagg;
  Market m(config(disclosure));
  const char* comments[] = {kComment1, kComment2, kComment3};
  for (std::size_t t = 0; t < 3; ++t) {
    Decision d;
    d.action = Action::Buy;
    d.side = Side::Yes;
    d.size = t == 0 ? 534 : 500;
    d.public_justification = comments[t];
    if (t == 0) d.private_reasoning = kReasoning1;
    m.execute(t, d);
  }
  auto ctx = m.context();
  const char* stamps[] = {"2026-01-10 19:13:14", "2026-01-10 19:13:59", "2026-01-10 19:14:44"};
  for (std::size_t k = 0; k < ctx.trades.size(); ++k) ctx.trades[k].timestamp = stamps[k];
  for (std::size_t k = 0; k < ctx.comments.size(); ++k) ctx.comments[k].timestamp = stamps[k];
  return ctx;
}

} // namespace fixture
