#include "infoagg/engine.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <stdexcept>

#include <fmt/format.h>

#include "infoagg/prompt.hpp"

namespace infoagg {

namespace {

// 2026-01-01 00:00:00 UTC
constexpr std::time_t kLogicalEpoch = 1767225600;
constexpr int kSecondsPerTurn = 45;

std::string format_utc(std::time_t t) {
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%d %H:%M:%S", &tm);
  return buf;
}

void append_note(std::string& note, std::string_view extra) {
  if (extra.empty()) return;
  if (!note.empty()) note += "; ";
  note += extra;
}

} // namespace

std::string logical_timestamp(int turn_index) {
  return format_utc(kLogicalEpoch + static_cast<std::time_t>(turn_index) * kSecondsPerTurn);
}

std::string wall_timestamp() {
  return format_utc(std::chrono::system_clock::to_time_t(std::chrono::system_clock::now()));
}

double constant_sum_profit(const MarketState& initial, const MarketState& final_state,
                           double outcome) {
  const double payout = outcome * (final_state.q_yes - initial.q_yes) +
                        (1.0 - outcome) * (final_state.q_no - initial.q_no);
  return payout - (cost_function(final_state) - cost_function(initial));
}

void MarketConfig::validate() const {
  structure.validate();
  const auto traders = static_cast<int>(structure.trader_count());
  if (rounds <= 0 || rounds % traders != 0)
    throw std::invalid_argument("rounds must be a positive multiple of the trader count");
  if (!(initial_price > 0.0 && initial_price < 1.0))
    throw std::invalid_argument("initial price must lie in (0,1)");
  if (!(beta > 0.0)) throw std::invalid_argument("liquidity parameter must be positive");
  if (!(starting_cash > 0.0)) throw std::invalid_argument("starting cash must be positive");
  for (double x : structure.security.payoff)
    if (x < 0.0 || x > 1.0) throw std::invalid_argument("security payoff must lie in [0,1]");
  if (instruments.yes == instruments.no)
    throw std::invalid_argument("instrument ids must differ");
  if (!intelligence.empty() && intelligence.size() != structure.trader_count())
    throw std::invalid_argument("intelligence list must have one entry per trader");
}

Market::Market(MarketConfig config) : config_(std::move(config)) {
  config_.validate();
  state_ = offset_for_price(config_.initial_price, config_.beta);
  portfolios_.assign(config_.structure.trader_count(), Portfolio{config_.starting_cash, 0, 0});
  transcript_.config = config_;
  transcript_.initial_state = state_;
  transcript_.final_state = state_;
  transcript_.final_price = state_.price_of_yes();
}

std::string Market::stamp(int turn_index) const {
  return config_.wall_clock ? wall_timestamp() : logical_timestamp(turn_index);
}

AgentContext Market::context() const {
  if (finished()) throw std::logic_error("market has no remaining turns");
  const auto trader = next_trader();
  AgentContext ctx;
  ctx.market_id = config_.market_id;
  ctx.trader = trader;
  ctx.trader_count = trader_count();
  ctx.question = std::string(market_question());
  ctx.round = next_round();
  ctx.total_rounds = config_.rounds;
  ctx.comments_allowed = config_.comments_allowed;
  ctx.objective = config_.objective;
  ctx.public_info = public_information_text(config_.structure);
  ctx.private_info = private_information_text(config_.structure, trader);
  ctx.trades = transcript_.trades;
  if (config_.comments_allowed) ctx.comments = transcript_.comments;
  for (const auto& r : transcript_.reasonings)
    if (r.trader == trader) ctx.own_reasonings.push_back(r);
  ctx.portfolio = portfolios_[trader];
  ctx.market = state_;
  ctx.impact = impact_preview(state_, ctx.portfolio);
  ctx.instruments = config_.instruments;
  if (config_.disclosure) {
    DisclosureInfo info;
    info.trader = trader;
    info.intelligence = config_.intelligence;
    if (info.intelligence.empty()) info.intelligence.resize(trader_count());
    if (config_.structure.preset) info.complexity_level = complexity_level(*config_.structure.preset);
    ctx.disclosure = disclosure_block(info);
  }
  return ctx;
}

const Trade& Market::execute(std::size_t trader, const Decision& decision, std::string note) {
  if (finished()) throw std::logic_error("market has no remaining turns");
  if (trader != next_trader()) throw std::logic_error("trader acted out of turn");

  Trade t;
  t.round = next_round();
  t.trader = trader;
  t.action = decision.action;
  t.side = decision.side;
  t.requested = decision.action == Action::Hold ? 0 : decision.size;
  t.price_before = state_.price_of_yes();
  t.timestamp = stamp(t.round - 1);

  auto& pf = portfolios_[trader];
  if (decision.action != Action::Hold && decision.size < 0) {
    append_note(note, "malformed decision: negative size; converted to hold");
    t.action = Action::Hold;
    t.requested = 0;
  }

  std::int64_t shares = 0;
  if (t.action == Action::Buy) {
    shares = std::min(t.requested, max_affordable(state_, pf.cash, t.side));
  } else if (t.action == Action::Sell) {
    shares = std::min(t.requested, pf.holding(t.side));
  }
  if (shares < t.requested) append_note(note, fmt::format("clamped from {} to {}", t.requested, shares));

  if (shares > 0) {
    const TradeDelta d{t.side, t.action == Action::Buy ? static_cast<double>(shares)
                                                       : -static_cast<double>(shares)};
    t.cost = trade_cost(state_, d);
    state_ = apply(state_, d);
    pf.cash -= t.cost;
    pf.holding(t.side) += t.action == Action::Buy ? shares : -shares;
  }
  t.executed = shares;
  t.price_after = state_.price_of_yes();
  t.cash_after = pf.cash;
  t.note = std::move(note);

  if (config_.comments_allowed && !decision.public_justification.empty())
    transcript_.comments.push_back(Comment{t.round, trader, decision.public_justification, t.timestamp});
  if (!decision.private_reasoning.empty())
    transcript_.reasonings.push_back(Reasoning{t.round, trader, decision.private_reasoning});

  transcript_.trades.push_back(std::move(t));
  transcript_.decisions.push_back(decision);
  transcript_.final_state = state_;
  transcript_.final_price = state_.price_of_yes();
  return transcript_.trades.back();
}

void Market::record_prompt(std::string prompt, std::string response) {
  const int round = transcript_.trades.empty() ? 0 : transcript_.trades.back().round;
  const std::size_t trader = transcript_.trades.empty() ? 0 : transcript_.trades.back().trader;
  transcript_.prompts.push_back(PromptRecord{round, trader, std::move(prompt), std::move(response)});
}

const std::vector<double>& Market::resolve() {
  if (resolved_) return transcript_.profits;
  const auto& s = config_.structure;
  const double y = s.security.payoff[s.true_state];
  transcript_.outcome = y;
  transcript_.portfolios = portfolios_;
  transcript_.profits.clear();
  double total = 0.0;
  for (const auto& pf : portfolios_) {
    const double profit = y * static_cast<double>(pf.yes_shares) +
                          (1.0 - y) * static_cast<double>(pf.no_shares) + pf.cash -
                          config_.starting_cash;
    transcript_.profits.push_back(profit);
    total += profit;
  }
  transcript_.conservation_residual =
      total - constant_sum_profit(transcript_.initial_state, state_, y);
  resolved_ = true;
  return transcript_.profits;
}

Transcript run_market(const MarketConfig& config, std::span<Agent* const> agents) {
  Market market(config);
  if (agents.size() != market.trader_count())
    throw std::invalid_argument("need exactly one agent per trader");

  while (!market.finished()) {
    const auto trader = market.next_trader();
    const auto ctx = market.context();
    AgentReply reply;
    try {
      reply = agents[trader]->decide(ctx);
    } catch (const std::exception& e) {
      reply.decision.reset();
      reply.note = fmt::format("agent failure: {}", e.what());
    }
    std::string note = reply.note;
    Decision decision;
    if (reply.decision) {
      decision = *reply.decision;
    } else if (note.empty()) {
      note = "agent returned no decision";
    }
    market.execute(trader, decision, std::move(note));
    if (!reply.prompt.empty() || !reply.response.empty())
      market.record_prompt(std::move(reply.prompt), std::move(reply.response));
  }
  market.resolve();
  return market.transcript();
}

Transcript run_market(const MarketConfig& config,
                      const std::vector<std::unique_ptr<Agent>>& agents) {
  std::vector<Agent*> raw;
  raw.reserve(agents.size());
  for (const auto& a : agents) raw.push_back(a.get());
  return run_market(config, std::span<Agent* const>(raw));
}

} // namespace infoagg
