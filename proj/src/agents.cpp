#include "infoagg/agents.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <fmt/format.h>

#include "infoagg/lmsr.hpp"

namespace infoagg {

MyopicOracleAgent::MyopicOracleAgent(InfoStructure structure, std::size_t trader, double clamp)
    : structure_(std::move(structure)), trader_(trader), clamp_(clamp) {
  if (trader_ >= structure_.trader_count()) throw std::out_of_range("trader index out of range");
}

PublicEvent MyopicOracleAgent::public_event(const AgentContext& ctx) const {
  auto pub = structure_.everything();
  for (const auto& t : ctx.trades) {
    const auto candidates = candidate_posteriors(structure_, t.trader, pub);
    if (candidates.empty()) throw KnowledgeError("inconsistent public event");
    double best = candidates.front();
    double best_gap = std::numeric_limits<double>::infinity();
    for (double c : candidates) {
      const double gap = std::abs(clip_target(c, clamp_) - t.price_after);
      if (gap < best_gap) {
        best_gap = gap;
        best = c;
      }
    }
    pub = refine_public_event(structure_, t.trader, best, pub);
  }
  return pub;
}

AgentReply MyopicOracleAgent::decide(const AgentContext& ctx) {
  AgentReply reply;
  double posterior = 0.0;
  PublicEvent pub;
  try {
    pub = public_event(ctx);
    posterior = trader_posterior(structure_, trader_, pub);
  } catch (const KnowledgeError& e) {
    reply.decision = Decision::hold();
    reply.note = fmt::format("oracle: {}", e.what());
    return reply;
  }

  const auto move = shares_to_target(ctx.market, posterior, clamp_);
  Decision d;
  d.private_reasoning = fmt::format("Posterior {:.6f} given public event {}.", posterior,
                                    describe_event(structure_, pub));
  if (move.whole >= 1) {
    d.action = Action::Buy;
    d.side = move.side;
    d.size = move.whole;
  }
  if (ctx.comments_allowed)
    d.public_justification = fmt::format("My estimate of the probability of Yes is {:.3f}.", posterior);
  reply.decision = std::move(d);
  return reply;
}

AgentReply NoiseAgent::decide(const AgentContext& ctx) {
  struct Option {
    Action action;
    Side side;
    std::int64_t bound;
  };
  std::vector<Option> buys;
  std::vector<Option> sells;
  for (Side s : {Side::Yes, Side::No}) {
    const auto& impact = ctx.impact.of(s);
    if (impact.max_buy > 0) buys.push_back({Action::Buy, s, impact.max_buy});
    if (impact.max_sell > 0) sells.push_back({Action::Sell, s, impact.max_sell});
  }
  std::vector<const std::vector<Option>*> groups;
  if (!buys.empty()) groups.push_back(&buys);
  if (!sells.empty()) groups.push_back(&sells);

  AgentReply reply;
  // Hold is one of the uniformly drawn actions alongside each feasible one.
  std::uniform_int_distribution<std::size_t> pick_action(0, groups.size());
  const auto a = pick_action(rng_);
  if (a == groups.size()) {
    reply.decision = Decision::hold("noise: hold");
    return reply;
  }
  const auto& group = *groups[a];
  std::uniform_int_distribution<std::size_t> pick_side(0, group.size() - 1);
  const auto& opt = group[pick_side(rng_)];
  std::uniform_int_distribution<std::int64_t> pick_size(0, opt.bound);
  Decision d;
  d.action = opt.action;
  d.side = opt.side;
  d.size = pick_size(rng_);
  d.private_reasoning = "noise: random trade";
  if (ctx.comments_allowed) d.public_justification = "Random trade.";
  reply.decision = std::move(d);
  return reply;
}

AgentReply ScriptedAgent::decide(const AgentContext&) {
  AgentReply reply;
  if (decisions_.empty()) {
    reply.decision = Decision::hold();
    return reply;
  }
  reply.decision = std::move(decisions_.front());
  decisions_.pop_front();
  return reply;
}

} // namespace infoagg
