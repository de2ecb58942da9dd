#include <doctest.h>

#include <cmath>
#include <set>

#include "infoagg/agents.hpp"
#include "infoagg/decision_parser.hpp"
#include "infoagg/engine.hpp"
#include "infoagg/prompt.hpp"

using namespace infoagg;

namespace {

MarketConfig config_for(StructureId id, double p0 = 0.5, int rounds = 3) {
  MarketConfig c;
  c.structure = make_structure(id);
  c.initial_price = p0;
  c.rounds = rounds;
  return c;
}

std::vector<std::unique_ptr<Agent>> oracles(const InfoStructure& s) {
  std::vector<std::unique_ptr<Agent>> a;
  for (std::size_t i = 0; i < 3; ++i) a.push_back(std::make_unique<MyopicOracleAgent>(s, i));
  return a;
}

} // namespace

TEST_CASE("oracle decisions") {
  const auto easy = make_structure(StructureId::Easy);
  Market m(config_for(StructureId::Easy));
  MyopicOracleAgent t1(easy, 0), t2(easy, 1), t3(easy, 2);
  auto d = t1.decide(m.context()).decision;
  REQUIRE(d);
  CHECK(d->action == Action::Buy);
  CHECK(d->side == Side::Yes);
  CHECK(d->size == 109);
  m.execute(0, *d);
  d = t2.decide(m.context()).decision;
  // From the truncated round-one price rather than exactly 0.75.
  const double p1 = m.state().price_of_yes();
  const double need = 100.0 * std::log((1.0 - kTargetClamp) / kTargetClamp * (1.0 - p1) / p1);
  CHECK(d->size == static_cast<std::int64_t>(std::floor(need)));
  CHECK(d->size == 881);
  m.execute(1, *d);
  d = t3.decide(m.context()).decision;
  CHECK(d->action == Action::Hold);

  const auto hard = make_structure(StructureId::Hard);
  Market h(config_for(StructureId::Hard, 0.7));
  MyopicOracleAgent h1(hard, 0);
  d = h1.decide(h.context()).decision;
  CHECK(d->action == Action::Buy);
  CHECK(d->side == Side::No);
  const auto& tr = h.execute(0, *d);
  CHECK(tr.price_after == doctest::Approx(0.25).epsilon(1e-2));
}

TEST_CASE("oracle holds on an inconsistent history") {
  const auto easy = make_structure(StructureId::Easy);
  Market m(config_for(StructureId::Easy, 0.5, 6));
  auto ctx = m.context();
  // Trader 1 appears to have announced 0.25, which rules out its own cell.
  Trade lie;
  lie.round = 1;
  lie.trader = 0;
  lie.action = Action::Buy;
  lie.side = Side::No;
  lie.price_before = 0.5;
  lie.price_after = 0.25;
  ctx.trades = {lie};
  MyopicOracleAgent t1(easy, 0);
  const auto r = t1.decide(ctx);
  REQUIRE(r.decision);
  CHECK(r.decision->action == Action::Hold);
  CHECK(r.note.find("oracle: inconsistent public event") == 0);
}

TEST_CASE("oracle markets track the myopic trace") {
  for (auto id : kAllPresets) {
    const auto s = make_structure(id);
    for (double p0 : {0.3, 0.5, 0.7}) {
      for (int rounds : {3, 6, 9}) {
        CAPTURE(structure_label(id));
        CAPTURE(p0);
        CAPTURE(rounds);
        const auto t = run_market(config_for(id, p0, rounds), oracles(s));
        const auto trace = myopic_trace(s, rounds);
        REQUIRE(t.trades.size() == trace.size());
        for (std::size_t k = 0; k < trace.size(); ++k) {
          const double target = clip_target(trace[k].price);
          const double p = t.trades[k].price_after;
          // One share moves the log-odds by beta.
          const double logit = std::log(p / (1.0 - p));
          const double slack = std::max(1.0 / (1.0 + std::exp(-(logit + kDefaultBeta))) - p,
                                        p - 1.0 / (1.0 + std::exp(-(logit - kDefaultBeta))));
          CHECK(std::abs(p - target) <= slack + 1e-12);
          CHECK(t.trades[k].note.empty());
        }
      }
    }
  }
}

TEST_CASE("noise agent") {
  Market m(config_for(StructureId::Easy));
  const auto ctx = m.context();
  NoiseAgent a(42), b(42);
  for (int i = 0; i < 50; ++i) {
    const auto da = a.decide(ctx).decision;
    const auto db = b.decide(ctx).decision;
    CHECK(da->action == db->action);
    CHECK(da->side == db->side);
    CHECK(da->size == db->size);
  }

  auto broke = ctx;
  broke.portfolio = Portfolio{0, 0, 0};
  broke.impact = impact_preview(broke.market, broke.portfolio);
  NoiseAgent c(1);
  for (int i = 0; i < 20; ++i) CHECK(c.decide(broke).decision->action == Action::Hold);

  auto rich = ctx;
  rich.portfolio = Portfolio{1000, 50, 50};
  rich.impact = impact_preview(rich.market, rich.portfolio);
  NoiseAgent d(9);
  std::set<Action> seen;
  for (int i = 0; i < 10000; ++i) {
    const auto dec = *d.decide(rich).decision;
    seen.insert(dec.action);
    if (dec.action == Action::Buy) CHECK(dec.size <= rich.impact.of(dec.side).max_buy);
    if (dec.action == Action::Sell) CHECK(dec.size <= rich.portfolio.holding(dec.side));
  }
  CHECK(seen.size() == 3);
}

TEST_CASE("decision parsing") {
  const InstrumentIds ids;
  const auto hold = parse_decision(
      R"j({"action": "HOLD", "instrument_id": "4702", "size": 0,
          "public_justification": "The market price of Yes shares has reached £1.00.",
          "private_reasoning": "My true belief q = 0.75 based on d_a being true."})j",
      ids);
  CHECK(hold.action == Action::Hold);
  CHECK(hold.size == 0);
  CHECK(hold.public_justification.find("£1.00") != std::string::npos);
  CHECK(hold.private_reasoning.find("q = 0.75") != std::string::npos);

  const auto fenced = parse_decision(
      "Sure, here is my decision:\n```json\n{\"action\": \"BUY\", \"instrument_id\": 4702, \"size\": 25}\n```\nThanks.",
      ids);
  CHECK(fenced.action == Action::Buy);
  CHECK(fenced.side == Side::Yes);
  CHECK(fenced.size == 25);

  const auto no = parse_decision(R"j({"action":"sell","instrument_id":"4703 (No)","size":"12"})j", ids);
  CHECK(no.action == Action::Sell);
  CHECK(no.side == Side::No);
  CHECK(no.size == 12);

  const auto by_side = parse_decision(R"j({"action":"BUY","side":"no","size":3})j", ids);
  CHECK(by_side.side == Side::No);

  const auto braces = parse_decision(R"j(note {not json} then {"action":"HOLD","private_reasoning":"a } b"})j", ids);
  CHECK(braces.action == Action::Hold);
  CHECK(braces.private_reasoning == "a } b");

  CHECK_THROWS_AS(parse_decision("I refuse", ids), ParseFailure);
  CHECK_THROWS_AS(parse_decision(R"j({"action":"SHORT","instrument_id":4702,"size":1})j", ids), ParseFailure);
  CHECK_THROWS_AS(parse_decision(R"j({"action":"BUY","instrument_id":9999,"size":1})j", ids), ParseFailure);
  CHECK_THROWS_AS(parse_decision(R"j({"action":"BUY","instrument_id":4702})j", ids), ParseFailure);
}

TEST_CASE("prompts never carry another trader's private information") {
  for (auto id : kAllPresets) {
    const auto s = make_structure(id);
    for (int rounds : {3, 6, 9}) {
      Market m(config_for(id, 0.5, rounds));
      std::vector<std::unique_ptr<Agent>> agents = oracles(s);
      while (!m.finished()) {
        const auto trader = m.next_trader();
        const auto ctx = m.context();
        const auto prompt = build_prompt(ctx);
        CHECK(prompt == build_prompt(m.context()));
        for (std::size_t other = 0; other < 3; ++other) {
          if (other == trader) continue;
          CHECK(prompt.find(private_information_text(s, other)) == std::string::npos);
        }
        for (const auto& r : ctx.own_reasonings) CHECK(r.trader == trader);
        const auto reply = agents[trader]->decide(ctx);
        m.execute(trader, reply.decision.value_or(Decision::hold()));
      }
    }
  }
}
