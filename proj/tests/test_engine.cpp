#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "infoagg/agents.hpp"
#include "infoagg/engine.hpp"
#include "infoagg/transcript_io.hpp"
#include "support/oracles.hpp"

using namespace infoagg;

namespace {

MarketConfig config_for(StructureId id, double p0 = 0.5, int rounds = 3) {
  MarketConfig c;
  c.market_id = "m";
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

Decision buy(Side s, std::int64_t n) {
  Decision d;
  d.action = Action::Buy;
  d.side = s;
  d.size = n;
  return d;
}

Decision sell(Side s, std::int64_t n) {
  auto d = buy(s, n);
  d.action = Action::Sell;
  return d;
}

class ThrowingAgent final : public Agent {
public:
  AgentReply decide(const AgentContext&) override { throw std::runtime_error("boom"); }
  std::string kind() const override { return "throwing"; }
};

} // namespace

TEST_CASE("opening a market") {
  Market half(config_for(StructureId::Easy));
  CHECK(half.state().price_of_yes() == 0.5);
  CHECK(half.portfolio(0).cash == 1000.0);
  CHECK(half.portfolio(2).yes_shares == 0);
  Market up(config_for(StructureId::Easy, 0.7));
  CHECK(std::abs(up.state().price_of_yes() - 0.7) < 1e-12);

  auto bad = config_for(StructureId::Easy);
  bad.rounds = 4;
  CHECK_THROWS_AS(Market{bad}, std::invalid_argument);
  bad.rounds = 3;
  bad.initial_price = 1.0;
  CHECK_THROWS_AS(Market{bad}, std::invalid_argument);
  bad.initial_price = 0.5;
  bad.starting_cash = 0;
  CHECK_THROWS_AS(Market{bad}, std::invalid_argument);
}

TEST_CASE("round robin order") {
  Market m(config_for(StructureId::Easy, 0.5, 9));
  std::vector<int> third;
  for (int r = 1; r <= 9; ++r) {
    CHECK(m.next_round() == r);
    CHECK(m.next_trader() == static_cast<std::size_t>((r - 1) % 3));
    if (m.next_trader() == 2) third.push_back(r);
    CHECK_THROWS_AS(m.execute((m.next_trader() + 1) % 3, Decision::hold()), std::logic_error);
    m.execute(m.next_trader(), Decision::hold());
  }
  CHECK(third == std::vector<int>{3, 6, 9});
  CHECK(m.finished());
  CHECK_THROWS_AS(m.execute(0, Decision::hold()), std::logic_error);
}

TEST_CASE("validate and execute") {
  Market m(config_for(StructureId::Easy, 0.5, 6));
  const auto& t1 = m.execute(0, buy(Side::Yes, 534));
  CHECK(t1.executed == 534);
  CHECK(t1.cash_after == doctest::Approx(534.84).epsilon(1e-4));
  CHECK(m.portfolio(0).yes_shares == 534);

  const auto& t2 = m.execute(1, sell(Side::No, 10));
  CHECK(t2.executed == 0);
  CHECK(t2.note.find("clamped") != std::string::npos);
  CHECK(m.portfolio(1).cash == 1000.0);

  const auto& t3 = m.execute(2, buy(Side::No, 1000000));
  CHECK(t3.executed < 1000000);
  CHECK(t3.executed == oracle::scan_affordable(534, 0, 1000, false));
  CHECK(m.portfolio(2).cash >= 0.0);

  Decision neg = buy(Side::Yes, -5);
  const auto& t4 = m.execute(0, neg);
  CHECK(t4.action == Action::Hold);
  CHECK(t4.executed == 0);
  CHECK(t4.note.find("negative size") != std::string::npos);

  const auto& t5 = m.execute(1, Decision::hold());
  CHECK(t5.executed == 0);
  CHECK(t5.price_before == t5.price_after);

  const auto& t6 = m.execute(0 + 2, sell(Side::No, 100));
  CHECK(t6.executed == 100);
  CHECK(t6.cost < 0.0);
}

TEST_CASE("comments recorded only when allowed, reasoning always") {
  for (bool allowed : {true, false}) {
    auto c = config_for(StructureId::Easy);
    c.comments_allowed = allowed;
    Market m(c);
    Decision d = Decision::hold("thinking");
    d.public_justification = "hello";
    m.execute(0, d);
    CHECK(m.transcript().comments.size() == (allowed ? 1u : 0u));
    CHECK(m.transcript().reasonings.size() == 1);
  }
}

TEST_CASE("resolution") {
  Market idle(config_for(StructureId::Easy));
  while (!idle.finished()) idle.execute(idle.next_trader(), Decision::hold());
  for (double p : idle.resolve()) CHECK(p == 0.0);

  // Round trip back to the opening price: total profit is zero either way.
  for (auto id : {StructureId::Easy, StructureId::VeryHard}) {
    Market m(config_for(id, 0.5, 3));
    m.execute(0, buy(Side::Yes, 300));
    m.execute(1, buy(Side::No, 300));
    m.execute(2, Decision::hold());
    const auto& profits = m.resolve();
    CHECK(std::abs(profits[0] + profits[1] + profits[2]) < 1e-9);
  }
}

TEST_CASE("hold-only agents leave the price unchanged") {
  std::vector<std::unique_ptr<Agent>> agents;
  for (int i = 0; i < 3; ++i) agents.push_back(std::make_unique<HoldAgent>());
  const auto t = run_market(config_for(StructureId::Hard, 0.3, 6), agents);
  CHECK(t.final_price == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(t.trades.size() == 6);
}

TEST_CASE("oracle markets reach the clamped outcome") {
  const auto easy = run_market(config_for(StructureId::Easy), oracles(make_structure(StructureId::Easy)));
  CHECK(easy.final_price == doctest::Approx(1.0 - kTargetClamp).epsilon(1e-5));
  CHECK(-std::log(easy.final_price) < 1e-4);
  CHECK(easy.outcome == 1.0);

  const auto vh = run_market(config_for(StructureId::VeryHard), oracles(make_structure(StructureId::VeryHard)));
  CHECK(vh.final_price < 1e-4);
  CHECK(vh.outcome == 0.0);
  CHECK(vh.trades[1].executed == 0);
}

TEST_CASE("agent failures become holds") {
  std::vector<std::unique_ptr<Agent>> agents;
  agents.push_back(std::make_unique<ThrowingAgent>());
  agents.push_back(std::make_unique<HoldAgent>());
  agents.push_back(std::make_unique<HoldAgent>());
  const auto t = run_market(config_for(StructureId::Easy), agents);
  CHECK(t.trades[0].action == Action::Hold);
  CHECK(t.trades[0].note.find("agent failure: boom") != std::string::npos);
}

TEST_CASE("conservation, non-negativity and replay determinism on noise markets") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto c = config_for(kAllPresets[seed % 4], std::array{0.3, 0.5, 0.7}[seed % 3],
                        static_cast<int>(3 * (1 + seed % 3)));
    c.seed = seed;
    auto make = [&] {
      std::vector<std::unique_ptr<Agent>> a;
      for (std::uint64_t i = 0; i < 3; ++i) a.push_back(std::make_unique<NoiseAgent>(seed * 31 + i));
      return a;
    };
    const auto t = run_market(c, make());
    CHECK(std::abs(t.conservation_residual) < 1e-6);
    for (const auto& tr : t.trades) {
      CHECK(tr.cash_after >= 0.0);
      CHECK(tr.executed <= std::max<std::int64_t>(tr.requested, 0));
    }
    for (const auto& p : t.portfolios) {
      CHECK(p.yes_shares >= 0);
      CHECK(p.no_shares >= 0);
    }
    CHECK(transcript_to_jsonl(t) == transcript_to_jsonl(run_market(c, make())));
  }
}

TEST_CASE("logical timestamps") {
  CHECK(logical_timestamp(0) == "2026-01-01 00:00:00");
  CHECK(logical_timestamp(2) == "2026-01-01 00:01:30");
}
