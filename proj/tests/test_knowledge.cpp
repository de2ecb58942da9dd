#include <doctest.h>

#include <json.hpp>

#include "infoagg/knowledge.hpp"
#include "infoagg/structure_io.hpp"
#include "support/oracles.hpp"

using namespace infoagg;

namespace {

StateSet states(const InfoStructure& s, std::initializer_list<const char*> names) {
  StateSet out(s.state_count());
  for (auto n : names) out.insert(*s.space.find(n));
  return out;
}

std::vector<std::vector<int>> observes(StructureId id) {
  if (id == StructureId::VeryHard) return {{1, 2}, {0, 2}, {0, 1}};
  return {{0}, {1}, {2}};
}

std::vector<int> int_payoff(const InfoStructure& s) {
  std::vector<int> out;
  for (double x : s.security.payoff) out.push_back(static_cast<int>(x));
  return out;
}

} // namespace

TEST_CASE("state space enumerates realizations in descending order") {
  const auto sp = StateSpace::binary({"d_a", "d_b", "d_c"});
  REQUIRE(sp.size() == 8);
  CHECK(sp.state_names.front() == "a");
  CHECK(sp.state_names.back() == "h");
  for (StateIndex k = 0; k < 8; ++k)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(sp.signal_value(k, j) == oracle::signal_bit(static_cast<int>(k), static_cast<int>(j), 3));
  CHECK(sp.signal_value(1, 2) == 0);  // b = (1,1,0)
}

TEST_CASE("presets reproduce the information structures table") {
  const auto easy = make_structure(StructureId::Easy);
  CHECK(easy.security.payoff == std::vector<double>{1, 1, 1, 0, 1, 0, 0, 0});
  CHECK(easy.true_state == 0);
  CHECK(easy.partitions[0].cell_of(0) == states(easy, {"a", "b", "c", "d"}));
  CHECK(easy.partitions[1].cell_of(0) == states(easy, {"a", "b", "e", "f"}));
  CHECK(easy.partitions[2].cell_of(0) == states(easy, {"a", "c", "e", "g"}));

  const auto med = make_structure(StructureId::Medium);
  CHECK(med.true_state == 1);
  CHECK(med.security.payoff == std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0});

  const auto hard = make_structure(StructureId::Hard);
  CHECK(hard.true_state == 0);
  CHECK(hard.security.payoff == std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0});

  const auto vh = make_structure(StructureId::VeryHard);
  CHECK(vh.security.payoff == std::vector<double>{0, 1, 1, 0, 1, 0, 0, 0});
  const auto& p2 = vh.partitions[1].cells();
  REQUIRE(p2.size() == 4);
  CHECK(p2[0] == states(vh, {"a", "c"}));
  CHECK(p2[1] == states(vh, {"b", "d"}));
  CHECK(p2[2] == states(vh, {"e", "g"}));
  CHECK(p2[3] == states(vh, {"f", "h"}));
  CHECK(vh.partitions[0].cell_of(0) == states(vh, {"a", "e"}));
  CHECK(vh.partitions[2].cell_of(0) == states(vh, {"a", "b"}));
}

TEST_CASE("join of partitions is discrete for every preset") {
  for (auto id : kAllPresets) {
    const auto s = make_structure(id);
    CHECK(s.join_is_discrete());
    for (StateIndex w = 0; w < s.state_count(); ++w) {
      StateSet meet = s.everything();
      for (const auto& p : s.partitions) meet &= p.cell_of(w);
      CHECK(meet.count() == 1);
    }
  }
}

TEST_CASE("partition validation") {
  CHECK_THROWS(Partition(4, {StateSet(4, {0, 1}), StateSet(4, {1, 2, 3})}));
  CHECK_THROWS(Partition(4, {StateSet(4, {0, 1}), StateSet(4, {2})}));
  CHECK_NOTHROW(Partition(4, {StateSet(4, {0, 1}), StateSet(4, {2, 3})}));
}

TEST_CASE("conditional expectation") {
  const auto easy = make_structure(StructureId::Easy);
  CHECK(conditional_expectation(easy, states(easy, {"a", "b", "c", "d"})) == 0.75);
  const auto hard = make_structure(StructureId::Hard);
  CHECK(conditional_expectation(hard, hard.everything()) == 0.125);
  const auto vh = make_structure(StructureId::VeryHard);
  CHECK(conditional_expectation(vh, states(vh, {"a", "c"})) == 0.5);

  auto zero = easy;
  zero.prior.weights = {0, 0, 0, 0, 0.25, 0.25, 0.25, 0.25};
  CHECK_THROWS_WITH_AS(conditional_expectation(zero, states(zero, {"a", "b"})),
                       "conditioning on null event", KnowledgeError);
}

TEST_CASE("trader posterior") {
  const auto hard = make_structure(StructureId::Hard);
  CHECK(trader_posterior(hard, 0, hard.everything()) == 0.25);
  const auto med = make_structure(StructureId::Medium);
  CHECK(trader_posterior(med, 2, states(med, {"a", "b"})) == 0.0);
  const auto vh = make_structure(StructureId::VeryHard);
  CHECK(trader_posterior(vh, 2, states(vh, {"a", "c", "e", "g"})) == 0.0);
  CHECK_THROWS_WITH_AS(trader_posterior(hard, 0, states(hard, {"e", "f"})),
                       "inconsistent public event", KnowledgeError);
}

TEST_CASE("public event refinement") {
  const auto easy = make_structure(StructureId::Easy);
  CHECK(refine_public_event(easy, 0, 0.75, easy.everything()) == states(easy, {"a", "b", "c", "d"}));
  const auto vh = make_structure(StructureId::VeryHard);
  CHECK(refine_public_event(vh, 0, 0.5, vh.everything()) ==
        states(vh, {"a", "b", "c", "e", "f", "g"}));
  CHECK(refine_public_event(vh, 1, 0.5, states(vh, {"a", "b", "c", "e", "f", "g"})) ==
        states(vh, {"a", "c", "e", "g"}));
  CHECK_THROWS_WITH_AS(refine_public_event(easy, 0, 0.4, easy.everything()),
                       "announcement inconsistent with structure", KnowledgeError);
}

TEST_CASE("myopic trace prices") {
  struct Case {
    StructureId id;
    std::vector<double> prices;
  };
  const std::vector<Case> cases = {{StructureId::Easy, {0.75, 1, 1}},
                                   {StructureId::Medium, {0.25, 0.5, 0}},
                                   {StructureId::Hard, {0.25, 0.5, 1}},
                                   {StructureId::VeryHard, {0.5, 0.5, 0}}};
  for (const auto& c : cases) {
    CAPTURE(structure_label(c.id));
    const auto s = make_structure(c.id);
    const auto tr = myopic_trace(s);
    REQUIRE(tr.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(tr[k].price == c.prices[k]);
  }
  const auto med = make_structure(StructureId::Medium);
  CHECK(myopic_trace(med).back().public_event == states(med, {"b"}));
  const auto easy = make_structure(StructureId::Easy);
  const auto et = myopic_trace(easy);
  CHECK(et[0].public_event == states(easy, {"a", "b", "c", "d"}));
  CHECK(et[1].public_event == states(easy, {"a", "b"}));
}

TEST_CASE("myopic trace agrees with the definitional oracle at every true state") {
  for (auto id : kAllPresets) {
    const auto base = make_structure(id);
    for (StateIndex truth = 0; truth < 8; ++truth) {
      CAPTURE(structure_label(id));
      CAPTURE(truth);
      const auto s = base.with_true_state(truth);
      const auto tr = myopic_trace(s, 6);
      const auto ref = oracle::trace(observes(id), int_payoff(s), static_cast<int>(truth), 6);
      REQUIRE(tr.size() == ref.size());
      for (std::size_t k = 0; k < tr.size(); ++k) {
        CHECK(tr[k].price * static_cast<double>(ref[k].price.den) ==
              doctest::Approx(static_cast<double>(ref[k].price.num)));
        std::set<int> got;
        tr[k].public_event.for_each([&](StateIndex w) { got.insert(static_cast<int>(w)); });
        CHECK(got == ref[k].pub);
        CHECK(tr[k].public_event.contains(truth));
        if (k > 0) CHECK(tr[k].public_event.is_subset_of(tr[k - 1].public_event));
      }
      // Rounds past the third are fixed points.
      for (std::size_t k = 3; k < tr.size(); ++k) {
        CHECK(tr[k].price == tr[2].price);
        CHECK(tr[k].public_event == tr[2].public_event);
      }
    }
  }
}

TEST_CASE("full revelation after three rounds at every true state") {
  for (auto id : kAllPresets) {
    for (StateIndex truth = 0; truth < 8; ++truth) {
      CAPTURE(structure_label(id));
      CAPTURE(truth);
      const auto s = make_structure(id).with_true_state(truth);
      CHECK(myopic_trace(s).back().price == s.security(truth));
    }
  }
}

TEST_CASE("structure files round trip") {
  for (auto id : kAllPresets) {
    const auto s = make_structure(id);
    const auto back = structure_from_json(structure_to_json(s));
    CHECK(back.security.payoff == s.security.payoff);
    CHECK(back.true_state == s.true_state);
    REQUIRE(back.partitions.size() == s.partitions.size());
    for (std::size_t i = 0; i < s.partitions.size(); ++i)
      CHECK(back.partitions[i].cells() == s.partitions[i].cells());
  }
  const auto p = structure_from_json(nlohmann::json{{"preset", "VeryHard"}});
  CHECK(p.preset == StructureId::VeryHard);
  CHECK(parse_structure_id("t3s110") == StructureId::Medium);
  CHECK_FALSE(parse_structure_id("nope"));
}
