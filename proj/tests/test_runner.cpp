#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "infoagg/csv.hpp"
#include "infoagg/runner.hpp"
#include "infoagg/transcript_io.hpp"
#include "support/stub_server.hpp"

using namespace infoagg;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("infoagg_runner_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TeamSpec team_of(const std::string& label, AgentKind kind) {
  TeamSpec t;
  t.label = label;
  t.members.assign(3, AgentSpec{kind, std::nullopt, std::nullopt});
  return t;
}

ExperimentGrid oracle_grid() {
  ExperimentGrid g;
  for (auto id : kAllPresets) g.structures.push_back(make_structure(id));
  g.disclosure = {false};
  g.teams = {team_of("oracle", AgentKind::Oracle)};
  return g;
}

std::vector<std::string> column(const fs::path& csv_path, const std::string& name) {
  csv::Table t(csv::read_file(csv_path.string()));
  std::vector<std::string> out;
  for (const auto& r : t.rows()) out.push_back(t.get(r, name));
  return out;
}

} // namespace

TEST_CASE("grid cardinality and expansion") {
  ExperimentGrid g;
  for (auto id : kAllPresets) g.structures.push_back(make_structure(id));
  for (int k = 1; k <= 12; ++k) g.teams.push_back(team_of("team" + std::to_string(k), AgentKind::Noise));
  g.disclosure = {false};
  CHECK(g.cardinality() == 1728);
  const auto plans = expand_grid(g);
  CHECK(plans.size() == 1728);
  std::set<std::string> ids;
  std::set<std::uint64_t> seeds;
  for (const auto& p : plans) {
    ids.insert(p.config.market_id);
    seeds.insert(p.config.seed);
  }
  CHECK(ids.size() == 1728);
  CHECK(seeds.size() == 1728);

  g.disclosure = {true, false};
  CHECK(g.cardinality() == 3456);
}

TEST_CASE("single cells, repetitions and seeds") {
  ExperimentGrid g;
  g.structures = {make_structure(StructureId::Hard)};
  g.rounds = {6};
  g.objectives = {Objective::Strategic};
  g.comments = {true};
  g.initial_prices = {0.3};
  g.disclosure = {false};
  g.teams = {team_of("Team A", AgentKind::Noise)};
  auto plans = expand_grid(g);
  REQUIRE(plans.size() == 1);
  const auto& c = plans[0].config;
  CHECK(c.market_id == "t3s111_r6_strategic_con_p030_doff_team-a_01");
  CHECK(c.seed == market_seed(0, c.market_id));
  CHECK(c.instruments.yes == 1000 + static_cast<std::int64_t>(c.seed % 8000) * 2);
  CHECK(c.instruments.no == c.instruments.yes + 1);

  // Adding cells does not move an existing market's seed.
  g.rounds = {3, 6, 9};
  const auto wider = expand_grid(g);
  const auto it = std::find_if(wider.begin(), wider.end(),
                               [&](const PlannedMarket& p) { return p.config.market_id == c.market_id; });
  REQUIRE(it != wider.end());
  CHECK(it->config.seed == c.seed);

  g.rounds = {6};
  g.repetitions = 2;
  plans = expand_grid(g);
  REQUIRE(plans.size() == 2);
  CHECK(plans[0].config.seed != plans[1].config.seed);
  CHECK(plans[1].config.market_id.ends_with("_02"));

  g.base_seed = 99;
  CHECK(expand_grid(g)[0].config.seed != plans[0].config.seed);
}

TEST_CASE("invalid grids") {
  ExperimentGrid g;
  g.structures = {make_structure(StructureId::Easy)};
  CHECK_THROWS_AS(expand_grid(g), std::invalid_argument);  // no teams
  g.teams = {team_of("a", AgentKind::Oracle)};
  g.rounds = {};
  CHECK_THROWS_AS(expand_grid(g), std::invalid_argument);
  g.rounds = {3};
  g.teams.push_back(team_of("a", AgentKind::Noise));
  CHECK_THROWS_AS(expand_grid(g), std::invalid_argument);  // duplicate label
  g.teams.pop_back();
  g.teams[0].members.pop_back();
  CHECK_THROWS_AS(expand_grid(g), std::invalid_argument);
  g.teams[0] = team_of("a", AgentKind::Oracle);
  g.rounds = {4};
  CHECK_THROWS_AS(expand_grid(g), std::invalid_argument);
}

TEST_CASE("grid files") {
  const auto g = grid_from_json(json::parse(R"j({
    "structures": ["Easy", "t3s111"],
    "rounds": [3],
    "objectives": ["myopic"],
    "comments": [false],
    "initial_prices": [0.5, 0.7],
    "disclosure": [false],
    "repetitions": 2,
    "base_seed": 5,
    "teams": [
      {"label": "oracles", "member": {"kind": "oracle"}},
      {"label": "mixed", "members": [{"kind": "oracle", "intelligence": 30},
                                     {"kind": "noise"}, {"kind": "hold"}]}
    ]
  })j"));
  CHECK(g.cardinality() == 2 * 2 * 2 * 2);
  REQUIRE(g.teams.size() == 2);
  CHECK(g.teams[0].members.size() == 3);
  CHECK(g.teams[1].members[1].kind == AgentKind::Noise);
  CHECK(*g.teams[1].members[0].intelligence == 30.0);
  CHECK(g.base_seed == 5);
  CHECK(expand_grid(g).size() == 16);

  CHECK_THROWS(grid_from_json(json::parse(R"j({"teams":[{"member":{"kind":"psychic"}}]})j")));
  CHECK_THROWS(grid_from_json(json::parse(R"j({"objectives":["greedy"]})j")));
}

TEST_CASE("oracle grid runs cleanly") {
  const auto dir = scratch("oracle");
  const auto plans = expand_grid(oracle_grid());
  REQUIRE(plans.size() == 144);
  RunOptions opt;
  opt.out_dir = dir;
  opt.parallelism = 8;
  const auto res = run_experiment(plans, opt);
  CHECK(res.completed == 144);
  CHECK(res.failed == 0);
  CHECK(res.scores.size() == 144);

  const auto ids = column(dir / "markets.csv", "market_id");
  CHECK(ids.size() == 144);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == 144);

  const auto scores = read_market_scores(dir / "markets.csv");
  const auto rows = summarize(scores, {"structure"});
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.crash_rate == 0.0);
    CHECK(r.median_log_error <= 1e-4);
    CHECK(r.mse < 1e-8);
  }
  for (const auto& id : ids) {
    CHECK(fs::exists(dir / "transcripts" / (id + ".txt")));
    CHECK(fs::exists(dir / "transcripts" / (id + ".jsonl")));
  }
  const auto residuals = column(dir / "markets.csv", "conservation_residual");
  for (const auto& r : residuals) CHECK(std::abs(std::stod(r)) < 1e-6);

  const auto rep = report_file(dir / "markets.csv");
  CHECK(rep.text.find("Easy") < rep.text.find("VeryHard"));
  CHECK(rep.csv.rfind("structure,rounds,n,mse", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("output is independent of parallelism") {
  ExperimentGrid g;
  g.structures = {make_structure(StructureId::Easy), make_structure(StructureId::VeryHard)};
  g.rounds = {3, 6};
  g.comments = {true};
  g.disclosure = {false};
  g.objectives = {Objective::Myopic};
  g.teams = {team_of("noise", AgentKind::Noise), team_of("oracle", AgentKind::Oracle)};
  const auto plans = expand_grid(g);

  const auto a = scratch("serial"), b = scratch("parallel");
  RunOptions opt;
  opt.out_dir = a;
  opt.parallelism = 1;
  run_experiment(plans, opt);
  opt.out_dir = b;
  opt.parallelism = 6;
  run_experiment(plans, opt);
  for (const char* f : {"trades.csv", "markets.csv", "messages.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  for (const auto& p : plans) {
    const auto name = p.config.market_id + ".jsonl";
    CHECK(slurp(a / "transcripts" / name) == slurp(b / "transcripts" / name));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("interrupted runs resume without duplicates") {
  const auto dir = scratch("resume");
  const auto plans = expand_grid(oracle_grid());
  RunOptions opt;
  opt.out_dir = dir;
  opt.write_transcripts = false;
  std::vector<PlannedMarket> first(plans.begin(), plans.begin() + 50);
  CHECK(run_experiment(first, opt).completed == 50);

  // A crash between the trade rows and the market row leaves orphans.
  {
    std::ofstream trades(dir / "trades.csv", std::ios::app);
    trades << plans[100].config.market_id << ",Easy,3,0.5,myopic,0,0,1,trader_1,BUY,Yes,1,1,1,0.5,0.5,0.5,999,x,\n";
    std::ofstream markets(dir / "markets.csv", std::ios::app);
    markets << "half-written,row";
    std::ofstream messages(dir / "messages.csv", std::ios::app);
    messages << "\n" << plans[101].config.market_id << ",1,trader_1,\"open quote";
  }

  const auto res = run_experiment(plans, opt);
  CHECK(res.skipped == 50);
  CHECK(res.completed == 94);
  const auto ids = column(dir / "markets.csv", "market_id");
  CHECK(ids.size() == 144);
  CHECK(std::set<std::string>(ids.begin(), ids.end()).size() == 144);

  // One row per round and market, none left over from the orphan.
  const auto trade_ids = column(dir / "trades.csv", "market_id");
  std::size_t expected = 0;
  for (const auto& p : plans) expected += static_cast<std::size_t>(p.config.rounds);
  CHECK(trade_ids.size() == expected);
  CHECK(std::is_sorted(trade_ids.begin(), trade_ids.end()));

  const auto again = run_experiment(plans, opt);
  CHECK(again.completed == 0);
  CHECK(again.skipped == 144);
  fs::remove_all(dir);
}

TEST_CASE("reports") {
  CHECK(report({}).text == "no data\n");
  CHECK(report_file(fs::temp_directory_path() / "infoagg_no_such_markets.csv").text == "no data\n");

  ExperimentGrid g;
  g.structures = {make_structure(StructureId::Easy)};
  g.rounds = {3};
  g.objectives = {Objective::Myopic};
  g.comments = {false};
  g.initial_prices = {0.5};
  g.disclosure = {false};
  g.repetitions = 50;
  g.teams = {team_of("noise", AgentKind::Noise), team_of("oracle", AgentKind::Oracle)};
  const auto dir = scratch("report");
  RunOptions opt;
  opt.out_dir = dir;
  opt.write_transcripts = false;
  opt.parallelism = 4;
  const auto res = run_experiment(expand_grid(g), opt);
  REQUIRE(res.completed == 100);
  const auto rows = summarize(read_market_scores(dir / "markets.csv"), {"team"});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].key[0] == "noise");
  CHECK(rows[1].key[0] == "oracle");
  CHECK(rows[0].mse > rows[1].mse);
  CHECK(rows[1].mse < 1e-8);
  fs::remove_all(dir);
}

TEST_CASE("remote teams record full prompts") {
  stub::ChatServer server([](const json&, std::size_t call) {
    return stub::Reply{200, stub::decision_json(call % 2 ? "HOLD" : "BUY", "yes", 30, "stub says")};
  });
  ExperimentGrid g = grid_from_json(json{
      {"structures", {"Medium"}},
      {"rounds", {3}},
      {"objectives", {"strategic"}},
      {"comments", {true}},
      {"initial_prices", {0.5}},
      {"disclosure", {true}},
      {"teams", {{{"label", "stub"},
                  {"member", {{"kind", "remote"}, {"endpoint", server.endpoint()}, {"model", "m"},
                              {"backoff_ms", 1}, {"intelligence", 40}}}}}}});
  const auto dir = scratch("remote");
  RunOptions opt;
  opt.out_dir = dir;
  const auto plans = expand_grid(g);
  REQUIRE(plans.size() == 1);
  CHECK(run_experiment(plans, opt).completed == 1);
  const auto t = read_transcript(dir / "transcripts" / (plans[0].config.market_id + ".jsonl"));
  REQUIRE(t.prompts.size() == 3);
  for (const auto& p : t.prompts) {
    CHECK(p.prompt.find("=== YOUR DECISION ===") != std::string::npos);
    CHECK(p.response.find("stub says") != std::string::npos);
  }
  const auto text = slurp(dir / "transcripts" / (plans[0].config.market_id + ".txt"));
  CHECK(text.find("=== PUBLIC INFORMATION ===") != std::string::npos);
  const auto msgs = column(dir / "messages.csv", "public_text");
  CHECK(msgs.size() == 3);
  fs::remove_all(dir);
}
