#include "infoagg/transcript_io.hpp"

#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "infoagg/agents.hpp"
#include "infoagg/prompt.hpp"
#include "infoagg/structure_io.hpp"

namespace infoagg {

using nlohmann::json;

namespace {

Side side_from(const std::string& s) {
  if (s == "Yes") return Side::Yes;
  if (s == "No") return Side::No;
  throw std::runtime_error("unknown side " + s);
}

json decision_to_json(const Decision& d) {
  return {{"action", action_name(d.action)},
          {"side", side_name(d.side)},
          {"size", d.size},
          {"public_justification", d.public_justification},
          {"private_reasoning", d.private_reasoning}};
}

Decision decision_from_json(const json& j) {
  Decision d;
  const auto a = parse_action(j.at("action").get<std::string>());
  if (!a) throw std::runtime_error("unknown action in transcript");
  d.action = *a;
  d.side = side_from(j.at("side").get<std::string>());
  d.size = j.at("size").get<std::int64_t>();
  d.public_justification = j.value("public_justification", "");
  d.private_reasoning = j.value("private_reasoning", "");
  return d;
}

json trade_to_json(const Trade& t) {
  return {{"round", t.round},
          {"trader", t.trader},
          {"action", action_name(t.action)},
          {"side", side_name(t.side)},
          {"requested", t.requested},
          {"executed", t.executed},
          {"price_before", t.price_before},
          {"price_after", t.price_after},
          {"cost", t.cost},
          {"cash_after", t.cash_after},
          {"timestamp", t.timestamp},
          {"note", t.note}};
}

Trade trade_from_json(const json& j) {
  Trade t;
  t.round = j.at("round").get<int>();
  t.trader = j.at("trader").get<std::size_t>();
  const auto a = parse_action(j.at("action").get<std::string>());
  if (!a) throw std::runtime_error("unknown action in transcript");
  t.action = *a;
  t.side = side_from(j.at("side").get<std::string>());
  t.requested = j.at("requested").get<std::int64_t>();
  t.executed = j.at("executed").get<std::int64_t>();
  t.price_before = j.at("price_before").get<double>();
  t.price_after = j.at("price_after").get<double>();
  t.cost = j.at("cost").get<double>();
  t.cash_after = j.at("cash_after").get<double>();
  t.timestamp = j.value("timestamp", "");
  t.note = j.value("note", "");
  return t;
}

json state_to_json(const MarketState& m) {
  return {{"q_yes", m.q_yes}, {"q_no", m.q_no}, {"beta", m.beta}};
}

MarketState state_from_json(const json& j) {
  return MarketState{j.at("q_yes").get<double>(), j.at("q_no").get<double>(),
                     j.at("beta").get<double>()};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

} // namespace

json config_to_json(const MarketConfig& c) {
  json intel = json::array();
  for (const auto& v : c.intelligence) intel.push_back(v ? json(*v) : json(nullptr));
  return {{"market_id", c.market_id},
          {"structure", structure_to_json(c.structure)},
          {"rounds", c.rounds},
          {"initial_price", c.initial_price},
          {"comments", c.comments_allowed},
          {"objective", objective_name(c.objective)},
          {"disclosure", c.disclosure},
          {"beta", c.beta},
          {"starting_cash", c.starting_cash},
          {"seed", c.seed},
          {"instruments", {c.instruments.yes, c.instruments.no}},
          {"team", c.team},
          {"intelligence", intel},
          {"wall_clock", c.wall_clock}};
}

MarketConfig config_from_json(const json& j) {
  MarketConfig c;
  c.market_id = j.at("market_id").get<std::string>();
  c.structure = structure_from_json(j.at("structure"));
  c.rounds = j.at("rounds").get<int>();
  c.initial_price = j.at("initial_price").get<double>();
  c.comments_allowed = j.value("comments", false);
  const auto obj = parse_objective(j.value("objective", "myopic"));
  if (!obj) throw std::runtime_error("unknown objective in transcript");
  c.objective = *obj;
  c.disclosure = j.value("disclosure", false);
  c.beta = j.value("beta", kDefaultBeta);
  c.starting_cash = j.value("starting_cash", 1000.0);
  c.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("instruments")) {
    c.instruments.yes = j["instruments"].at(0).get<std::int64_t>();
    c.instruments.no = j["instruments"].at(1).get<std::int64_t>();
  }
  c.team = j.value("team", "");
  if (j.contains("intelligence"))
    for (const auto& v : j["intelligence"])
      c.intelligence.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  c.wall_clock = j.value("wall_clock", false);
  return c;
}

std::string transcript_to_jsonl(const Transcript& t) {
  std::string out;
  out += json{{"type", "market"},
              {"config", config_to_json(t.config)},
              {"initial_state", state_to_json(t.initial_state)}}
             .dump();
  out += '\n';
  for (std::size_t k = 0; k < t.trades.size(); ++k) {
    const auto& tr = t.trades[k];
    json turn = {{"type", "turn"}, {"trade", trade_to_json(tr)}};
    if (k < t.decisions.size()) turn["decision"] = decision_to_json(t.decisions[k]);
    for (const auto& p : t.prompts) {
      if (p.round == tr.round && p.trader == tr.trader) {
        turn["prompt"] = p.prompt;
        turn["response"] = p.response;
      }
    }
    for (const auto& c : t.comments)
      if (c.round == tr.round && c.trader == tr.trader) turn["comment"] = c.text;
    for (const auto& r : t.reasonings)
      if (r.round == tr.round && r.trader == tr.trader) turn["reasoning"] = r.text;
    out += turn.dump();
    out += '\n';
  }
  json portfolios = json::array();
  for (const auto& p : t.portfolios)
    portfolios.push_back({{"cash", p.cash}, {"yes", p.yes_shares}, {"no", p.no_shares}});
  out += json{{"type", "resolution"},
              {"final_state", state_to_json(t.final_state)},
              {"final_price", t.final_price},
              {"outcome", t.outcome},
              {"portfolios", portfolios},
              {"profits", t.profits},
              {"conservation_residual", t.conservation_residual}}
             .dump();
  out += '\n';
  return out;
}

Transcript transcript_from_jsonl(const std::string& text) {
  Transcript t;
  std::istringstream in(text);
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    const auto type = j.at("type").get<std::string>();
    if (type == "market") {
      t.config = config_from_json(j.at("config"));
      t.initial_state = state_from_json(j.at("initial_state"));
      t.final_state = t.initial_state;
      t.final_price = t.initial_state.price_of_yes();
      header = true;
    } else if (type == "turn") {
      auto tr = trade_from_json(j.at("trade"));
      if (j.contains("decision")) t.decisions.push_back(decision_from_json(j["decision"]));
      if (j.contains("prompt"))
        t.prompts.push_back({tr.round, tr.trader, j["prompt"].get<std::string>(),
                             j.value("response", "")});
      if (j.contains("comment"))
        t.comments.push_back({tr.round, tr.trader, j["comment"].get<std::string>(), tr.timestamp});
      if (j.contains("reasoning"))
        t.reasonings.push_back({tr.round, tr.trader, j["reasoning"].get<std::string>()});
      t.trades.push_back(std::move(tr));
    } else if (type == "resolution") {
      t.final_state = state_from_json(j.at("final_state"));
      t.final_price = j.at("final_price").get<double>();
      t.outcome = j.at("outcome").get<double>();
      for (const auto& p : j.at("portfolios"))
        t.portfolios.push_back({p.at("cash").get<double>(), p.at("yes").get<std::int64_t>(),
                                p.at("no").get<std::int64_t>()});
      t.profits = j.at("profits").get<std::vector<double>>();
      t.conservation_residual = j.value("conservation_residual", 0.0);
    } else {
      throw std::runtime_error("unknown transcript record " + type);
    }
  }
  if (!header) throw std::runtime_error("transcript has no market header");
  return t;
}

std::string transcript_to_text(const Transcript& t) {
  const auto& c = t.config;
  const auto& s = c.structure;
  std::string out;
  out += fmt::format("Market {}\n", c.market_id);
  out += fmt::format("Structure: {}{}, true state {}\n",
                     s.preset ? std::string(structure_label(*s.preset)) + " " : std::string(),
                     s.name, s.space.state_names[s.true_state]);
  out += fmt::format("Rounds: {}  Objective: {}  Comments: {}  Initial price: {}  Disclosure: {}\n",
                     c.rounds, objective_name(c.objective), c.comments_allowed ? "on" : "off",
                     c.initial_price, c.disclosure ? "on" : "off");
  out += fmt::format("Team: {}  Seed: {}  Instruments: Yes={} No={}\n\n",
                     c.team.empty() ? "-" : c.team, c.seed, c.instruments.yes, c.instruments.no);

  for (std::size_t k = 0; k < t.trades.size(); ++k) {
    const auto& tr = t.trades[k];
    out += fmt::format("=== Round {} - {} ({}) ===\n", tr.round, trader_name(tr.trader), tr.timestamp);
    for (const auto& p : t.prompts) {
      if (p.round != tr.round || p.trader != tr.trader) continue;
      out += "--- Prompt ---\n" + p.prompt;
      if (!p.prompt.empty() && p.prompt.back() != '\n') out += '\n';
      out += "--- Response ---\n" + p.response;
      if (p.response.empty() || p.response.back() != '\n') out += '\n';
    }
    if (k < t.decisions.size()) {
      const auto& d = t.decisions[k];
      if (d.action == Action::Hold) out += "Decision: HOLD\n";
      else out += fmt::format("Decision: {} {} {}\n", action_name(d.action), d.size, side_name(d.side));
      if (!d.public_justification.empty()) out += "Public: " + d.public_justification + "\n";
      if (!d.private_reasoning.empty()) out += "Private: " + d.private_reasoning + "\n";
    }
    if (tr.action == Action::Hold || tr.executed == 0) {
      out += fmt::format("Executed: none, Yes price {}\n", format_price(tr.price_after, 4));
    } else {
      out += fmt::format("Executed: {} {} {} for {}, Yes price {} -> {}, cash {}\n",
                         action_name(tr.action), tr.executed, side_name(tr.side),
                         format_money(tr.cost), format_price(tr.price_before, 4),
                         format_price(tr.price_after, 4), format_money(tr.cash_after));
    }
    if (!tr.note.empty()) out += "Note: " + tr.note + "\n";
    out += '\n';
  }

  out += "=== Resolution ===\n";
  out += fmt::format("Final Yes price: {:.6f}\nYes share pays: {}\n", t.final_price, t.outcome);
  for (std::size_t i = 0; i < t.profits.size(); ++i) {
    const auto& p = t.portfolios.at(i);
    out += fmt::format("{}: profit {} (cash {}, {} Yes, {} No)\n", trader_name(i),
                       format_money(t.profits[i]), format_money(p.cash), p.yes_shares, p.no_shares);
  }
  out += fmt::format("Conservation residual: {:.3g}\n", t.conservation_residual);
  return out;
}

Transcript read_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return transcript_from_jsonl(ss.str());
}

void write_transcript(const std::filesystem::path& dir, const Transcript& t) {
  std::filesystem::create_directories(dir);
  write_atomic(dir / (t.config.market_id + ".jsonl"), transcript_to_jsonl(t));
  write_atomic(dir / (t.config.market_id + ".txt"), transcript_to_text(t));
}

ReplayCheck replay_transcript(const Transcript& recorded, double tolerance) {
  ReplayCheck check;
  if (recorded.decisions.size() != recorded.trades.size()) {
    check.ok = false;
    check.detail = "transcript does not carry one decision per turn";
    return check;
  }
  const auto traders = recorded.config.structure.trader_count();
  std::vector<std::deque<Decision>> scripts(traders);
  for (std::size_t k = 0; k < recorded.trades.size(); ++k)
    scripts.at(recorded.trades[k].trader).push_back(recorded.decisions[k]);
  std::vector<std::unique_ptr<Agent>> agents;
  for (auto& s : scripts) agents.push_back(std::make_unique<ScriptedAgent>(std::move(s)));

  auto config = recorded.config;
  config.wall_clock = false;
  const auto replayed = run_market(config, agents);

  auto fail = [&](std::string why) {
    check.ok = false;
    if (!check.detail.empty()) check.detail += "; ";
    check.detail += why;
  };
  auto close = [&](double a, double b) { return std::abs(a - b) <= tolerance * std::max(1.0, std::abs(a)); };

  if (replayed.trades.size() != recorded.trades.size()) {
    fail(fmt::format("turn count {} vs {}", replayed.trades.size(), recorded.trades.size()));
    return check;
  }
  for (std::size_t k = 0; k < replayed.trades.size(); ++k) {
    const auto& a = replayed.trades[k];
    const auto& b = recorded.trades[k];
    if (a.action != b.action || a.side != b.side || a.executed != b.executed)
      fail(fmt::format("round {}: execution differs", b.round));
    else if (!close(a.price_after, b.price_after) || !close(a.cost, b.cost))
      fail(fmt::format("round {}: price or cost differs", b.round));
  }
  if (replayed.profits.size() != recorded.profits.size()) {
    fail("profit count differs");
  } else {
    for (std::size_t i = 0; i < replayed.profits.size(); ++i)
      if (!close(replayed.profits[i], recorded.profits[i]))
        fail(fmt::format("{} profit differs", trader_name(i)));
  }
  if (check.ok) check.detail = fmt::format("{} turns verified", replayed.trades.size());
  return check;
}

} // namespace infoagg
