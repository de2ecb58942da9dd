#include "infoagg/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "infoagg/agents.hpp"
#include "infoagg/csv.hpp"
#include "infoagg/structure_io.hpp"
#include "infoagg/transcript_io.hpp"

namespace infoagg {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string slug(std::string_view text) {
  std::string out;
  for (char c : text) {
    const auto u = static_cast<unsigned char>(c);
    out += std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '-';
  }
  return out.empty() ? "x" : out;
}

std::string fmt_num(double x) { return fmt::format("{}", x); }

RemoteClientConfig remote_from_json(const json& j) {
  RemoteClientConfig c;
  c.endpoint = j.at("endpoint").get<std::string>();
  c.model = j.value("model", "");
  c.temperature = j.value("temperature", 1.0);
  c.max_retries = j.value("max_retries", 2);
  c.timeout = std::chrono::milliseconds(j.value("timeout_ms", 60000));
  c.backoff = std::chrono::milliseconds(j.value("backoff_ms", 1000));
  c.api_key_env = j.value("api_key_env", "");
  c.requests_per_minute = j.value("requests_per_minute", 0.0);
  c.validate();
  return c;
}

AgentSpec agent_from_json(const json& j) {
  AgentSpec a;
  const auto kind = j.value("kind", "oracle");
  if (kind == "oracle") a.kind = AgentKind::Oracle;
  else if (kind == "noise") a.kind = AgentKind::Noise;
  else if (kind == "hold") a.kind = AgentKind::Hold;
  else if (kind == "remote") {
    a.kind = AgentKind::Remote;
    a.remote = remote_from_json(j);
  } else {
    throw std::invalid_argument("unknown agent kind " + kind);
  }
  if (j.contains("intelligence") && !j["intelligence"].is_null())
    a.intelligence = j["intelligence"].get<double>();
  return a;
}

template <class T>
std::vector<T> list_or(const json& doc, const char* key, std::vector<T> fallback) {
  if (!doc.contains(key)) return fallback;
  return doc[key].get<std::vector<T>>();
}

const std::vector<std::string> kTradesHeader = {
    "market_id", "structure", "rounds", "initial_price", "objective", "comments", "disclosure",
    "round", "trader", "action", "side", "instrument_id", "requested", "executed",
    "price_before", "price_after", "cost", "cash_after", "timestamp", "note"};

const std::vector<std::string> kMarketsHeader = {
    "market_id", "structure", "structure_code", "rounds", "objective", "comments",
    "initial_price", "disclosure", "team", "repetition", "seed", "final_price", "outcome",
    "log_error", "squared_error", "crashed", "volume", "profit_1", "profit_2", "profit_3",
    "conservation_residual", "degraded_turns"};

const std::vector<std::string> kMessagesHeader = {"market_id", "round", "trader", "public_text",
                                                  "private_text"};

std::string structure_code_of(const InfoStructure& s) {
  return s.preset ? std::string(structure_code(*s.preset)) : s.name;
}

std::vector<csv::Row> trade_rows(const Transcript& t) {
  std::vector<csv::Row> rows;
  const auto treat = treatment_of(t.config);
  for (const auto& tr : t.trades) {
    rows.push_back({t.config.market_id, treat.at("structure"), treat.at("rounds"),
                    treat.at("initial_price"), treat.at("objective"), treat.at("comments"),
                    treat.at("disclosure"), std::to_string(tr.round), trader_name(tr.trader),
                    std::string(action_name(tr.action)),
                    tr.action == Action::Hold ? "" : std::string(side_name(tr.side)),
                    tr.action == Action::Hold ? "" : std::to_string(t.config.instruments.id(tr.side)),
                    std::to_string(tr.requested), std::to_string(tr.executed),
                    fmt_num(tr.price_before), fmt_num(tr.price_after), fmt_num(tr.cost),
                    fmt_num(tr.cash_after), tr.timestamp, tr.note});
  }
  return rows;
}

csv::Row market_row(const Transcript& t, const MarketScore& s, int repetition) {
  const auto& c = t.config;
  const auto tr = s.treatment;
  std::size_t degraded = 0;
  for (const auto& trade : t.trades)
    if (!trade.note.empty()) ++degraded;
  csv::Row row = {c.market_id, tr.at("structure"), structure_code_of(c.structure),
                  std::to_string(c.rounds), tr.at("objective"), tr.at("comments"),
                  tr.at("initial_price"), tr.at("disclosure"), c.team, std::to_string(repetition),
                  std::to_string(c.seed), fmt_num(s.final_price), fmt_num(s.outcome),
                  fmt_num(s.log_error), fmt_num(s.squared_error), s.crashed ? "1" : "0",
                  std::to_string(s.volume)};
  for (std::size_t i = 0; i < 3; ++i)
    row.push_back(i < s.profits.size() ? fmt_num(s.profits[i]) : "");
  row.push_back(fmt_num(t.conservation_residual));
  row.push_back(std::to_string(degraded));
  return row;
}

std::vector<csv::Row> message_rows(const Transcript& t) {
  std::vector<csv::Row> rows;
  for (const auto& m : message_pairs(t))
    rows.push_back({m.market_id, std::to_string(m.round), trader_name(m.trader), m.public_text,
                    m.private_text});
  return rows;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<csv::Row> load_table(const fs::path& path, const std::vector<std::string>& header) {
  if (!fs::exists(path) || fs::file_size(path) == 0) return {};
  std::string text;
  {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    text = ss.str();
  }
  std::vector<csv::Row> rows;
  // A torn final record may leave an open quote; drop trailing lines until it parses.
  for (;;) {
    try {
      rows = csv::parse(text);
      break;
    } catch (const std::runtime_error&) {
      const auto cut = text.find_last_of('\n', text.empty() ? 0 : text.size() - 2);
      if (cut == std::string::npos) throw;
      text.resize(cut + 1);
    }
  }
  if (rows.empty()) return {};
  if (rows.front() != header)
    throw std::runtime_error(fmt::format("{} has an unexpected header", path.string()));
  rows.erase(rows.begin());
  return rows;
}

// Rewrites one table sorted by market_id, keeping only complete rows whose
// market is listed in `keep`; per-market row order is preserved.
void canonicalize(const fs::path& path, const std::vector<std::string>& header,
                  const std::set<std::string>* keep) {
  auto rows = load_table(path, header);
  // Torn writes leave rows of the wrong width.
  std::erase_if(rows, [&](const csv::Row& r) { return r.size() != header.size(); });
  if (keep)
    std::erase_if(rows, [&](const csv::Row& r) { return r.empty() || !keep->count(r[0]); });
  std::stable_sort(rows.begin(), rows.end(),
                   [](const csv::Row& a, const csv::Row& b) { return a[0] < b[0]; });
  // Keep the first occurrence of each market in the summary table.
  if (!keep) {
    std::set<std::string> seen;
    std::erase_if(rows, [&](const csv::Row& r) { return !seen.insert(r[0]).second; });
  }
  std::string text = csv::format_row(header);
  for (const auto& r : rows) text += csv::format_row(r);
  write_file_atomic(path, text);
}

std::set<std::string> canonicalize_outputs(const fs::path& dir) {
  canonicalize(dir / "markets.csv", kMarketsHeader, nullptr);
  std::set<std::string> done;
  for (const auto& r : load_table(dir / "markets.csv", kMarketsHeader))
    if (!r.empty()) done.insert(r[0]);
  canonicalize(dir / "trades.csv", kTradesHeader, &done);
  canonicalize(dir / "messages.csv", kMessagesHeader, &done);
  return done;
}

int structure_rank(const std::string& label) {
  if (const auto id = parse_structure_id(label)) return complexity_level(*id);
  return 100;
}

double parse_double(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    return std::nan("");
  }
}

} // namespace

std::string_view agent_kind_name(AgentKind k) {
  switch (k) {
    case AgentKind::Oracle: return "oracle";
    case AgentKind::Noise: return "noise";
    case AgentKind::Hold: return "hold";
    case AgentKind::Remote: return "remote";
  }
  return "?";
}

std::size_t ExperimentGrid::cardinality() const {
  return structures.size() * rounds.size() * objectives.size() * comments.size() *
         initial_prices.size() * disclosure.size() * teams.size() *
         static_cast<std::size_t>(std::max(repetitions, 0));
}

void ExperimentGrid::validate() const {
  if (cardinality() == 0) throw std::invalid_argument("experiment grid is empty");
  for (const auto& s : structures) {
    s.validate();
    if (s.trader_count() != 3) throw std::invalid_argument("grid structures must have three traders");
  }
  std::set<std::string> labels;
  for (const auto& t : teams) {
    if (t.members.size() != 3) throw std::invalid_argument("team " + t.label + " must have three members");
    if (!labels.insert(slug(t.label)).second)
      throw std::invalid_argument("duplicate team label " + t.label);
    for (const auto& m : t.members)
      if (m.kind == AgentKind::Remote && !m.remote)
        throw std::invalid_argument("remote member without client settings");
  }
}

ExperimentGrid grid_from_json(const json& doc) {
  ExperimentGrid g;
  if (doc.contains("structures")) {
    for (const auto& s : doc["structures"]) {
      if (s.is_string()) g.structures.push_back(structure_from_json(json{{"preset", s}}));
      else g.structures.push_back(structure_from_json(s));
    }
  } else {
    for (auto id : kAllPresets) g.structures.push_back(make_structure(id));
  }
  g.rounds = list_or<int>(doc, "rounds", g.rounds);
  if (doc.contains("objectives")) {
    g.objectives.clear();
    for (const auto& o : doc["objectives"]) {
      const auto obj = parse_objective(o.get<std::string>());
      if (!obj) throw std::invalid_argument("unknown objective " + o.get<std::string>());
      g.objectives.push_back(*obj);
    }
  }
  g.comments = list_or<bool>(doc, "comments", g.comments);
  g.initial_prices = list_or<double>(doc, "initial_prices", g.initial_prices);
  g.disclosure = list_or<bool>(doc, "disclosure", g.disclosure);
  for (const auto& t : doc.value("teams", json::array())) {
    TeamSpec team;
    team.label = t.value("label", fmt::format("team{}", g.teams.size() + 1));
    if (t.contains("member")) {
      const auto m = agent_from_json(t["member"]);
      team.members.assign(3, m);
    }
    for (const auto& m : t.value("members", json::array())) team.members.push_back(agent_from_json(m));
    g.teams.push_back(std::move(team));
  }
  g.repetitions = doc.value("repetitions", 1);
  g.base_seed = doc.value("base_seed", std::uint64_t{0});
  g.beta = doc.value("beta", kDefaultBeta);
  g.starting_cash = doc.value("starting_cash", 1000.0);
  return g;
}

ExperimentGrid read_grid_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return grid_from_json(json::parse(in));
}

std::uint64_t market_seed(std::uint64_t base_seed, const std::string& market_id) {
  return splitmix64(base_seed ^ fnv1a(market_id));
}

std::vector<PlannedMarket> expand_grid(const ExperimentGrid& grid) {
  grid.validate();
  std::vector<PlannedMarket> out;
  out.reserve(grid.cardinality());
  for (const auto& s : grid.structures)
    for (int rounds : grid.rounds)
      for (auto obj : grid.objectives)
        for (bool comments : grid.comments)
          for (double p0 : grid.initial_prices)
            for (bool disc : grid.disclosure)
              for (const auto& team : grid.teams)
                for (int rep = 1; rep <= grid.repetitions; ++rep) {
                  PlannedMarket p;
                  p.team = team;
                  p.repetition = rep;
                  auto& c = p.config;
                  c.structure = s;
                  c.rounds = rounds;
                  c.objective = obj;
                  c.comments_allowed = comments;
                  c.initial_price = p0;
                  c.disclosure = disc;
                  c.beta = grid.beta;
                  c.starting_cash = grid.starting_cash;
                  c.team = team.label;
                  c.market_id = fmt::format(
                      "{}_r{}_{}_c{}_p{:03d}_d{}_{}_{:02d}", slug(structure_code_of(s)), rounds,
                      objective_name(obj), comments ? "on" : "off",
                      static_cast<int>(std::lround(p0 * 100.0)), disc ? "on" : "off",
                      slug(team.label), rep);
                  c.seed = market_seed(grid.base_seed, c.market_id);
                  c.instruments.yes = 1000 + static_cast<std::int64_t>(c.seed % 8000) * 2;
                  c.instruments.no = c.instruments.yes + 1;
                  for (const auto& m : team.members) c.intelligence.push_back(m.intelligence);
                  c.validate();
                  out.push_back(std::move(p));
                }
  std::sort(out.begin(), out.end(), [](const PlannedMarket& a, const PlannedMarket& b) {
    return a.config.market_id < b.config.market_id;
  });
  for (std::size_t i = 1; i < out.size(); ++i)
    if (out[i].config.market_id == out[i - 1].config.market_id)
      throw std::invalid_argument("grid produces duplicate market id " + out[i].config.market_id);
  return out;
}

std::shared_ptr<const ChatClient> ClientPool::get(const RemoteClientConfig& config) {
  std::lock_guard lock(mutex_);
  const auto key = fmt::format("{}|{}|{}|{}|{}", config.endpoint, config.model,
                               config.temperature, config.max_retries, config.timeout.count());
  if (auto it = clients_.find(key); it != clients_.end()) return it->second;
  auto& limiter = limiters_[config.endpoint];
  if (!limiter && config.requests_per_minute > 0.0)
    limiter = std::make_shared<RateLimiter>(config.requests_per_minute);
  auto client = std::make_shared<const ChatClient>(config, limiter);
  clients_.emplace(key, client);
  return client;
}

std::vector<std::unique_ptr<Agent>> make_team(const PlannedMarket& plan, ClientPool& clients) {
  std::vector<std::unique_ptr<Agent>> agents;
  for (std::size_t i = 0; i < plan.team.members.size(); ++i) {
    const auto& m = plan.team.members[i];
    switch (m.kind) {
      case AgentKind::Oracle:
        agents.push_back(std::make_unique<MyopicOracleAgent>(plan.config.structure, i));
        break;
      case AgentKind::Noise:
        agents.push_back(std::make_unique<NoiseAgent>(splitmix64(plan.config.seed + i + 1)));
        break;
      case AgentKind::Hold:
        agents.push_back(std::make_unique<HoldAgent>());
        break;
      case AgentKind::Remote:
        agents.push_back(std::make_unique<RemoteAgent>(clients.get(*m.remote)));
        break;
    }
  }
  return agents;
}

const std::vector<std::string>& trades_csv_header() { return kTradesHeader; }
const std::vector<std::string>& markets_csv_header() { return kMarketsHeader; }
const std::vector<std::string>& messages_csv_header() { return kMessagesHeader; }

ExperimentResult run_experiment(const std::vector<PlannedMarket>& plans, const RunOptions& options) {
  if (options.parallelism < 1) throw std::invalid_argument("parallelism must be at least 1");
  const auto& dir = options.out_dir;
  fs::create_directories(dir);
  const auto done = canonicalize_outputs(dir);

  ExperimentResult result;
  result.planned = plans.size();
  std::vector<const PlannedMarket*> todo;
  for (const auto& p : plans) {
    if (done.count(p.config.market_id)) ++result.skipped;
    else todo.push_back(&p);
  }

  std::ofstream trades(dir / "trades.csv", std::ios::app | std::ios::binary);
  std::ofstream markets(dir / "markets.csv", std::ios::app | std::ios::binary);
  std::ofstream messages(dir / "messages.csv", std::ios::app | std::ios::binary);
  if (!trades || !markets || !messages) throw std::runtime_error("cannot open output tables");

  ClientPool clients;
  std::mutex writer;
  std::atomic<std::size_t> next{0};
  std::vector<std::pair<std::string, MarketScore>> scores;

  auto work = [&] {
    for (;;) {
      const auto k = next.fetch_add(1);
      if (k >= todo.size()) return;
      const auto& plan = *todo[k];
      const auto& id = plan.config.market_id;
      try {
        auto agents = make_team(plan, clients);
        const auto t = run_market(plan.config, agents);
        const auto score = score_market(t, options.crash_threshold);
        if (options.write_transcripts) write_transcript(dir / "transcripts", t);
        std::string trade_text, market_text, message_text;
        for (const auto& r : trade_rows(t)) trade_text += csv::format_row(r);
        market_text = csv::format_row(market_row(t, score, plan.repetition));
        for (const auto& r : message_rows(t)) message_text += csv::format_row(r);

        std::lock_guard lock(writer);
        trades << trade_text << std::flush;
        messages << message_text << std::flush;
        markets << market_text << std::flush;
        if (!trades || !markets || !messages) throw std::runtime_error("table write failed");
        scores.emplace_back(id, score);
        ++result.completed;
        if (!options.quiet) std::cerr << fmt::format("done {}\n", id);
      } catch (const std::exception& e) {
        std::lock_guard lock(writer);
        ++result.failed;
        result.errors.push_back(fmt::format("{}: {}", id, e.what()));
        std::cerr << fmt::format("market {} failed: {}\n", id, e.what());
      }
    }
  };

  const auto workers = std::min(options.parallelism, std::max<std::size_t>(todo.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  trades.close();
  markets.close();
  messages.close();

  canonicalize_outputs(dir);
  std::sort(scores.begin(), scores.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (auto& s : scores) result.scores.push_back(std::move(s.second));
  return result;
}

std::vector<MarketScore> read_market_scores(const fs::path& markets_csv) {
  std::vector<MarketScore> out;
  if (!fs::exists(markets_csv)) return out;
  csv::Table table(csv::read_file(markets_csv.string()));
  for (const auto& row : table.rows()) {
    if (row.size() < 2) continue;
    MarketScore s;
    s.market_id = table.get(row, "market_id");
    for (const char* key : {"structure", "rounds", "objective", "comments", "initial_price",
                            "disclosure", "team"})
      s.treatment[key] = table.get(row, key);
    s.final_price = parse_double(table.get(row, "final_price"));
    s.outcome = parse_double(table.get(row, "outcome"));
    s.log_error = parse_double(table.get(row, "log_error"));
    s.squared_error = parse_double(table.get(row, "squared_error"));
    s.crashed = table.get(row, "crashed") == "1";
    s.volume = static_cast<std::int64_t>(parse_double(table.get(row, "volume")));
    for (const char* key : {"profit_1", "profit_2", "profit_3"}) {
      const auto v = table.get(row, key);
      if (!v.empty()) s.profits.push_back(parse_double(v));
    }
    out.push_back(std::move(s));
  }
  return out;
}

Report report(const std::vector<MarketScore>& scores, double crash_threshold) {
  Report r;
  if (scores.empty()) {
    r.text = "no data\n";
    r.csv = csv::format_row({"structure", "rounds", "n", "mse", "mse_se", "mean_log_error",
                             "median_log_error", "crash_rate", "avg_volume", "avg_profit"});
    return r;
  }
  auto rows = summarize(scores, {"structure", "rounds"}, crash_threshold);
  std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    const auto ra = structure_rank(a.key[0]), rb = structure_rank(b.key[0]);
    if (ra != rb) return ra < rb;
    if (a.key[0] != b.key[0]) return a.key[0] < b.key[0];
    return parse_double(a.key[1]) < parse_double(b.key[1]);
  });

  r.text = fmt::format("{:<10} {:>6} {:>5} {:>20} {:>13} {:>15} {:>11} {:>11}\n", "Structure",
                       "Rounds", "N", "MSE (SE)", "Mean Log Err", "Median Log Err", "Crash Rate",
                       "Avg Volume");
  r.csv = csv::format_row({"structure", "rounds", "n", "mse", "mse_se", "mean_log_error",
                           "median_log_error", "crash_rate", "avg_volume", "avg_profit"});
  for (const auto& row : rows) {
    r.text += fmt::format("{:<10} {:>6} {:>5} {:>20} {:>13.4f} {:>15.4f} {:>10.1f}% {:>11.1f}\n",
                          row.key[0], row.key[1], row.n,
                          fmt::format("{:.4f} ({:.4f})", row.mse, row.mse_se), row.mean_log_error,
                          row.median_log_error, row.crash_rate * 100.0, row.mean_volume);
    r.csv += csv::format_row({row.key[0], row.key[1], std::to_string(row.n), fmt_num(row.mse),
                              fmt_num(row.mse_se), fmt_num(row.mean_log_error),
                              fmt_num(row.median_log_error), fmt_num(row.crash_rate),
                              fmt_num(row.mean_volume), fmt_num(row.mean_profit)});
  }
  return r;
}

Report report_file(const fs::path& markets_csv, double crash_threshold) {
  return report(read_market_scores(markets_csv), crash_threshold);
}

} // namespace infoagg
