#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "infoagg/engine.hpp"
#include "infoagg/metrics.hpp"
#include "infoagg/remote.hpp"

namespace infoagg {

enum class AgentKind { Oracle, Noise, Hold, Remote };

std::string_view agent_kind_name(AgentKind k);

struct AgentSpec {
  AgentKind kind = AgentKind::Oracle;
  std::optional<RemoteClientConfig> remote;  // required for Remote
  std::optional<double> intelligence;        // shown in the disclosure block
};

struct TeamSpec {
  std::string label;
  std::vector<AgentSpec> members;  // exactly three
};

struct ExperimentGrid {
  std::vector<InfoStructure> structures;
  std::vector<int> rounds{3, 6, 9};
  std::vector<Objective> objectives{Objective::Myopic, Objective::Strategic};
  std::vector<bool> comments{true, false};
  std::vector<double> initial_prices{0.3, 0.5, 0.7};
  std::vector<bool> disclosure{true, false};
  std::vector<TeamSpec> teams;
  int repetitions = 1;
  std::uint64_t base_seed = 0;
  double beta = kDefaultBeta;
  double starting_cash = 1000.0;

  std::size_t cardinality() const;
  // Throws std::invalid_argument.
  void validate() const;
};

// Missing treatment lists default to the full factorial over all presets.
// Teams are required; a member may be written once as "member" for a
// homogeneous team.
ExperimentGrid grid_from_json(const nlohmann::json& doc);
ExperimentGrid read_grid_file(const std::filesystem::path& path);

struct PlannedMarket {
  MarketConfig config;
  TeamSpec team;
  int repetition = 1;
};

// Stable per-market seed: independent of enumeration order.
std::uint64_t market_seed(std::uint64_t base_seed, const std::string& market_id);

// Deterministic enumeration sorted by market_id; throws std::invalid_argument
// on an empty grid.
std::vector<PlannedMarket> expand_grid(const ExperimentGrid& grid);

// Chat clients shared across markets; one rate limiter per endpoint.
class ClientPool {
public:
  std::shared_ptr<const ChatClient> get(const RemoteClientConfig& config);

private:
  std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const ChatClient>> clients_;
  std::map<std::string, std::shared_ptr<RateLimiter>> limiters_;
};

// Fresh agents for one market.
std::vector<std::unique_ptr<Agent>> make_team(const PlannedMarket& plan, ClientPool& clients);

struct RunOptions {
  std::filesystem::path out_dir = "results";
  std::size_t parallelism = 1;
  bool write_transcripts = true;
  double crash_threshold = kCrashThreshold;
  bool quiet = true;
};

struct ExperimentResult {
  std::size_t planned = 0;
  std::size_t completed = 0;
  std::size_t skipped = 0;  // already present in markets.csv
  std::size_t failed = 0;
  std::vector<std::string> errors;
  std::vector<MarketScore> scores;  // markets run in this invocation
};

// Frozen CSV schemas.
const std::vector<std::string>& trades_csv_header();
const std::vector<std::string>& markets_csv_header();
const std::vector<std::string>& messages_csv_header();

// Runs every planned market on a pool of workers, appending to
// <out>/trades.csv, <out>/markets.csv and <out>/messages.csv and writing
// <out>/transcripts/<market_id>.{txt,jsonl}. Markets already listed in
// markets.csv are skipped. Rows are sorted by market_id when the run ends.
ExperimentResult run_experiment(const std::vector<PlannedMarket>& plans, const RunOptions& options);

// Scores loaded back from markets.csv.
std::vector<MarketScore> read_market_scores(const std::filesystem::path& markets_csv);

struct Report {
  std::string text;
  std::string csv;
};

// Structure x duration table: N, MSE (SE), mean and median log error,
// crash rate, average volume.
Report report(const std::vector<MarketScore>& scores, double crash_threshold = kCrashThreshold);
Report report_file(const std::filesystem::path& markets_csv, double crash_threshold = kCrashThreshold);

} // namespace infoagg
