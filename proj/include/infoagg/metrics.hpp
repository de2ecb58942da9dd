#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infoagg/engine.hpp"

namespace infoagg {

inline constexpr double kLogErrorClamp = 1e-15;
inline constexpr double kCrashThreshold = 20.0;

// -[y ln p + (1-y) ln(1-p)] with p clamped into [1e-15, 1-1e-15].
double log_error(double p, double y);
double squared_error(double p, double y);

struct MarketScore {
  std::string market_id;
  std::map<std::string, std::string> treatment;  // structure, rounds, objective, ...
  double final_price = 0.0;
  double outcome = 0.0;
  double log_error = 0.0;
  double squared_error = 0.0;
  bool crashed = false;
  std::int64_t volume = 0;  // executed shares, buys and sells
  std::vector<double> profits;
};

MarketScore score_market(const Transcript& t, double crash_threshold = kCrashThreshold);
// Treatment columns of a market configuration, as written to markets.csv.
std::map<std::string, std::string> treatment_of(const MarketConfig& config);
std::int64_t traded_volume(const Transcript& t);
std::vector<std::int64_t> trader_volumes(const Transcript& t);

struct SummaryRow {
  std::vector<std::string> key;
  std::size_t n = 0;
  double mean_log_error = 0.0;
  double median_log_error = 0.0;
  double mse = 0.0;
  double mse_se = 0.0;  // standard error of the mean squared error
  double crash_rate = 0.0;
  double mean_volume = 0.0;
  double mean_profit = 0.0;  // per trader
};

// One row per distinct value of the treatment keys, sorted by key.
// `crashed` is recomputed against `crash_threshold`.
std::vector<SummaryRow> summarize(const std::vector<MarketScore>& scores,
                                  const std::vector<std::string>& keys,
                                  double crash_threshold = kCrashThreshold);

// Lowercased alphanumeric runs.
std::vector<std::string> tokenize(std::string_view text);
double cosine_similarity(std::string_view a, std::string_view b);
// Whitespace-delimited word count of private minus public.
std::int64_t word_gap(std::string_view private_text, std::string_view public_text);
// |actual - judged|; throws std::invalid_argument outside {0,1} x {0,0.5,1}.
double deception_distance(double actual, double judged);

struct MessagePair {
  std::string market_id;
  int round = 0;
  std::size_t trader = 0;
  std::string public_text;
  std::string private_text;
};

std::vector<MessagePair> message_pairs(const Transcript& t);

struct DeceptionLabel {
  std::string market_id;
  int round = 0;
  std::size_t trader = 0;  // zero-based
  double judged = 0.0;
  std::optional<double> judged_second;
};

struct LabelSet {
  std::vector<DeceptionLabel> labels;
  std::size_t skipped = 0;  // unparseable rows
};

// Columns: market_id, round, trader, judged_value[, judged_value_2].
// Traders may be given as 1-based numbers or "trader_N".
LabelSet read_labels(const std::string& path);
LabelSet parse_labels(std::string_view csv_text);

struct DeceptionRow {
  std::string market_id;
  int round = 0;
  std::size_t trader = 0;
  double distance = 0.0;
};

struct DeceptionReport {
  std::vector<DeceptionRow> rows;
  std::size_t skipped = 0;  // public messages without a usable label
  double mean() const;
};

// Compares each public message against the speaker's true private signals;
// a second judgment, when the trader observes two signals, is averaged in.
DeceptionReport assess_deception(const std::vector<Transcript>& transcripts,
                                 const LabelSet& labels);

} // namespace infoagg
