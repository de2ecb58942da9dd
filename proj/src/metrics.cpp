#include "infoagg/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <boost/algorithm/string/trim.hpp>
#include <fmt/format.h>

#include "infoagg/csv.hpp"

namespace infoagg {

double log_error(double p, double y) {
  const double q = std::clamp(p, kLogErrorClamp, 1.0 - kLogErrorClamp);
  return -(y * std::log(q) + (1.0 - y) * std::log1p(-q));
}

double squared_error(double p, double y) { return (p - y) * (p - y); }

std::map<std::string, std::string> treatment_of(const MarketConfig& c) {
  std::map<std::string, std::string> t;
  t["structure"] = c.structure.preset ? std::string(structure_label(*c.structure.preset))
                                      : c.structure.name;
  t["rounds"] = std::to_string(c.rounds);
  t["objective"] = std::string(objective_name(c.objective));
  t["comments"] = c.comments_allowed ? "on" : "off";
  t["initial_price"] = fmt::format("{}", c.initial_price);
  t["disclosure"] = c.disclosure ? "on" : "off";
  t["team"] = c.team;
  return t;
}

std::int64_t traded_volume(const Transcript& t) {
  std::int64_t v = 0;
  for (const auto& tr : t.trades) v += tr.executed;
  return v;
}

std::vector<std::int64_t> trader_volumes(const Transcript& t) {
  std::vector<std::int64_t> v(t.config.structure.trader_count(), 0);
  for (const auto& tr : t.trades) v.at(tr.trader) += tr.executed;
  return v;
}

MarketScore score_market(const Transcript& t, double crash_threshold) {
  MarketScore s;
  s.market_id = t.config.market_id;
  s.treatment = treatment_of(t.config);
  s.final_price = t.final_price;
  s.outcome = t.outcome;
  s.log_error = log_error(t.final_price, t.outcome);
  s.squared_error = squared_error(t.final_price, t.outcome);
  s.crashed = s.log_error > crash_threshold;
  s.volume = traded_volume(t);
  s.profits = t.profits;
  return s;
}

std::vector<SummaryRow> summarize(const std::vector<MarketScore>& scores,
                                  const std::vector<std::string>& keys,
                                  double crash_threshold) {
  std::map<std::vector<std::string>, std::vector<const MarketScore*>> groups;
  for (const auto& s : scores) {
    std::vector<std::string> key;
    for (const auto& k : keys) {
      const auto it = s.treatment.find(k);
      key.push_back(it == s.treatment.end() ? std::string() : it->second);
    }
    groups[key].push_back(&s);
  }

  std::vector<SummaryRow> out;
  for (auto& [key, members] : groups) {
    if (members.empty()) continue;
    // Canonical order makes floating sums independent of input order.
    std::sort(members.begin(), members.end(), [](const MarketScore* a, const MarketScore* b) {
      return std::tie(a->market_id, a->log_error) < std::tie(b->market_id, b->log_error);
    });
    SummaryRow row;
    row.key = key;
    row.n = members.size();
    const double n = static_cast<double>(row.n);

    std::vector<double> logs;
    double sq = 0.0, crashes = 0.0, volume = 0.0, profit = 0.0;
    std::size_t profit_count = 0;
    for (const auto* m : members) {
      logs.push_back(m->log_error);
      sq += m->squared_error;
      crashes += m->log_error > crash_threshold ? 1.0 : 0.0;
      volume += static_cast<double>(m->volume);
      for (double p : m->profits) {
        profit += p;
        ++profit_count;
      }
    }
    row.mean_log_error = std::accumulate(logs.begin(), logs.end(), 0.0) / n;
    std::sort(logs.begin(), logs.end());
    row.median_log_error = row.n % 2 == 1 ? logs[row.n / 2]
                                          : (logs[row.n / 2 - 1] + logs[row.n / 2]) / 2.0;
    row.mse = sq / n;
    if (row.n > 1) {
      double var = 0.0;
      for (const auto* m : members) var += (m->squared_error - row.mse) * (m->squared_error - row.mse);
      var /= n - 1.0;
      row.mse_se = std::sqrt(var / n);
    }
    row.crash_rate = crashes / n;
    row.mean_volume = volume / n;
    row.mean_profit = profit_count ? profit / static_cast<double>(profit_count) : 0.0;
    out.push_back(std::move(row));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

double cosine_similarity(std::string_view a, std::string_view b) {
  std::map<std::string, double> va, vb;
  for (auto& t : tokenize(a)) va[t] += 1.0;
  for (auto& t : tokenize(b)) vb[t] += 1.0;
  if (va.empty() || vb.empty()) return 0.0;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [w, c] : va) {
    na += c * c;
    if (auto it = vb.find(w); it != vb.end()) dot += c * it->second;
  }
  for (const auto& [w, c] : vb) nb += c * c;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), 0.0, 1.0);
}

namespace {

std::int64_t word_count(std::string_view text) {
  std::int64_t n = 0;
  bool in_word = false;
  for (char ch : text) {
    const bool space = std::isspace(static_cast<unsigned char>(ch)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

} // namespace

std::int64_t word_gap(std::string_view private_text, std::string_view public_text) {
  return word_count(private_text) - word_count(public_text);
}

double deception_distance(double actual, double judged) {
  if (actual != 0.0 && actual != 1.0) throw std::invalid_argument("actual signal must be 0 or 1");
  if (judged != 0.0 && judged != 0.5 && judged != 1.0)
    throw std::invalid_argument("judged value must be 0, 0.5 or 1");
  return std::abs(actual - judged);
}

std::vector<MessagePair> message_pairs(const Transcript& t) {
  std::vector<MessagePair> out;
  for (const auto& c : t.comments) {
    MessagePair m;
    m.market_id = t.config.market_id;
    m.round = c.round;
    m.trader = c.trader;
    m.public_text = c.text;
    for (const auto& r : t.reasonings)
      if (r.round == c.round && r.trader == c.trader) m.private_text = r.text;
    out.push_back(std::move(m));
  }
  return out;
}

namespace {

std::optional<double> parse_judgment(std::string text) {
  boost::algorithm::trim(text);
  if (text.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) return std::nullopt;
    if (v != 0.0 && v != 0.5 && v != 1.0) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

std::optional<std::size_t> parse_trader(std::string text) {
  boost::algorithm::trim(text);
  if (text.rfind("trader_", 0) == 0) text = text.substr(7);
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size() || v < 1) return std::nullopt;
    return static_cast<std::size_t>(v - 1);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

} // namespace

LabelSet parse_labels(std::string_view csv_text) {
  csv::Table table(csv::parse(csv_text));
  LabelSet out;
  for (const auto& row : table.rows()) {
    if (row.size() == 1 && row[0].empty()) continue;
    DeceptionLabel l;
    l.market_id = table.get(row, "market_id");
    const auto trader = parse_trader(table.get(row, "trader"));
    const auto judged = parse_judgment(table.get(row, "judged_value"));
    int round = 0;
    try {
      round = std::stoi(table.get(row, "round"));
    } catch (const std::exception&) {
      round = 0;
    }
    if (l.market_id.empty() || !trader || !judged || round < 1) {
      ++out.skipped;
      continue;
    }
    l.round = round;
    l.trader = *trader;
    l.judged = *judged;
    const auto second = table.get(row, "judged_value_2");
    if (!second.empty()) {
      l.judged_second = parse_judgment(second);
      if (!l.judged_second) {
        ++out.skipped;
        continue;
      }
    }
    out.labels.push_back(std::move(l));
  }
  return out;
}

LabelSet read_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_labels(text.str());
}

double DeceptionReport::mean() const {
  if (rows.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rows) s += r.distance;
  return s / static_cast<double>(rows.size());
}

DeceptionReport assess_deception(const std::vector<Transcript>& transcripts,
                                 const LabelSet& labels) {
  std::map<std::tuple<std::string, int, std::size_t>, const DeceptionLabel*> index;
  for (const auto& l : labels.labels) index[{l.market_id, l.round, l.trader}] = &l;

  DeceptionReport report;
  for (const auto& t : transcripts) {
    const auto& s = t.config.structure;
    for (const auto& c : t.comments) {
      const auto it = index.find({t.config.market_id, c.round, c.trader});
      if (it == index.end() || c.trader >= s.observed_signals.size() ||
          s.observed_signals[c.trader].empty()) {
        ++report.skipped;
        continue;
      }
      const auto& signals = s.observed_signals[c.trader];
      const auto& l = *it->second;
      double d = deception_distance(s.space.signal_value(s.true_state, signals[0]), l.judged);
      if (signals.size() > 1 && l.judged_second) {
        d += deception_distance(s.space.signal_value(s.true_state, signals[1]), *l.judged_second);
        d /= 2.0;
      }
      report.rows.push_back({t.config.market_id, c.round, c.trader, d});
    }
  }
  return report;
}

} // namespace infoagg
