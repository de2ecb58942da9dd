#include "infoagg/structure_io.hpp"

#include <fstream>
#include <stdexcept>

namespace infoagg {

using nlohmann::json;

namespace {

StateIndex state_by_name(const StateSpace& space, const std::string& name) {
  auto idx = space.find(name);
  if (!idx) throw std::invalid_argument("unknown state name '" + name + "'");
  return *idx;
}

std::size_t signal_by_name(const StateSpace& space, const std::string& name) {
  for (std::size_t i = 0; i < space.signal_names.size(); ++i)
    if (space.signal_names[i] == name) return i;
  throw std::invalid_argument("unknown signal name '" + name + "'");
}

} // namespace

json structure_to_json(const InfoStructure& s) {
  json doc;
  doc["name"] = s.name;
  if (s.preset) doc["preset"] = std::string(structure_label(*s.preset));
  doc["signals"] = s.space.signal_names;
  doc["states"] = s.space.state_names;
  doc["prior"] = s.prior.weights;
  doc["payoff"] = s.security.payoff;
  doc["true_state"] = s.space.state_names[s.true_state];
  json traders = json::array();
  for (std::size_t t = 0; t < s.trader_count(); ++t) {
    json trader;
    json cells = json::array();
    for (const auto& cell : s.partitions[t].cells()) {
      json names = json::array();
      cell.for_each([&](StateIndex k) { names.push_back(s.space.state_names[k]); });
      cells.push_back(std::move(names));
    }
    trader["cells"] = std::move(cells);
    if (!s.observed_signals.empty()) {
      json sigs = json::array();
      for (auto sig : s.observed_signals[t]) sigs.push_back(s.space.signal_names[sig]);
      trader["signals"] = std::move(sigs);
    }
    traders.push_back(std::move(trader));
  }
  doc["traders"] = std::move(traders);
  return doc;
}

InfoStructure structure_from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("structure document must be a JSON object");

  if (doc.contains("preset") && !doc.contains("traders")) {
    auto id = parse_structure_id(doc.at("preset").get<std::string>());
    if (!id) throw std::invalid_argument("unknown preset");
    return make_structure(*id);
  }

  InfoStructure s;
  s.space = StateSpace::binary(doc.at("signals").get<std::vector<std::string>>());
  if (doc.contains("states")) {
    auto names = doc.at("states").get<std::vector<std::string>>();
    if (names.size() != s.space.size())
      throw std::invalid_argument("state name list must have 2^signals entries");
    s.space.state_names = std::move(names);
  }
  s.name = doc.value("name", std::string("custom"));
  if (doc.contains("preset")) s.preset = parse_structure_id(doc.at("preset").get<std::string>());
  s.prior = doc.contains("prior") ? Prior{doc.at("prior").get<std::vector<double>>()}
                                  : Prior::uniform(s.space.size());
  s.security.payoff = doc.at("payoff").get<std::vector<double>>();
  s.true_state = state_by_name(s.space, doc.at("true_state").get<std::string>());

  bool all_have_signals = true;
  for (const auto& trader : doc.at("traders")) {
    std::vector<StateSet> cells;
    for (const auto& cell : trader.at("cells")) {
      StateSet set(s.space.size());
      for (const auto& name : cell) set.insert(state_by_name(s.space, name.get<std::string>()));
      cells.push_back(std::move(set));
    }
    s.partitions.emplace_back(s.space.size(), std::move(cells));
    if (trader.contains("signals")) {
      std::vector<std::size_t> sigs;
      for (const auto& name : trader.at("signals"))
        sigs.push_back(signal_by_name(s.space, name.get<std::string>()));
      s.observed_signals.push_back(std::move(sigs));
    } else {
      all_have_signals = false;
    }
  }
  if (!all_have_signals) s.observed_signals.clear();
  s.validate();
  return s;
}

InfoStructure read_structure_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open structure file " + path.string());
  return structure_from_json(json::parse(in));
}

void write_structure_file(const std::filesystem::path& path, const InfoStructure& structure) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write structure file " + path.string());
  out << structure_to_json(structure).dump(2) << '\n';
}

} // namespace infoagg
