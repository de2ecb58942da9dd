#include "infoagg/decision_parser.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <string>

#include <json.hpp>

namespace infoagg {

using nlohmann::json;

namespace {

// End (one past the closing brace) of the object starting at `open`, or npos.
std::size_t matching_brace(std::string_view text, std::size_t open) {
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = open; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      if (escaped) escaped = false;
      else if (c == '\\') escaped = true;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '{') ++depth;
    else if (c == '}' && --depth == 0) return i + 1;
  }
  return std::string_view::npos;
}

std::optional<json> first_object(std::string_view text) {
  for (std::size_t pos = text.find('{'); pos != std::string_view::npos;
       pos = text.find('{', pos + 1)) {
    const auto end = matching_brace(text, pos);
    if (end == std::string_view::npos) continue;
    auto doc = json::parse(text.substr(pos, end - pos), nullptr, false);
    if (!doc.is_discarded() && doc.is_object()) return doc;
  }
  return std::nullopt;
}

std::optional<std::int64_t> leading_integer(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), value);
  if (ec != std::errc() || ptr == s.data() + i || !std::isfinite(value)) return std::nullopt;
  return static_cast<std::int64_t>(std::trunc(value));
}

std::optional<std::int64_t> as_integer(const json& v) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (!std::isfinite(d)) return std::nullopt;
    return static_cast<std::int64_t>(std::trunc(d));
  }
  if (v.is_string()) return leading_integer(v.get<std::string>());
  return std::nullopt;
}

std::string as_text(const json& obj, const char* key) {
  if (!obj.contains(key) || obj[key].is_null()) return {};
  const auto& v = obj[key];
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::optional<Side> side_from_text(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "yes") return Side::Yes;
  if (s == "no") return Side::No;
  return std::nullopt;
}

} // namespace

Decision parse_decision(std::string_view text, const InstrumentIds& instruments) {
  const auto obj = first_object(text);
  if (!obj) throw ParseFailure("no JSON object in reply");
  if (!obj->contains("action") || !(*obj)["action"].is_string())
    throw ParseFailure("missing action");
  const auto action = parse_action((*obj)["action"].get<std::string>());
  if (!action) throw ParseFailure("unknown action '" + (*obj)["action"].get<std::string>() + "'");

  Decision d;
  d.action = *action;
  d.public_justification = as_text(*obj, "public_justification");
  d.private_reasoning = as_text(*obj, "private_reasoning");

  std::optional<Side> side;
  if (obj->contains("instrument_id")) {
    if (auto id = as_integer((*obj)["instrument_id"])) side = instruments.side_of(*id);
  }
  if (!side && obj->contains("side") && (*obj)["side"].is_string())
    side = side_from_text((*obj)["side"].get<std::string>());

  if (d.action == Action::Hold) {
    d.side = side.value_or(Side::Yes);
    d.size = 0;
    return d;
  }
  if (!side) throw ParseFailure("missing or unknown instrument");
  d.side = *side;
  if (!obj->contains("size")) throw ParseFailure("missing size");
  const auto size = as_integer((*obj)["size"]);
  if (!size) throw ParseFailure("size is not a number");
  d.size = *size;
  return d;
}

} // namespace infoagg
