#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace golden {

inline std::string read(const std::string& name) {
  std::ifstream in(std::string(GOLDEN_DIR) + "/" + name, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// Joins the hard-wrapped "Public Information:" paragraph of the transcribed
// exemplar into one line, as the builder emits it.
inline std::vector<std::string> unwrap_public_info(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (in[i].rfind("Public Information:", 0) != 0) {
      out.push_back(in[i]);
      continue;
    }
    std::string joined = in[i];
    while (i + 1 < in.size() && !in[i + 1].empty()) joined += in[++i];
    out.push_back(joined);
  }
  return out;
}

struct Comparison {
  bool ok = true;
  std::size_t truncated = 0;  // exemplar lines cut short at a percent sign
  std::string first_mismatch;
};

// Line-by-line match; an exemplar line may be a prefix of ours only where
// ours continues with a percent sign (lost in the transcription).
inline Comparison compare_to_exemplar(const std::string& exemplar, const std::string& ours) {
  Comparison c;
  const auto a = unwrap_public_info(lines(exemplar));
  const auto b = lines(ours);
  if (a.size() != b.size()) {
    c.ok = false;
    c.first_mismatch = "line count " + std::to_string(a.size()) + " vs " + std::to_string(b.size());
    return c;
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    if (b[i].size() > a[i].size() && b[i].compare(0, a[i].size(), a[i]) == 0 && b[i][a[i].size()] == '%') {
      ++c.truncated;
      continue;
    }
    c.ok = false;
    c.first_mismatch = "line " + std::to_string(i + 1) + ": " + b[i];
    return c;
  }
  return c;
}

} // namespace golden
