#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "infoagg/knowledge.hpp"

namespace infoagg {

inline constexpr double kWitnessTolerance = 1e-9;

// Per-cell weights; lambda[i][c] belongs to cell c of trader i.
struct Certificate {
  std::vector<std::vector<double>> lambda;
  std::vector<double> thresholds;  // candidate values of v this certificate covers
};

// A prior under which every trader's every posterior equals v although the
// security differs from v somewhere on the support.
struct Witness {
  Prior mu;
  double v = 0.0;
};

struct Separable {
  std::vector<Certificate> certificates;
};

struct NonSeparable {
  Witness witness;
};

using SeparabilityVerdict = std::variant<Separable, NonSeparable>;

// True iff (X(w) - v) * sum_i lambda_i(cell_i(w)) > 0 wherever X(w) != v.
// Throws std::invalid_argument if the certificate is not total over cells.
bool certificate_holds(const InfoStructure& s, const Certificate& cert, double v);

// Exact rational feasibility with the strict system normalized to +-1 bounds.
std::optional<Certificate> find_certificate(const InfoStructure& s, double v);

// Maximizes prior mass off the level set {X = v} subject to every cell's
// conditional expectation equalling v.
std::optional<Witness> witness_search(const InfoStructure& s, double v);

// True iff the witness meets both defining conditions within kWitnessTolerance.
bool witness_holds(const InfoStructure& s, const Witness& w);

// Interior values of v at which the sign pattern of X - v can change.
std::vector<double> candidate_thresholds(const Security& x);

bool is_arrow_debreu(const Security& x);

SeparabilityVerdict classify(const InfoStructure& s);

// Structured text rendering for the CLI.
std::string describe_verdict(const InfoStructure& s, const SeparabilityVerdict& verdict);

} // namespace infoagg
