#include "infoagg/separability.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>
#include <fmt/format.h>

#include "infoagg/lp.hpp"

namespace infoagg {

namespace {

using Rational = boost::multiprecision::cpp_rational;

Rational exact(double x) { return Rational(x); }

std::size_t total_cells(const InfoStructure& s) {
  std::size_t n = 0;
  for (const auto& p : s.partitions) n += p.cells().size();
  return n;
}

std::vector<std::size_t> cell_offsets(const InfoStructure& s) {
  std::vector<std::size_t> off;
  std::size_t n = 0;
  for (const auto& p : s.partitions) {
    off.push_back(n);
    n += p.cells().size();
  }
  return off;
}

Certificate arrow_debreu_certificate(const InfoStructure& s, StateIndex paying) {
  const double n = static_cast<double>(s.trader_count());
  Certificate cert;
  for (const auto& p : s.partitions) {
    std::vector<double> row;
    for (const auto& cell : p.cells()) row.push_back(cell.contains(paying) ? 1.0 : -n);
    cert.lambda.push_back(std::move(row));
  }
  return cert;
}

} // namespace

bool certificate_holds(const InfoStructure& s, const Certificate& cert, double v) {
  if (cert.lambda.size() != s.trader_count())
    throw std::invalid_argument("certificate must assign weights for every trader");
  for (std::size_t i = 0; i < s.trader_count(); ++i)
    if (cert.lambda[i].size() != s.partitions[i].cells().size())
      throw std::invalid_argument("certificate must assign one weight per cell");
  for (StateIndex w = 0; w < s.state_count(); ++w) {
    const double diff = s.security(w) - v;
    if (diff == 0.0) continue;
    double sum = 0.0;
    for (std::size_t i = 0; i < s.trader_count(); ++i)
      sum += cert.lambda[i][s.partitions[i].cell_index_of(w)];
    if (!(diff * sum > 0.0)) return false;
  }
  return true;
}

std::optional<Certificate> find_certificate(const InfoStructure& s, double v) {
  const auto off = cell_offsets(s);
  const std::size_t cells = total_cells(s);
  // Free weights split as lambda = plus - minus.
  lp::Program<Rational> prog(2 * cells);
  for (StateIndex w = 0; w < s.state_count(); ++w) {
    const double x = s.security(w);
    if (x == v) continue;
    std::vector<Rational> row(2 * cells, Rational(0));
    for (std::size_t i = 0; i < s.trader_count(); ++i) {
      const auto c = off[i] + s.partitions[i].cell_index_of(w);
      row[c] += 1;
      row[cells + c] -= 1;
    }
    if (x > v) prog.add(std::move(row), lp::Relation::GreaterEqual, Rational(1));
    else prog.add(std::move(row), lp::Relation::LessEqual, Rational(-1));
  }
  const auto res = lp::solve(prog);
  if (res.status != lp::Status::Optimal) return std::nullopt;

  Certificate cert;
  cert.thresholds = {v};
  for (std::size_t i = 0; i < s.trader_count(); ++i) {
    std::vector<double> row;
    for (std::size_t c = 0; c < s.partitions[i].cells().size(); ++c) {
      const Rational l = res.x[off[i] + c] - res.x[cells + off[i] + c];
      row.push_back(static_cast<double>(l));
    }
    cert.lambda.push_back(std::move(row));
  }
  return cert;
}

std::optional<Witness> witness_search(const InfoStructure& s, double v) {
  const std::size_t n = s.state_count();
  lp::Program<Rational> prog(n);
  const Rational rv = exact(v);
  prog.add(std::vector<Rational>(n, Rational(1)), lp::Relation::Equal, Rational(1));
  for (const auto& p : s.partitions) {
    for (const auto& cell : p.cells()) {
      std::vector<Rational> row(n, Rational(0));
      bool any = false;
      cell.for_each([&](StateIndex w) {
        row[w] = exact(s.security(w)) - rv;
        any = any || row[w] != 0;
      });
      if (any) prog.add(std::move(row), lp::Relation::Equal, Rational(0));
    }
  }
  for (StateIndex w = 0; w < n; ++w)
    if (s.security(w) != v) prog.objective[w] = 1;
  const auto res = lp::solve(prog);
  if (res.status != lp::Status::Optimal || res.value <= 0) return std::nullopt;

  Witness wit;
  wit.v = v;
  for (const auto& m : res.x) wit.mu.weights.push_back(static_cast<double>(m));
  return wit;
}

bool witness_holds(const InfoStructure& s, const Witness& w) {
  const auto& mu = w.mu.weights;
  if (mu.size() != s.state_count()) return false;
  double total = 0.0;
  bool disagrees = false;
  for (StateIndex k = 0; k < mu.size(); ++k) {
    if (mu[k] < 0.0) return false;
    total += mu[k];
    if (mu[k] > 0.0 && std::abs(s.security(k) - w.v) > kWitnessTolerance) disagrees = true;
  }
  if (std::abs(total - 1.0) > kWitnessTolerance || !disagrees) return false;
  for (const auto& p : s.partitions) {
    for (const auto& cell : p.cells()) {
      double mass = 0.0, value = 0.0;
      cell.for_each([&](StateIndex k) {
        mass += mu[k];
        value += mu[k] * s.security(k);
      });
      if (mass <= 0.0) continue;
      if (std::abs(value / mass - w.v) > kWitnessTolerance) return false;
    }
  }
  return true;
}

std::vector<double> candidate_thresholds(const Security& x) {
  std::set<double> distinct(x.payoff.begin(), x.payoff.end());
  std::vector<double> values(distinct.begin(), distinct.end());
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (i > 0) out.push_back(values[i]);
    out.push_back(values[i] + (values[i + 1] - values[i]) / 2.0);
  }
  return out;
}

bool is_arrow_debreu(const Security& x) {
  std::size_t ones = 0;
  for (double p : x.payoff) {
    if (p == 1.0) ++ones;
    else if (p != 0.0) return false;
  }
  return ones == 1;
}

SeparabilityVerdict classify(const InfoStructure& s) {
  if (s.state_count() > (std::size_t{1} << 16))
    throw std::invalid_argument("state space too large to classify");

  const auto candidates = candidate_thresholds(s.security);
  if (is_arrow_debreu(s.security) && s.join_is_discrete()) {
    const auto it = std::find(s.security.payoff.begin(), s.security.payoff.end(), 1.0);
    auto cert = arrow_debreu_certificate(s, static_cast<StateIndex>(it - s.security.payoff.begin()));
    cert.thresholds = candidates;
    return Separable{{std::move(cert)}};
  }

  Separable sep;
  for (double v : candidates) {
    bool covered = false;
    for (auto& cert : sep.certificates) {
      if (certificate_holds(s, cert, v)) {
        cert.thresholds.push_back(v);
        covered = true;
        break;
      }
    }
    if (covered) continue;
    if (auto cert = find_certificate(s, v)) {
      sep.certificates.push_back(std::move(*cert));
      continue;
    }
    if (auto wit = witness_search(s, v)) return NonSeparable{std::move(*wit)};
    throw std::logic_error(fmt::format("neither certificate nor witness found at v={}", v));
  }
  return sep;
}

std::string describe_verdict(const InfoStructure& s, const SeparabilityVerdict& verdict) {
  std::string out = fmt::format("structure: {}\n", s.name);
  if (const auto* sep = std::get_if<Separable>(&verdict)) {
    out += "verdict: separable\n";
    for (std::size_t k = 0; k < sep->certificates.size(); ++k) {
      const auto& cert = sep->certificates[k];
      out += fmt::format("certificate {}: v in {{{}}}\n", k + 1,
                         fmt::join(cert.thresholds, ", "));
      for (std::size_t i = 0; i < cert.lambda.size(); ++i) {
        for (std::size_t c = 0; c < cert.lambda[i].size(); ++c) {
          out += fmt::format("  trader_{} {} lambda={}\n", i + 1,
                             describe_event(s, s.partitions[i].cells()[c]),
                             cert.lambda[i][c]);
        }
      }
    }
  } else {
    const auto& w = std::get<NonSeparable>(verdict).witness;
    out += "verdict: non-separable\n";
    out += fmt::format("witness: v={}\n", w.v);
    for (StateIndex k = 0; k < w.mu.weights.size(); ++k)
      if (w.mu.weights[k] > 0.0)
        out += fmt::format("  mu({})={}\n", s.space.state_names[k], w.mu.weights[k]);
  }
  return out;
}

} // namespace infoagg
