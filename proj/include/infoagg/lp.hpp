#pragma once

#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace infoagg::lp {

enum class Relation { LessEqual, Equal, GreaterEqual };
enum class Status { Optimal, Infeasible, Unbounded };

// maximize objective·x  subject to  rows[i]·x (rel) rhs[i],  x >= 0.
template <class T>
struct Program {
  std::size_t variables = 0;
  std::vector<std::vector<T>> rows;
  std::vector<Relation> relations;
  std::vector<T> rhs;
  std::vector<T> objective;

  explicit Program(std::size_t n = 0) : variables(n), objective(n, T(0)) {}

  void add(std::vector<T> row, Relation rel, T b) {
    if (row.size() != variables) throw std::invalid_argument("constraint width mismatch");
    rows.push_back(std::move(row));
    relations.push_back(rel);
    rhs.push_back(std::move(b));
  }
};

template <class T>
struct Result {
  Status status = Status::Infeasible;
  std::vector<T> x;
  T value{0};
};

namespace detail {

template <class T>
bool positive(const T& v) {
  if constexpr (std::is_floating_point_v<T>) return v > T(1e-12);
  else return v > 0;
}

template <class T>
bool nonzero(const T& v) {
  if constexpr (std::is_floating_point_v<T>) return v > T(1e-12) || v < T(-1e-12);
  else return v != 0;
}

// Dense tableau in canonical form; the last column holds the right-hand side.
template <class T>
class Tableau {
public:
  std::vector<std::vector<T>> t;
  std::vector<std::size_t> basis;
  std::size_t columns = 0;

  void pivot(std::size_t r, std::size_t c) {
    const T p = t[r][c];
    for (auto& e : t[r]) e /= p;
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i == r || !nonzero(t[i][c])) continue;
      const T f = t[i][c];
      for (std::size_t j = 0; j <= columns; ++j)
        if (nonzero(t[r][j])) t[i][j] -= f * t[r][j];
    }
    basis[r] = c;
  }

  // Bland's rule; `allowed` masks columns that may enter.
  Status maximize(const std::vector<T>& cost, const std::vector<bool>& allowed) {
    for (;;) {
      std::size_t enter = columns;
      for (std::size_t j = 0; j < columns && enter == columns; ++j) {
        if (!allowed[j]) continue;
        T d = cost[j];
        for (std::size_t i = 0; i < t.size(); ++i)
          if (nonzero(t[i][j])) d -= cost[basis[i]] * t[i][j];
        if (positive(d)) enter = j;
      }
      if (enter == columns) return Status::Optimal;
      std::size_t leave = t.size();
      T best{0};
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (!positive(t[i][enter])) continue;
        T ratio = t[i][columns] / t[i][enter];
        if (leave == t.size() || ratio < best || (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave == t.size()) return Status::Unbounded;
      pivot(leave, enter);
    }
  }

  T value(const std::vector<T>& cost) const {
    T v{0};
    for (std::size_t i = 0; i < t.size(); ++i) v += cost[basis[i]] * t[i][columns];
    return v;
  }
};

} // namespace detail

// Two-phase dense simplex. Exact when T is a rational type.
template <class T>
Result<T> solve(const Program<T>& prog) {
  const std::size_t m = prog.rows.size();
  const std::size_t n = prog.variables;

  std::vector<std::vector<T>> rows = prog.rows;
  std::vector<Relation> rel = prog.relations;
  std::vector<T> rhs = prog.rhs;
  for (std::size_t i = 0; i < m; ++i) {
    if (rhs[i] < T(0)) {
      for (auto& a : rows[i]) a = -a;
      rhs[i] = -rhs[i];
      if (rel[i] == Relation::LessEqual) rel[i] = Relation::GreaterEqual;
      else if (rel[i] == Relation::GreaterEqual) rel[i] = Relation::LessEqual;
    }
  }

  std::size_t slacks = 0, artificials = 0;
  for (auto r : rel) {
    if (r != Relation::Equal) ++slacks;
    if (r != Relation::LessEqual) ++artificials;
  }
  const std::size_t cols = n + slacks + artificials;
  const std::size_t first_art = n + slacks;

  detail::Tableau<T> tab;
  tab.columns = cols;
  tab.t.assign(m, std::vector<T>(cols + 1, T(0)));
  tab.basis.assign(m, 0);
  std::size_t s = n, a = first_art;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) tab.t[i][j] = rows[i][j];
    tab.t[i][cols] = rhs[i];
    if (rel[i] == Relation::LessEqual) {
      tab.t[i][s] = T(1);
      tab.basis[i] = s++;
    } else {
      if (rel[i] == Relation::GreaterEqual) tab.t[i][s++] = T(-1);
      tab.t[i][a] = T(1);
      tab.basis[i] = a++;
    }
  }

  Result<T> out;
  std::vector<bool> allowed(cols, true);
  if (artificials > 0) {
    std::vector<T> phase1(cols, T(0));
    for (std::size_t j = first_art; j < cols; ++j) phase1[j] = T(-1);
    tab.maximize(phase1, allowed);
    if (detail::nonzero(tab.value(phase1))) return out;
    // Drive remaining artificials out of the basis; drop redundant rows.
    for (std::size_t i = 0; i < tab.t.size();) {
      if (tab.basis[i] < first_art) {
        ++i;
        continue;
      }
      std::size_t c = 0;
      while (c < first_art && !detail::nonzero(tab.t[i][c])) ++c;
      if (c < first_art) {
        tab.pivot(i, c);
        ++i;
      } else {
        tab.t.erase(tab.t.begin() + static_cast<std::ptrdiff_t>(i));
        tab.basis.erase(tab.basis.begin() + static_cast<std::ptrdiff_t>(i));
      }
    }
    for (std::size_t j = first_art; j < cols; ++j) allowed[j] = false;
  }

  std::vector<T> cost(cols, T(0));
  for (std::size_t j = 0; j < n; ++j) cost[j] = prog.objective[j];
  out.status = tab.maximize(cost, allowed);
  if (out.status == Status::Unbounded) return out;
  out.x.assign(n, T(0));
  for (std::size_t i = 0; i < tab.t.size(); ++i)
    if (tab.basis[i] < n) out.x[tab.basis[i]] = tab.t[i][cols];
  out.value = tab.value(cost);
  return out;
}

} // namespace infoagg::lp
