#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "bits.hpp"
#include "errors.hpp"
#include "random.hpp"

namespace qasat {

/// A Boolean literal x_i or its negation. Variables are numbered from 1 as in
/// DIMACS files.
struct Literal {
  int variable = 1;
  bool negated = false;

  static Literal from_signed(int value) {
    if (value == 0) throw InputError("literal 0 is not a variable");
    return Literal{value < 0 ? -value : value, value < 0};
  }
  int to_signed() const noexcept { return negated ? -variable : variable; }

  /// +1 for x_i, -1 for its negation.
  int sign() const noexcept { return negated ? -1 : 1; }

  bool evaluate(const Assignment& a) const { return a[variable - 1] != negated; }

  friend bool operator==(const Literal&, const Literal&) = default;
  friend auto operator<=>(const Literal&, const Literal&) = default;
};

struct Clause {
  Literal first;
  Literal second;

  bool evaluate(const Assignment& a) const { return first.evaluate(a) || second.evaluate(a); }

  /// Order-insensitive identity: (a | b) and (b | a) share a key.
  std::pair<int, int> key() const {
    const int a = first.to_signed();
    const int b = second.to_signed();
    return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a < b) ? std::pair{a, b}
                                                                             : std::pair{b, a};
  }
};

struct TwoSatProblem {
  int n_vars = 0;
  std::vector<Clause> clauses;
  std::string label;

  /// Throws InputError unless every generator constraint holds: literals in
  /// range, distinct variables per clause, no repeated clause, and every
  /// variable used at least once.
  void validate() const {
    if (n_vars < 2) throw InputError("a 2-SAT problem needs at least two variables");
    std::vector<bool> used(static_cast<std::size_t>(n_vars), false);
    std::set<std::pair<int, int>> seen;
    for (const Clause& c : clauses) {
      for (const Literal& l : {c.first, c.second}) {
        if (l.variable < 1 || l.variable > n_vars) throw InputError("literal variable out of range");
        used[static_cast<std::size_t>(l.variable - 1)] = true;
      }
      if (c.first.variable == c.second.variable)
        throw InputError("clause uses the same variable twice");
      if (!seen.insert(c.key()).second) throw InputError("repeated clause");
    }
    if (std::find(used.begin(), used.end(), false) != used.end())
      throw InputError("some variable does not appear in any clause");
  }
};

struct GenerationConfig {
  int n_vars = 6;
  int clause_offset_c = 1;  // M = N + c
  std::set<int> target_degeneracies{1, 2, 4};
  std::uint64_t seed = 1;
  std::uint64_t max_attempts = 100000;      // whole-problem draws per generate_problem call
  std::uint64_t ensemble_budget = 2000000;  // candidate problems per generate_ensemble call
  int enumeration_cap = kDefaultMaxBits;

  int n_clauses() const noexcept { return n_vars + clause_offset_c; }
};

/// Number of distinct clauses over N variables with two different variables.
inline std::int64_t clause_universe_size(int n_vars) {
  return 2 * static_cast<std::int64_t>(n_vars) * (n_vars - 1);
}

/// Rejection sampler: each clause is a uniform variable pair and sign pattern,
/// duplicates are redrawn, and a problem leaving some variable unused is
/// discarded as a whole.
inline TwoSatProblem generate_problem(const GenerationConfig& config, Rng& rng) {
  const int n = config.n_vars;
  const int m = config.n_clauses();
  if (n < 2) throw InputError("generation needs at least two variables");
  if (m < 1) throw InputError("generation needs at least one clause");
  if (m > clause_universe_size(n))
    throw GenerationError("requested " + std::to_string(m) + " clauses but only " +
                          std::to_string(clause_universe_size(n)) + " distinct clauses exist for N=" +
                          std::to_string(n));

  for (std::uint64_t attempt = 0; attempt < config.max_attempts; ++attempt) {
    TwoSatProblem p{n, {}, {}};
    p.clauses.reserve(static_cast<std::size_t>(m));
    std::set<std::pair<int, int>> seen;
    std::vector<int> uses(static_cast<std::size_t>(n), 0);
    while (static_cast<int>(p.clauses.size()) < m) {
      const int a = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n)));
      int b = static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(n - 1)));
      if (b >= a) ++b;
      const auto signs = uniform_index(rng, 4);
      Clause c{Literal{a + 1, (signs & 1) != 0}, Literal{b + 1, (signs & 2) != 0}};
      if (!seen.insert(c.key()).second) continue;
      ++uses[static_cast<std::size_t>(a)];
      ++uses[static_cast<std::size_t>(b)];
      p.clauses.push_back(c);
    }
    if (std::find(uses.begin(), uses.end(), 0) == uses.end()) return p;
  }
  throw GenerationError("no problem covering all variables within " +
                        std::to_string(config.max_attempts) + " attempts");
}

/// Strongly connected components of a directed graph (Kosaraju-Sharir, two
/// iterative depth-first passes). Returns a component id per node; ids are
/// assigned in topological order of the condensation.
inline std::vector<int> strongly_connected_components(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<std::vector<int>> radj(adj.size());
  for (int u = 0; u < n; ++u)
    for (int v : adj[static_cast<std::size_t>(u)]) radj[static_cast<std::size_t>(v)].push_back(u);

  std::vector<int> order;
  order.reserve(adj.size());
  std::vector<char> visited(adj.size(), 0);
  std::vector<std::pair<int, std::size_t>> stack;
  for (int root = 0; root < n; ++root) {
    if (visited[static_cast<std::size_t>(root)]) continue;
    visited[static_cast<std::size_t>(root)] = 1;
    stack.emplace_back(root, 0);
    while (!stack.empty()) {
      auto& [u, next] = stack.back();
      const auto& out = adj[static_cast<std::size_t>(u)];
      if (next < out.size()) {
        const int v = out[next++];
        if (!visited[static_cast<std::size_t>(v)]) {
          visited[static_cast<std::size_t>(v)] = 1;
          stack.emplace_back(v, 0);
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }

  std::vector<int> comp(adj.size(), -1);
  int n_comp = 0;
  std::vector<int> work;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[static_cast<std::size_t>(*it)] != -1) continue;
    comp[static_cast<std::size_t>(*it)] = n_comp;
    work.push_back(*it);
    while (!work.empty()) {
      const int u = work.back();
      work.pop_back();
      for (int v : radj[static_cast<std::size_t>(u)]) {
        if (comp[static_cast<std::size_t>(v)] == -1) {
          comp[static_cast<std::size_t>(v)] = n_comp;
          work.push_back(v);
        }
      }
    }
    ++n_comp;
  }
  return comp;
}

/// Node of a literal in the implication graph: 2(i-1) for x_i, 2(i-1)+1 for its negation.
inline int implication_node(const Literal& l) { return 2 * (l.variable - 1) + (l.negated ? 1 : 0); }

inline std::vector<std::vector<int>> implication_graph(const TwoSatProblem& p) {
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(2 * p.n_vars));
  for (const Clause& c : p.clauses) {
    const int a = implication_node(c.first);
    const int b = implication_node(c.second);
    adj[static_cast<std::size_t>(a ^ 1)].push_back(b);  // !a -> b
    adj[static_cast<std::size_t>(b ^ 1)].push_back(a);  // !b -> a
  }
  return adj;
}

inline bool is_satisfiable_scc(const TwoSatProblem& p) {
  const auto comp = strongly_connected_components(implication_graph(p));
  for (int i = 0; i < p.n_vars; ++i)
    if (comp[static_cast<std::size_t>(2 * i)] == comp[static_cast<std::size_t>(2 * i + 1)]) return false;
  return true;
}

inline int count_violated(const TwoSatProblem& p, const Assignment& a) {
  if (a.size() != p.n_vars) throw InputError("assignment length does not match problem");
  int violated = 0;
  for (const Clause& c : p.clauses) violated += c.evaluate(a) ? 0 : 1;
  return violated;
}

namespace detail {

// A clause is violated by index x iff (x & mask) == pattern, where pattern
// holds the bits that make both literals false.
struct ClauseMask {
  std::uint64_t mask;
  std::uint64_t pattern;
};

inline std::vector<ClauseMask> clause_masks(const TwoSatProblem& p) {
  std::vector<ClauseMask> out;
  out.reserve(p.clauses.size());
  for (const Clause& c : p.clauses) {
    ClauseMask cm{0, 0};
    for (const Literal& l : {c.first, c.second}) {
      const auto bit = BitString::mask(p.n_vars, l.variable - 1);
      cm.mask |= bit;
      if (l.negated) cm.pattern |= bit;
    }
    out.push_back(cm);
  }
  return out;
}

}  // namespace detail

/// All satisfying assignments in ascending bit-string order.
inline std::vector<Assignment> enumerate_solutions(const TwoSatProblem& p, int cap = kDefaultMaxBits) {
  if (p.n_vars > cap)
    throw ResourceError("enumeration of " + std::to_string(p.n_vars) + " variables exceeds cap " +
                        std::to_string(cap));
  const auto masks = detail::clause_masks(p);
  const std::uint64_t dim = std::uint64_t{1} << p.n_vars;
  std::vector<Assignment> out;
  for (std::uint64_t x = 0; x < dim; ++x) {
    bool ok = true;
    for (const auto& cm : masks) {
      if ((x & cm.mask) == cm.pattern) {
        ok = false;
        break;
      }
    }
    if (ok) out.emplace_back(p.n_vars, x);
  }
  return out;
}

/// Mean number of satisfying assignments of an unconstrained random K-SAT
/// formula with M clauses over N variables.
inline double expected_degeneracy(int k, int m, int n) {
  if (k < 1 || m < 0 || n < 1) throw InputError("expected_degeneracy needs K>=1, M>=0, N>=1");
  return std::pow(1.0 - std::ldexp(1.0, -k), m) * std::ldexp(1.0, n);
}

struct Ensemble {
  GenerationConfig config;
  std::map<int, std::vector<TwoSatProblem>> buckets;  // solution count -> problems
  std::uint64_t candidates = 0;                       // problems drawn
  std::uint64_t satisfiable = 0;                      // of which satisfiable
  std::vector<int> satisfiable_counts;                // solution count of each satisfiable candidate
};

/// Draws problems until every target bucket holds `count_per_degeneracy`
/// problems. Problems are labelled by their candidate number.
inline Ensemble generate_ensemble(const GenerationConfig& config, int count_per_degeneracy) {
  if (count_per_degeneracy < 0) throw InputError("negative bucket size");
  if (config.target_degeneracies.empty()) throw InputError("no target degeneracies");
  Ensemble e;
  e.config = config;
  for (int d : config.target_degeneracies) e.buckets[d];
  Rng rng(config.seed);

  auto full = [&] {
    for (const auto& [d, v] : e.buckets)
      if (static_cast<int>(v.size()) < count_per_degeneracy) return false;
    return true;
  };
  while (!full()) {
    if (e.candidates >= config.ensemble_budget)
      throw GenerationError("ensemble budget of " + std::to_string(config.ensemble_budget) +
                            " candidates exhausted before all buckets filled");
    TwoSatProblem p = generate_problem(config, rng);
    p.label = std::to_string(e.candidates);
    ++e.candidates;
    if (!is_satisfiable_scc(p)) continue;
    ++e.satisfiable;
    const int count = static_cast<int>(enumerate_solutions(p, config.enumeration_cap).size());
    e.satisfiable_counts.push_back(count);
    auto it = e.buckets.find(count);
    if (it != e.buckets.end() && static_cast<int>(it->second.size()) < count_per_degeneracy)
      it->second.push_back(std::move(p));
  }
  return e;
}

}  // namespace qasat
