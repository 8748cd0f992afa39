#pragma once

// Classical side: compatibility graphs with ordered-pair edges, directed-cycle
// detection, and exhaustive deterministic-assignment bounds for the chain.
//
// The maximum of a linear functional over local-hidden-variable models is
// attained at a deterministic assignment (a vertex of the local polytope), so
// enumerating assignments is exact.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cna/errors.hpp"
#include "cna/scenario.hpp"

namespace cna {

/// Vertices are measurements; undirected edges mark compatible pairs; a
/// directed edge (u, v) records outcome(u) <= outcome(v).
class CompatibilityGraph {
 public:
  int add_vertex(std::string label) {
    labels_.push_back(std::move(label));
    return static_cast<int>(labels_.size()) - 1;
  }

  void add_edge(int u, int v) {
    check_vertex(u);
    check_vertex(v);
    undirected_.insert(key(u, v));
  }

  /// The ordered pair must overlay an existing compatibility edge.
  void add_ordered_pair(int from, int to) {
    check_vertex(from);
    check_vertex(to);
    if (!undirected_.contains(key(from, to))) {
      throw InvalidArgument("ordered pair (" + labels_[static_cast<std::size_t>(from)] + ", " +
                            labels_[static_cast<std::size_t>(to)] +
                            ") has no underlying compatibility edge");
    }
    directed_.emplace_back(from, to);
  }

  int vertex_count() const noexcept { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::set<std::pair<int, int>>& edges() const noexcept { return undirected_; }
  const std::vector<std::pair<int, int>>& ordered_pairs() const noexcept { return directed_; }

  std::optional<int> find(const std::string& label) const {
    const auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) return std::nullopt;
    return static_cast<int>(it - labels_.begin());
  }

  std::vector<std::vector<int>> successors() const {
    std::vector<std::vector<int>> adj(labels_.size());
    for (auto [u, v] : directed_) adj[static_cast<std::size_t>(u)].push_back(v);
    return adj;
  }

 private:
  static std::pair<int, int> key(int u, int v) { return {std::min(u, v), std::max(u, v)}; }

  void check_vertex(int v) const {
    if (v < 0 || v >= vertex_count()) throw InvalidArgument("unknown vertex " + std::to_string(v));
  }

  std::vector<std::string> labels_;
  std::set<std::pair<int, int>> undirected_;
  std::vector<std::pair<int, int>> directed_;
};

/// The 2k-cycle M_1 … M_{2k}. The zero-constrained edges are ordered forward;
/// with `with_events` the pairs (M_{2k}, M_1) and (M_J, M_{J+1}) are added too,
/// which closes a directed cycle.
inline CompatibilityGraph chain_graph(const Scenario& s, bool with_events) {
  s.validate();
  CompatibilityGraph g;
  const int n = s.chain_length();
  for (int i = 1; i <= n; ++i) g.add_vertex("M" + std::to_string(i));
  for (int i = 0; i < n; ++i) g.add_edge(i, (i + 1) % n);
  for (int i = 1; i < n; ++i)
    if (i != s.J) g.add_ordered_pair(i - 1, i);
  if (with_events) {
    g.add_ordered_pair(n - 1, 0);
    g.add_ordered_pair(s.J - 1, s.J);
  }
  return g;
}

/// Kahn elimination: a cycle exists iff some vertex never reaches in-degree 0.
inline bool has_directed_cycle(const CompatibilityGraph& g) {
  const auto adj = g.successors();
  std::vector<int> indeg(adj.size(), 0);
  for (const auto& out : adj)
    for (int v : out) ++indeg[static_cast<std::size_t>(v)];
  std::vector<int> ready;
  for (std::size_t v = 0; v < adj.size(); ++v)
    if (indeg[v] == 0) ready.push_back(static_cast<int>(v));
  std::size_t removed = 0;
  while (!ready.empty()) {
    const int u = ready.back();
    ready.pop_back();
    ++removed;
    for (int v : adj[static_cast<std::size_t>(u)])
      if (--indeg[static_cast<std::size_t>(v)] == 0) ready.push_back(v);
  }
  return removed != adj.size();
}

/// Strongly connected components (Tarjan); vertices on some directed cycle are
/// exactly those in a component of size > 1 or carrying a self-loop.
inline std::vector<int> strongly_connected_components(const CompatibilityGraph& g) {
  const auto adj = g.successors();
  const int n = g.vertex_count();
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0),
      comp(static_cast<std::size_t>(n), -1);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  int counter = 0, components = 0;

  std::function<void(int)> visit = [&](int v) {
    const auto vi = static_cast<std::size_t>(v);
    index[vi] = low[vi] = counter++;
    stack.push_back(v);
    on_stack[vi] = true;
    for (int w : adj[vi]) {
      const auto wi = static_cast<std::size_t>(w);
      if (index[wi] < 0) {
        visit(w);
        low[vi] = std::min(low[vi], low[wi]);
      } else if (on_stack[wi]) {
        low[vi] = std::min(low[vi], index[wi]);
      }
    }
    if (low[vi] == index[vi]) {
      int w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[static_cast<std::size_t>(w)] = false;
        comp[static_cast<std::size_t>(w)] = components;
      } while (w != v);
      ++components;
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[static_cast<std::size_t>(v)] < 0) visit(v);
  return comp;
}

/// Outcome per vertex, 1..d, indexed like the graph's vertices.
struct DeterministicAssignment {
  std::vector<int> values;
};

/// Checks that every vertex on a directed cycle carries the same value as the
/// rest of its cycle. Under a valid (edge-respecting) assignment this always
/// holds; the function exists to exercise that claim.
inline bool equal_on_cycles(const CompatibilityGraph& g, const DeterministicAssignment& a) {
  if (static_cast<int>(a.values.size()) != g.vertex_count()) {
    throw InvalidAssignmentError("assignment covers " + std::to_string(a.values.size()) +
                                 " of " + std::to_string(g.vertex_count()) + " vertices");
  }
  for (auto [u, v] : g.ordered_pairs()) {
    if (a.values[static_cast<std::size_t>(u)] > a.values[static_cast<std::size_t>(v)]) {
      throw InvalidAssignmentError("ordered pair (" + g.labels()[static_cast<std::size_t>(u)] +
                                   ", " + g.labels()[static_cast<std::size_t>(v)] +
                                   ") violated");
    }
  }
  const auto comp = strongly_connected_components(g);
  std::map<int, int> value_of;
  std::map<int, int> size_of;
  for (std::size_t v = 0; v < comp.size(); ++v) ++size_of[comp[v]];
  for (std::size_t v = 0; v < comp.size(); ++v) {
    if (size_of[comp[v]] < 2) continue;
    const auto [it, fresh] = value_of.emplace(comp[v], a.values[v]);
    if (!fresh && it->second != a.values[v]) return false;
  }
  return true;
}

inline constexpr std::uint64_t kEnumerationCap = 100'000'000;

/// d^(2k), or throws CapacityError when it exceeds the cap.
inline std::uint64_t assignment_count(const Scenario& s, std::uint64_t cap = kEnumerationCap) {
  s.validate();
  std::uint64_t total = 1;
  for (int i = 0; i < s.chain_length(); ++i) {
    if (total > cap / static_cast<std::uint64_t>(s.d)) throw CapacityError(0, cap);
    total *= static_cast<std::uint64_t>(s.d);
  }
  if (total > cap) throw CapacityError(total, cap);
  return total;
}

/// Visits every assignment v[0..2k-1] in 1..d (odometer order).
template <class Visit>
std::uint64_t for_each_assignment(const Scenario& s, Visit&& visit) {
  const std::uint64_t total = assignment_count(s);
  const int n = s.chain_length();
  std::vector<int> v(static_cast<std::size_t>(n), 1);
  for (std::uint64_t c = 0; c < total; ++c) {
    visit(static_cast<const std::vector<int>&>(v));
    for (int i = 0; i < n; ++i) {
      if (++v[static_cast<std::size_t>(i)] <= s.d) break;
      v[static_cast<std::size_t>(i)] = 1;
    }
  }
  return total;
}

/// True iff no assignment has v(M_{2k}) < v(M_1) together with
/// v(M_i) <= v(M_{i+1}) for every i = 1..2k-1.
inline bool joint_event_impossible(const Scenario& s) {
  const int n = s.chain_length();
  bool seen = false;
  for_each_assignment(s, [&](const std::vector<int>& v) {
    if (seen || !(v[static_cast<std::size_t>(n - 1)] < v[0])) return;
    for (int i = 0; i + 1 < n; ++i)
      if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(i + 1)]) return;
    seen = true;
  });
  return !seen;
}

/// Max of P1 - P2 over assignments satisfying every zero constraint (i != J).
inline double classical_fraction_bound(const Scenario& s) {
  const int n = s.chain_length();
  int best = std::numeric_limits<int>::min();
  for_each_assignment(s, [&](const std::vector<int>& v) {
    for (int i = 1; i < n; ++i) {
      if (i == s.J) continue;
      if (v[static_cast<std::size_t>(i - 1)] > v[static_cast<std::size_t>(i)]) return;
    }
    const int p1 = v[0] > v[static_cast<std::size_t>(n - 1)] ? 1 : 0;
    const int p2 = v[static_cast<std::size_t>(s.J - 1)] > v[static_cast<std::size_t>(s.J)] ? 1 : 0;
    best = std::max(best, p1 - p2);
  });
  return static_cast<double>(best);
}

/// Max of P(M_{2k} < M_1) + Σ P(M_i <= M_{i+1}) over assignments.
inline double logical_bell_classical_max(const Scenario& s) {
  const int n = s.chain_length();
  int best = 0;
  for_each_assignment(s, [&](const std::vector<int>& v) {
    int total = v[static_cast<std::size_t>(n - 1)] < v[0] ? 1 : 0;
    for (int i = 0; i + 1 < n; ++i)
      total += v[static_cast<std::size_t>(i)] <= v[static_cast<std::size_t>(i + 1)] ? 1 : 0;
    best = std::max(best, total);
  });
  return static_cast<double>(best);
}

struct LhvCertificate {
  Scenario scenario;
  bool joint_event_impossible = false;
  double classical_fraction_bound = 0.0;
  double logical_bell_classical_max = 0.0;
  std::uint64_t assignments_checked = 0;
};

inline LhvCertificate certify(const Scenario& s) {
  LhvCertificate c;
  c.scenario = s;
  c.assignments_checked = assignment_count(s);
  c.joint_event_impossible = joint_event_impossible(s);
  c.classical_fraction_bound = classical_fraction_bound(s);
  c.logical_bell_classical_max = logical_bell_classical_max(s);
  return c;
}

}  // namespace cna
