#include "ltlnav/planner.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <utility>

#include "ltlnav/buchi.hpp"

namespace ltlnav::planner {

ltl::Letter region_label(const world::AgentSpec& a, const std::string& region) {
  auto it = a.labels.find(region);
  if (it == a.labels.end()) return {};
  return it->second;  // stored sorted and deduplicated
}

int start_region(const world::Scenario& s, const world::AgentSpec& a) {
  for (std::size_t r = 0; r < s.regions.size(); ++r)
    if (world::in_region(a.start, a.radius, s.regions[r]))
      return static_cast<int>(r);
  return -1;
}

ltl::Word plan_word(const world::Scenario& s, const world::AgentSpec& a,
                    const AgentPlan& p) {
  ltl::Word w;
  for (int r : p.prefix)
    w.prefix.push_back(region_label(a, s.regions[static_cast<std::size_t>(r)].name));
  for (int r : p.suffix)
    w.cycle.push_back(region_label(a, s.regions[static_cast<std::size_t>(r)].name));
  return w;
}

namespace {

// Product of the complete region graph with the formula automaton.  A node
// pairs the region the agent is in with the automaton state reached *after*
// reading that region's label, so a product path spells out both the route
// and the accepting run over its word.
struct Product {
  int num_regions = 0;
  std::vector<char> accepting;           // per node
  std::vector<std::vector<int>> succ;    // sorted by (region, state)
  std::vector<int> initial;              // sorted

  int node(int state, int region) const { return state * num_regions + region; }
  int region_of(int n) const { return n % num_regions; }
};

Product build_product(const buchi::BuchiAutomaton& aut,
                      const std::vector<std::uint32_t>& region_letter,
                      int start) {
  const int R = static_cast<int>(region_letter.size());
  const int Q = aut.num_states;
  Product p;
  p.num_regions = R;
  p.accepting.assign(static_cast<std::size_t>(Q) * R, 0);
  p.succ.resize(static_cast<std::size_t>(Q) * R);

  // automaton successors per (state, region label), sorted and deduplicated
  std::vector<std::vector<int>> qsucc(static_cast<std::size_t>(Q) * R);
  for (int q = 0; q < Q; ++q)
    for (int r = 0; r < R; ++r) {
      auto& out = qsucc[static_cast<std::size_t>(q) * R + r];
      for (int e = aut.first_edge[q]; e < aut.first_edge[q + 1]; ++e)
        if (buchi::guard_satisfied(aut.edges[e].guard, region_letter[r]))
          out.push_back(aut.edges[e].dst);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }

  for (int q = 0; q < Q; ++q)
    for (int r = 0; r < R; ++r) {
      int n = p.node(q, r);
      p.accepting[n] = aut.accepting[static_cast<std::size_t>(q)];
      auto& out = p.succ[n];
      for (int r2 = 0; r2 < R; ++r2)
        for (int q2 : qsucc[static_cast<std::size_t>(q) * R + r2])
          out.push_back(p.node(q2, r2));
      // already sorted by (r2, q2) == node id order per block; node ids are
      // q2*R + r2, so enforce plain ascending order explicitly
      std::sort(out.begin(), out.end(),
                [&p](int a, int b) {
                  return std::pair(p.region_of(a), a) < std::pair(p.region_of(b), b);
                });
    }

  for (int q : aut.initial)
    for (int q2 : qsucc[static_cast<std::size_t>(q) * R + start])
      p.initial.push_back(p.node(q2, start));
  std::sort(p.initial.begin(), p.initial.end());
  p.initial.erase(std::unique(p.initial.begin(), p.initial.end()),
                  p.initial.end());
  return p;
}

struct Lasso {
  std::vector<int> stem;
  std::vector<int> loop;  // nonempty; starts at the accepting anchor
};

// Cheapest accepting lasso.  Self-loop steps complete instantly when flown,
// so an edge costs 1 when it moves between regions and 0 when it stays; hop
// count breaks ties so free self-loops are not padded in, and the anchor
// node id breaks what remains.  Encoded as the scalar key
// transfers * (n + 1) + hops, which orders lexicographically because a
// simple path never exceeds n hops.  One Dijkstra pass from the initial set
// prices stems; one pass per reachable accepting anchor prices its cheapest
// cycle.  No global optimality is promised — this is a deterministic choice
// that avoids incidental detours, which matters because every extra transfer
// costs real flight time downstream.
std::optional<Lasso> find_lasso(const Product& p) {
  const int n = static_cast<int>(p.succ.size());
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  const std::int64_t transfer = n + 1;
  auto edge_key = [&p, transfer](int u, int v) -> std::int64_t {
    return (p.region_of(u) == p.region_of(v) ? 0 : transfer) + 1;
  };

  using Item = std::pair<std::int64_t, int>;  // (key, node), lazy Dijkstra
  auto dijkstra = [&](const std::vector<int>& sources, std::vector<std::int64_t>& d,
                      std::vector<int>& parent) {
    d.assign(static_cast<std::size_t>(n), kInf);
    parent.assign(static_cast<std::size_t>(n), -1);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int s : sources) {
      d[static_cast<std::size_t>(s)] = 0;
      pq.push({0, s});
    }
    while (!pq.empty()) {
      auto [key, u] = pq.top();
      pq.pop();
      if (key != d[static_cast<std::size_t>(u)]) continue;
      for (int v : p.succ[static_cast<std::size_t>(u)]) {
        std::int64_t cand = key + edge_key(u, v);
        if (cand < d[static_cast<std::size_t>(v)]) {
          d[static_cast<std::size_t>(v)] = cand;
          parent[static_cast<std::size_t>(v)] = u;
          pq.push({cand, v});
        }
      }
    }
  };

  std::vector<std::int64_t> sdist;
  std::vector<int> sparent;
  dijkstra(p.initial, sdist, sparent);

  int best_anchor = -1;
  std::int64_t best_cost = kInf;
  std::vector<int> best_loop;
  std::vector<std::int64_t> cdist;
  std::vector<int> cparent;
  for (int a = 0; a < n; ++a) {
    if (!p.accepting[static_cast<std::size_t>(a)]) continue;
    std::int64_t stem = sdist[static_cast<std::size_t>(a)];
    // the cheapest conceivable cycle is one free self-loop hop (key 1);
    // earlier anchors win ties, so >= prunes without changing the result
    if (stem == kInf || stem + 1 >= best_cost) continue;

    // cycle back to the anchor: distances out of `a`, plus one closing edge
    dijkstra({a}, cdist, cparent);
    int closing_hop = -1;
    std::int64_t cycle = kInf;
    for (int u = 0; u < n; ++u) {
      if (cdist[static_cast<std::size_t>(u)] == kInf) continue;
      const auto& su = p.succ[static_cast<std::size_t>(u)];
      if (!std::binary_search(su.begin(), su.end(), a,
                              [&p](int x, int y) {
                                return std::pair(p.region_of(x), x) <
                                       std::pair(p.region_of(y), y);
                              }))
        continue;
      std::int64_t cand = cdist[static_cast<std::size_t>(u)] + edge_key(u, a);
      if (cand < cycle) {
        cycle = cand;
        closing_hop = u;
      }
    }
    if (closing_hop < 0 || stem + cycle >= best_cost) continue;

    best_cost = stem + cycle;
    best_anchor = a;
    best_loop.clear();
    for (int u = closing_hop; u != a; u = cparent[static_cast<std::size_t>(u)])
      best_loop.push_back(u);
    best_loop.push_back(a);
    std::reverse(best_loop.begin(), best_loop.end());
  }
  if (best_anchor < 0) return std::nullopt;

  Lasso l;
  l.loop = std::move(best_loop);
  for (int u = sparent[static_cast<std::size_t>(best_anchor)]; u != -1;
       u = sparent[static_cast<std::size_t>(u)])
    l.stem.push_back(u);
  std::reverse(l.stem.begin(), l.stem.end());
  return l;
}

}  // namespace

PlanOutcome plan_agent(const world::Scenario& s, std::size_t agent) {
  const world::AgentSpec& a = s.agents.at(agent);
  PlanOutcome out;
  out.plan.agent = a.name;

  int start = start_region(s, a);
  if (start < 0)
    throw PlanError("agent '" + a.name +
                    "': start position lies in no region, cannot anchor a plan");

  ltl::FormulaPtr f;
  try {
    f = ltl::normalize(ltl::parse(a.formula));
  } catch (const ltl::ParseError& e) {
    throw PlanError("agent '" + a.name + "': formula: " + e.what());
  }

  std::vector<std::string> extra;
  for (const auto& [region, atoms] : a.labels)
    extra.insert(extra.end(), atoms.begin(), atoms.end());
  buchi::BuchiAutomaton aut = buchi::translate(f, extra);

  std::vector<std::uint32_t> letter(s.regions.size());
  for (std::size_t r = 0; r < s.regions.size(); ++r)
    letter[r] = buchi::encode_letter(aut, region_label(a, s.regions[r].name));

  Product prod = build_product(aut, letter, start);
  auto lasso = find_lasso(prod);
  if (!lasso) return out;  // unsatisfiable over this region graph

  out.satisfiable = true;
  for (int node : lasso->stem) out.plan.prefix.push_back(prod.region_of(node));
  for (int node : lasso->loop) out.plan.suffix.push_back(prod.region_of(node));
  return out;
}

std::vector<PlanOutcome> plan_team(const world::Scenario& s) {
  std::vector<PlanOutcome> out;
  out.reserve(s.agents.size());
  for (std::size_t i = 0; i < s.agents.size(); ++i)
    out.push_back(plan_agent(s, i));
  return out;
}

}  // namespace ltlnav::planner
