#include "ltlnav/buchi.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace ltlnav::buchi {

using ltl::Formula;
using ltl::FormulaPtr;
using ltl::Kind;

bool guard_satisfied(const Guard& g, std::uint32_t letter) {
  return (letter & g.pos) == g.pos && (letter & g.neg) == 0;
}

std::uint32_t encode_letter(const BuchiAutomaton& a, const ltl::Letter& l) {
  std::uint32_t bits = 0;
  for (const std::string& name : l) {
    auto it = std::lower_bound(a.atoms.begin(), a.atoms.end(), name);
    if (it != a.atoms.end() && *it == name)
      bits |= std::uint32_t{1} << (it - a.atoms.begin());
  }
  return bits;
}

std::string guard_to_string(const BuchiAutomaton& a, const Guard& g) {
  std::string out;
  for (std::size_t i = 0; i < a.atoms.size(); ++i) {
    std::uint32_t bit = std::uint32_t{1} << i;
    if (g.pos & bit) {
      if (!out.empty()) out += " && ";
      out += a.atoms[i];
    }
    if (g.neg & bit) {
      if (!out.empty()) out += " && ";
      out += "!" + a.atoms[i];
    }
  }
  return out.empty() ? "true" : out;
}

namespace {

bool edge_less(const Edge& a, const Edge& b) {
  return std::tie(a.src, a.dst, a.guard.pos, a.guard.neg) <
         std::tie(b.src, b.dst, b.guard.pos, b.guard.neg);
}

}  // namespace

void reindex(BuchiAutomaton& a) {
  std::sort(a.edges.begin(), a.edges.end(), edge_less);
  a.edges.erase(std::unique(a.edges.begin(), a.edges.end(),
                            [](const Edge& x, const Edge& y) {
                              return x.src == y.src && x.dst == y.dst &&
                                     x.guard == y.guard;
                            }),
                a.edges.end());
  a.first_edge.assign(static_cast<std::size_t>(a.num_states) + 1, 0);
  for (const Edge& e : a.edges) ++a.first_edge[static_cast<std::size_t>(e.src) + 1];
  for (std::size_t i = 1; i < a.first_edge.size(); ++i)
    a.first_edge[i] += a.first_edge[i - 1];
}

// ---------------------------------------------------------------------------
// Tableau translation
//
// The closure of the (normalized) formula is interned into dense integer ids
// so tableau node sets are cheap sorted int vectors. Tableau nodes carry the
// classic New/Old/Next obligation sets; completed nodes merge on (Old, Next).
// Acceptance: one set per Until subformula u = g U h, containing the states
// that either do not owe u or have already discharged it (h in Old). The
// generalized automaton is then degeneralized with the usual counter
// construction, restricted to its reachable part, and relabeled canonically.

namespace {

using IntSet = std::vector<int>;  // sorted, unique

bool set_contains(const IntSet& s, int x) {
  return std::binary_search(s.begin(), s.end(), x);
}

void set_insert(IntSet& s, int x) {
  auto it = std::lower_bound(s.begin(), s.end(), x);
  if (it == s.end() || *it != x) s.insert(it, x);
}

void set_union(IntSet& s, const IntSet& other) {
  for (int x : other) set_insert(s, x);
}

struct Closure {
  std::vector<FormulaPtr> node;  // by id, in pre-order discovery order
  std::vector<int> lhs, rhs;     // child ids, -1 when absent
  std::vector<int> untils;       // ids of Until nodes, ascending
  std::map<std::string, int> by_key;
  int root = -1;

  int intern(const FormulaPtr& f) {
    std::string key = ltl::to_string(f);
    auto it = by_key.find(key);
    if (it != by_key.end()) return it->second;
    int id = static_cast<int>(node.size());
    by_key.emplace(std::move(key), id);
    node.push_back(f);
    lhs.push_back(-1);
    rhs.push_back(-1);
    std::size_t slot = static_cast<std::size_t>(id);
    if (f->lhs) lhs[slot] = intern(f->lhs);
    if (f->rhs) rhs[slot] = intern(f->rhs);
    if (f->kind == Kind::Until) untils.push_back(id);
    return id;
  }
};

struct TableauNode {
  IntSet neu, old, nxt;
  IntSet incoming;  // completed-state ids; -1 is the virtual initial node
};

struct TableauState {
  IntSet old, nxt;
  IntSet incoming;
};

struct Tableau {
  Closure cl;
  std::vector<TableauState> states;
  std::map<std::pair<IntSet, IntSet>, int> index;

  void run(const FormulaPtr& root) {
    cl.root = cl.intern(root);
    std::vector<TableauNode> work;
    work.push_back(TableauNode{{cl.root}, {}, {}, {-1}});
    while (!work.empty()) {
      TableauNode n = std::move(work.back());
      work.pop_back();
      if (n.neu.empty()) {
        complete(std::move(n), work);
        continue;
      }
      int f = n.neu.front();
      n.neu.erase(n.neu.begin());
      const Formula& ff = *cl.node[static_cast<std::size_t>(f)];
      int l = cl.lhs[static_cast<std::size_t>(f)];
      int r = cl.rhs[static_cast<std::size_t>(f)];
      switch (ff.kind) {
        case Kind::True:
          // kept in Old like a literal so an Until with rhs `true` counts as
          // discharged in the acceptance condition below
          set_insert(n.old, f);
          work.push_back(std::move(n));
          break;
        case Kind::False:
          break;  // contradiction: drop the node
        case Kind::Atom: {
          int negated = lookup("!" + ff.name);
          if (negated >= 0 && set_contains(n.old, negated)) break;
          set_insert(n.old, f);
          work.push_back(std::move(n));
          break;
        }
        case Kind::Not: {  // NNF: operand is an atom
          if (l >= 0 && set_contains(n.old, l)) break;
          set_insert(n.old, f);
          work.push_back(std::move(n));
          break;
        }
        case Kind::And:
          set_insert(n.old, f);
          if (!set_contains(n.old, l)) set_insert(n.neu, l);
          if (!set_contains(n.old, r)) set_insert(n.neu, r);
          work.push_back(std::move(n));
          break;
        case Kind::Or: {
          set_insert(n.old, f);
          TableauNode left = n;
          if (!set_contains(left.old, l)) set_insert(left.neu, l);
          if (!set_contains(n.old, r)) set_insert(n.neu, r);
          work.push_back(std::move(n));     // right branch
          work.push_back(std::move(left));  // left branch expands first
          break;
        }
        case Kind::Next:
          set_insert(n.old, f);
          set_insert(n.nxt, l);
          work.push_back(std::move(n));
          break;
        case Kind::Until: {  // g U h == h || (g && X(g U h))
          set_insert(n.old, f);
          TableauNode wait = n;
          if (!set_contains(wait.old, l)) set_insert(wait.neu, l);
          set_insert(wait.nxt, f);
          if (!set_contains(n.old, r)) set_insert(n.neu, r);
          work.push_back(std::move(n));     // fulfilling branch
          work.push_back(std::move(wait));  // waiting branch expands first
          break;
        }
        case Kind::Release: {  // g R h == h && (g || X(g R h))
          set_insert(n.old, f);
          TableauNode wait = n;
          if (!set_contains(wait.old, r)) set_insert(wait.neu, r);
          set_insert(wait.nxt, f);
          if (!set_contains(n.old, l)) set_insert(n.neu, l);
          if (!set_contains(n.old, r)) set_insert(n.neu, r);
          work.push_back(std::move(n));
          work.push_back(std::move(wait));
          break;
        }
        default:
          throw std::invalid_argument("translate: formula not in NNF");
      }
    }
  }

  int lookup(const std::string& key) const {
    auto it = cl.by_key.find(key);
    return it == cl.by_key.end() ? -1 : it->second;
  }

  void complete(TableauNode n, std::vector<TableauNode>& work) {
    auto key = std::make_pair(n.old, n.nxt);
    auto it = index.find(key);
    if (it != index.end()) {
      set_union(states[static_cast<std::size_t>(it->second)].incoming,
                n.incoming);
      return;
    }
    int id = static_cast<int>(states.size());
    index.emplace(std::move(key), id);
    states.push_back(
        TableauState{std::move(n.old), std::move(n.nxt), std::move(n.incoming)});
    work.push_back(TableauNode{states.back().nxt, {}, {}, {id}});
  }
};

}  // namespace

BuchiAutomaton translate(const FormulaPtr& f,
                         const std::vector<std::string>& extra_atoms) {
  FormulaPtr nnf = ltl::is_nnf(*f) ? f : ltl::normalize(f);

  BuchiAutomaton a;
  a.atoms = ltl::collect_atoms(*nnf);
  for (const std::string& x : extra_atoms) {
    auto it = std::lower_bound(a.atoms.begin(), a.atoms.end(), x);
    if (it == a.atoms.end() || *it != x) a.atoms.insert(it, x);
  }
  if (a.atoms.size() > 32)
    throw std::invalid_argument("translate: more than 32 atoms");

  Tableau tb;
  tb.run(nnf);
  int m = static_cast<int>(tb.states.size());

  // generalized-automaton adjacency and initial set, from incoming lists
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(m));
  std::vector<int> gba_init;
  for (int q = 0; q < m; ++q)
    for (int src : tb.states[static_cast<std::size_t>(q)].incoming) {
      if (src == -1)
        gba_init.push_back(q);
      else
        adj[static_cast<std::size_t>(src)].push_back(q);
    }

  int k = std::max<int>(1, static_cast<int>(tb.cl.untils.size()));
  auto in_F = [&](int q, int i) {
    if (tb.cl.untils.empty()) return true;
    int u = tb.cl.untils[static_cast<std::size_t>(i)];
    const IntSet& old = tb.states[static_cast<std::size_t>(q)].old;
    return !set_contains(old, u) ||
           set_contains(old, tb.cl.rhs[static_cast<std::size_t>(u)]);
  };

  auto guard_of = [&](int q) {
    Guard g;
    for (int id : tb.states[static_cast<std::size_t>(q)].old) {
      const Formula& ff = *tb.cl.node[static_cast<std::size_t>(id)];
      const std::string* name = nullptr;
      bool positive = true;
      if (ff.kind == Kind::Atom) {
        name = &ff.name;
      } else if (ff.kind == Kind::Not) {
        name = &ff.lhs->name;
        positive = false;
      }
      if (!name) continue;
      auto it = std::lower_bound(a.atoms.begin(), a.atoms.end(), *name);
      std::uint32_t bit = std::uint32_t{1} << (it - a.atoms.begin());
      (positive ? g.pos : g.neg) |= bit;
    }
    return g;
  };

  // Degeneralize over reachable (state, counter) pairs. The virtual initial
  // node becomes a real state so that runs consume the first letter on its
  // outgoing edges.
  const int init_node = m * k;  // provisional id
  auto pair_id = [&](int q, int j) { return q * k + (j - 1); };
  std::vector<int> seen(static_cast<std::size_t>(m * k + 1), 0);
  std::vector<int> order;  // discovery order of provisional ids
  std::vector<Edge> raw_edges;
  std::vector<int> frontier{init_node};
  seen[static_cast<std::size_t>(init_node)] = 1;
  order.push_back(init_node);
  while (!frontier.empty()) {
    int cur = frontier.back();
    frontier.pop_back();
    if (cur == init_node) {
      for (int q0 : gba_init) {
        int to = pair_id(q0, 1);
        raw_edges.push_back(Edge{cur, to, guard_of(q0)});
        if (!seen[static_cast<std::size_t>(to)]) {
          seen[static_cast<std::size_t>(to)] = 1;
          order.push_back(to);
          frontier.push_back(to);
        }
      }
      continue;
    }
    int q = cur / k, j = cur % k + 1;
    int j2 = in_F(q, j - 1) ? j % k + 1 : j;
    for (int q2 : adj[static_cast<std::size_t>(q)]) {
      int to = pair_id(q2, j2);
      raw_edges.push_back(Edge{cur, to, guard_of(q2)});
      if (!seen[static_cast<std::size_t>(to)]) {
        seen[static_cast<std::size_t>(to)] = 1;
        order.push_back(to);
        frontier.push_back(to);
      }
    }
  }

  // canonical relabeling: serialize each reachable state and sort; the
  // initial state's key is the unique smallest, so it becomes state 0
  auto state_key = [&](int provisional) {
    if (provisional == init_node) return std::string("000");
    int q = provisional / k, j = provisional % k + 1;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03d", j);
    std::string key(buf);
    key += '|';
    const TableauState& st = tb.states[static_cast<std::size_t>(q)];
    for (int id : st.old) {
      key += ltl::to_string(tb.cl.node[static_cast<std::size_t>(id)]);
      key += ';';
    }
    key += '|';
    for (int id : st.nxt) {
      key += ltl::to_string(tb.cl.node[static_cast<std::size_t>(id)]);
      key += ';';
    }
    return key;
  };

  std::vector<std::pair<std::string, int>> keys;
  keys.reserve(order.size());
  for (int p : order) keys.emplace_back(state_key(p), p);
  std::sort(keys.begin(), keys.end());
  std::vector<int> relabel(static_cast<std::size_t>(m * k + 1), -1);
  for (std::size_t i = 0; i < keys.size(); ++i)
    relabel[static_cast<std::size_t>(keys[i].second)] = static_cast<int>(i);

  a.num_states = static_cast<int>(keys.size());
  a.initial = {relabel[static_cast<std::size_t>(init_node)]};
  a.accepting.assign(static_cast<std::size_t>(a.num_states), 0);
  for (int p : order) {
    if (p == init_node) continue;
    int q = p / k, j = p % k + 1;
    if (j == 1 && in_F(q, 0))
      a.accepting[static_cast<std::size_t>(relabel[static_cast<std::size_t>(p)])] = 1;
  }
  a.edges.reserve(raw_edges.size());
  for (const Edge& e : raw_edges)
    a.edges.push_back(Edge{relabel[static_cast<std::size_t>(e.src)],
                           relabel[static_cast<std::size_t>(e.dst)], e.guard});
  reindex(a);
  return a;
}

// ---------------------------------------------------------------------------
// Lasso acceptance

namespace {

// Iterative Tarjan over the product of the automaton with the lasso's
// position graph. Accepting iff some reachable strongly connected component
// is nontrivial and contains a product node whose automaton state accepts.
struct LassoProduct {
  const BuchiAutomaton& a;
  std::vector<std::uint32_t> letters;  // prefix then cycle
  int len;
  int pre;

  int next_pos(int i) const { return i + 1 < len ? i + 1 : pre; }
  int node_of(int q, int i) const { return q * len + i; }
};

bool has_accepting_cycle(const LassoProduct& g) {
  const int n = g.a.num_states * g.len;
  std::vector<int> index(static_cast<std::size_t>(n), -1);
  std::vector<int> low(static_cast<std::size_t>(n), 0);
  std::vector<char> onstack(static_cast<std::size_t>(n), 0);
  std::vector<int> scc_stack;
  int next_index = 0;

  struct Frame {
    int node;
    int q, pos;
    int edge;      // index into a.edges for q
    int edge_end;
    bool self_loop;
  };
  std::vector<Frame> dfs;

  auto push_node = [&](int q, int i) {
    int v = g.node_of(q, i);
    index[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] =
        next_index++;
    onstack[static_cast<std::size_t>(v)] = 1;
    scc_stack.push_back(v);
    dfs.push_back(Frame{v, q, i, g.a.first_edge[static_cast<std::size_t>(q)],
                        g.a.first_edge[static_cast<std::size_t>(q) + 1],
                        false});
  };

  for (int q0 : g.a.initial) {
    int root = g.node_of(q0, 0);
    if (index[static_cast<std::size_t>(root)] != -1) continue;
    push_node(q0, 0);
    while (!dfs.empty()) {
      Frame& f = dfs.back();
      bool descended = false;
      while (f.edge < f.edge_end) {
        const Edge& e = g.a.edges[static_cast<std::size_t>(f.edge)];
        ++f.edge;
        if (!guard_satisfied(e.guard, g.letters[static_cast<std::size_t>(f.pos)]))
          continue;
        int w = g.node_of(e.dst, g.next_pos(f.pos));
        if (w == f.node) f.self_loop = true;
        if (index[static_cast<std::size_t>(w)] == -1) {
          push_node(e.dst, g.next_pos(f.pos));
          descended = true;
          break;
        }
        if (onstack[static_cast<std::size_t>(w)])
          low[static_cast<std::size_t>(f.node)] =
              std::min(low[static_cast<std::size_t>(f.node)],
                       index[static_cast<std::size_t>(w)]);
      }
      if (descended) continue;
      // node finished: maybe pop an SCC, then propagate lowlink up
      Frame done = f;
      dfs.pop_back();
      if (low[static_cast<std::size_t>(done.node)] ==
          index[static_cast<std::size_t>(done.node)]) {
        bool accepting = false;
        int size = 0;
        for (;;) {
          int w = scc_stack.back();
          scc_stack.pop_back();
          onstack[static_cast<std::size_t>(w)] = 0;
          ++size;
          if (g.a.accepting[static_cast<std::size_t>(w / g.len)])
            accepting = true;
          if (w == done.node) break;
        }
        if (accepting && (size > 1 || done.self_loop)) return true;
      }
      if (!dfs.empty()) {
        Frame& parent = dfs.back();
        low[static_cast<std::size_t>(parent.node)] =
            std::min(low[static_cast<std::size_t>(parent.node)],
                     low[static_cast<std::size_t>(done.node)]);
      }
    }
  }
  return false;
}

}  // namespace

bool accepts_lasso(const BuchiAutomaton& a, const ltl::Word& w) {
  if (w.cycle.empty())
    throw std::invalid_argument("word cycle must be nonempty");
  LassoProduct g{a, {}, 0, static_cast<int>(w.prefix.size())};
  g.letters.reserve(w.prefix.size() + w.cycle.size());
  for (const ltl::Letter& l : w.prefix) g.letters.push_back(encode_letter(a, l));
  for (const ltl::Letter& l : w.cycle) g.letters.push_back(encode_letter(a, l));
  g.len = static_cast<int>(g.letters.size());
  return has_accepting_cycle(g);
}

// ---------------------------------------------------------------------------
// Serialization

std::string to_json(const BuchiAutomaton& a) {
  nlohmann::json j;
  j["atoms"] = a.atoms;
  j["num_states"] = a.num_states;
  j["initial"] = a.initial;
  std::vector<int> acc;
  for (int q = 0; q < a.num_states; ++q)
    if (a.accepting[static_cast<std::size_t>(q)]) acc.push_back(q);
  j["accepting"] = acc;
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : a.edges) {
    nlohmann::json je;
    je["src"] = e.src;
    je["dst"] = e.dst;
    je["guard"] = guard_to_string(a, e.guard);
    edges.push_back(std::move(je));
  }
  j["edges"] = std::move(edges);
  return j.dump(2) + "\n";
}

std::string to_dot(const BuchiAutomaton& a) {
  std::string out = "digraph buchi {\n  rankdir=LR;\n  node [shape=circle];\n";
  out += "  __init [shape=point];\n";
  for (int q = 0; q < a.num_states; ++q)
    if (a.accepting[static_cast<std::size_t>(q)])
      out += "  " + std::to_string(q) + " [shape=doublecircle];\n";
  for (int q0 : a.initial)
    out += "  __init -> " + std::to_string(q0) + ";\n";
  for (const Edge& e : a.edges)
    out += "  " + std::to_string(e.src) + " -> " + std::to_string(e.dst) +
           " [label=\"" + guard_to_string(a, e.guard) + "\"];\n";
  out += "}\n";
  return out;
}

}  // namespace ltlnav::buchi
