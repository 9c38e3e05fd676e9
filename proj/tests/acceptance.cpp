// Acceptance suite: eight end-to-end checks of the planning-and-flying
// pipeline, each printing exactly one PASS/FAIL line with its measurements.
// Run all with no arguments or a single one with --criterion N. The process
// exits 0 only when every selected criterion passed.
#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "ltlnav/buchi.hpp"
#include "ltlnav/ltl.hpp"
#include "ltlnav/nav.hpp"
#include "ltlnav/planner.hpp"
#include "ltlnav/sim.hpp"
#include "ltlnav/vec.hpp"
#include "ltlnav/world.hpp"

namespace {

using namespace ltlnav;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Pinned tolerances and sweep sizes. Changing any of these changes what the
// suite accepts, so they live here, together, with their criterion number.
// ---------------------------------------------------------------------------
constexpr int kC1MaxFormulaSize = 6;    // criterion 1: AST nodes
constexpr int kC1MaxPrefix = 2;         //   lasso prefix length
constexpr int kC1MaxCycle = 3;          //   lasso cycle length
constexpr double kC1Budget = 60.0;      //   seconds

constexpr double kGradFdStep = 1e-6;    // criterion 4: central-difference h
constexpr double kGradRelTol = 1e-4;    //   max relative error
constexpr int kGradPoints = 100;        //   samples per fixture and variant
constexpr double kGradBudget = 10.0;    //   seconds

constexpr double kSimBudget = 300.0;    // criterion 5: wall-clock seconds

constexpr double kCtrlHardBound = 1.5;  // criterion 6: hard |u| ceiling
constexpr double kCtrlReport = 1.0;     //   reported expectation

constexpr double kSpikeRatio = 3.0;     // criterion 7: peak / smooth median
constexpr int kSpikeWindow = 5;         //   samples around each switch time
constexpr int kSmoothSpan = 200;        //   samples defining "smooth"
constexpr int kSmoothMin = 30;          //   fewest usable smooth samples

constexpr int kPhiSamples = 10000;      // criterion 8: samples per fixture
constexpr double kPhiLow = 1e-9;        //   "at the goal" potential level
constexpr double kPhiHigh = 1.0 - 1e-6; //   "on an obstacle" potential level
constexpr double kNearTol = 1e-4;       //   allowed distance at either level

// ---------------------------------------------------------------------------
// Small utilities
// ---------------------------------------------------------------------------

std::string fixture(const std::string& name) {
  return std::string(LTLNAV_FIXTURE_DIR) + "/" + name;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

// Deterministic 64-bit mixer; all random sweeps in this suite derive from it
// so every run probes the same points.
struct SplitMix {
  std::uint64_t state;
  explicit SplitMix(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() {  // [0, 1)
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }
  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  return v[mid];
}

struct CmdResult {
  int code = -1;
  std::string out;
};

CmdResult run_cmd(const std::string& cmd) {
  CmdResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  std::size_t n = 0;
  while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<planner::AgentPlan> plans_or_throw(const world::Scenario& s) {
  std::vector<planner::AgentPlan> plans;
  for (const auto& outcome : planner::plan_team(s)) {
    if (!outcome.satisfiable)
      throw std::runtime_error("fixture agent has no satisfiable route");
    plans.push_back(outcome.plan);
  }
  return plans;
}

// First route edge that actually moves between two distinct regions.
std::optional<std::pair<int, int>> first_transfer(const planner::AgentPlan& p) {
  std::vector<int> route = p.prefix;
  route.insert(route.end(), p.suffix.begin(), p.suffix.end());
  route.insert(route.end(), p.suffix.begin(), p.suffix.end());
  for (std::size_t i = 0; i + 1 < route.size(); ++i)
    if (route[i] != route[i + 1]) return std::pair(route[i], route[i + 1]);
  return std::nullopt;
}

// The navigation context for one agent steering along edge (src -> dst).
// `exclude_src` keeps the source region out of the obstacle set (the field
// used while still leaving it); otherwise only the target is free.
nav::FieldContext edge_context(const world::Scenario& s, std::size_t agent,
                               int src, int dst, bool exclude_src,
                               bool f_enabled) {
  const world::AgentSpec& a = s.agents[agent];
  nav::FieldContext c;
  c.target = s.regions[static_cast<std::size_t>(dst)].center;
  c.agent_radius = a.radius;
  c.sensing = a.sensing;
  c.workspace_center = s.workspace.center;
  c.workspace_radius = s.workspace.radius;
  for (std::size_t j = 0; j < s.agents.size(); ++j)
    if (j != agent)
      c.neighbors.push_back({s.agents[j].start, s.agents[j].radius});
  for (int k = 0; k < static_cast<int>(s.regions.size()); ++k)
    if (k != dst && (k != src || !exclude_src))
      c.undesired.push_back(s.regions[static_cast<std::size_t>(k)]);
  c.kg = a.kg;
  c.lambda = a.lambda;
  c.f_enabled = f_enabled;
  c.eps0 = a.fterm.eps0;
  c.fceiling = a.fterm.X;
  return c;
}

// Uniform sample of the free space seen by `ctx`: inside the workspace,
// clear of every obstacle ball by `margin`, and (when margin > 0) off the
// sensing shells, across which the field is only piecewise smooth.
Vec3 sample_free_point(const world::Scenario& s, const nav::FieldContext& ctx,
                       double margin, SplitMix& rng) {
  double reach = ctx.workspace_radius - ctx.agent_radius - margin;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    Vec3 p{ctx.workspace_center.x + rng.range(-reach, reach),
           ctx.workspace_center.y + rng.range(-reach, reach),
           s.workspace.dim == 3 ? ctx.workspace_center.z + rng.range(-reach, reach)
                                : 0.0};
    if (dist(p, ctx.workspace_center) > reach) continue;
    bool ok = true;
    for (const world::Region& r : ctx.undesired)
      if (dist(p, r.center) < r.radius + ctx.agent_radius + margin) ok = false;
    for (const nav::Neighbor& n : ctx.neighbors) {
      if (dist(p, n.position) < ctx.agent_radius + n.radius + margin) ok = false;
      if (margin > 0.0 &&
          std::abs(dist(p, n.position) - ctx.sensing) < margin)
        ok = false;  // derivative jumps across the sensing shell
    }
    if (ok) return p;
  }
  throw std::runtime_error("free-space sampler failed to place a point");
}

bool report(int criterion, bool pass, const std::string& detail) {
  std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL")
            << " — " << detail << "\n";
  return pass;
}

// ===========================================================================
// Criterion 1: automaton/semantics equivalence sweep.
//
// Every formula of AST size <= 6 over atoms {a, b} is checked against every
// ultimately periodic word with prefix <= 2 and cycle <= 3 over those atoms:
// the Büchi translation must accept exactly the words the direct LTL
// evaluator satisfies. The evaluator side calls eval_word on every single
// pair. The automaton side would be too slow called pairwise, so acceptance
// over the whole lasso family is computed per unique normalized formula from
// an exact decomposition — accepts(u·v^w)  <=>  the state set reached on u
// intersects W(v), where W(v) is the set of states from which v repeated
// forever is accepted (a cycle-product reachability computation). The
// decomposition is itself cross-checked against the real accepts_lasso on
// every 64th automaton and on a moving sample of the rest.
// ===========================================================================

struct LassoSpace {
  std::vector<ltl::Letter> letters;
  std::vector<std::vector<int>> prefixes;  // letter indices, length 0..2
  std::vector<std::vector<int>> cycles;    // letter indices, length 1..3
  std::vector<ltl::Word> words;            // id = prefix_id * cycles + cycle_id
  std::vector<ltl::EncodedWord> encoded;
  int num_lassos() const { return static_cast<int>(words.size()); }
};

LassoSpace build_lasso_space() {
  LassoSpace ls;
  ls.letters = {{}, {"a"}, {"b"}, {"a", "b"}};
  const int L = static_cast<int>(ls.letters.size());
  std::vector<std::vector<int>> by_len[2] = {{{}}, {{}}};  // seeded with []
  for (int len = 1; len <= std::max(kC1MaxPrefix, kC1MaxCycle); ++len) {
    std::vector<std::vector<int>> cur;
    std::vector<int> idx(static_cast<std::size_t>(len), 0);
    for (;;) {
      cur.push_back(idx);
      int pos = len - 1;
      while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == L) {
        idx[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
    if (len <= kC1MaxPrefix)
      for (auto& v : cur) by_len[0].push_back(v);
    if (len <= kC1MaxCycle)
      for (auto& v : cur) by_len[1].push_back(v);
  }
  ls.prefixes = by_len[0];
  for (auto& c : by_len[1])
    if (!c.empty()) ls.cycles.push_back(c);

  for (const auto& pre : ls.prefixes)
    for (const auto& cyc : ls.cycles) {
      ltl::Word w;
      for (int i : pre) w.prefix.push_back(ls.letters[static_cast<std::size_t>(i)]);
      for (int i : cyc) w.cycle.push_back(ls.letters[static_cast<std::size_t>(i)]);
      ls.words.push_back(w);
      ls.encoded.emplace_back(ls.words.back());
    }
  return ls;
}

std::vector<std::vector<ltl::FormulaPtr>> enumerate_formulas(int max_size) {
  std::vector<std::vector<ltl::FormulaPtr>> by_size(
      static_cast<std::size_t>(max_size) + 1);
  by_size[1] = {ltl::make_true(), ltl::make_false(), ltl::make_atom("a"),
                ltl::make_atom("b")};
  using Maker1 = ltl::FormulaPtr (*)(ltl::FormulaPtr);
  using Maker2 = ltl::FormulaPtr (*)(ltl::FormulaPtr, ltl::FormulaPtr);
  const Maker1 unary[] = {ltl::make_not, ltl::make_next, ltl::make_always,
                          ltl::make_eventually};
  const Maker2 binary[] = {ltl::make_and, ltl::make_or, ltl::make_implies,
                           ltl::make_until, ltl::make_release};
  for (int size = 2; size <= max_size; ++size) {
    auto& out = by_size[static_cast<std::size_t>(size)];
    for (auto op : unary)
      for (const auto& f : by_size[static_cast<std::size_t>(size - 1)])
        out.push_back(op(f));
    for (int left = 1; left <= size - 2; ++left)
      for (auto op : binary)
        for (const auto& l : by_size[static_cast<std::size_t>(left)])
          for (const auto& r : by_size[static_cast<std::size_t>(size - 1 - left)])
            out.push_back(op(l, r));
  }
  return by_size;
}

// Acceptance of every lasso in `ls` by `aut`, as a packed bitset.
std::vector<std::uint64_t> automaton_accept_bits(const buchi::BuchiAutomaton& aut,
                                                 const LassoSpace& ls) {
  const int Q = aut.num_states;
  const int W = (Q + 63) / 64;
  const int L = static_cast<int>(ls.letters.size());
  std::vector<std::uint32_t> enc(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l)
    enc[static_cast<std::size_t>(l)] =
        buchi::encode_letter(aut, ls.letters[static_cast<std::size_t>(l)]);

  // per-(state, letter) successor bitsets
  std::vector<std::uint64_t> delta(static_cast<std::size_t>(Q) * L * W, 0);
  auto delta_at = [&](int q, int l) {
    return delta.data() + (static_cast<std::size_t>(q) * L + l) * W;
  };
  for (int q = 0; q < Q; ++q)
    for (int e = aut.first_edge[static_cast<std::size_t>(q)];
         e < aut.first_edge[static_cast<std::size_t>(q) + 1]; ++e)
      for (int l = 0; l < L; ++l)
        if (buchi::guard_satisfied(aut.edges[static_cast<std::size_t>(e)].guard,
                                   enc[static_cast<std::size_t>(l)])) {
          int dst = aut.edges[static_cast<std::size_t>(e)].dst;
          delta_at(q, l)[dst / 64] |= 1ull << (dst % 64);
        }

  std::vector<std::uint64_t> initial(static_cast<std::size_t>(W), 0);
  for (int q : aut.initial) initial[static_cast<std::size_t>(q) / 64] |= 1ull << (q % 64);

  auto push_letter = [&](const std::vector<std::uint64_t>& from, int l) {
    std::vector<std::uint64_t> to(static_cast<std::size_t>(W), 0);
    for (int q = 0; q < Q; ++q)
      if (from[static_cast<std::size_t>(q) / 64] >> (q % 64) & 1) {
        const std::uint64_t* d = delta_at(q, l);
        for (int w = 0; w < W; ++w) to[static_cast<std::size_t>(w)] |= d[w];
      }
    return to;
  };

  // state sets reached on each prefix
  std::vector<std::vector<std::uint64_t>> reached;
  reached.reserve(ls.prefixes.size());
  for (const auto& pre : ls.prefixes) {
    std::vector<std::uint64_t> s = initial;
    for (int l : pre) s = push_letter(s, l);
    reached.push_back(std::move(s));
  }

  // W(v) per cycle via the product of the automaton with the cycle position:
  // node q*len+i steps to q'*len+((i+1) mod len) on letter v[i]. A state q
  // accepts v^w iff (q, 0) reaches a strongly connected component that is a
  // real cycle and contains an accepting state.
  std::vector<std::vector<std::uint64_t>> wsets;
  wsets.reserve(ls.cycles.size());
  std::vector<int> index, lowlink, comp, stack, call_node, call_edge;
  std::vector<char> on_stack;
  std::vector<std::vector<int>> adj;
  for (const auto& cyc : ls.cycles) {
    const int len = static_cast<int>(cyc.size());
    const int N = Q * len;
    adj.assign(static_cast<std::size_t>(N), {});
    for (int q = 0; q < Q; ++q)
      for (int i = 0; i < len; ++i) {
        const std::uint64_t* d = delta_at(q, cyc[static_cast<std::size_t>(i)]);
        for (int q2 = 0; q2 < Q; ++q2)
          if (d[q2 / 64] >> (q2 % 64) & 1)
            adj[static_cast<std::size_t>(q) * len + i].push_back(
                q2 * len + (i + 1) % len);
      }

    // Tarjan, iterative
    index.assign(static_cast<std::size_t>(N), -1);
    lowlink.assign(static_cast<std::size_t>(N), 0);
    comp.assign(static_cast<std::size_t>(N), -1);
    on_stack.assign(static_cast<std::size_t>(N), 0);
    stack.clear();
    int next_index = 0, next_comp = 0;
    std::vector<int> comp_size;
    std::vector<char> comp_good;
    for (int root = 0; root < N; ++root) {
      if (index[static_cast<std::size_t>(root)] != -1) continue;
      call_node.assign(1, root);
      call_edge.assign(1, 0);
      index[static_cast<std::size_t>(root)] =
          lowlink[static_cast<std::size_t>(root)] = next_index++;
      stack.push_back(root);
      on_stack[static_cast<std::size_t>(root)] = 1;
      while (!call_node.empty()) {
        int u = call_node.back();
        if (call_edge.back() <
            static_cast<int>(adj[static_cast<std::size_t>(u)].size())) {
          int v = adj[static_cast<std::size_t>(u)]
                     [static_cast<std::size_t>(call_edge.back()++)];
          if (index[static_cast<std::size_t>(v)] == -1) {
            index[static_cast<std::size_t>(v)] =
                lowlink[static_cast<std::size_t>(v)] = next_index++;
            stack.push_back(v);
            on_stack[static_cast<std::size_t>(v)] = 1;
            call_node.push_back(v);
            call_edge.push_back(0);
          } else if (on_stack[static_cast<std::size_t>(v)]) {
            lowlink[static_cast<std::size_t>(u)] =
                std::min(lowlink[static_cast<std::size_t>(u)],
                         index[static_cast<std::size_t>(v)]);
          }
        } else {
          call_node.pop_back();
          call_edge.pop_back();
          if (!call_node.empty()) {
            int parent = call_node.back();
            lowlink[static_cast<std::size_t>(parent)] =
                std::min(lowlink[static_cast<std::size_t>(parent)],
                         lowlink[static_cast<std::size_t>(u)]);
          }
          if (lowlink[static_cast<std::size_t>(u)] ==
              index[static_cast<std::size_t>(u)]) {
            int id = next_comp++, size = 0;
            bool has_accepting = false;
            for (;;) {
              int v = stack.back();
              stack.pop_back();
              on_stack[static_cast<std::size_t>(v)] = 0;
              comp[static_cast<std::size_t>(v)] = id;
              ++size;
              if (aut.accepting[static_cast<std::size_t>(v / len)])
                has_accepting = true;
              if (v == u) break;
            }
            comp_size.push_back(size);
            comp_good.push_back(has_accepting ? 1 : 0);
          }
        }
      }
    }
    // a single-node component is a cycle only if it has a self-edge
    std::vector<char> good(static_cast<std::size_t>(next_comp), 0);
    for (int v = 0; v < N; ++v) {
      int c = comp[static_cast<std::size_t>(v)];
      if (!comp_good[static_cast<std::size_t>(c)]) continue;
      if (comp_size[static_cast<std::size_t>(c)] > 1) {
        good[static_cast<std::size_t>(c)] = 1;
      } else {
        for (int to : adj[static_cast<std::size_t>(v)])
          if (to == v) good[static_cast<std::size_t>(c)] = 1;
      }
    }
    // reverse reachability from the good components
    std::vector<char> reaches(static_cast<std::size_t>(N), 0);
    std::vector<int> work;
    for (int v = 0; v < N; ++v)
      if (good[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])]) {
        reaches[static_cast<std::size_t>(v)] = 1;
        work.push_back(v);
      }
    std::vector<std::vector<int>> radj(static_cast<std::size_t>(N));
    for (int v = 0; v < N; ++v)
      for (int to : adj[static_cast<std::size_t>(v)])
        radj[static_cast<std::size_t>(to)].push_back(v);
    while (!work.empty()) {
      int v = work.back();
      work.pop_back();
      for (int from : radj[static_cast<std::size_t>(v)])
        if (!reaches[static_cast<std::size_t>(from)]) {
          reaches[static_cast<std::size_t>(from)] = 1;
          work.push_back(from);
        }
    }
    std::vector<std::uint64_t> wset(static_cast<std::size_t>(W), 0);
    for (int q = 0; q < Q; ++q)
      if (reaches[static_cast<std::size_t>(q) * static_cast<std::size_t>(len)])
        wset[static_cast<std::size_t>(q) / 64] |= 1ull << (q % 64);
    wsets.push_back(std::move(wset));
  }

  const int num = ls.num_lassos();
  std::vector<std::uint64_t> bits(static_cast<std::size_t>(num + 63) / 64, 0);
  int id = 0;
  for (const auto& s : reached)
    for (const auto& wset : wsets) {
      bool accept = false;
      for (int w = 0; w < W && !accept; ++w)
        accept = (s[static_cast<std::size_t>(w)] & wset[static_cast<std::size_t>(w)]) != 0;
      if (accept) bits[static_cast<std::size_t>(id) / 64] |= 1ull << (id % 64);
      ++id;
    }
  return bits;
}

bool criterion1() {
  auto t0 = std::chrono::steady_clock::now();
  LassoSpace ls = build_lasso_space();
  auto by_size = enumerate_formulas(kC1MaxFormulaSize);
  long num_formulas = 0;
  for (const auto& v : by_size) num_formulas += static_cast<long>(v.size());

  std::unordered_map<std::string, std::vector<std::uint64_t>> memo;
  long disagreements = 0, xchecked = 0, xfail = 0, uniques = 0;
  std::string first_bad;
  SplitMix rng(0x5eedc0de);

  const int num_lassos = ls.num_lassos();
  std::vector<std::uint64_t> eval_bits(static_cast<std::size_t>(num_lassos + 63) / 64);
  long formula_index = 0;
  for (const auto& bucket : by_size)
    for (const auto& f : bucket) {
      ++formula_index;
      std::fill(eval_bits.begin(), eval_bits.end(), 0);
      for (int w = 0; w < num_lassos; ++w)
        if (ltl::eval_word(*f, ls.encoded[static_cast<std::size_t>(w)]))
          eval_bits[static_cast<std::size_t>(w) / 64] |= 1ull << (w % 64);

      ltl::FormulaPtr nnf = ltl::normalize(f);
      std::string key = ltl::to_string(nnf);
      auto it = memo.find(key);
      if (it == memo.end()) {
        buchi::BuchiAutomaton aut = buchi::translate(nnf);
        auto bits = automaton_accept_bits(aut, ls);
        // validate the decomposition against the real accepts_lasso: densely
        // on early automata, on sampled lassos for every one after that
        int probes = uniques < 64 ? num_lassos : 4;
        for (int k = 0; k < probes; ++k) {
          int w = probes == num_lassos
                      ? k
                      : static_cast<int>(rng.next() % static_cast<std::uint64_t>(num_lassos));
          bool direct =
              buchi::accepts_lasso(aut, ls.words[static_cast<std::size_t>(w)]);
          bool decomposed = bits[static_cast<std::size_t>(w) / 64] >> (w % 64) & 1;
          ++xchecked;
          if (direct != decomposed) ++xfail;
        }
        ++uniques;
        it = memo.emplace(std::move(key), std::move(bits)).first;
      }
      const auto& aut_bits = it->second;
      for (std::size_t w = 0; w < eval_bits.size(); ++w)
        if (eval_bits[w] != aut_bits[w]) {
          disagreements +=
              __builtin_popcountll(eval_bits[w] ^ aut_bits[w]);
          if (first_bad.empty())
            first_bad = " first at formula '" + ltl::to_string(f) + "'";
        }
    }

  double wall = seconds_since(t0);
  std::ostringstream d;
  d << num_formulas << " formulas x " << num_lassos << " lassos = "
    << num_formulas * num_lassos << " comparisons, " << disagreements
    << " disagreements" << first_bad << "; " << uniques
    << " unique normalized formulas; decomposition cross-check " << xchecked
    << " direct calls, " << xfail << " mismatches; " << std::fixed
    << std::setprecision(1) << wall << "s (budget " << kC1Budget << "s)";
  return report(1, disagreements == 0 && xfail == 0 && wall < kC1Budget, d.str());
}

// ===========================================================================
// Criterion 2: reference plans. Fixed prefix-free cyclic routes for the three
// scenario families, each evaluated as the word of labels it reads, must
// satisfy their mission formulas under both the direct evaluator and the
// automaton translation. Exact boolean outcomes, no tolerance.
// ===========================================================================

bool criterion2() {
  struct Ref {
    const char* name;
    const char* formula;
    std::vector<ltl::Letter> cycle;
  };
  const std::vector<Ref> refs = {
      {"resources hauler1 (res_a,res_e,res_b)",
       "[] !(res_c || res_d) && [] <> (res_a && X (res_e && X res_b))",
       {{"res_a"}, {"res_e"}, {"res_b"}}},
      {"resources surveyor (ins_b,ins_a,ins_d,ins_c)",
       "[] !obs && [] (<> ins_a && <> ins_b && <> ins_c && <> ins_d)",
       {{"ins_b"}, {"ins_a"}, {"ins_d"}, {"ins_c"}}},
      {"resources hauler2 (res_d,res_a,res_c)",
       "[] !(res_b || res_e) && [] <> (res_a && X (res_c && X res_d))",
       {{"res_d"}, {"res_a"}, {"res_c"}}},
      {"inspection drone1 (a,c,b)",
       "[] !obs && [] <> (a && X (c && X b))",
       {{"a"}, {"c"}, {"b"}}},
      {"inspection drone2 (c,b,a)",
       "[] !obs && [] <> (a && X (c && X b))",
       {{"c"}, {"b"}, {"a"}}},
      {"inspection drone2 alt (c,a,b)",
       "[] !obs && [] <> (a && X (c && X b))",
       {{"c"}, {"a"}, {"b"}}},
      {"delivery courier1 (res_a,base,res_b,base)",
       "[] (<> (res_a && X base) && <> (res_b && X base))",
       {{"res_a"}, {"base"}, {"res_b"}, {"base"}}},
      {"delivery courier2 (res_a,base)",
       "[] !res_b && [] <> (res_a && X base)",
       {{"res_a"}, {"base"}}},
  };

  int verified = 0, split = 0;
  std::string failures;
  for (const Ref& ref : refs) {
    ltl::FormulaPtr f = ltl::parse(ref.formula);
    ltl::Word w;
    w.cycle = ref.cycle;
    bool direct = ltl::eval_word(f, w);
    bool via_automaton = buchi::accepts_lasso(buchi::translate(f), w);
    if (direct != via_automaton) ++split;  // the two checks must always agree
    if (direct && via_automaton) {
      ++verified;
    } else {
      if (!failures.empty()) failures += ", ";
      failures += ref.name;
    }
  }
  std::ostringstream d;
  d << verified << "/" << refs.size()
    << " reference plans verify under both checks; evaluator and automaton "
    << (split == 0 ? "agree on all" : "DISAGREE on some");
  if (!failures.empty()) d << "; not satisfied: " << failures;
  return report(2, verified == static_cast<int>(refs.size()) && split == 0,
                d.str());
}

// ===========================================================================
// Criterion 3: planner soundness and determinism through the CLI. The plan
// command on all three scenario fixtures must emit routes whose label words
// satisfy the agents' formulas, and repeated runs must be byte-identical.
// ===========================================================================

bool criterion3() {
  const char* fixtures[] = {"resources3d.json", "inspection2d.json",
                            "delivery2d.json"};
  int agents_checked = 0;
  for (const char* fx : fixtures) {
    std::string cmd = std::string(LTLNAV_CLI_PATH) + " plan '" + fixture(fx) +
                      "' 2>/dev/null";
    CmdResult r1 = run_cmd(cmd);
    CmdResult r2 = run_cmd(cmd);
    if (r1.code != 0 || r2.code != 0)
      return report(3, false, std::string("plan exited nonzero on ") + fx);
    if (r1.out != r2.out)
      return report(3, false, std::string("non-deterministic output on ") + fx);

    world::Scenario s = world::load_scenario(fixture(fx));
    json plans = json::parse(r1.out);
    for (const auto& jp : plans["agents"]) {
      std::string name = jp["id"];
      auto spec = std::find_if(s.agents.begin(), s.agents.end(),
                               [&](const auto& a) { return a.name == name; });
      if (spec == s.agents.end() || jp["satisfiable"] != true)
        return report(3, false, "unsatisfiable or unknown agent " + name);
      planner::AgentPlan plan;
      plan.agent = name;
      for (const auto& rn : jp["prefix"]) plan.prefix.push_back(s.region_index(rn));
      for (const auto& rn : jp["suffix"]) plan.suffix.push_back(s.region_index(rn));
      ltl::Word w = planner::plan_word(s, *spec, plan);
      if (!ltl::eval_word(ltl::parse(spec->formula), w))
        return report(3, false, "plan word does not satisfy formula for " + name);
      ++agents_checked;
    }
  }
  std::ostringstream d;
  d << "3 fixtures, " << agents_checked
    << " agents: every planned word satisfies its formula; repeated runs "
       "byte-identical";
  return report(3, true, d.str());
}

// ===========================================================================
// Criterion 4: gradient correctness. The analytic field gradient against
// central finite differences at random free-space points, for both per-edge
// obstacle sets (source excluded / source avoided) and with the collision
// booster on and off.
// ===========================================================================

bool criterion4() {
  auto t0 = std::chrono::steady_clock::now();
  const char* fixtures[] = {"resources3d.json", "inspection2d.json",
                            "delivery2d.json"};
  // Central differences of phi (which lies in [0,1]) at step h carry about
  // eps/h of round-off noise per axis. A gradient weaker than that noise
  // divided by the tolerance cannot be certified any tighter by this oracle,
  // so such points are judged against the conditioning floor instead: their
  // absolute disagreement must still be inside the oracle's own noise.
  const double fd_noise =
      std::sqrt(3.0) * std::numeric_limits<double>::epsilon() / kGradFdStep;
  const double scale_floor = fd_noise / kGradRelTol;
  double worst = 0.0;
  std::string worst_at;
  long points = 0;
  std::uint64_t seed = 41;
  for (const char* fx : fixtures) {
    world::Scenario s = world::load_scenario(fixture(fx));
    auto plans = plans_or_throw(s);
    auto edge = first_transfer(plans[0]);
    if (!edge) return report(4, false, std::string("no transfer edge in ") + fx);
    for (bool exclude_src : {true, false})
      for (bool f_on : {true, false}) {
        nav::FieldContext ctx =
            edge_context(s, 0, edge->first, edge->second, exclude_src, f_on);
        SplitMix rng(seed++);
        for (int i = 0; i < kGradPoints; ++i) {
          Vec3 p = sample_free_point(s, ctx, 1e-3, rng);
          Vec3 g = nav::gradient(ctx, p);
          Vec3 fd;
          const int axes = s.workspace.dim;
          for (int a = 0; a < axes; ++a) {
            Vec3 hi = p, lo = p;
            (a == 0 ? hi.x : a == 1 ? hi.y : hi.z) += kGradFdStep;
            (a == 0 ? lo.x : a == 1 ? lo.y : lo.z) -= kGradFdStep;
            double df = (nav::potential(ctx, hi) - nav::potential(ctx, lo)) /
                        (2 * kGradFdStep);
            (a == 0 ? fd.x : a == 1 ? fd.y : fd.z) = df;
          }
          double scale = std::max({norm(g), norm(fd), scale_floor});
          double rel = norm(g - fd) / scale;
          ++points;
          if (rel > worst) {
            worst = rel;
            std::ostringstream w;
            w << fx << (exclude_src ? " transfer" : " final") << " f="
              << (f_on ? "on" : "off");
            worst_at = w.str();
          }
        }
      }
  }
  double wall = seconds_since(t0);
  std::ostringstream d;
  d << points << " points (3 fixtures x 2 obstacle sets x booster on/off), "
    << "max relative error " << std::scientific << std::setprecision(2)
    << worst << " (tolerance " << kGradRelTol << ", conditioning floor "
    << scale_floor << ") at " << worst_at << "; " << std::fixed
    << std::setprecision(1) << wall << "s (budget " << kGradBudget << "s)";
  return report(4, worst < kGradRelTol && wall < kGradBudget, d.str());
}

// ===========================================================================
// Criterion 5: the 3-D scenario must fly its full two-cycle mission inside
// the step budget while every safety and conformance monitor stays clean.
// Sub-checks are reported individually so a completion failure does not hide
// the monitors' results.
// ===========================================================================

bool criterion5() {
  auto t0 = std::chrono::steady_clock::now();
  world::Scenario s = world::load_scenario(fixture("resources3d.json"));
  auto plans = plans_or_throw(s);
  sim::RunResult r = sim::run(s, plans);
  double wall = seconds_since(t0);

  bool completed = r.status == sim::RunStatus::Completed;
  bool clearance_ok = r.safety.min_agent_clearance > 0.0;
  bool regions_ok = r.safety.min_region_clearance > 0.0;
  bool conformant = true;
  for (const auto& a : r.agents) conformant = conformant && a.conformant;
  bool in_time = wall < kSimBudget;

  std::ostringstream d;
  d << "status " << sim::status_name(r.status) << " after " << r.steps
    << " steps (t=" << std::fixed << std::setprecision(1) << r.t_end << ")"
    << "; sub-checks: agent clearance min " << std::setprecision(4)
    << r.safety.min_agent_clearance << (clearance_ok ? " OK" : " VIOLATED")
    << ", region clearance min " << r.safety.min_region_clearance
    << (regions_ok ? " OK" : " VIOLATED") << ", conformant-so-far "
    << (conformant ? "all agents OK" : "BROKEN") << ", wall "
    << std::setprecision(1) << wall << "s" << (in_time ? " OK" : " OVER")
    << " (budget " << kSimBudget << "s)";
  return report(5, completed && clearance_ok && regions_ok && conformant && in_time,
                d.str());
}

// ===========================================================================
// Criterion 6: both 2-D scenarios complete conformantly; the largest
// per-axis control magnitude is reported, with a hard bound well above the
// expected level.
// ===========================================================================

bool criterion6() {
  bool pass = true;
  std::ostringstream d;
  for (const char* fx : {"inspection2d.json", "delivery2d.json"}) {
    world::Scenario s = world::load_scenario(fixture(fx));
    auto plans = plans_or_throw(s);
    sim::RunResult r = sim::run(s, plans);
    bool completed = r.status == sim::RunStatus::Completed;
    bool conformant = true;
    for (const auto& a : r.agents) conformant = conformant && a.conformant;
    bool bounded = r.max_abs_control <= kCtrlHardBound;
    if (!(completed && conformant && bounded)) pass = false;
    if (d.tellp() > 0) d << "; ";
    d << fx << ": " << sim::status_name(r.status) << " t=" << std::fixed
      << std::setprecision(1) << r.t_end
      << (conformant ? ", conformant" : ", NONCONFORMANT") << ", max|u| "
      << std::setprecision(3) << r.max_abs_control << " (expected <= "
      << kCtrlReport << ", hard bound " << kCtrlHardBound << ")";
  }
  return report(6, pass, d.str());
}

// ===========================================================================
// Criterion 7: controller continuity through a transfer's two switch times
// (source exit, end of blend). The peak step-to-step control change inside a
// small window around each switch must stay within 3x the median change on
// the smooth segments either side.
// ===========================================================================

struct ControlTrace : sim::Observer {
  std::vector<Vec3> u;
  void on_sample(const sim::Sample& s) override {
    u.push_back(s.agents[0].control);
  }
};

bool criterion7() {
  world::Scenario s = world::load_scenario(fixture("resources3d.json"));
  auto plans = plans_or_throw(s);

  // the full mission overruns any budget; a shortened run that covers the
  // first real transfer of agent 0 plus a smooth tail is enough here
  const sim::EdgeRecord* edge = nullptr;
  ControlTrace trace;
  sim::RunResult r;
  for (long steps = 150000; steps <= 1000000; steps *= 2) {
    world::Scenario cut = s;
    cut.sim.max_steps = steps;
    trace.u.clear();
    r = sim::run(cut, plans, &trace);
    edge = nullptr;
    for (const auto& e : r.agents[0].edges)
      if (e.src != e.dst && e.t_exit && e.t_switch) {
        edge = &e;
        break;
      }
    if (edge &&
        *edge->t_switch + (kSpikeWindow + kSmoothSpan + 1) * s.sim.dt <
            r.t_end)
      break;
    edge = nullptr;
  }
  if (!edge)
    return report(7, false,
                  "no completed transfer switch captured within the step budget");

  std::vector<double> dstep(trace.u.size() - 1);
  for (std::size_t i = 0; i + 1 < trace.u.size(); ++i)
    dstep[i] = norm(trace.u[i + 1] - trace.u[i]);

  auto ratio_at = [&](double tc, double& peak, double& base) {
    long idx = std::lround(tc / s.sim.dt);
    long lo = std::max<long>(idx - kSpikeWindow, 0);
    long hi = std::min<long>(idx + kSpikeWindow, static_cast<long>(dstep.size()));
    peak = 0.0;
    for (long i = lo; i < hi; ++i)
      peak = std::max(peak, dstep[static_cast<std::size_t>(i)]);
    long bl = std::max<long>(lo - kSmoothSpan, 0);
    long ah = std::min<long>(hi + kSmoothSpan, static_cast<long>(dstep.size()));
    std::vector<double> before(dstep.begin() + bl, dstep.begin() + lo);
    std::vector<double> after(dstep.begin() + hi, dstep.begin() + ah);
    if (static_cast<int>(before.size()) < kSmoothMin ||
        static_cast<int>(after.size()) < kSmoothMin)
      return false;
    base = std::max({median(before), median(after), 1e-12});
    return true;
  };

  double peak_exit = 0, base_exit = 0, peak_blend = 0, base_blend = 0;
  if (!ratio_at(*edge->t_exit, peak_exit, base_exit) ||
      !ratio_at(*edge->t_switch, peak_blend, base_blend))
    return report(7, false, "too few smooth samples around a switch time");

  double r_exit = peak_exit / base_exit;
  double r_blend = peak_blend / base_blend;
  std::ostringstream d;
  d << "transfer " << s.regions[static_cast<std::size_t>(edge->src)].name
    << " -> " << s.regions[static_cast<std::size_t>(edge->dst)].name
    << ": spike ratio " << std::fixed << std::setprecision(2) << r_exit
    << " at exit, " << r_blend << " at blend end (limit " << kSpikeRatio
    << "; window +/-" << kSpikeWindow << " samples vs median of "
    << kSmoothSpan << ")";
  return report(7, r_exit <= kSpikeRatio && r_blend <= kSpikeRatio, d.str());
}

// ===========================================================================
// Criterion 8: potential-function shape with the booster off. Over random
// free-space samples: phi stays in [0,1]; phi below 1e-9 happens only right
// at the target; phi above 1-1e-6 happens only right at an obstacle
// boundary (the zero set of the obstacle product).
// ===========================================================================

bool criterion8() {
  bool pass = true;
  std::ostringstream d;
  std::uint64_t seed = 83;
  for (const char* fx : {"resources3d.json", "inspection2d.json",
                         "delivery2d.json"}) {
    world::Scenario s = world::load_scenario(fixture(fx));
    auto plans = plans_or_throw(s);
    auto edge = first_transfer(plans[0]);
    if (!edge) return report(8, false, std::string("no transfer edge in ") + fx);
    nav::FieldContext ctx =
        edge_context(s, 0, edge->first, edge->second, true, false);

    // distance to the zero set of the obstacle product: nearest obstacle
    // sphere, workspace shell, or neighbor collision sphere
    auto boundary_distance = [&](const Vec3& p) {
      double best = std::abs(ctx.workspace_radius - ctx.agent_radius -
                             dist(p, ctx.workspace_center));
      for (const world::Region& rg : ctx.undesired)
        best = std::min(best, std::abs(dist(p, rg.center) -
                                       (rg.radius + ctx.agent_radius)));
      for (const nav::Neighbor& n : ctx.neighbors)
        best = std::min(best, std::abs(dist(p, n.position) -
                                       (ctx.agent_radius + n.radius)));
      return best;
    };

    SplitMix rng(seed++);
    int out_of_range = 0, low_far = 0, high_far = 0;
    double worst_high_dist = 0.0;
    for (int i = 0; i < kPhiSamples; ++i) {
      Vec3 p = sample_free_point(s, ctx, 0.0, rng);
      double phi = nav::potential(ctx, p);
      if (!(phi >= 0.0 && phi <= 1.0)) ++out_of_range;
      if (phi < kPhiLow && dist(p, ctx.target) > kNearTol) ++low_far;
      if (phi > kPhiHigh) {
        double bd = boundary_distance(p);
        if (bd > kNearTol) {
          ++high_far;
          worst_high_dist = std::max(worst_high_dist, bd);
        }
      }
    }
    bool ok = out_of_range == 0 && low_far == 0 && high_far == 0;
    if (!ok) pass = false;
    if (d.tellp() > 0) d << "; ";
    d << fx << ": " << kPhiSamples << " samples, range violations "
      << out_of_range << ", near-zero away from target " << low_far
      << ", near-one away from boundaries " << high_far;
    if (high_far > 0)
      d << " (farthest " << std::scientific << std::setprecision(2)
        << worst_high_dist << std::defaultfloat
        << " from any boundary, tolerance " << kNearTol << ")";
  }
  return report(8, pass, d.str());
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
      if (only < 1 || only > 8) {
        std::cerr << "error: --criterion expects 1..8\n";
        return 2;
      }
    } else {
      std::cerr << "usage: " << argv[0] << " [--criterion N]\n";
      return 2;
    }
  }

  bool (*criteria[])() = {criterion1, criterion2, criterion3, criterion4,
                          criterion5, criterion6, criterion7, criterion8};
  int failures = 0;
  for (int n = 1; n <= 8; ++n) {
    if (only != 0 && n != only) continue;
    try {
      if (!criteria[n - 1]()) ++failures;
    } catch (const std::exception& e) {
      report(n, false, std::string("exception: ") + e.what());
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}
