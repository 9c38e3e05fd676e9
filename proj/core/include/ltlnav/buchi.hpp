#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltlnav/ltl.hpp"

namespace ltlnav::buchi {

// A conjunction of literals over the automaton's atom table: every atom whose
// bit is set in `pos` must hold, every atom whose bit is set in `neg` must
// not. pos == neg == 0 is the guard `true`.
struct Guard {
  std::uint32_t pos = 0;
  std::uint32_t neg = 0;
  friend bool operator==(const Guard&, const Guard&) = default;
};

struct Edge {
  int src = 0;
  int dst = 0;
  Guard guard;
};

// Nondeterministic Buchi automaton. Runs start in an initial state and
// consume one letter per edge; a run is accepting when it visits an accepting
// state infinitely often. Edges are kept sorted by (src, dst, guard) with CSR
// offsets in `first_edge` (size num_states + 1) for per-state access.
struct BuchiAutomaton {
  std::vector<std::string> atoms;  // sorted; guard bits index into this
  int num_states = 0;
  std::vector<int> initial;    // sorted state ids
  std::vector<char> accepting;  // one flag per state
  std::vector<Edge> edges;
  std::vector<int> first_edge;
};

bool guard_satisfied(const Guard& g, std::uint32_t letter);

// Letter as a bitmask over `a.atoms`; names outside the table are ignored.
std::uint32_t encode_letter(const BuchiAutomaton& a, const ltl::Letter& l);

std::string guard_to_string(const BuchiAutomaton& a, const Guard& g);

// Sorts edges and rebuilds the CSR index; for hand-assembled automata.
void reindex(BuchiAutomaton& a);

// Tableau translation. The input is normalized first if it is not already in
// negation normal form. The automaton's alphabet is the union of the
// formula's atoms and `extra_atoms`, sorted. Deterministic: structurally
// equal formulas yield byte-identical automata, and state numbering is the
// sorted relabeling of a canonical state serialization (initial state first).
BuchiAutomaton translate(const ltl::FormulaPtr& f,
                         const std::vector<std::string>& extra_atoms = {});

// Does the automaton accept the infinite word prefix . cycle^w ?
bool accepts_lasso(const BuchiAutomaton& a, const ltl::Word& w);

std::string to_json(const BuchiAutomaton& a);
std::string to_dot(const BuchiAutomaton& a);

}  // namespace ltlnav::buchi
