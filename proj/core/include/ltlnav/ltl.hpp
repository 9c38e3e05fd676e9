#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ltlnav::ltl {

// Immutable LTL syntax tree. Unary operators store their operand in `lhs`.
// Subtrees are shared freely; nothing ever mutates a node after creation.
enum class Kind : std::uint8_t {
  True,
  False,
  Atom,
  Not,
  And,
  Or,
  Implies,
  Next,
  Until,
  Release,
  Always,
  Eventually,
};

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
  Kind kind;
  std::string name;  // Atom only
  FormulaPtr lhs;
  FormulaPtr rhs;    // binary operators only
};

FormulaPtr make_true();
FormulaPtr make_false();
FormulaPtr make_atom(std::string name);
FormulaPtr make_not(FormulaPtr f);
FormulaPtr make_and(FormulaPtr a, FormulaPtr b);
FormulaPtr make_or(FormulaPtr a, FormulaPtr b);
FormulaPtr make_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr make_next(FormulaPtr f);
FormulaPtr make_until(FormulaPtr a, FormulaPtr b);
FormulaPtr make_release(FormulaPtr a, FormulaPtr b);
FormulaPtr make_always(FormulaPtr f);
FormulaPtr make_eventually(FormulaPtr f);

bool is_unary(Kind k);
bool is_binary(Kind k);

// Thrown on any syntax error; `column` is the 1-based position of the
// offending character in the input string.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t column);
  std::size_t column;
};

// Grammar (loosest to tightest): `->` (right-assoc), `||`, `&&`, `U`/`R`
// (right-assoc, one level), then the prefix operators `!`, `X`, `[]`, `<>`,
// then atoms / `true` / `false` / parentheses. `U`, `R` and `X` are reserved
// words; every other identifier is an atomic proposition.
FormulaPtr parse(std::string_view text);

// Prints a formula that parses back to the same tree, with parentheses only
// where precedence demands them.
std::string to_string(const Formula& f);
std::string to_string(const FormulaPtr& f);

bool structurally_equal(const Formula& a, const Formula& b);

// Total number of nodes in the tree (operators and leaves alike).
std::size_t node_count(const Formula& f);

// Negation normal form: no Implies/Always/Eventually, negation on atoms only.
bool is_nnf(const Formula& f);
FormulaPtr normalize(const FormulaPtr& f);

// Atom names occurring in the formula, sorted and deduplicated.
std::vector<std::string> collect_atoms(const Formula& f);

// An ultimately periodic word: prefix · cycle · cycle · ...  Each letter is
// the set of atoms true at that step, as a sorted list of names. The cycle
// must be nonempty.
using Letter = std::vector<std::string>;
struct Word {
  std::vector<Letter> prefix;
  std::vector<Letter> cycle;
};

// A word pre-encoded as one truth bitmap per atom over the positions
// prefix·cycle. Lets a caller evaluate many formulas against one word
// without repeatedly hashing letter sets. Position i of atom mask word j is
// bit (i - 64*j).
class EncodedWord {
 public:
  explicit EncodedWord(const Word& w);

  int prefix_len() const { return pre_; }
  int cycle_len() const { return cyc_; }
  int length() const { return pre_ + cyc_; }

  // Truth bitmap for `name`; all-zero for atoms absent from the word.
  const std::vector<std::uint64_t>& atom_mask(std::string_view name) const;

 private:
  int pre_;
  int cyc_;
  std::vector<std::pair<std::string, std::vector<std::uint64_t>>> masks_;
  std::vector<std::uint64_t> zero_;
};

// Standard LTL semantics over the infinite word prefix · cycle^ω, decided by
// least/greatest fixpoints on the finite lasso quotient (every subformula's
// truth value is periodic with the word, so the quotient is exact).
bool eval_word(const Formula& f, const Word& w);
bool eval_word(const Formula& f, const EncodedWord& w);
bool eval_word(const FormulaPtr& f, const Word& w);

}  // namespace ltlnav::ltl
