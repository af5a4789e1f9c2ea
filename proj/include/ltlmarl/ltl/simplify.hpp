#pragma once

#include <vector>

#include "ltlmarl/ltl/formula.hpp"

namespace ltlmarl::ltl {

// Simplifying constructors. Given simplified operands they return a
// simplified formula, so bottom-up application yields `simplify`.
//
// Rules (all hold under the finite-trace semantics in evaluate.hpp):
//   !true = false, !false = true, !!a = a
//   a & true = a, a & false = false, a | true = true, a | false = a
//   nested & / | chains are flattened and structurally equal operands deduplicated
//   X false = false
//   F true = true, F false = false, F F a = F a
//   G true = true
//   a U true = true, a U false = false, false U b = b
//   a R true = true, a R false = false, true R b = b
namespace make {

inline Formula negation(Formula a) {
  if (a.is_true()) return Formula::ff();
  if (a.is_false()) return Formula::tt();
  if (a.op() == Op::kNot) return a.left();
  return Formula::negation(std::move(a));
}

namespace detail {

inline void collect(const Formula& f, Op op, std::vector<Formula>& out) {
  if (f.op() == op) {
    collect(f.left(), op, out);
    collect(f.right(), op, out);
    return;
  }
  for (const auto& g : out) {
    if (g == f) return;
  }
  out.push_back(f);
}

inline Formula junction(Op op, Formula a, Formula b) {
  const bool is_and = op == Op::kAnd;
  // unit / zero of the operator
  if (is_and ? a.is_false() : a.is_true()) return a;
  if (is_and ? b.is_false() : b.is_true()) return b;
  if (is_and ? a.is_true() : a.is_false()) return b;
  if (is_and ? b.is_true() : b.is_false()) return a;
  if (a == b) return a;
  std::vector<Formula> parts;
  collect(a, op, parts);
  collect(b, op, parts);
  Formula acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = Formula::make_node(op, acc, parts[i]);
  return acc;
}

}  // namespace detail

inline Formula conj(Formula a, Formula b) {
  return detail::junction(Op::kAnd, std::move(a), std::move(b));
}
inline Formula disj(Formula a, Formula b) {
  return detail::junction(Op::kOr, std::move(a), std::move(b));
}

inline Formula next(Formula a) {
  if (a.is_false()) return a;
  return Formula::next(std::move(a));
}

inline Formula eventually(Formula a) {
  if (a.is_constant() || a.op() == Op::kEventually) return a;
  return Formula::eventually(std::move(a));
}

inline Formula always(Formula a) {
  if (a.is_true()) return a;
  return Formula::always(std::move(a));
}

inline Formula until(Formula a, Formula b) {
  if (b.is_constant()) return b;
  if (a.is_false()) return b;
  return Formula::until(std::move(a), std::move(b));
}

inline Formula release(Formula a, Formula b) {
  if (b.is_constant()) return b;
  if (a.is_true()) return b;
  return Formula::release(std::move(a), std::move(b));
}

inline Formula node(Op op, Formula a, Formula b) {
  switch (op) {
    case Op::kNot: return negation(std::move(a));
    case Op::kAnd: return conj(std::move(a), std::move(b));
    case Op::kOr: return disj(std::move(a), std::move(b));
    case Op::kNext: return next(std::move(a));
    case Op::kAlways: return always(std::move(a));
    case Op::kEventually: return eventually(std::move(a));
    case Op::kUntil: return until(std::move(a), std::move(b));
    case Op::kRelease: return release(std::move(a), std::move(b));
    default: return a;
  }
}

}  // namespace make

/// Returns a trace-equivalent formula with the rules above applied bottom-up.
/// Idempotent: simplify(simplify(f)) == simplify(f).
inline Formula simplify(const Formula& f) {
  switch (arity(f.op())) {
    case 0:
      return f;
    case 1:
      return make::node(f.op(), simplify(f.left()), Formula());
    default:
      return make::node(f.op(), simplify(f.left()), simplify(f.right()));
  }
}

}  // namespace ltlmarl::ltl
