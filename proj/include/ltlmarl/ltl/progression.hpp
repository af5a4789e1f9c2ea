#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ltlmarl/ltl/evaluate.hpp"
#include "ltlmarl/ltl/formula.hpp"
#include "ltlmarl/ltl/simplify.hpp"

namespace ltlmarl::ltl {

/// Which rewrite to use for Release during progression.
enum class ReleaseRule {
  /// prog(a R b) = prog(b) & (prog(a) | a R b)
  kStandard,
  /// prog(a R b) = prog(a) & (prog(b) | b R a), operands swapped as printed in
  /// the original rule list. Kept for comparison only; it is not sound.
  kPaperLiteral,
};

struct ProgressionOptions {
  AlwaysRule always = AlwaysRule::kStandard;
  ReleaseRule release = ReleaseRule::kStandard;
};

namespace detail {

// `f` must already be simplified; the result then is too.
inline Formula prog(LabelSet sigma, const Formula& f, const ProgressionOptions& opt) {
  switch (f.op()) {
    case Op::kTrue:
    case Op::kFalse:
      return f;
    case Op::kProp:
      return sigma.contains(f.proposition()) ? Formula::tt() : Formula::ff();
    case Op::kNot:
      return make::negation(prog(sigma, f.left(), opt));
    case Op::kAnd:
      return make::conj(prog(sigma, f.left(), opt), prog(sigma, f.right(), opt));
    case Op::kOr:
      return make::disj(prog(sigma, f.left(), opt), prog(sigma, f.right(), opt));
    case Op::kNext:
      return f.left();
    case Op::kAlways:
      if (opt.always == AlwaysRule::kPaperLiteral) return Formula::tt();
      return make::conj(prog(sigma, f.left(), opt), f);
    case Op::kEventually:
      return make::disj(prog(sigma, f.left(), opt), f);
    case Op::kUntil:
      return make::disj(prog(sigma, f.right(), opt), make::conj(prog(sigma, f.left(), opt), f));
    case Op::kRelease:
      if (opt.release == ReleaseRule::kPaperLiteral) {
        return make::conj(prog(sigma, f.left(), opt),
                          make::disj(prog(sigma, f.right(), opt),
                                     make::release(f.right(), f.left())));
      }
      return make::conj(prog(sigma, f.right(), opt), make::disj(prog(sigma, f.left(), opt), f));
  }
  return f;
}

}  // namespace detail

/// One progression step: the obligation that remains for the rest of the
/// trace after observing `sigma`. Returns simplify(prog(sigma, f)).
inline Formula progress(LabelSet sigma, const Formula& f, const ProgressionOptions& opt = {}) {
  return detail::prog(sigma, simplify(f), opt);
}

/// Same as `progress` but skips the input simplification. Only valid when
/// `f` is already simplified, e.g. the output of an earlier progression.
inline Formula progress_simplified(LabelSet sigma, const Formula& f,
                                   const ProgressionOptions& opt = {}) {
  return detail::prog(sigma, f, opt);
}

enum class Verdict { kOpen, kSatisfied, kFalsified };

struct ProgressionResult {
  Verdict verdict = Verdict::kOpen;
  /// Step at which the verdict was reached (meaningless while open).
  std::size_t step = 0;
  /// Formula left after the last consumed step.
  Formula residual;
};

/// Folds `progress` over the trace and stops at the first step where the
/// running formula becomes true or false.
inline ProgressionResult satisfaction_by_progression(const Trace& trace, const Formula& f,
                                                     const ProgressionOptions& opt = {}) {
  ProgressionResult r;
  r.residual = simplify(f);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    r.residual = detail::prog(trace[i], r.residual, opt);
    if (r.residual.is_true() || r.residual.is_false()) {
      r.verdict = r.residual.is_true() ? Verdict::kSatisfied : Verdict::kFalsified;
      r.step = i;
      return r;
    }
  }
  return r;
}

namespace detail {

inline void collect_positive(const Formula& f, bool positive, PropSet& out) {
  switch (f.op()) {
    case Op::kTrue:
    case Op::kFalse:
      return;
    case Op::kProp:
      if (positive) out.insert(f.proposition());
      return;
    case Op::kNot:
      collect_positive(f.left(), !positive, out);
      return;
    default:
      collect_positive(f.left(), positive, out);
      if (arity(f.op()) == 2) collect_positive(f.right(), positive, out);
  }
}

inline void collect_all(const Formula& f, PropSet& out) {
  if (f.op() == Op::kProp) {
    out.insert(f.proposition());
    return;
  }
  if (arity(f.op()) >= 1) collect_all(f.left(), out);
  if (arity(f.op()) == 2) collect_all(f.right(), out);
}

}  // namespace detail

/// Propositions that occur under an even number of negations.
inline PropSet goal_propositions(const Formula& f) {
  PropSet out;
  detail::collect_positive(f, true, out);
  return out;
}

inline PropSet propositions(const Formula& f) {
  PropSet out;
  detail::collect_all(f, out);
  return out;
}

/// Members of `candidates` whose occurrence, on top of `context`, changes the
/// progressed formula compared to observing `context` alone.
inline PropSet progressing_propositions(const Formula& f, PropSet candidates, LabelSet context,
                                        const ProgressionOptions& opt = {}) {
  Formula simplified = simplify(f);
  Formula baseline = detail::prog(context, simplified, opt);
  PropSet out;
  for (auto p : candidates.members()) {
    LabelSet with = context;
    with.insert(p);
    if (!(detail::prog(with, simplified, opt) == baseline)) out.insert(p);
  }
  return out;
}

/// Syntactic co-safe fragment: negation only on propositions, and only
/// &, |, X, F, U above them.
inline bool is_cosafe(const Formula& f) {
  switch (f.op()) {
    case Op::kTrue:
    case Op::kFalse:
    case Op::kProp:
      return true;
    case Op::kNot:
      return f.left().op() == Op::kProp;
    case Op::kAnd:
    case Op::kOr:
    case Op::kUntil:
      return is_cosafe(f.left()) && is_cosafe(f.right());
    case Op::kNext:
    case Op::kEventually:
      return is_cosafe(f.left());
    default:
      return false;
  }
}

}  // namespace ltlmarl::ltl
