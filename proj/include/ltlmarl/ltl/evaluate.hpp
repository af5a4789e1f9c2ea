#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ltlmarl/ltl/formula.hpp"

namespace ltlmarl::ltl {

/// A finite, non-empty sequence of truth assignments sigma_0 .. sigma_t.
using Trace = std::vector<LabelSet>;

/// Reading of the Always operator on finite traces.
enum class AlwaysRule {
  /// <sigma, i> |= G a  iff  a holds at every k in [i, t].
  kStandard,
  /// The literal clause "exists j in [0, t] such that a holds at all k > j".
  /// With j = t the clause is vacuous, so G a is true everywhere.
  kPaperLiteral,
};

namespace detail {

// Truth of `f` at every position of `trace`, computed bottom-up straight from
// the finite-trace satisfaction clauses.
inline std::vector<char> positions(const Trace& trace, const Formula& f, AlwaysRule always) {
  const std::size_t n = trace.size();
  const std::size_t t = n - 1;
  std::vector<char> out(n, 0);
  switch (f.op()) {
    case Op::kTrue:
      out.assign(n, 1);
      break;
    case Op::kFalse:
      break;
    case Op::kProp: {
      Proposition p = f.proposition();
      for (std::size_t i = 0; i < n; ++i) out[i] = trace[i].contains(p);
      break;
    }
    case Op::kNot: {
      auto a = positions(trace, f.left(), always);
      for (std::size_t i = 0; i < n; ++i) out[i] = !a[i];
      break;
    }
    case Op::kAnd:
    case Op::kOr: {
      auto a = positions(trace, f.left(), always);
      auto b = positions(trace, f.right(), always);
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = f.op() == Op::kAnd ? (a[i] && b[i]) : (a[i] || b[i]);
      }
      break;
    }
    case Op::kNext: {
      auto a = positions(trace, f.left(), always);
      for (std::size_t i = 0; i < n; ++i) out[i] = i < t && a[i + 1];
      break;
    }
    case Op::kAlways: {
      auto a = positions(trace, f.left(), always);
      for (std::size_t i = 0; i < n; ++i) {
        if (always == AlwaysRule::kStandard) {
          bool all = true;
          for (std::size_t k = i; k <= t; ++k) all = all && a[k];
          out[i] = all;
        } else {
          bool exists = false;
          for (std::size_t j = 0; j <= t && !exists; ++j) {
            bool all = true;
            for (std::size_t k = j + 1; k <= t; ++k) all = all && a[k];
            exists = all;
          }
          out[i] = exists;
        }
      }
      break;
    }
    case Op::kEventually: {
      auto a = positions(trace, f.left(), always);
      for (std::size_t i = 0; i < n; ++i) {
        bool any = false;
        for (std::size_t j = i; j <= t; ++j) any = any || a[j];
        out[i] = any;
      }
      break;
    }
    case Op::kUntil: {
      auto a = positions(trace, f.left(), always);
      auto b = positions(trace, f.right(), always);
      for (std::size_t i = 0; i < n; ++i) {
        bool holds = false;
        for (std::size_t j = i; j <= t && !holds; ++j) {
          if (!b[j]) continue;
          bool prefix = true;
          for (std::size_t k = i; k < j; ++k) prefix = prefix && a[k];
          holds = prefix;
        }
        out[i] = holds;
      }
      break;
    }
    case Op::kRelease: {
      auto a = positions(trace, f.left(), always);
      auto b = positions(trace, f.right(), always);
      for (std::size_t i = 0; i < n; ++i) {
        bool holds = false;
        for (std::size_t j = i; j <= t && !holds; ++j) {
          if (!a[j]) continue;
          bool upto = true;
          for (std::size_t k = i; k <= j; ++k) upto = upto && b[k];
          holds = upto;
        }
        if (!holds) {
          bool all = true;
          for (std::size_t k = i; k <= t; ++k) all = all && b[k];
          holds = all;
        }
        out[i] = holds;
      }
      break;
    }
  }
  return out;
}

}  // namespace detail

/// <trace, i> |= f under finite-trace semantics: Next needs i < t;
/// Eventually, Until and Release quantify over j in [i, t].
inline bool evaluate(const Trace& trace, std::size_t i, const Formula& f,
                     AlwaysRule always = AlwaysRule::kStandard) {
  if (trace.empty()) throw std::invalid_argument("evaluate: empty trace");
  if (i >= trace.size()) throw std::out_of_range("evaluate: index past end of trace");
  return detail::positions(trace, f, always)[i] != 0;
}

}  // namespace ltlmarl::ltl
