#pragma once

// Surface syntax, loosest to tightest binding:
//
//   formula := or ( '->' formula )?              right-associative implication
//   or      := and ( '|' and )*
//   and     := binop ( '&' binop )*
//   binop   := unary ( ('U' | 'R') binop )?       right-associative
//   unary   := ('!' | 'X' | 'F' | 'G') unary | atom
//   atom    := 'true' | 'false' | ident | '(' formula ')'
//   ident   := [a-z_][a-z0-9_]*
//
// Implication is desugared while parsing: `a -> b` becomes `!a | b`.

#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ltlmarl/error.hpp"
#include "ltlmarl/ltl/formula.hpp"

namespace ltlmarl::ltl {

namespace detail {

enum class Tok { kEnd, kIdent, kTrue, kFalse, kNot, kAnd, kOr, kImplies, kNext, kAlways,
                 kEventually, kUntil, kRelease, kLParen, kRParen };

inline const char* tok_name(Tok t) {
  switch (t) {
    case Tok::kEnd: return "end of input";
    case Tok::kIdent: return "identifier";
    case Tok::kTrue: return "'true'";
    case Tok::kFalse: return "'false'";
    case Tok::kNot: return "'!'";
    case Tok::kAnd: return "'&'";
    case Tok::kOr: return "'|'";
    case Tok::kImplies: return "'->'";
    case Tok::kNext: return "'X'";
    case Tok::kAlways: return "'G'";
    case Tok::kEventually: return "'F'";
    case Tok::kUntil: return "'U'";
    case Tok::kRelease: return "'R'";
    case Tok::kLParen: return "'('";
    case Tok::kRParen: return "')'";
  }
  return "?";
}

struct Token {
  Tok kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  Lexer(std::string_view text, int line, int column) : text_(text), line_(line), col_(column) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      int line = line_, col = col_;
      if (pos_ >= text_.size()) {
        out.push_back({Tok::kEnd, "", line, col});
        return out;
      }
      char c = text_[pos_];
      auto single = [&](Tok t) {
        advance();
        out.push_back({t, std::string(1, c), line, col});
      };
      switch (c) {
        case '!': single(Tok::kNot); continue;
        case '&': single(Tok::kAnd); continue;
        case '|': single(Tok::kOr); continue;
        case '(': single(Tok::kLParen); continue;
        case ')': single(Tok::kRParen); continue;
        case '-':
          if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
            advance();
            advance();
            out.push_back({Tok::kImplies, "->", line, col});
            continue;
          }
          throw ParseError("unexpected character '-'", line, col, {"'->'"});
        default:
          break;
      }
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
          word.push_back(text_[pos_]);
          advance();
        }
        out.push_back({classify(word, line, col), word, line, col});
        continue;
      }
      throw ParseError(std::string("unexpected character '") + c + "'", line, col, {});
    }
  }

 private:
  static Tok classify(const std::string& w, int line, int col) {
    if (w == "X") return Tok::kNext;
    if (w == "F") return Tok::kEventually;
    if (w == "G") return Tok::kAlways;
    if (w == "U") return Tok::kUntil;
    if (w == "R") return Tok::kRelease;
    if (w == "true") return Tok::kTrue;
    if (w == "false") return Tok::kFalse;
    if (!Proposition::valid_name(w)) {
      throw ParseError("invalid identifier '" + w + "' (must match [a-z_][a-z0-9_]*)", line, col,
                       {});
    }
    return Tok::kIdent;
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_;
  int col_;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Formula parse_all() {
    Formula f = formula();
    if (peek().kind != Tok::kEnd) fail({Tok::kEnd, Tok::kAnd, Tok::kOr, Tok::kImplies,
                                        Tok::kUntil, Tok::kRelease});
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(std::initializer_list<Tok> expected) const {
    const Token& t = peek();
    std::vector<std::string> names;
    for (Tok e : expected) names.emplace_back(tok_name(e));
    std::string what = t.kind == Tok::kEnd ? "unexpected end of input"
                                           : "unexpected token '" + t.text + "'";
    throw ParseError(what, t.line, t.column, std::move(names));
  }

  Formula formula() {
    Formula lhs = disjunction();
    if (peek().kind == Tok::kImplies) {
      take();
      return Formula::implies(std::move(lhs), formula());
    }
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    while (peek().kind == Tok::kOr) {
      take();
      lhs = Formula::disj(std::move(lhs), conjunction());
    }
    return lhs;
  }

  Formula conjunction() {
    Formula lhs = temporal_binary();
    while (peek().kind == Tok::kAnd) {
      take();
      lhs = Formula::conj(std::move(lhs), temporal_binary());
    }
    return lhs;
  }

  Formula temporal_binary() {
    Formula lhs = unary();
    if (peek().kind == Tok::kUntil) {
      take();
      return Formula::until(std::move(lhs), temporal_binary());
    }
    if (peek().kind == Tok::kRelease) {
      take();
      return Formula::release(std::move(lhs), temporal_binary());
    }
    return lhs;
  }

  Formula unary() {
    switch (peek().kind) {
      case Tok::kNot: take(); return Formula::negation(unary());
      case Tok::kNext: take(); return Formula::next(unary());
      case Tok::kEventually: take(); return Formula::eventually(unary());
      case Tok::kAlways: take(); return Formula::always(unary());
      default: return atom();
    }
  }

  Formula atom() {
    switch (peek().kind) {
      case Tok::kTrue: take(); return Formula::tt();
      case Tok::kFalse: take(); return Formula::ff();
      case Tok::kIdent: return Formula::prop(take().text);
      case Tok::kLParen: {
        take();
        Formula inner = formula();
        if (peek().kind != Tok::kRParen) {
          fail({Tok::kRParen, Tok::kAnd, Tok::kOr, Tok::kImplies, Tok::kUntil, Tok::kRelease});
        }
        take();
        return inner;
      }
      default:
        fail({Tok::kLParen, Tok::kNot, Tok::kNext, Tok::kEventually, Tok::kAlways, Tok::kTrue,
              Tok::kFalse, Tok::kIdent});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses one formula. `line`/`column` give the position of `text[0]` for
/// error reporting when the formula is embedded in a larger file.
inline Formula parse(std::string_view text, int line = 1, int column = 1) {
  detail::Lexer lexer(text, line, column);
  detail::Parser parser(lexer.run());
  return parser.parse_all();
}

struct NamedTask {
  std::string name;
  Formula formula;
};

/// Reads the task-file format: `task <name>: <formula>` stanzas in order,
/// `#` starts a comment, a formula may continue over following lines until
/// the next `task` keyword.
inline std::vector<NamedTask> parse_task_file(std::string_view text) {
  struct Stanza {
    std::string name;
    std::string body;
    int line;
    int column;
  };
  std::vector<Stanza> stanzas;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string line(text.substr(pos, eol - pos));
    pos = eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (!line.empty() && line.back() == '\r') line.pop_back();

    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    bool is_header = line.compare(first, 4, "task") == 0 &&
                     (first + 4 == line.size() || line[first + 4] == ' ' || line[first + 4] == '\t');
    if (is_header) {
      std::size_t colon = line.find(':', first + 4);
      if (colon == std::string::npos) {
        throw ParseError("task stanza without ':'", line_no, static_cast<int>(line.size()) + 1,
                         {"':'"});
      }
      std::string name = line.substr(first + 4, colon - first - 4);
      auto b = name.find_first_not_of(" \t");
      auto e = name.find_last_not_of(" \t");
      name = b == std::string::npos ? "" : name.substr(b, e - b + 1);
      if (!Proposition::valid_name(name)) {
        throw ParseError("invalid task name '" + name + "'", line_no, static_cast<int>(first) + 5,
                         {"identifier"});
      }
      for (const auto& s : stanzas) {
        if (s.name == name) {
          throw ParseError("duplicate task name '" + name + "'", line_no,
                           static_cast<int>(first) + 5, {});
        }
      }
      stanzas.push_back({name, line.substr(colon + 1), line_no, static_cast<int>(colon) + 2});
    } else {
      if (stanzas.empty()) {
        throw ParseError("text outside a task stanza", line_no, static_cast<int>(first) + 1,
                         {"'task'"});
      }
      // Continuation line; the lexer restarts at column 1 after the newline.
      stanzas.back().body += "\n" + line;
    }
    if (eol == text.size()) break;
  }
  std::vector<NamedTask> out;
  out.reserve(stanzas.size());
  for (auto& s : stanzas) out.push_back({s.name, parse(s.body, s.line, s.column)});
  return out;
}

inline std::string format_task_file(const std::vector<NamedTask>& tasks) {
  std::string out;
  for (const auto& t : tasks) out += "task " + t.name + ": " + t.formula.to_string() + "\n";
  return out;
}

}  // namespace ltlmarl::ltl
