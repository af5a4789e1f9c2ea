#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ltlmarl::ltl {

/// Interned atomic proposition. Names are registered once per process and
/// compared by id afterwards. At most 64 names may be registered so that a
/// set of propositions fits in a machine word.
class Proposition {
 public:
  static constexpr std::size_t kMaxPropositions = 64;

  static bool valid_name(std::string_view name) {
    if (name.empty()) return false;
    auto head = name.front();
    if (!(head == '_' || (head >= 'a' && head <= 'z'))) return false;
    for (char c : name) {
      if (!(c == '_' || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) return false;
    }
    return true;
  }

  /// Returns the proposition named `name`, registering it on first use.
  static Proposition intern(std::string_view name) {
    if (!valid_name(name)) {
      throw std::invalid_argument("invalid proposition name '" + std::string(name) + "'");
    }
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    auto it = reg.ids.find(std::string(name));
    if (it != reg.ids.end()) return Proposition(it->second);
    if (reg.names.size() >= kMaxPropositions) {
      throw std::length_error("proposition registry is full (64 names)");
    }
    auto id = static_cast<std::uint32_t>(reg.names.size());
    reg.names.emplace_back(name);
    reg.ids.emplace(std::string(name), id);
    return Proposition(id);
  }

  static Proposition from_id(std::uint32_t id) {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    if (id >= reg.names.size()) throw std::out_of_range("unknown proposition id");
    return Proposition(id);
  }

  std::uint32_t id() const noexcept { return id_; }

  const std::string& name() const {
    auto& reg = registry();
    std::lock_guard lock(reg.mutex);
    return reg.names[id_];
  }

  friend bool operator==(Proposition a, Proposition b) noexcept { return a.id_ == b.id_; }
  friend auto operator<=>(Proposition a, Proposition b) noexcept { return a.id_ <=> b.id_; }

 private:
  explicit Proposition(std::uint32_t id) : id_(id) {}

  struct Registry {
    std::mutex mutex;
    std::vector<std::string> names;  // reserved up front, so references stay valid
    std::unordered_map<std::string, std::uint32_t> ids;
    Registry() { names.reserve(kMaxPropositions); }
  };

  static Registry& registry() {
    static Registry reg;
    return reg;
  }

  std::uint32_t id_;
};

/// Finite set of propositions, stored as a bitmask over proposition ids.
/// Used both for the truth assignment emitted at one step and for goal sets.
class PropSet {
 public:
  PropSet() = default;
  PropSet(std::initializer_list<Proposition> props) {
    for (auto p : props) insert(p);
  }

  static PropSet from_bits(std::uint64_t bits) {
    PropSet s;
    s.bits_ = bits;
    return s;
  }

  void insert(Proposition p) noexcept { bits_ |= bit(p); }
  void erase(Proposition p) noexcept { bits_ &= ~bit(p); }
  bool contains(Proposition p) const noexcept { return (bits_ & bit(p)) != 0; }
  bool empty() const noexcept { return bits_ == 0; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(std::popcount(bits_)); }
  std::uint64_t bits() const noexcept { return bits_; }

  PropSet operator|(PropSet o) const noexcept { return from_bits(bits_ | o.bits_); }
  PropSet operator&(PropSet o) const noexcept { return from_bits(bits_ & o.bits_); }
  PropSet& operator|=(PropSet o) noexcept {
    bits_ |= o.bits_;
    return *this;
  }
  bool is_subset_of(PropSet o) const noexcept { return (bits_ & ~o.bits_) == 0; }

  /// Members in id order.
  std::vector<Proposition> members() const {
    std::vector<Proposition> out;
    for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
      out.push_back(Proposition::from_id(static_cast<std::uint32_t>(std::countr_zero(b))));
    }
    return out;
  }

  /// "{a, b}" with members sorted by name.
  std::string to_string() const {
    std::vector<std::string> names;
    for (auto p : members()) names.push_back(p.name());
    std::sort(names.begin(), names.end());
    std::string out = "{";
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (i) out += ", ";
      out += names[i];
    }
    return out + "}";
  }

  friend bool operator==(PropSet a, PropSet b) noexcept { return a.bits_ == b.bits_; }

 private:
  static std::uint64_t bit(Proposition p) noexcept { return std::uint64_t{1} << p.id(); }
  std::uint64_t bits_ = 0;
};

using LabelSet = PropSet;

/// Parses "a,b,c", "{a, b}", "{}" or "" into a label set.
inline LabelSet parse_label_set(std::string_view text) {
  LabelSet out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.insert(Proposition::intern(cur));
    cur.clear();
  };
  for (char c : text) {
    if (c == '{' || c == '}' || c == ' ' || c == '\t') {
      flush();
    } else if (c == ',') {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return out;
}

enum class Op : std::uint8_t {
  kTrue,
  kFalse,
  kProp,
  kNot,
  kAnd,
  kOr,
  kNext,
  kAlways,
  kEventually,
  kUntil,
  kRelease,
};

inline int arity(Op op) noexcept {
  switch (op) {
    case Op::kTrue:
    case Op::kFalse:
    case Op::kProp:
      return 0;
    case Op::kNot:
    case Op::kNext:
    case Op::kAlways:
    case Op::kEventually:
      return 1;
    default:
      return 2;
  }
}

/// Immutable LTL formula tree. Copies share structure; equality is structural.
/// Constructors do not simplify: `Formula::conj(Formula::tt(), p)` is a
/// two-node conjunction. Use `simplify` (simplify.hpp) for normalisation.
class Formula {
 public:
  Formula() : Formula(tt()) {}

  static Formula tt() {
    static const Formula f(make(Op::kTrue, 0, nullptr, nullptr));
    return f;
  }
  static Formula ff() {
    static const Formula f(make(Op::kFalse, 0, nullptr, nullptr));
    return f;
  }
  static Formula prop(Proposition p) { return Formula(make(Op::kProp, p.id(), nullptr, nullptr)); }
  static Formula prop(std::string_view name) { return prop(Proposition::intern(name)); }
  static Formula negation(Formula a) { return unary(Op::kNot, std::move(a)); }
  static Formula next(Formula a) { return unary(Op::kNext, std::move(a)); }
  static Formula always(Formula a) { return unary(Op::kAlways, std::move(a)); }
  static Formula eventually(Formula a) { return unary(Op::kEventually, std::move(a)); }
  static Formula conj(Formula a, Formula b) { return binary(Op::kAnd, std::move(a), std::move(b)); }
  static Formula disj(Formula a, Formula b) { return binary(Op::kOr, std::move(a), std::move(b)); }
  static Formula until(Formula a, Formula b) { return binary(Op::kUntil, std::move(a), std::move(b)); }
  static Formula release(Formula a, Formula b) {
    return binary(Op::kRelease, std::move(a), std::move(b));
  }
  /// a -> b, desugared to !a | b.
  static Formula implies(Formula a, Formula b) { return disj(negation(std::move(a)), std::move(b)); }

  /// Generic constructor used by rewriters. Arity must match `op`.
  static Formula make_node(Op op, Formula a, Formula b) {
    switch (arity(op)) {
      case 1:
        return unary(op, std::move(a));
      case 2:
        return binary(op, std::move(a), std::move(b));
      default:
        throw std::invalid_argument("make_node: use tt()/ff()/prop() for leaves");
    }
  }

  Op op() const noexcept { return node_->op; }
  bool is_true() const noexcept { return node_->op == Op::kTrue; }
  bool is_false() const noexcept { return node_->op == Op::kFalse; }
  bool is_constant() const noexcept { return is_true() || is_false(); }

  Proposition proposition() const {
    if (node_->op != Op::kProp) throw std::logic_error("not a proposition node");
    return Proposition::from_id(node_->prop);
  }
  std::uint32_t prop_id() const noexcept { return node_->prop; }

  /// First child (operand of unary operators, left operand of binary ones).
  Formula left() const {
    if (arity(node_->op) < 1) throw std::logic_error("leaf formula has no children");
    return Formula(node_->left);
  }
  Formula right() const {
    if (arity(node_->op) < 2) throw std::logic_error("formula has no right child");
    return Formula(node_->right);
  }

  std::size_t hash() const noexcept { return node_->hash; }
  /// Number of nodes in the tree (shared subtrees counted once per occurrence).
  std::size_t size() const noexcept { return node_->size; }
  /// Height of the tree; leaves have depth 0.
  int depth() const noexcept { return node_->depth; }

  bool same_node(const Formula& o) const noexcept { return node_ == o.node_; }

  friend bool operator==(const Formula& a, const Formula& b) { return equal(a.node_.get(), b.node_.get()); }

  /// Pretty-prints in the task-file surface syntax with minimal parentheses.
  /// `parse(f.to_string()) == f` for every formula.
  std::string to_string() const {
    std::string out;
    print(out, *this);
    return out;
  }

 private:
  struct Node {
    Op op;
    std::uint32_t prop;
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    std::size_t hash;
    std::size_t size;
    int depth;
  };

  static bool equal(const Node* x, const Node* y) {
    if (x == y) return true;
    if (x->hash != y->hash || x->op != y->op || x->size != y->size || x->prop != y->prop) {
      return false;
    }
    switch (arity(x->op)) {
      case 0:
        return true;
      case 1:
        return equal(x->left.get(), y->left.get());
      default:
        return equal(x->left.get(), y->left.get()) && equal(x->right.get(), y->right.get());
    }
  }

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::shared_ptr<const Node> make(Op op, std::uint32_t prop, const Formula* a,
                                          const Formula* b) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->prop = prop;
    std::size_t h = std::hash<std::uint32_t>{}(static_cast<std::uint32_t>(op) * 131u + prop);
    n->size = 1;
    n->depth = 0;
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
    if (a) {
      n->left = a->node_;
      mix(a->hash());
      n->size += a->size();
      n->depth = std::max(n->depth, a->depth() + 1);
    }
    if (b) {
      n->right = b->node_;
      mix(b->hash() * 31);
      n->size += b->size();
      n->depth = std::max(n->depth, b->depth() + 1);
    }
    n->hash = h;
    return n;
  }

  static Formula unary(Op op, Formula a) { return Formula(make(op, 0, &a, nullptr)); }
  static Formula binary(Op op, Formula a, Formula b) { return Formula(make(op, 0, &a, &b)); }

  // Binding strength for printing: | 1, & 2, U R 3, prefix operators 4, atoms 5.
  static int level(Op op) noexcept {
    switch (op) {
      case Op::kOr:
        return 1;
      case Op::kAnd:
        return 2;
      case Op::kUntil:
      case Op::kRelease:
        return 3;
      case Op::kNot:
      case Op::kNext:
      case Op::kAlways:
      case Op::kEventually:
        return 4;
      default:
        return 5;
    }
  }

  static void print_child(std::string& out, const Formula& f, int min_level) {
    if (level(f.op()) < min_level) {
      out += '(';
      print(out, f);
      out += ')';
    } else {
      print(out, f);
    }
  }

  static void print(std::string& out, const Formula& f) {
    switch (f.op()) {
      case Op::kTrue:
        out += "true";
        return;
      case Op::kFalse:
        out += "false";
        return;
      case Op::kProp:
        out += f.proposition().name();
        return;
      case Op::kNot:
      case Op::kNext:
      case Op::kAlways:
      case Op::kEventually: {
        static constexpr const char* kSym[] = {"!", "X ", "G ", "F "};
        int idx = f.op() == Op::kNot ? 0 : f.op() == Op::kNext ? 1 : f.op() == Op::kAlways ? 2 : 3;
        out += kSym[idx];
        print_child(out, f.left(), 4);
        return;
      }
      case Op::kAnd:
      case Op::kOr: {
        // left-associative: the right operand must bind strictly tighter
        int lv = level(f.op());
        print_child(out, f.left(), lv);
        out += f.op() == Op::kAnd ? " & " : " | ";
        print_child(out, f.right(), lv + 1);
        return;
      }
      case Op::kUntil:
      case Op::kRelease: {
        // right-associative
        print_child(out, f.left(), 4);
        out += f.op() == Op::kUntil ? " U " : " R ";
        print_child(out, f.right(), 3);
        return;
      }
    }
  }

  std::shared_ptr<const Node> node_;
};

struct FormulaHash {
  std::size_t operator()(const Formula& f) const noexcept { return f.hash(); }
};

}  // namespace ltlmarl::ltl
