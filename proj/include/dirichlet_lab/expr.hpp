#pragma once

// Function DSL: abstract syntax tree, recursive-descent parser, printer and
// evaluator for real-valued functions of one variable t.
//
// Grammar (whitespace is insignificant):
//
//   input    := sum EOF
//   sum      := term (('+' | '-') term)*
//   term     := signed (('*' | '/') signed)*       '/' needs a t-free divisor
//   signed   := '-' signed | power
//   power    := primary ('^' NATURAL)?
//   primary  := NUMBER | 't' | 'pi' | 'e' | '(' sum ')'
//             | ('sin' | 'cos' | 'exp' | 'abs') '(' sum ')'
//             | 'piecewise' '(' branch (';' branch)* (';' 'else' ':' sum)? ')'
//             | 'bump' '(' interval ')'
//   branch   := interval ':' sum
//   interval := '[' sum ',' sum ']'                 endpoints must be t-free

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dirichlet_lab {

class ParseError : public std::runtime_error {
public:
  ParseError(std::string message, std::size_t offset, std::vector<std::string> expected)
      : std::runtime_error(build(message, offset, expected)),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  static std::string build(const std::string& message, std::size_t offset,
                           const std::vector<std::string>& expected) {
    std::string out = "parse error at byte " + std::to_string(offset) + ": " + message;
    if (!expected.empty()) {
      out += " (expected one of:";
      for (const auto& e : expected) out += " '" + e + "'";
      out += ")";
    }
    return out;
  }

  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownIdentifierError : public ParseError {
public:
  UnknownIdentifierError(const std::string& name, std::size_t offset)
      : ParseError("unknown identifier '" + name + "'", offset, {}), name_(name) {}
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

class EvaluationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class NodeKind {
  constant,
  variable,
  add,
  sub,
  mul,
  neg,
  scale,  // child / divisor, divisor a nonzero constant
  power,  // child ^ exponent, exponent a natural number
  sin,
  cos,
  exp,
  abs,
  piecewise,
  bump,
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double t) const noexcept { return lo <= t && t < hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct Branch {
  Interval interval;
  int child = -1;
};

struct Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;  // constant value, or divisor for scale
  unsigned exponent = 0;
  std::array<int, 2> kids{-1, -1};  // piecewise: kids[0] is the else branch
  std::vector<Branch> branches;
  Interval interval;  // bump support
};

/// Immutable expression tree stored as a node array; children precede parents.
class ExprAst {
public:
  ExprAst() = default;
  ExprAst(std::vector<Node> nodes, int root) : nodes_(std::move(nodes)), root_(root) {}

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  int root() const noexcept { return root_; }
  const Node& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  const Node& root_node() const { return node(root_); }
  bool empty() const noexcept { return nodes_.empty(); }

  double eval(double t) const {
    if (nodes_.empty()) throw EvaluationError("evaluation of an empty expression");
    const double v = eval_node(root_, t);
    if (!std::isfinite(v)) {
      throw EvaluationError("expression is not finite at t = " + std::to_string(t));
    }
    return v;
  }

  /// True when the subtree does not reference t.
  bool is_constant(int id) const {
    const Node& n = node(id);
    switch (n.kind) {
      case NodeKind::constant:
        return true;
      case NodeKind::variable:
      case NodeKind::piecewise:
      case NodeKind::bump:
        return false;
      default:
        for (int k : n.kids) {
          if (k >= 0 && !is_constant(k)) return false;
        }
        return true;
    }
  }

  double eval_node(int id, double t) const {
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    switch (n.kind) {
      case NodeKind::constant:
        return n.value;
      case NodeKind::variable:
        return t;
      case NodeKind::add:
        return eval_node(n.kids[0], t) + eval_node(n.kids[1], t);
      case NodeKind::sub:
        return eval_node(n.kids[0], t) - eval_node(n.kids[1], t);
      case NodeKind::mul:
        return eval_node(n.kids[0], t) * eval_node(n.kids[1], t);
      case NodeKind::neg:
        return -eval_node(n.kids[0], t);
      case NodeKind::scale:
        return eval_node(n.kids[0], t) / n.value;
      case NodeKind::power: {
        const double base = eval_node(n.kids[0], t);
        double acc = 1.0;
        for (unsigned i = 0; i < n.exponent; ++i) acc *= base;
        return acc;
      }
      case NodeKind::sin:
        return std::sin(eval_node(n.kids[0], t));
      case NodeKind::cos:
        return std::cos(eval_node(n.kids[0], t));
      case NodeKind::exp:
        return std::exp(eval_node(n.kids[0], t));
      case NodeKind::abs:
        return std::abs(eval_node(n.kids[0], t));
      case NodeKind::piecewise:
        for (const Branch& b : n.branches) {
          if (b.interval.contains(t)) return eval_node(b.child, t);
        }
        return eval_node(n.kids[0], t);
      case NodeKind::bump: {
        if (!(n.interval.lo < t && t < n.interval.hi)) return 0.0;
        const double u = (2.0 * t - n.interval.lo - n.interval.hi) / (n.interval.hi - n.interval.lo);
        const double gap = 1.0 - u * u;
        if (gap <= 0.0) return 0.0;
        return std::exp(1.0 - 1.0 / gap);
      }
    }
    throw EvaluationError("malformed expression node");
  }

private:
  std::vector<Node> nodes_;
  int root_ = -1;
};

namespace detail {

inline std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  ExprAst run() {
    skip_ws();
    if (pos_ >= src_.size()) fail("empty expression", {"expression"});
    const int root = parse_sum();
    skip_ws();
    if (pos_ < src_.size()) fail("unexpected trailing input", {"+", "-", "*", "/", "^", "end of input"});
    return ExprAst(std::move(nodes_), root);
  }

private:
  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) const {
    throw ParseError(msg, pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r')) {
      ++pos_;
    }
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, std::vector<std::string> expected) {
    if (!accept(c)) fail(std::string("expected '") + c + "'", std::move(expected));
  }

  int push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<int>(nodes_.size()) - 1;
  }

  int push_op(NodeKind kind, int a, int b = -1) {
    Node n;
    n.kind = kind;
    n.kids = {a, b};
    return push(std::move(n));
  }

  double constant_value(int id, std::size_t at) {
    ExprAst view(nodes_, id);
    if (!view.is_constant(id)) {
      pos_ = at;
      fail("expression must not depend on t here", {"constant expression"});
    }
    const double v = view.eval_node(id, 0.0);
    if (!std::isfinite(v)) {
      pos_ = at;
      fail("constant expression is not finite", {"finite constant"});
    }
    return v;
  }

  int parse_sum() {
    int lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        lhs = push_op(NodeKind::add, lhs, parse_term());
      } else if (accept('-')) {
        lhs = push_op(NodeKind::sub, lhs, parse_term());
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_signed();
    for (;;) {
      if (accept('*')) {
        lhs = push_op(NodeKind::mul, lhs, parse_signed());
      } else if (accept('/')) {
        skip_ws();
        const std::size_t at = pos_;
        const int rhs = parse_signed();
        const double divisor = constant_value(rhs, at);
        if (divisor == 0.0) {
          pos_ = at;
          fail("division by zero", {"nonzero constant"});
        }
        // The folded divisor replaces the subtree; the orphaned nodes are harmless.
        Node n;
        n.kind = NodeKind::scale;
        n.value = divisor;
        n.kids = {lhs, -1};
        lhs = push(std::move(n));
      } else {
        return lhs;
      }
    }
  }

  int parse_signed() {
    if (accept('-')) return push_op(NodeKind::neg, parse_signed());
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_;
    if (start == pos_) fail("exponent must be a natural number", {"natural number"});
    unsigned exponent = 0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, exponent);
    if (ec != std::errc() || ptr != src_.data() + pos_ || exponent > 64) {
      pos_ = start;
      fail("exponent out of range (0..64)", {"natural number"});
    }
    Node n;
    n.kind = NodeKind::power;
    n.exponent = exponent;
    n.kids = {base, -1};
    const int id = push(std::move(n));
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '^') fail("chained powers need parentheses", {"+", "-", "*", "/", ")"});
    return id;
  }

  static bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
  static bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

  int parse_number() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && src_[end] >= '0' && src_[end] <= '9') ++end;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && src_[end] >= '0' && src_[end] <= '9') ++end;
    }
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t exp_end = end + 1;
      if (exp_end < src_.size() && (src_[exp_end] == '+' || src_[exp_end] == '-')) ++exp_end;
      const std::size_t digits = exp_end;
      while (exp_end < src_.size() && src_[exp_end] >= '0' && src_[exp_end] <= '9') ++exp_end;
      if (exp_end > digits) end = exp_end;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + end, v);
    if (ec != std::errc() || ptr == src_.data() + start || !std::isfinite(v)) {
      fail("malformed or out-of-range number", {"number"});
    }
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    Node n;
    n.kind = NodeKind::constant;
    n.value = v;
    return push(std::move(n));
  }

  Interval parse_interval() {
    expect('[', {"["});
    skip_ws();
    std::size_t at = pos_;
    const double lo = constant_value(parse_sum(), at);
    expect(',', {",", "+", "-", "*", "/"});
    skip_ws();
    at = pos_;
    const double hi = constant_value(parse_sum(), at);
    expect(']', {"]", "+", "-", "*", "/"});
    if (!(lo < hi)) {
      pos_ = at;
      fail("interval endpoints must be strictly increasing", {"upper endpoint > lower endpoint"});
    }
    return {lo, hi};
  }

  int parse_piecewise() {
    expect('(', {"("});
    Node n;
    n.kind = NodeKind::piecewise;
    int fallback = -1;
    for (;;) {
      skip_ws();
      const std::size_t at = pos_;
      if (src_.substr(pos_, 4) == "else" && (pos_ + 4 >= src_.size() || !ident_char(src_[pos_ + 4]))) {
        if (n.branches.empty()) fail("piecewise needs at least one interval branch", {"["});
        pos_ += 4;
        expect(':', {":"});
        fallback = parse_sum();
        break;
      }
      const Interval iv = parse_interval();
      if (!n.branches.empty() && iv.lo < n.branches.back().interval.hi) {
        pos_ = at;
        fail("piecewise intervals must be ordered and non-overlapping", {"["});
      }
      expect(':', {":"});
      n.branches.push_back({iv, parse_sum()});
      if (!accept(';')) break;
    }
    expect(')', {")", ";"});
    if (fallback < 0) {
      Node zero;
      zero.kind = NodeKind::constant;
      fallback = push(std::move(zero));
    }
    n.kids = {fallback, -1};
    return push(std::move(n));
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input", {"number", "t", "function", "(", "-"});
    const char c = src_[pos_];
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      const int inner = parse_sum();
      expect(')', {")", "+", "-", "*", "/", "^"});
      return inner;
    }
    if (!ident_start(c)) fail("unexpected character", {"number", "t", "function", "(", "-"});

    const std::size_t start = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name == "t") return push_op(NodeKind::variable, -1);
    if (name == "pi" || name == "e") {
      Node n;
      n.kind = NodeKind::constant;
      n.value = name == "pi" ? std::numbers::pi : std::numbers::e;
      return push(std::move(n));
    }
    NodeKind fn{};
    if (name == "sin") {
      fn = NodeKind::sin;
    } else if (name == "cos") {
      fn = NodeKind::cos;
    } else if (name == "exp") {
      fn = NodeKind::exp;
    } else if (name == "abs") {
      fn = NodeKind::abs;
    } else if (name == "piecewise") {
      return parse_piecewise();
    } else if (name == "bump") {
      expect('(', {"("});
      Node n;
      n.kind = NodeKind::bump;
      n.interval = parse_interval();
      expect(')', {")"});
      return push(std::move(n));
    } else {
      throw UnknownIdentifierError(std::string(name), start);
    }
    expect('(', {"("});
    const int arg = parse_sum();
    expect(')', {")", "+", "-", "*", "/", "^"});
    return push_op(fn, arg);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Node> nodes_;
};

inline void print_node(const ExprAst& ast, int id, std::string& out) {
  const Node& n = ast.node(id);
  auto binary = [&](const char* op) {
    out += '(';
    print_node(ast, n.kids[0], out);
    out += op;
    print_node(ast, n.kids[1], out);
    out += ')';
  };
  auto call = [&](const char* name) {
    out += name;
    out += '(';
    print_node(ast, n.kids[0], out);
    out += ')';
  };
  auto interval = [&](const Interval& iv) {
    out += '[' + format_number(iv.lo) + ", " + format_number(iv.hi) + ']';
  };
  switch (n.kind) {
    case NodeKind::constant:
      // Literals are never negative after parsing.
      if (std::signbit(n.value)) {
        out += "(-" + format_number(-n.value) + ')';
      } else {
        out += format_number(n.value);
      }
      return;
    case NodeKind::variable:
      out += 't';
      return;
    case NodeKind::add:
      return binary(" + ");
    case NodeKind::sub:
      return binary(" - ");
    case NodeKind::mul:
      return binary(" * ");
    case NodeKind::neg:
      out += "(-";
      print_node(ast, n.kids[0], out);
      out += ')';
      return;
    case NodeKind::scale:
      out += '(';
      print_node(ast, n.kids[0], out);
      out += " / " + format_number(n.value) + ')';
      return;
    case NodeKind::power:
      out += '(';
      print_node(ast, n.kids[0], out);
      out += '^' + std::to_string(n.exponent) + ')';
      return;
    case NodeKind::sin:
      return call("sin");
    case NodeKind::cos:
      return call("cos");
    case NodeKind::exp:
      return call("exp");
    case NodeKind::abs:
      return call("abs");
    case NodeKind::piecewise:
      out += "piecewise(";
      for (const Branch& b : n.branches) {
        interval(b.interval);
        out += ": ";
        print_node(ast, b.child, out);
        out += "; ";
      }
      out += "else: ";
      print_node(ast, n.kids[0], out);
      out += ')';
      return;
    case NodeKind::bump:
      out += "bump(";
      interval(n.interval);
      out += ')';
      return;
  }
}

inline bool equal_nodes(const ExprAst& a, int ia, const ExprAst& b, int ib) {
  const Node& x = a.node(ia);
  const Node& y = b.node(ib);
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::constant:
      return x.value == y.value;
    case NodeKind::variable:
      return true;
    case NodeKind::scale:
      return x.value == y.value && equal_nodes(a, x.kids[0], b, y.kids[0]);
    case NodeKind::power:
      return x.exponent == y.exponent && equal_nodes(a, x.kids[0], b, y.kids[0]);
    case NodeKind::bump:
      return x.interval == y.interval;
    case NodeKind::piecewise:
      if (x.branches.size() != y.branches.size()) return false;
      for (std::size_t i = 0; i < x.branches.size(); ++i) {
        if (x.branches[i].interval != y.branches[i].interval) return false;
        if (!equal_nodes(a, x.branches[i].child, b, y.branches[i].child)) return false;
      }
      return equal_nodes(a, x.kids[0], b, y.kids[0]);
    default:
      for (std::size_t i = 0; i < 2; ++i) {
        if ((x.kids[i] < 0) != (y.kids[i] < 0)) return false;
        if (x.kids[i] >= 0 && !equal_nodes(a, x.kids[i], b, y.kids[i])) return false;
      }
      return true;
  }
}

inline void collect_breakpoints(const ExprAst& ast, int id, std::vector<double>& out) {
  const Node& n = ast.node(id);
  if (n.kind == NodeKind::bump) {
    out.push_back(n.interval.lo);
    out.push_back(n.interval.hi);
    return;
  }
  if (n.kind == NodeKind::piecewise) {
    for (const Branch& b : n.branches) {
      out.push_back(b.interval.lo);
      out.push_back(b.interval.hi);
      collect_breakpoints(ast, b.child, out);
    }
  }
  for (int k : n.kids) {
    if (k >= 0) collect_breakpoints(ast, k, out);
  }
}

// Slope of the subtree if it is affine in t.
inline bool affine_slope(const ExprAst& ast, int id, double& slope) {
  const Node& n = ast.node(id);
  double a = 0.0;
  double b = 0.0;
  switch (n.kind) {
    case NodeKind::constant:
      slope = 0.0;
      return true;
    case NodeKind::variable:
      slope = 1.0;
      return true;
    case NodeKind::add:
    case NodeKind::sub:
      if (!affine_slope(ast, n.kids[0], a) || !affine_slope(ast, n.kids[1], b)) return false;
      slope = n.kind == NodeKind::add ? a + b : a - b;
      return true;
    case NodeKind::neg:
      if (!affine_slope(ast, n.kids[0], a)) return false;
      slope = -a;
      return true;
    case NodeKind::scale:
      if (!affine_slope(ast, n.kids[0], a)) return false;
      slope = a / n.value;
      return true;
    case NodeKind::mul:
      if (ast.is_constant(n.kids[0]) && affine_slope(ast, n.kids[1], b)) {
        slope = ast.eval_node(n.kids[0], 0.0) * b;
        return true;
      }
      if (ast.is_constant(n.kids[1]) && affine_slope(ast, n.kids[0], a)) {
        slope = ast.eval_node(n.kids[1], 0.0) * a;
        return true;
      }
      return false;
    default:
      if (ast.is_constant(id)) {
        slope = 0.0;
        return true;
      }
      return false;
  }
}

inline double max_frequency(const ExprAst& ast, int id) {
  const Node& n = ast.node(id);
  double best = 0.0;
  if (n.kind == NodeKind::sin || n.kind == NodeKind::cos) {
    double slope = 0.0;
    if (affine_slope(ast, n.kids[0], slope)) best = std::abs(slope);
  }
  for (int k : n.kids) {
    if (k >= 0) best = std::max(best, max_frequency(ast, k));
  }
  for (const Branch& b : n.branches) best = std::max(best, max_frequency(ast, b.child));
  return best;
}

}  // namespace detail

inline ExprAst parse_function(std::string_view source) { return detail::Parser(source).run(); }

/// Canonical, fully parenthesized source text; parse(print(ast)) is structurally equal to ast.
inline std::string print(const ExprAst& ast) {
  std::string out;
  if (!ast.empty()) detail::print_node(ast, ast.root(), out);
  return out;
}

inline bool structurally_equal(const ExprAst& a, const ExprAst& b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  return detail::equal_nodes(a, a.root(), b, b.root());
}

/// Sorted, de-duplicated locations where the expression may be non-smooth.
inline std::vector<double> breakpoints(const ExprAst& ast) {
  std::vector<double> out;
  if (!ast.empty()) detail::collect_breakpoints(ast, ast.root(), out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// Ids of the argument subtrees of every abs node.
inline std::vector<int> abs_arguments(const ExprAst& ast) {
  std::vector<int> out;
  for (const Node& n : ast.nodes()) {
    if (n.kind == NodeKind::abs) out.push_back(n.kids[0]);
  }
  return out;
}

/// Largest angular frequency among sin/cos nodes with affine arguments.
inline double frequency_hint(const ExprAst& ast) {
  return ast.empty() ? 0.0 : detail::max_frequency(ast, ast.root());
}

}  // namespace dirichlet_lab
