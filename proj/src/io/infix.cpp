#include "sosrelax/io/infix.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <vector>

namespace sosrelax::io {

namespace {

// Expression tree; leaves hold numbers or variable indices. Built first so
// the variable count is known before any Polynomial is created.
struct Node {
  enum class Op { kNum, kVar, kAdd, kSub, kMul, kPow, kNeg } op;
  double num = 0.0;
  int var = 0;
  int exponent = 0;
  std::vector<Node> kids;
};

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  Node parse() {
    Node n = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected character '" + std::string(1, s_[pos_]) + "'");
    return n;
  }
  int max_var() const { return max_var_; }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    const int col = static_cast<int>(std::min(pos_, s_.size())) + 1;
    throw ParseError("column " + std::to_string(col) + ": " + msg, 1, col);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Node expr() {
    Node lhs = term();
    for (;;) {
      if (eat('+')) {
        lhs = Node{Node::Op::kAdd, 0, 0, 0, {lhs, term()}};
      } else if (eat('-')) {
        lhs = Node{Node::Op::kSub, 0, 0, 0, {lhs, term()}};
      } else {
        return lhs;
      }
    }
  }

  Node term() {
    Node lhs = unary();
    while (eat('*')) lhs = Node{Node::Op::kMul, 0, 0, 0, {lhs, unary()}};
    return lhs;
  }

  Node unary() {
    if (eat('-')) return Node{Node::Op::kNeg, 0, 0, 0, {unary()}};
    if (eat('+')) return unary();
    return power();
  }

  Node power() {
    Node base = atom();
    if (eat('^')) {
      skip();
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) error("expected a nonnegative integer exponent");
      const int e = std::atoi(s_.substr(start, pos_ - start).c_str());
      if (e > kMaxDegree) error("exponent exceeds the degree cap");
      return Node{Node::Op::kPow, 0, 0, e, {base}};
    }
    return base;
  }

  Node atom() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Node inner = expr();
      if (!eat(')')) error("expected ')'");
      return inner;
    }
    if (c == 'x') {
      ++pos_;
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) error("expected a variable index after 'x'");
      const int k = std::atoi(s_.substr(start, pos_ - start).c_str());
      if (k < 1 || k > kMaxVariables) {
        pos_ = start;
        error("variable index must lie in 1..8");
      }
      max_var_ = std::max(max_var_, k);
      return Node{Node::Op::kVar, 0, k - 1, 0, {}};
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
      const std::string lit = s_.substr(start, pos_ - start);
      char* end = nullptr;
      const double v = std::strtod(lit.c_str(), &end);
      if (end != lit.c_str() + lit.size()) {
        pos_ = start;
        error("malformed number '" + lit + "'");
      }
      return Node{Node::Op::kNum, v, 0, 0, {}};
    }
    error("unexpected character '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  int max_var_ = 0;
};

Polynomial build(const Node& node, int n) {
  switch (node.op) {
    case Node::Op::kNum: return Polynomial::constant(n, node.num);
    case Node::Op::kVar: return Polynomial::variable(n, node.var);
    case Node::Op::kAdd: return build(node.kids[0], n) + build(node.kids[1], n);
    case Node::Op::kSub: return build(node.kids[0], n) - build(node.kids[1], n);
    case Node::Op::kMul: return build(node.kids[0], n) * build(node.kids[1], n);
    case Node::Op::kNeg: return -build(node.kids[0], n);
    case Node::Op::kPow: {
      const Polynomial base = build(node.kids[0], n);
      Polynomial out = Polynomial::constant(n, 1.0);
      for (int i = 0; i < node.exponent; ++i) out = out * base;
      return out;
    }
  }
  return Polynomial(n);
}

}  // namespace

Polynomial parse_infix(const std::string& text, int n) {
  Parser p(text);
  const Node root = p.parse();
  const int vars = std::max({1, n, p.max_var()});
  try {
    return build(root, vars);
  } catch (const SizeLimitError& e) {
    throw ParseError(std::string("polynomial too large: ") + e.what(), 1, 0);
  }
}

}  // namespace sosrelax::io
