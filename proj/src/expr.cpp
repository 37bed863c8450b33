#include "plap/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace plap {

struct Expression::Node {
  enum class Kind { number, x, y, r, add, sub, mul, div, pow, neg, sin, cos, exp, abs, min, max };
  Kind kind = Kind::number;
  double value = 0.0;
  std::vector<std::shared_ptr<const Node>> args;

  double eval(double x, double y) const {
    const auto a = [&](std::size_t i) { return args[i]->eval(x, y); };
    switch (kind) {
      case Kind::number:
        return value;
      case Kind::x:
        return x;
      case Kind::y:
        return y;
      case Kind::r:
        return std::hypot(x, y);
      case Kind::add:
        return a(0) + a(1);
      case Kind::sub:
        return a(0) - a(1);
      case Kind::mul:
        return a(0) * a(1);
      case Kind::div:
        return a(0) / a(1);
      case Kind::pow:
        return std::pow(a(0), a(1));
      case Kind::neg:
        return -a(0);
      case Kind::sin:
        return std::sin(a(0));
      case Kind::cos:
        return std::cos(a(0));
      case Kind::exp:
        return std::exp(a(0));
      case Kind::abs:
        return std::abs(a(0));
      case Kind::min:
        return std::min(a(0), a(1));
      case Kind::max:
        return std::max(a(0), a(1));
    }
    return 0.0;
  }
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Kind kind, std::vector<NodePtr> args = {}, double value = 0.0) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  n->args = std::move(args);
  n->value = value;
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr root = expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ExpressionError("expression \"" + std::string(s_) + "\" at column " + std::to_string(pos_ + 1) + ": " +
                              what,
                          pos_);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Node::Kind::add, {lhs, term()});
      else if (accept('-'))
        lhs = make(Node::Kind::sub, {lhs, term()});
      else
        return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Node::Kind::mul, {lhs, unary()});
      else if (accept('/'))
        lhs = make(Node::Kind::div, {lhs, unary()});
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Kind::neg, {unary()});
    if (accept('+')) return unary();
    return power();
  }

  // -2^2 = -(2^2), 2^-1 = 0.5, 2^3^2 = 2^9
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Node::Kind::pow, {base, unary()});
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr inner = expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c))) return name();
    fail(std::string("unexpected '") + c + "'");
  }

  NodePtr number() {
    const std::string rest(s_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return make(Node::Kind::number, {}, v);
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    const std::string id(s_.substr(start, pos_ - start));
    if (id == "x") return make(Node::Kind::x);
    if (id == "y") return make(Node::Kind::y);
    if (id == "r") return make(Node::Kind::r);
    if (id == "pi") return make(Node::Kind::number, {}, std::numbers::pi);
    if (id == "e") return make(Node::Kind::number, {}, std::numbers::e);

    struct Fn {
      const char* name;
      Node::Kind kind;
      int arity;
    };
    static constexpr Fn fns[] = {{"sin", Node::Kind::sin, 1}, {"cos", Node::Kind::cos, 1},
                                 {"exp", Node::Kind::exp, 1}, {"abs", Node::Kind::abs, 1},
                                 {"min", Node::Kind::min, 2}, {"max", Node::Kind::max, 2}};
    for (const Fn& fn : fns) {
      if (id != fn.name) continue;
      expect('(');
      std::vector<NodePtr> args{expr()};
      while (accept(',')) args.push_back(expr());
      expect(')');
      if (static_cast<int>(args.size()) != fn.arity)
        fail(id + " takes " + std::to_string(fn.arity) + " argument(s), got " + std::to_string(args.size()));
      return make(fn.kind, std::move(args));
    }
    pos_ = start;
    fail("unknown name '" + id + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::string_view source) : source_(source), root_(Parser(source).parse()) {}

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

ScalarField sample_expression(const DomainPtr& domain, const Expression& expr, bool dirichlet) {
  return ScalarField::sample(domain, [&](const Point& at) { return expr(at); }, dirichlet);
}

}  // namespace plap
