#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

#include "plap/mesh.hpp"

namespace plap {

class ExpressionError : public std::invalid_argument {
 public:
  ExpressionError(const std::string& what, std::size_t position)
      : std::invalid_argument(what), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

/// Arithmetic over the coordinates x, y and r = sqrt(x² + y²).
///
/// Grammar: + - * / ^ (right associative), unary minus, parentheses,
/// sin cos exp abs of one argument, min max of two, constants pi and e.
class Expression {
 public:
  explicit Expression(std::string_view source);

  double operator()(double x, double y = 0.0) const;
  double operator()(const Point& at) const { return (*this)(at.x(), at.y()); }
  const std::string& source() const { return source_; }

  struct Node;

 private:
  std::string source_;
  std::shared_ptr<const Node> root_;
};

/// Samples an expression on every node of a domain.
ScalarField sample_expression(const DomainPtr& domain, const Expression& expr, bool dirichlet);

}  // namespace plap
