#pragma once

#include <memory>
#include <string>

#include "volterra/errors.hpp"

namespace volterra {

/// Parsed arithmetic expression over the variables t and s.
/// Grammar: decimal literals, t, s, + - * / ^, unary minus, parentheses,
/// sin cos exp ln sqrt. '^' binds tightest and is right-associative, then
/// unary minus, then * /, then + -. No implicit multiplication.
class Expr {
  public:
    /// Parse the full input; throws SyntaxError (with byte offset) on trailing
    /// garbage or malformed input.
    static Expr parse(const std::string& text);

    /// Evaluate with both variables bound. Throws DomainError for ln/sqrt of
    /// out-of-domain arguments and division by zero.
    double eval(double t, double s = 0.0) const;

    /// Canonical fully-parenthesized form; parse(print()) round-trips.
    std::string print() const;

    struct Node;

  private:
    explicit Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

}  // namespace volterra
