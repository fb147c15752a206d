#pragma once

#include <memory>
#include <string>

#include "transdiff/types.hpp"

namespace transdiff::expr {

// Immutable arithmetic expression in the variables x and y.
// Grammar: + - * / ^ (right-associative), unary minus, parentheses,
// sin cos exp sinh cosh sqrt, the constant pi, decimal literals.
// No implicit multiplication.
class Expression {
public:
    Expression();  // the zero expression

    static Expression parse(const std::string& text);
    static Expression constant(double v);

    double eval(double x, double y) const;
    std::string to_string() const;
    bool equals(const Expression& other) const;
    bool is_zero() const;

    // x -> sum - x substitution, as a structural wrapper; applying it twice with
    // the same sum restores the original node for bit-exact involutions.
    Expression reflected(double sum) const;
    Expression negated() const;

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;
    explicit Expression(NodePtr root);
    const NodePtr& root() const { return root_; }

private:
    NodePtr root_;
};

}  // namespace transdiff::expr
