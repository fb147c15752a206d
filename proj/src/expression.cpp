#include "transdiff/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

namespace transdiff::expr {

struct Expression::Node {
    enum class Kind { Number, VarX, VarY, Add, Sub, Mul, Div, Pow, Neg, Call, Reflect };
    Kind kind;
    double value = 0.0;        // Number; Reflect stores the substitution sum here
    std::string func;          // Call
    NodePtr a, b;
};

namespace {

using Node = Expression::Node;
using NodePtr = Expression::NodePtr;
using Kind = Node::Kind;

NodePtr make_num(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Number;
    n->value = v;
    return n;
}

NodePtr make_node(Kind k, NodePtr a, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

[[noreturn]] void parse_fail(size_t pos, const std::string& msg) {
    throw Error("cli", "parse error at position " + std::to_string(pos + 1) + ": " + msg);
}

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    NodePtr run() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) parse_fail(pos_, "unexpected trailing input");
        return e;
    }

private:
    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) parse_fail(pos_, std::string("expected ") + what);
    }

    NodePtr parse_expr() {
        NodePtr e = parse_term();
        for (;;) {
            if (accept('+'))
                e = make_node(Kind::Add, e, parse_term());
            else if (accept('-'))
                e = make_node(Kind::Sub, e, parse_term());
            else
                return e;
        }
    }

    NodePtr parse_term() {
        NodePtr e = parse_unary();
        for (;;) {
            if (accept('*'))
                e = make_node(Kind::Mul, e, parse_unary());
            else if (accept('/'))
                e = make_node(Kind::Div, e, parse_unary());
            else
                return e;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_node(Kind::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (accept('^')) return make_node(Kind::Pow, base, parse_unary());
        return base;
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= text_.size()) parse_fail(pos_, "unexpected end of input");
        char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            expect(')', "')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            const char* start = text_.c_str() + pos_;
            char* end = nullptr;
            double v = std::strtod(start, &end);
            if (end == start) parse_fail(pos_, "malformed number");
            pos_ += static_cast<size_t>(end - start);
            return make_num(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < text_.size() &&
                   std::isalnum(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
            std::string id = text_.substr(start, pos_ - start);
            if (id == "x") return make_node(Kind::VarX, nullptr);
            if (id == "y") return make_node(Kind::VarY, nullptr);
            if (id == "pi") return make_num(3.14159265358979323846);
            if (id == "sin" || id == "cos" || id == "exp" || id == "sinh" ||
                id == "cosh" || id == "sqrt") {
                expect('(', "'(' after function name");
                NodePtr arg = parse_expr();
                expect(')', "')'");
                auto n = std::make_shared<Node>();
                n->kind = Kind::Call;
                n->func = id;
                n->a = arg;
                return n;
            }
            parse_fail(start, "unknown identifier '" + id + "'");
        }
        parse_fail(pos_, std::string("unexpected character '") + c + "'");
    }

    const std::string& text_;
    size_t pos_ = 0;
};

double eval_node(const Node* n, double x, double y) {
    switch (n->kind) {
        case Kind::Number: return n->value;
        case Kind::VarX: return x;
        case Kind::VarY: return y;
        case Kind::Add: return eval_node(n->a.get(), x, y) + eval_node(n->b.get(), x, y);
        case Kind::Sub: return eval_node(n->a.get(), x, y) - eval_node(n->b.get(), x, y);
        case Kind::Mul: return eval_node(n->a.get(), x, y) * eval_node(n->b.get(), x, y);
        case Kind::Div: {
            double den = eval_node(n->b.get(), x, y);
            if (den == 0.0) throw Error("cli", "expression domain error: division by zero");
            return eval_node(n->a.get(), x, y) / den;
        }
        case Kind::Pow: {
            double base = eval_node(n->a.get(), x, y);
            double e = eval_node(n->b.get(), x, y);
            if (base < 0.0 && e != std::floor(e))
                throw Error("cli", "expression domain error: negative base with non-integer exponent");
            if (base == 0.0 && e < 0.0)
                throw Error("cli", "expression domain error: zero base with negative exponent");
            return std::pow(base, e);
        }
        case Kind::Neg: return -eval_node(n->a.get(), x, y);
        case Kind::Call: {
            double a = eval_node(n->a.get(), x, y);
            if (n->func == "sin") return std::sin(a);
            if (n->func == "cos") return std::cos(a);
            if (n->func == "exp") return std::exp(a);
            if (n->func == "sinh") return std::sinh(a);
            if (n->func == "cosh") return std::cosh(a);
            if (a < 0.0) throw Error("cli", "expression domain error: sqrt of a negative value");
            return std::sqrt(a);
        }
        case Kind::Reflect: return eval_node(n->a.get(), n->value - x, y);
    }
    throw Error("cli", "corrupt expression node");
}

void print_node(std::ostringstream& out, const Node* n, const std::string& xrep) {
    switch (n->kind) {
        case Kind::Number: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n->value;
            out << tmp.str();
            return;
        }
        case Kind::VarX: out << xrep; return;
        case Kind::VarY: out << "y"; return;
        case Kind::Add:
        case Kind::Sub:
        case Kind::Mul:
        case Kind::Div:
        case Kind::Pow: {
            const char* op = n->kind == Kind::Add   ? "+"
                             : n->kind == Kind::Sub ? "-"
                             : n->kind == Kind::Mul ? "*"
                             : n->kind == Kind::Div ? "/"
                                                    : "^";
            out << "(";
            print_node(out, n->a.get(), xrep);
            out << op;
            print_node(out, n->b.get(), xrep);
            out << ")";
            return;
        }
        case Kind::Neg:
            out << "(-";
            print_node(out, n->a.get(), xrep);
            out << ")";
            return;
        case Kind::Call:
            out << n->func << "(";
            print_node(out, n->a.get(), xrep);
            out << ")";
            return;
        case Kind::Reflect: {
            std::ostringstream sum;
            sum.precision(17);
            sum << n->value;
            print_node(out, n->a.get(), "(" + sum.str() + "-" + xrep + ")");
            return;
        }
    }
}

bool equal_nodes(const Node* a, const Node* b) {
    if (a == b) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Kind::Number: return a->value == b->value;
        case Kind::VarX:
        case Kind::VarY: return true;
        case Kind::Neg: return equal_nodes(a->a.get(), b->a.get());
        case Kind::Call:
            return a->func == b->func && equal_nodes(a->a.get(), b->a.get());
        case Kind::Reflect:
            return a->value == b->value && equal_nodes(a->a.get(), b->a.get());
        default:
            return equal_nodes(a->a.get(), b->a.get()) && equal_nodes(a->b.get(), b->b.get());
    }
}

}  // namespace

Expression::Expression() : root_(make_num(0.0)) {}
Expression::Expression(NodePtr root) : root_(std::move(root)) {}

Expression Expression::parse(const std::string& text) {
    Parser p(text);
    return Expression(p.run());
}

Expression Expression::constant(double v) { return Expression(make_num(v)); }

double Expression::eval(double x, double y) const { return eval_node(root_.get(), x, y); }

std::string Expression::to_string() const {
    std::ostringstream out;
    print_node(out, root_.get(), "x");
    return out.str();
}

bool Expression::equals(const Expression& other) const {
    return equal_nodes(root_.get(), other.root_.get());
}

bool Expression::is_zero() const {
    return root_->kind == Node::Kind::Number && root_->value == 0.0;
}

Expression Expression::reflected(double sum) const {
    if (root_->kind == Node::Kind::Reflect && root_->value == sum) return Expression(root_->a);
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Reflect;
    n->value = sum;
    n->a = root_;
    return Expression(n);
}

Expression Expression::negated() const {
    if (root_->kind == Node::Kind::Neg) return Expression(root_->a);
    return Expression(make_node(Node::Kind::Neg, root_));
}

}  // namespace transdiff::expr
