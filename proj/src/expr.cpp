#include "volterra/expr.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace volterra {

struct Expr::Node {
    enum class Kind { Number, VarT, VarS, Add, Sub, Mul, Div, Pow, Neg, Call };
    Kind kind;
    double value = 0.0;             // Number
    std::string func;               // Call
    std::shared_ptr<const Node> a;  // lhs / operand
    std::shared_ptr<const Node> b;  // rhs
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;
using Kind = Expr::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Expr::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

class Parser {
  public:
    explicit Parser(const std::string& text) : s_(text) {}

    NodePtr parse_all() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) throw SyntaxError("unexpected input", pos_);
        return e;
    }

  private:
    const std::string& s_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (consume('+'))
                lhs = make(Kind::Add, lhs, parse_term());
            else if (consume('-'))
                lhs = make(Kind::Sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (consume('*'))
                lhs = make(Kind::Mul, lhs, parse_unary());
            else if (consume('/'))
                lhs = make(Kind::Div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (consume('-')) return make(Kind::Neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (consume('^')) return make(Kind::Pow, base, parse_unary());  // right-assoc, allows 2^-3
        return base;
    }

    NodePtr parse_primary() {
        const char c = peek();
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!consume(')')) throw SyntaxError("expected ')'", pos_);
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
        throw SyntaxError("expected value", pos_);
    }

    NodePtr parse_number() {
        skip_ws();
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw SyntaxError("bad number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<Expr::Node>();
        n->kind = Kind::Number;
        n->value = v;
        return n;
    }

    NodePtr parse_ident() {
        skip_ws();
        const std::size_t start = pos_;
        while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        if (name == "t") return make(Kind::VarT);
        if (name == "s") return make(Kind::VarS);
        if (name == "sin" || name == "cos" || name == "exp" || name == "ln" || name == "sqrt") {
            if (!consume('(')) throw SyntaxError("expected '(' after function name", pos_);
            NodePtr arg = parse_expr();
            if (!consume(')')) throw SyntaxError("expected ')'", pos_);
            auto n = std::make_shared<Expr::Node>();
            n->kind = Kind::Call;
            n->func = name;
            n->a = arg;
            return n;
        }
        throw SyntaxError("unknown identifier '" + name + "'", start);
    }
};

double eval_node(const Expr::Node& n, double t, double s) {
    switch (n.kind) {
        case Kind::Number: return n.value;
        case Kind::VarT: return t;
        case Kind::VarS: return s;
        case Kind::Add: return eval_node(*n.a, t, s) + eval_node(*n.b, t, s);
        case Kind::Sub: return eval_node(*n.a, t, s) - eval_node(*n.b, t, s);
        case Kind::Mul: return eval_node(*n.a, t, s) * eval_node(*n.b, t, s);
        case Kind::Div: {
            const double num = eval_node(*n.a, t, s), den = eval_node(*n.b, t, s);
            if (den == 0.0) throw DomainError("division by zero");
            return num / den;
        }
        case Kind::Pow: return std::pow(eval_node(*n.a, t, s), eval_node(*n.b, t, s));
        case Kind::Neg: return -eval_node(*n.a, t, s);
        case Kind::Call: {
            const double x = eval_node(*n.a, t, s);
            if (n.func == "sin") return std::sin(x);
            if (n.func == "cos") return std::cos(x);
            if (n.func == "exp") return std::exp(x);
            if (n.func == "ln") {
                if (x <= 0.0) throw DomainError("ln of nonpositive value");
                return std::log(x);
            }
            if (x < 0.0) throw DomainError("sqrt of negative value");
            return std::sqrt(x);
        }
    }
    throw Error("eval: corrupt expression tree");
}

void print_node(const Expr::Node& n, std::ostream& os) {
    switch (n.kind) {
        case Kind::Number: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.value;
            os << tmp.str();
            return;
        }
        case Kind::VarT: os << 't'; return;
        case Kind::VarS: os << 's'; return;
        case Kind::Neg:
            os << "(-";
            print_node(*n.a, os);
            os << ')';
            return;
        case Kind::Call:
            os << n.func << '(';
            print_node(*n.a, os);
            os << ')';
            return;
        default: {
            const char* op = n.kind == Kind::Add   ? "+"
                             : n.kind == Kind::Sub ? "-"
                             : n.kind == Kind::Mul ? "*"
                             : n.kind == Kind::Div ? "/"
                                                   : "^";
            os << '(';
            print_node(*n.a, os);
            os << op;
            print_node(*n.b, os);
            os << ')';
            return;
        }
    }
}

}  // namespace

Expr Expr::parse(const std::string& text) { return Expr(Parser(text).parse_all()); }

double Expr::eval(double t, double s) const { return eval_node(*root_, t, s); }

std::string Expr::print() const {
    std::ostringstream os;
    print_node(*root_, os);
    return os.str();
}

}  // namespace volterra
