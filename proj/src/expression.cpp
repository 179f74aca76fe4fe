#include "specsim/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

namespace specsim {

struct Expr::Node {
    enum class Op { Const, Param, Add, Sub, Mul, Div, Neg } op;
    double value = 0.0;   // Const
    int param = -1;       // Param: index into the declaration order
    std::shared_ptr<const Node> lhs, rhs;

    double eval(const std::vector<double>& xi) const {
        switch (op) {
            case Op::Const: return value;
            case Op::Param: return xi.at(param);
            case Op::Add: return lhs->eval(xi) + rhs->eval(xi);
            case Op::Sub: return lhs->eval(xi) - rhs->eval(xi);
            case Op::Mul: return lhs->eval(xi) * rhs->eval(xi);
            case Op::Div: return lhs->eval(xi) / rhs->eval(xi);
            case Op::Neg: return -lhs->eval(xi);
        }
        return 0.0;
    }

    int degree() const {
        switch (op) {
            case Op::Const: return 0;
            case Op::Param: return 1;
            case Op::Add:
            case Op::Sub: return std::max(lhs->degree(), rhs->degree());
            case Op::Mul: return lhs->degree() + rhs->degree();
            case Op::Div: return lhs->degree();  // rhs checked parameter-free at parse
            case Op::Neg: return lhs->degree();
        }
        return 0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

struct Parser {
    const std::string& s;
    const std::vector<std::string>& params;
    size_t pos = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::invalid_argument("expression error at column " + std::to_string(pos + 1) +
                                    " in '" + s + "': " + msg);
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos < s.size() ? s[pos] : '\0';
    }

    NodePtr make(Expr::Node::Op op, NodePtr l, NodePtr r) {
        auto n = std::make_shared<Expr::Node>();
        n->op = op;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        if (op == Expr::Node::Op::Div && n->rhs->degree() != 0)
            fail("division by a parameter-dependent expression is not polynomial");
        return n;
    }

    NodePtr parse_expr() {
        NodePtr n = parse_term();
        while (true) {
            if (eat('+'))
                n = make(Expr::Node::Op::Add, n, parse_term());
            else if (eat('-'))
                n = make(Expr::Node::Op::Sub, n, parse_term());
            else
                return n;
        }
    }

    NodePtr parse_term() {
        NodePtr n = parse_factor();
        while (true) {
            if (eat('*'))
                n = make(Expr::Node::Op::Mul, n, parse_factor());
            else if (eat('/'))
                n = make(Expr::Node::Op::Div, n, parse_factor());
            else
                return n;
        }
    }

    NodePtr parse_factor() {
        skip_ws();
        if (eat('-')) {
            auto n = std::make_shared<Expr::Node>();
            n->op = Expr::Node::Op::Neg;
            n->lhs = parse_factor();
            return n;
        }
        if (eat('+')) return parse_factor();
        if (eat('(')) {
            NodePtr inner = parse_expr();
            if (!eat(')')) fail("missing ')'");
            return inner;
        }
        const char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_ident();
        fail("expected a number, parameter or '('");
    }

    NodePtr parse_number() {
        skip_ws();
        const size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '.'))
            ++pos;
        // allow exponent signs: 1e-14
        while (pos < s.size() && (s[pos] == '+' || s[pos] == '-') &&
               (s[pos - 1] == 'e' || s[pos - 1] == 'E')) {
            ++pos;
            while (pos < s.size() && std::isalnum(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        auto n = std::make_shared<Expr::Node>();
        n->op = Expr::Node::Op::Const;
        try {
            n->value = parse_si_number(s.substr(start, pos - start));
        } catch (const std::exception& e) {
            fail(e.what());
        }
        return n;
    }

    NodePtr parse_ident() {
        skip_ws();
        const size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        const std::string name = s.substr(start, pos - start);
        for (size_t i = 0; i < params.size(); ++i) {
            if (params[i] == name) {
                auto n = std::make_shared<Expr::Node>();
                n->op = Expr::Node::Op::Param;
                n->param = static_cast<int>(i);
                return n;
            }
        }
        fail("unknown parameter '" + name + "'");
    }
};

}  // namespace

Expr Expr::parse(const std::string& text, const std::vector<std::string>& params) {
    Parser p{text, params};
    Expr e;
    e.root_ = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("trailing characters");
    e.text_ = text;
    if (e.root_->degree() > 3)
        throw std::invalid_argument("expression '" + text +
                                    "': polynomial degree in parameters exceeds 3");
    return e;
}

Expr Expr::constant(double v) {
    auto n = std::make_shared<Node>();
    n->op = Node::Op::Const;
    n->value = v;
    Expr e;
    e.root_ = n;
    e.text_ = std::to_string(v);
    return e;
}

double Expr::eval(const std::vector<double>& xi) const { return root_->eval(xi); }

int Expr::degree() const { return root_->degree(); }

double parse_si_number(const std::string& tok) {
    if (tok.empty()) throw std::invalid_argument("empty number");
    char* end = nullptr;
    const double base = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str()) throw std::invalid_argument("malformed number '" + tok + "'");
    std::string suffix(end);
    for (auto& ch : suffix) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (suffix.empty()) return base;
    if (suffix == "meg") return base * 1e6;
    if (suffix == "k") return base * 1e3;
    if (suffix == "m") return base * 1e-3;
    if (suffix == "u") return base * 1e-6;
    if (suffix == "n") return base * 1e-9;
    if (suffix == "p") return base * 1e-12;
    throw std::invalid_argument("unknown unit suffix '" + suffix + "' in '" + tok + "'");
}

}  // namespace specsim
