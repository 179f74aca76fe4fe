#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace specsim {

/// Arithmetic expression over numeric literals (with SI suffixes) and named
/// random parameters, as written in netlist value fields. Supports + - * /,
/// unary minus and parentheses. Expressions must stay polynomial in the
/// parameters (division only by parameter-free subexpressions) with total
/// degree <= 3, so Galerkin quadrature requirements stay known a priori.
class Expr {
public:
    /// Parse a single expression; `params` lists the declared parameter
    /// names. Throws std::invalid_argument with a position on bad syntax.
    static Expr parse(const std::string& text, const std::vector<std::string>& params);

    /// Constant expression.
    static Expr constant(double v);

    /// Evaluate with parameter values in declaration order.
    double eval(const std::vector<double>& xi) const;

    /// Total polynomial degree in the parameters (0 for constants).
    int degree() const;

    bool is_constant() const { return degree() == 0; }
    const std::string& text() const { return text_; }

    struct Node;  // parse-tree node, defined in expression.cpp

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

/// Parse a numeric literal with an optional engineering suffix
/// (k, meg, m, u, n, p; case-insensitive). Throws on malformed input.
double parse_si_number(const std::string& tok);

}  // namespace specsim
