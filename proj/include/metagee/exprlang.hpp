#pragma once

#include "metagee/quadring.hpp"

#include <Eigen/Core>

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace metagee {

enum class ExprKind { Literal, Ident, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Function { Sin, Cos, Tan, Sqrt, Exp, Ln };

/// Immutable expression tree. Copies share structure.
///
/// Identifiers pi, sigma, sigbar, p and q are reserved constants; sigma and
/// sigbar are bound to the metallic parameters at evaluation time, so one
/// parsed tree can be reused across (p, q).
class Expr {
public:
    struct Node;

    static Expr literal(Rational value);
    static Expr ident(std::string name);
    static Expr neg(Expr operand);
    static Expr binary(ExprKind kind, Expr lhs, Expr rhs);
    static Expr pow(Expr base, int exponent);
    static Expr call(Function fn, Expr arg);

    [[nodiscard]] ExprKind kind() const;
    [[nodiscard]] const Rational& literal_value() const;
    [[nodiscard]] const std::string& name() const;
    [[nodiscard]] Function function() const;
    [[nodiscard]] int exponent() const;
    [[nodiscard]] const Expr& lhs() const;
    [[nodiscard]] const Expr& rhs() const;
    /// Operand of Neg, Pow base and Call argument.
    [[nodiscard]] const Expr& operand() const;

    /// Structural equality; literals compare by exact rational value.
    friend bool operator==(const Expr& x, const Expr& y);

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    std::shared_ptr<const Node> node_;
};

bool is_reserved_name(std::string_view name);
std::string_view function_name(Function fn);

/// Recursive-descent parse. Precedence, tightest first: ^, unary minus,
/// * and /, + and -. Binary operators associate to the left and ^ takes a
/// non-negative integer literal exponent.
Expr parse(std::string_view src);

/// Minimal-parenthesis rendering; parse(render(e)) == e.
std::string render(const Expr& e);

/// Identifiers that are not reserved constants.
std::set<std::string> free_vars(const Expr& e);

/// Value, gradient and Hessian of an expression with respect to the
/// differentiation variables of an EvalPoint.
struct Jet2 {
    double value = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

/// Named values for evaluation. Variables are differentiated, constants
/// are not.
class EvalPoint {
public:
    EvalPoint() = default;
    EvalPoint(std::vector<std::string> vars, Eigen::VectorXd values);

    void bind_constant(std::string name, double value);
    void set_values(const Eigen::VectorXd& values);

    [[nodiscard]] int dim() const noexcept { return static_cast<int>(vars_.size()); }
    [[nodiscard]] const std::vector<std::string>& vars() const noexcept { return vars_; }
    [[nodiscard]] const Eigen::VectorXd& values() const noexcept { return values_; }

    /// Index of a variable or -1.
    [[nodiscard]] int var_index(std::string_view name) const;
    [[nodiscard]] const double* constant(std::string_view name) const;

private:
    std::vector<std::string> vars_;
    Eigen::VectorXd values_;
    std::vector<std::pair<std::string, double>> constants_;
};

/// Forward-mode second-order evaluation. Throws DomainError for sqrt or ln
/// of a non-positive argument, division by zero and tan at a pole, and
/// Error for an unbound identifier.
Jet2 eval_jet2(const Expr& e, const EvalPoint& point, const MetallicParams& params);

/// Value only.
double eval_value(const Expr& e, const EvalPoint& point, const MetallicParams& params);

} // namespace metagee
