#include "metagee/exprlang.hpp"

#include "metagee/error.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <numbers>

namespace metagee {

struct Expr::Node {
    ExprKind kind;
    Rational value;
    std::string name;
    Function fn = Function::Sin;
    int exponent = 0;
    std::vector<Expr> children;
};

namespace {

constexpr std::array<std::pair<std::string_view, Function>, 6> kFunctions{{
    {"sin", Function::Sin},
    {"cos", Function::Cos},
    {"tan", Function::Tan},
    {"sqrt", Function::Sqrt},
    {"exp", Function::Exp},
    {"ln", Function::Ln},
}};

constexpr std::array<std::string_view, 5> kReserved{"pi", "sigma", "sigbar", "p", "q"};

const Function* lookup_function(std::string_view name) {
    for (const auto& [n, f] : kFunctions) {
        if (n == name) return &f;
    }
    return nullptr;
}

} // namespace

bool is_reserved_name(std::string_view name) {
    return std::find(kReserved.begin(), kReserved.end(), name) != kReserved.end();
}

std::string_view function_name(Function fn) {
    for (const auto& [n, f] : kFunctions) {
        if (f == fn) return n;
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Construction and access

Expr Expr::literal(Rational value) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Literal;
    n->value = std::move(value);
    return Expr(std::move(n));
}

Expr Expr::ident(std::string name) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Ident;
    n->name = std::move(name);
    return Expr(std::move(n));
}

Expr Expr::neg(Expr operand) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Neg;
    n->children.push_back(std::move(operand));
    return Expr(std::move(n));
}

Expr Expr::binary(ExprKind kind, Expr lhs, Expr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->children.push_back(std::move(lhs));
    n->children.push_back(std::move(rhs));
    return Expr(std::move(n));
}

Expr Expr::pow(Expr base, int exponent) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Pow;
    n->exponent = exponent;
    n->children.push_back(std::move(base));
    return Expr(std::move(n));
}

Expr Expr::call(Function fn, Expr arg) {
    auto n = std::make_shared<Node>();
    n->kind = ExprKind::Call;
    n->fn = fn;
    n->children.push_back(std::move(arg));
    return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
const Rational& Expr::literal_value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
Function Expr::function() const { return node_->fn; }
int Expr::exponent() const { return node_->exponent; }
const Expr& Expr::lhs() const { return node_->children.at(0); }
const Expr& Expr::rhs() const { return node_->children.at(1); }
const Expr& Expr::operand() const { return node_->children.at(0); }

bool operator==(const Expr& x, const Expr& y) {
    if (x.node_ == y.node_) return true;
    const auto& a = *x.node_;
    const auto& b = *y.node_;
    if (a.kind != b.kind) return false;
    switch (a.kind) {
    case ExprKind::Literal: return a.value == b.value;
    case ExprKind::Ident: return a.name == b.name;
    case ExprKind::Pow:
        if (a.exponent != b.exponent) return false;
        break;
    case ExprKind::Call:
        if (a.fn != b.fn) return false;
        break;
    default: break;
    }
    return a.children == b.children;
}

// ---------------------------------------------------------------------------
// Lexer and parser

namespace {

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string text;
    bool integral = false;
};

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto digit = [&](std::size_t j) { return j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])); };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (i < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
                ++i;
            }
            out.push_back({Tok::Ident, start, std::string(src.substr(start, i - start))});
            continue;
        }
        if (digit(i) || (c == '.' && digit(i + 1))) {
            bool integral = true;
            while (digit(i)) ++i;
            if (i < src.size() && src[i] == '.') {
                integral = false;
                ++i;
                while (digit(i)) ++i;
            }
            if (i < src.size() && (src[i] == 'e' || src[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < src.size() && (src[j] == '+' || src[j] == '-')) ++j;
                if (!digit(j)) {
                    throw ParseError(j, {"digit"},
                                     "lexical error at offset " + std::to_string(j) +
                                         ": malformed exponent in numeric literal");
                }
                integral = false;
                i = j;
                while (digit(i)) ++i;
            }
            out.push_back({Tok::Number, start, std::string(src.substr(start, i - start)), integral});
            continue;
        }
        Tok kind;
        switch (c) {
        case '+': kind = Tok::Plus; break;
        case '-': kind = Tok::Minus; break;
        case '*': kind = Tok::Star; break;
        case '/': kind = Tok::Slash; break;
        case '^': kind = Tok::Caret; break;
        case '(': kind = Tok::LParen; break;
        case ')': kind = Tok::RParen; break;
        default:
            throw ParseError(start, {},
                             "lexical error at offset " + std::to_string(start) +
                                 ": unexpected character '" + std::string(1, c) + "'");
        }
        out.push_back({kind, start, std::string(1, c)});
        ++i;
    }
    out.push_back({Tok::End, src.size(), ""});
    return out;
}

Rational decimal_to_rational(const std::string& text) {
    using boost::multiprecision::cpp_int;
    std::string mantissa;
    long long exp10 = 0;
    std::size_t i = 0;
    bool after_point = false;
    for (; i < text.size() && text[i] != 'e' && text[i] != 'E'; ++i) {
        if (text[i] == '.') {
            after_point = true;
            continue;
        }
        mantissa.push_back(text[i]);
        if (after_point) --exp10;
    }
    if (i < text.size()) exp10 += std::stoll(text.substr(i + 1));
    // A leading zero would make cpp_int read octal.
    mantissa.erase(0, std::min(mantissa.find_first_not_of('0'), mantissa.size()));
    cpp_int m(mantissa.empty() ? std::string("0") : mantissa);
    cpp_int scale = boost::multiprecision::pow(cpp_int(10), static_cast<unsigned>(std::llabs(exp10)));
    return exp10 >= 0 ? Rational(m * scale) : Rational(m, scale);
}

class Parser {
public:
    explicit Parser(std::string_view src) : tokens_(lex(src)) {}

    Expr run() {
        Expr e = expr();
        if (peek().kind != Tok::End) fail({"+", "-", "*", "/", "^", "end of input"});
        return e;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    const Token& advance() { return tokens_[pos_++]; }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
        std::string msg = "syntax error at offset " + std::to_string(t.offset) + ": expected ";
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (i) msg += i + 1 == expected.size() ? " or " : ", ";
            msg += expected[i];
        }
        msg += ", found " + found;
        throw ParseError(t.offset, std::move(expected), msg);
    }

    Expr expr() {
        Expr e = term();
        while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
            ExprKind k = advance().kind == Tok::Plus ? ExprKind::Add : ExprKind::Sub;
            e = Expr::binary(k, std::move(e), term());
        }
        return e;
    }

    Expr term() {
        Expr e = factor();
        while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
            ExprKind k = advance().kind == Tok::Star ? ExprKind::Mul : ExprKind::Div;
            e = Expr::binary(k, std::move(e), factor());
        }
        return e;
    }

    Expr factor() {
        if (peek().kind == Tok::Minus) {
            advance();
            return Expr::neg(factor());
        }
        return power();
    }

    Expr power() {
        Expr base = atom();
        if (peek().kind == Tok::Caret) {
            advance();
            const Token& t = peek();
            if (t.kind != Tok::Number || !t.integral) fail({"integer exponent"});
            advance();
            if (t.text.size() > 6) {
                throw ParseError(t.offset, {"integer exponent"},
                                 "syntax error at offset " + std::to_string(t.offset) +
                                     ": exponent too large");
            }
            return Expr::pow(std::move(base), std::stoi(t.text));
        }
        return base;
    }

    Expr atom() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::Number:
            advance();
            return Expr::literal(decimal_to_rational(t.text));
        case Tok::Ident: {
            advance();
            if (const Function* fn = lookup_function(t.text)) {
                if (peek().kind != Tok::LParen) fail({"'('"});
                advance();
                Expr arg = expr();
                if (peek().kind != Tok::RParen) fail({"')'"});
                advance();
                return Expr::call(*fn, std::move(arg));
            }
            return Expr::ident(t.text);
        }
        case Tok::LParen: {
            advance();
            Expr e = expr();
            if (peek().kind != Tok::RParen) fail({"')'", "+", "-", "*", "/"});
            advance();
            return e;
        }
        default: fail({"number", "identifier", "function", "'('", "'-'"});
        }
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

} // namespace

Expr parse(std::string_view src) { return Parser(src).run(); }

// ---------------------------------------------------------------------------
// Rendering

namespace {

int precedence(const Expr& e) {
    switch (e.kind()) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    case ExprKind::Pow: return 4;
    default: return 5;
    }
}

std::string render_literal(const Rational& r) {
    using boost::multiprecision::cpp_int;
    cpp_int num = boost::multiprecision::numerator(r);
    cpp_int den = boost::multiprecision::denominator(r);
    // Literals come from decimal text, so den divides some power of ten.
    unsigned places = 0;
    cpp_int scale = 1;
    while (scale % den != 0) {
        scale *= 10;
        ++places;
        if (places > 4096) return "(" + num.str() + "/" + den.str() + ")";
    }
    cpp_int scaled = num * (scale / den);
    bool negative = scaled < 0;
    std::string digits = (negative ? cpp_int(-scaled) : scaled).str();
    if (places > 0) {
        if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
        digits.insert(digits.size() - places, ".");
    }
    // Negative literals only arise programmatically; keep them parseable.
    return negative ? "(-" + digits + ")" : digits;
}

std::string render_at(const Expr& e, int min_prec);

std::string render_node(const Expr& e) {
    switch (e.kind()) {
    case ExprKind::Literal: return render_literal(e.literal_value());
    case ExprKind::Ident: return e.name();
    case ExprKind::Neg: return "-" + render_at(e.operand(), 3);
    case ExprKind::Add: return render_at(e.lhs(), 1) + " + " + render_at(e.rhs(), 2);
    case ExprKind::Sub: return render_at(e.lhs(), 1) + " - " + render_at(e.rhs(), 2);
    case ExprKind::Mul: return render_at(e.lhs(), 2) + "*" + render_at(e.rhs(), 3);
    case ExprKind::Div: return render_at(e.lhs(), 2) + "/" + render_at(e.rhs(), 3);
    case ExprKind::Pow: return render_at(e.operand(), 5) + "^" + std::to_string(e.exponent());
    case ExprKind::Call:
        return std::string(function_name(e.function())) + "(" + render_at(e.operand(), 0) + ")";
    }
    return {};
}

std::string render_at(const Expr& e, int min_prec) {
    std::string s = render_node(e);
    return precedence(e) < min_prec ? "(" + s + ")" : s;
}

void collect_vars(const Expr& e, std::set<std::string>& out) {
    switch (e.kind()) {
    case ExprKind::Literal: return;
    case ExprKind::Ident:
        if (!is_reserved_name(e.name())) out.insert(e.name());
        return;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Div:
        collect_vars(e.lhs(), out);
        collect_vars(e.rhs(), out);
        return;
    default: collect_vars(e.operand(), out);
    }
}

} // namespace

std::string render(const Expr& e) { return render_at(e, 0); }

std::set<std::string> free_vars(const Expr& e) {
    std::set<std::string> out;
    collect_vars(e, out);
    return out;
}

// ---------------------------------------------------------------------------
// Evaluation

EvalPoint::EvalPoint(std::vector<std::string> vars, Eigen::VectorXd values)
    : vars_(std::move(vars)), values_(std::move(values)) {
    if (static_cast<Eigen::Index>(vars_.size()) != values_.size()) {
        throw Error("EvalPoint: " + std::to_string(vars_.size()) + " names but " +
                    std::to_string(values_.size()) + " values");
    }
}

void EvalPoint::bind_constant(std::string name, double value) {
    for (auto& [n, v] : constants_) {
        if (n == name) {
            v = value;
            return;
        }
    }
    constants_.emplace_back(std::move(name), value);
}

void EvalPoint::set_values(const Eigen::VectorXd& values) {
    if (values.size() != values_.size()) throw Error("EvalPoint: dimension change");
    values_ = values;
}

int EvalPoint::var_index(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        if (vars_[i] == name) return static_cast<int>(i);
    }
    return -1;
}

const double* EvalPoint::constant(std::string_view name) const {
    for (const auto& [n, v] : constants_) {
        if (n == name) return &v;
    }
    return nullptr;
}

namespace {

double reserved_value(std::string_view name, const MetallicParams& params) {
    if (name == "pi") return std::numbers::pi;
    if (name == "sigma") return params.sigma();
    if (name == "sigbar") return RingElem::sigbar(params).to_double();
    if (name == "p") return static_cast<double>(params.p());
    return static_cast<double>(params.q());
}

[[noreturn]] void domain_fail(const Expr& e, const std::string& what, double arg) {
    std::string sub = render(e);
    throw DomainError(sub, "domain error: " + what + " (argument " + std::to_string(arg) +
                               ") in '" + sub + "'");
}

class JetEvaluator {
public:
    JetEvaluator(const EvalPoint& point, const MetallicParams& params)
        : point_(point), params_(params), k_(point.dim()) {}

    Jet2 constant(double v) const {
        return {v, Eigen::VectorXd::Zero(k_), Eigen::MatrixXd::Zero(k_, k_)};
    }

    // Applies a scalar function with derivatives d1, d2 at x.value.
    static Jet2 chain(const Jet2& x, double f, double d1, double d2) {
        Jet2 r;
        r.value = f;
        r.grad = d1 * x.grad;
        r.hess = d1 * x.hess + d2 * (x.grad * x.grad.transpose());
        return r;
    }

    Jet2 eval(const Expr& e) const {
        switch (e.kind()) {
        case ExprKind::Literal: return constant(e.literal_value().convert_to<double>());
        case ExprKind::Ident: {
            const std::string& n = e.name();
            if (is_reserved_name(n)) return constant(reserved_value(n, params_));
            if (int i = point_.var_index(n); i >= 0) {
                Jet2 r = constant(point_.values()[i]);
                r.grad[i] = 1.0;
                return r;
            }
            if (const double* c = point_.constant(n)) return constant(*c);
            throw Error("unbound identifier '" + n + "'");
        }
        case ExprKind::Neg: {
            Jet2 x = eval(e.operand());
            return {-x.value, -x.grad, -x.hess};
        }
        case ExprKind::Add:
        case ExprKind::Sub: {
            Jet2 a = eval(e.lhs());
            Jet2 b = eval(e.rhs());
            double s = e.kind() == ExprKind::Add ? 1.0 : -1.0;
            return {a.value + s * b.value, a.grad + s * b.grad, a.hess + s * b.hess};
        }
        case ExprKind::Mul: return mul(eval(e.lhs()), eval(e.rhs()));
        case ExprKind::Div: {
            Jet2 b = eval(e.rhs());
            if (b.value == 0.0) domain_fail(e, "division by zero", b.value);
            double inv = 1.0 / b.value;
            Jet2 recip = chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
            return mul(eval(e.lhs()), recip);
        }
        case ExprKind::Pow: {
            Jet2 x = eval(e.operand());
            int n = e.exponent();
            if (n == 0) return constant(1.0);
            double v = x.value;
            double f = std::pow(v, n);
            double d1 = n * std::pow(v, n - 1);
            double d2 = n >= 2 ? n * (n - 1) * std::pow(v, n - 2) : 0.0;
            return chain(x, f, d1, d2);
        }
        case ExprKind::Call: return call(e, eval(e.operand()));
        }
        return constant(0.0);
    }

private:
    static Jet2 mul(const Jet2& a, const Jet2& b) {
        Jet2 r;
        r.value = a.value * b.value;
        r.grad = a.grad * b.value + b.grad * a.value;
        Eigen::MatrixXd cross = a.grad * b.grad.transpose();
        r.hess = a.hess * b.value + b.hess * a.value + cross + cross.transpose();
        return r;
    }

    static Jet2 call(const Expr& e, const Jet2& x) {
        const double v = x.value;
        switch (e.function()) {
        case Function::Sin: return chain(x, std::sin(v), std::cos(v), -std::sin(v));
        case Function::Cos: return chain(x, std::cos(v), -std::sin(v), -std::cos(v));
        case Function::Tan: {
            double c = std::cos(v);
            if (c == 0.0) domain_fail(e, "tan at a pole", v);
            double t = std::tan(v);
            double sec2 = 1.0 / (c * c);
            return chain(x, t, sec2, 2.0 * t * sec2);
        }
        case Function::Sqrt: {
            if (!(v > 0.0)) domain_fail(e, "sqrt of non-positive value", v);
            double s = std::sqrt(v);
            return chain(x, s, 0.5 / s, -0.25 / (s * v));
        }
        case Function::Exp: {
            double ex = std::exp(v);
            return chain(x, ex, ex, ex);
        }
        case Function::Ln: {
            if (!(v > 0.0)) domain_fail(e, "ln of non-positive value", v);
            return chain(x, std::log(v), 1.0 / v, -1.0 / (v * v));
        }
        }
        return x;
    }

    const EvalPoint& point_;
    const MetallicParams& params_;
    int k_;
};

} // namespace

Jet2 eval_jet2(const Expr& e, const EvalPoint& point, const MetallicParams& params) {
    Jet2 r = JetEvaluator(point, params).eval(e);
    // Mirror the upper triangle so the Hessian is symmetric bit for bit.
    r.hess = r.hess.selfadjointView<Eigen::Upper>();
    return r;
}

double eval_value(const Expr& e, const EvalPoint& point, const MetallicParams& params) {
    switch (e.kind()) {
    case ExprKind::Literal: return e.literal_value().convert_to<double>();
    case ExprKind::Ident: {
        const std::string& n = e.name();
        if (is_reserved_name(n)) return reserved_value(n, params);
        if (int i = point.var_index(n); i >= 0) return point.values()[i];
        if (const double* c = point.constant(n)) return *c;
        throw Error("unbound identifier '" + n + "'");
    }
    case ExprKind::Neg: return -eval_value(e.operand(), point, params);
    case ExprKind::Add: return eval_value(e.lhs(), point, params) + eval_value(e.rhs(), point, params);
    case ExprKind::Sub: return eval_value(e.lhs(), point, params) - eval_value(e.rhs(), point, params);
    case ExprKind::Mul: return eval_value(e.lhs(), point, params) * eval_value(e.rhs(), point, params);
    case ExprKind::Div: {
        double b = eval_value(e.rhs(), point, params);
        if (b == 0.0) domain_fail(e, "division by zero", b);
        return eval_value(e.lhs(), point, params) / b;
    }
    case ExprKind::Pow: return std::pow(eval_value(e.operand(), point, params), e.exponent());
    case ExprKind::Call: {
        double v = eval_value(e.operand(), point, params);
        switch (e.function()) {
        case Function::Sin: return std::sin(v);
        case Function::Cos: return std::cos(v);
        case Function::Tan:
            if (std::cos(v) == 0.0) domain_fail(e, "tan at a pole", v);
            return std::tan(v);
        case Function::Sqrt:
            if (!(v > 0.0)) domain_fail(e, "sqrt of non-positive value", v);
            return std::sqrt(v);
        case Function::Exp: return std::exp(v);
        case Function::Ln:
            if (!(v > 0.0)) domain_fail(e, "ln of non-positive value", v);
            return std::log(v);
        }
    }
    }
    return 0.0;
}

} // namespace metagee
