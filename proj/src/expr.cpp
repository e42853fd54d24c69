#include "pathtrans/expr.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "pathtrans/error.hpp"

namespace pathtrans {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "config";
        case ErrorKind::Syntax: return "syntax";
        case ErrorKind::Domain: return "domain";
        case ErrorKind::Evaluation: return "evaluation";
        case ErrorKind::Singularity: return "singularity";
        case ErrorKind::Numerical: return "numerical";
        case ErrorKind::Gate: return "gate";
    }
    return "unknown";
}

namespace {

NodePtr make_leaf(Op op, cd value = {}, std::string name = {}) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->value = value;
    n->name = std::move(name);
    return n;
}

NodePtr make_node(Op op, std::vector<NodePtr> args, int exponent = 0) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->args = std::move(args);
    n->exponent = exponent;
    return n;
}

const char* fn_name(Op op) {
    switch (op) {
        case Op::Sin: return "sin";
        case Op::Cos: return "cos";
        case Op::Exp: return "exp";
        case Op::Ln: return "ln";
        case Op::Sqrt: return "sqrt";
        case Op::Atan2: return "atan2";
        default: return "?";
    }
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expression run() {
        skip_ws();
        if (pos_ >= text_.size()) error("empty expression");
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ < text_.size()) error(std::string("unexpected character '") + text_[pos_] + "'");
        return Expression(e);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void error(const std::string& msg) const { error_at(pos_, msg); }

    [[noreturn]] void error_at(std::size_t at, const std::string& msg) const {
        std::string where = "position " + std::to_string(at + 1);
        fail(ErrorKind::Syntax, "syntax error at " + where + ": " + msg, where);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) error(std::string("expected ") + what);
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            if (accept('+')) {
                lhs = make_node(Op::Add, {lhs, parse_product()});
            } else if (accept('-')) {
                lhs = make_node(Op::Sub, {lhs, parse_product()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                lhs = make_node(Op::Mul, {lhs, parse_unary()});
            } else if (accept('/')) {
                lhs = make_node(Op::Div, {lhs, parse_unary()});
            } else {
                return lhs;
            }
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_node(Op::Neg, {parse_unary()});
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        while (accept('^')) {
            skip_ws();
            const std::size_t at = pos_;
            bool negative = false;
            if (accept('-')) negative = true;
            NodePtr ex = parse_primary();
            if (ex->op != Op::Num || ex->value.imag() != 0.0 ||
                ex->value.real() != std::floor(ex->value.real()) || std::abs(ex->value.real()) > 1e6) {
                error_at(at, "non-integer exponent");
            }
            int n = static_cast<int>(ex->value.real());
            base = make_node(Op::Pow, {base}, negative ? -n : n);
        }
        return base;
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && std::isdigit(static_cast<unsigned char>(text_[look]))) {
                pos_ = look;
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            }
        }
        std::string token(text_.substr(start, pos_ - start));
        if (token == ".") error_at(start, "malformed number");
        return make_leaf(Op::Num, cd(std::stod(token), 0.0));
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= text_.size()) error("unexpected end of input");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            expect(')', "')' (unclosed parenthesis)");
            return inner;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
                ++pos_;
            }
            std::string ident(text_.substr(start, pos_ - start));
            skip_ws();
            const bool call = pos_ < text_.size() && text_[pos_] == '(';
            if (call) return parse_call(ident, start);
            if (ident == "i") return make_leaf(Op::Num, cd(0.0, 1.0));
            if (ident == "pi") return make_leaf(Op::Pi);
            if (ident == "sin" || ident == "cos" || ident == "exp" || ident == "ln" || ident == "sqrt" ||
                ident == "atan2") {
                error("expected '(' after function name '" + ident + "'");
            }
            return make_leaf(Op::Var, {}, ident);
        }
        error(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_call(const std::string& ident, std::size_t start) {
        Op op;
        std::size_t arity = 1;
        if (ident == "sin") op = Op::Sin;
        else if (ident == "cos") op = Op::Cos;
        else if (ident == "exp") op = Op::Exp;
        else if (ident == "ln") op = Op::Ln;
        else if (ident == "sqrt") op = Op::Sqrt;
        else if (ident == "atan2") {
            op = Op::Atan2;
            arity = 2;
        } else {
            error_at(start, "unknown function '" + ident + "'");
        }
        expect('(', "'('");
        std::vector<NodePtr> args;
        args.push_back(parse_sum());
        while (accept(',')) args.push_back(parse_sum());
        expect(')', "')' (unclosed parenthesis)");
        if (args.size() != arity) {
            error_at(start, ident + " expects " + std::to_string(arity) + " argument(s), got " +
                                std::to_string(args.size()));
        }
        return make_node(op, std::move(args));
    }
};

// ---------------------------------------------------------------------------
// Numeric helpers shared by the evaluator

cd int_pow(cd base, int n) {
    if (n == 0) return cd(1.0, 0.0);
    if (n < 0) {
        if (base == cd(0.0, 0.0)) fail(ErrorKind::Singularity, "division by zero (negative power of zero)");
        return cd(1.0, 0.0) / int_pow(base, -n);
    }
    cd result(1.0, 0.0);
    cd b = base;
    unsigned m = static_cast<unsigned>(n);
    while (m) {
        if (m & 1u) result *= b;
        b *= b;
        m >>= 1u;
    }
    return result;
}

bool nearly_real(cd z) { return std::abs(z.imag()) <= 1e-14 * std::max(1.0, std::abs(z.real())); }

cd apply_binary(Op op, cd a, cd b) {
    switch (op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div:
            if (b == cd(0.0, 0.0)) fail(ErrorKind::Singularity, "division by zero");
            return a / b;
        case Op::Atan2:
            if (!nearly_real(a) || !nearly_real(b)) {
                fail(ErrorKind::Evaluation, "atan2 requires real arguments");
            }
            return cd(std::atan2(a.real(), b.real()), 0.0);
        default: return {};
    }
}

cd apply_unary(Op op, cd a) {
    switch (op) {
        case Op::Neg: return -a;
        case Op::Sin: return std::sin(a);
        case Op::Cos: return std::cos(a);
        case Op::Exp: return std::exp(a);
        case Op::Ln:
            if (a == cd(0.0, 0.0)) fail(ErrorKind::Singularity, "ln(0)");
            return std::log(a);
        case Op::Sqrt: return std::sqrt(a);
        default: return {};
    }
}

// ---------------------------------------------------------------------------
// Printing

int precedence(const Node& n) {
    switch (n.op) {
        case Op::Add:
        case Op::Sub: return 1;
        case Op::Mul:
        case Op::Div: return 2;
        case Op::Neg: return 3;
        case Op::Pow: return 4;
        case Op::Num:
            // negative or complex literals print with their own parentheses
            return 5;
        default: return 5;
    }
}

std::string format_real(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string print(const Node& n);

std::string print_wrapped(const Node& child, int min_prec) {
    std::string s = print(child);
    return precedence(child) < min_prec ? "(" + s + ")" : s;
}

std::string print_number(cd v) {
    if (v.imag() == 0.0) {
        std::string s = format_real(v.real());
        return v.real() < 0.0 || std::signbit(v.real()) ? "(" + s + ")" : s;
    }
    if (v.real() == 0.0) {
        if (v.imag() == 1.0) return "i";
        return "(" + format_real(v.imag()) + "*i)";
    }
    return "(" + format_real(v.real()) + "+" + format_real(v.imag()) + "*i)";
}

std::string print(const Node& n) {
    switch (n.op) {
        case Op::Num: return print_number(n.value);
        case Op::Pi: return "pi";
        case Op::Var: return n.name;
        case Op::Add: return print_wrapped(*n.args[0], 1) + " + " + print_wrapped(*n.args[1], 2);
        case Op::Sub: return print_wrapped(*n.args[0], 1) + " - " + print_wrapped(*n.args[1], 2);
        case Op::Mul: return print_wrapped(*n.args[0], 2) + "*" + print_wrapped(*n.args[1], 3);
        case Op::Div: return print_wrapped(*n.args[0], 2) + "/" + print_wrapped(*n.args[1], 3);
        case Op::Neg: return "-" + print_wrapped(*n.args[0], 3);
        case Op::Pow: {
            // base must bind tighter than ^; exponents are integer literals
            std::string base = print(*n.args[0]);
            if (precedence(*n.args[0]) < 5 || n.args[0]->op == Op::Pow) base = "(" + base + ")";
            return base + "^" + (n.exponent < 0 ? "-" : "") + std::to_string(std::abs(n.exponent));
        }
        case Op::Atan2: return "atan2(" + print(*n.args[0]) + ", " + print(*n.args[1]) + ")";
        default: return std::string(fn_name(n.op)) + "(" + print(*n.args[0]) + ")";
    }
}

bool equal_nodes(const Node& a, const Node& b) {
    if (a.op != b.op) return false;
    switch (a.op) {
        case Op::Num: return a.value == b.value;
        case Op::Var: return a.name == b.name;
        case Op::Pow:
            if (a.exponent != b.exponent) return false;
            break;
        default: break;
    }
    if (a.args.size() != b.args.size()) return false;
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (!equal_nodes(*a.args[i], *b.args[i])) return false;
    }
    return true;
}

void collect_vars(const Node& n, std::set<std::string>& out) {
    if (n.op == Op::Var) out.insert(n.name);
    for (const auto& a : n.args) collect_vars(*a, out);
}

}  // namespace

// ---------------------------------------------------------------------------
// Expression

Expression::Expression() : node_(make_leaf(Op::Num, cd(0.0, 0.0))) {}
Expression::Expression(NodePtr node) : node_(std::move(node)) {}

Expression Expression::number(cd value) { return Expression(make_leaf(Op::Num, value)); }
Expression Expression::variable(std::string name) { return Expression(make_leaf(Op::Var, {}, std::move(name))); }
Expression Expression::pi() { return Expression(make_leaf(Op::Pi)); }

bool Expression::is_zero() const { return node_->op == Op::Num && node_->value == cd(0.0, 0.0); }
bool Expression::is_one() const { return node_->op == Op::Num && node_->value == cd(1.0, 0.0); }

std::set<std::string> Expression::free_variables() const {
    std::set<std::string> out;
    collect_vars(*node_, out);
    return out;
}

Expression operator+(const Expression& a, const Expression& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.is_number() && b.is_number()) return Expression::number(a.node().value + b.node().value);
    return Expression(make_node(Op::Add, {a.ptr(), b.ptr()}));
}

Expression operator-(const Expression& a, const Expression& b) {
    if (b.is_zero()) return a;
    if (a.is_zero()) return -b;
    if (a.is_number() && b.is_number()) return Expression::number(a.node().value - b.node().value);
    return Expression(make_node(Op::Sub, {a.ptr(), b.ptr()}));
}

Expression operator*(const Expression& a, const Expression& b) {
    if (a.is_zero() || b.is_zero()) return Expression();
    if (a.is_one()) return b;
    if (b.is_one()) return a;
    if (a.is_number() && b.is_number()) return Expression::number(a.node().value * b.node().value);
    return Expression(make_node(Op::Mul, {a.ptr(), b.ptr()}));
}

Expression operator/(const Expression& a, const Expression& b) {
    if (b.is_one()) return a;
    if (a.is_zero() && !b.is_zero()) return Expression();
    if (a.is_number() && b.is_number() && !b.is_zero()) {
        return Expression::number(a.node().value / b.node().value);
    }
    return Expression(make_node(Op::Div, {a.ptr(), b.ptr()}));
}

Expression operator-(const Expression& a) {
    if (a.is_number()) return Expression::number(-a.node().value);
    if (a.node().op == Op::Neg) return Expression(a.node().args[0]);
    return Expression(make_node(Op::Neg, {a.ptr()}));
}

Expression pow(const Expression& base, int exponent) {
    if (exponent == 0) return Expression::number(1.0);
    if (exponent == 1) return base;
    if (base.is_number() && !(base.is_zero() && exponent < 0)) {
        return Expression::number(int_pow(base.node().value, exponent));
    }
    return Expression(make_node(Op::Pow, {base.ptr()}, exponent));
}

namespace {
Expression unary_fn(Op op, const Expression& a) {
    if (a.is_number() && !(op == Op::Ln && a.is_zero())) {
        return Expression::number(apply_unary(op, a.node().value));
    }
    return Expression(make_node(op, {a.ptr()}));
}
}  // namespace

Expression sin(const Expression& a) { return unary_fn(Op::Sin, a); }
Expression cos(const Expression& a) { return unary_fn(Op::Cos, a); }
Expression exp(const Expression& a) { return unary_fn(Op::Exp, a); }
Expression ln(const Expression& a) { return unary_fn(Op::Ln, a); }
Expression sqrt(const Expression& a) { return unary_fn(Op::Sqrt, a); }

Expression atan2(const Expression& y, const Expression& x) {
    return Expression(make_node(Op::Atan2, {y.ptr(), x.ptr()}));
}

Expression parse(std::string_view text) { return Parser(text).run(); }

std::string to_string(const Expression& e) { return print(e.node()); }

bool structurally_equal(const Expression& a, const Expression& b) { return equal_nodes(a.node(), b.node()); }

cd eval(const Expression& e, const std::map<std::string, cd>& bindings) {
    std::vector<std::string> names;
    std::vector<cd> values;
    for (const auto& [name, value] : bindings) {
        names.push_back(name);
        values.push_back(value);
    }
    return Program(e, names)(values);
}

Expression differentiate(const Expression& e, const std::string& var) {
    const Node& n = e.node();
    auto arg = [&](std::size_t i) { return Expression(n.args[i]); };
    auto d = [&](std::size_t i) { return differentiate(arg(i), var); };
    switch (n.op) {
        case Op::Num:
        case Op::Pi: return Expression();
        case Op::Var: return Expression::number(n.name == var ? 1.0 : 0.0);
        case Op::Add: return d(0) + d(1);
        case Op::Sub: return d(0) - d(1);
        case Op::Mul: return d(0) * arg(1) + arg(0) * d(1);
        case Op::Div: {
            Expression du = d(0);
            Expression dv = d(1);
            if (dv.is_zero()) return du / arg(1);
            return (du * arg(1) - arg(0) * dv) / pow(arg(1), 2);
        }
        case Op::Pow: {
            Expression du = d(0);
            if (du.is_zero()) return Expression();
            return Expression::number(static_cast<double>(n.exponent)) * pow(arg(0), n.exponent - 1) * du;
        }
        case Op::Neg: return -d(0);
        case Op::Sin: return cos(arg(0)) * d(0);
        case Op::Cos: return -(sin(arg(0)) * d(0));
        case Op::Exp: return e * d(0);
        case Op::Ln: {
            Expression du = d(0);
            return du.is_zero() ? Expression() : du / arg(0);
        }
        case Op::Sqrt: {
            Expression du = d(0);
            return du.is_zero() ? Expression() : du / (Expression::number(2.0) * e);
        }
        case Op::Atan2: {
            // d atan2(y, x) = (x dy - y dx) / (x^2 + y^2)
            Expression dy = d(0);
            Expression dx = d(1);
            Expression num = arg(1) * dy - arg(0) * dx;
            if (num.is_zero()) return Expression();
            return num / (pow(arg(1), 2) + pow(arg(0), 2));
        }
    }
    return Expression();
}

Expression substitute(const Expression& e, const std::map<std::string, Expression>& replacements) {
    const Node& n = e.node();
    if (n.op == Op::Var) {
        auto it = replacements.find(n.name);
        return it == replacements.end() ? e : it->second;
    }
    if (n.args.empty()) return e;
    std::vector<NodePtr> args;
    args.reserve(n.args.size());
    for (const auto& a : n.args) args.push_back(substitute(Expression(a), replacements).ptr());
    return Expression(make_node(n.op, std::move(args), n.exponent));
}

// ---------------------------------------------------------------------------
// Program

namespace {
void emit(const Node& n, const std::vector<std::string>& variables, std::vector<Node const*>& order) {
    for (const auto& a : n.args) emit(*a, variables, order);
    order.push_back(&n);
}
}  // namespace

Program::Program(const Expression& e, const std::vector<std::string>& variables) {
    std::vector<Node const*> order;
    emit(e.node(), variables, order);
    std::size_t depth = 0;
    for (const Node* n : order) {
        Instr in{n->op};
        switch (n->op) {
            case Op::Num: in.value = n->value; break;
            case Op::Pi: in.op = Op::Num; in.value = cd(std::numbers::pi, 0.0); break;
            case Op::Var: {
                auto it = std::find(variables.begin(), variables.end(), n->name);
                if (it == variables.end()) fail(ErrorKind::Evaluation, "unbound variable '" + n->name + "'");
                in.slot = static_cast<int>(it - variables.begin());
                constant_ = false;
                break;
            }
            case Op::Pow: in.slot = n->exponent; break;
            default: break;
        }
        if (n->op == Op::Num || n->op == Op::Pi || n->op == Op::Var) {
            ++depth;
        } else if (n->op == Op::Add || n->op == Op::Sub || n->op == Op::Mul || n->op == Op::Div ||
                   n->op == Op::Atan2) {
            --depth;
        }
        max_depth_ = std::max(max_depth_, depth);
        code_.push_back(in);
    }
}

cd Program::operator()(std::span<const cd> values) const {
    constexpr std::size_t kInline = 48;
    std::array<cd, kInline> inline_stack;
    std::vector<cd> heap_stack;
    cd* stack = inline_stack.data();
    if (max_depth_ > kInline) {
        heap_stack.resize(max_depth_);
        stack = heap_stack.data();
    }
    std::size_t top = 0;
    for (const Instr& in : code_) {
        switch (in.op) {
            case Op::Num: stack[top++] = in.value; break;
            case Op::Var: stack[top++] = values[static_cast<std::size_t>(in.slot)]; break;
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div:
            case Op::Atan2: {
                cd b = stack[--top];
                stack[top - 1] = apply_binary(in.op, stack[top - 1], b);
                break;
            }
            case Op::Pow: stack[top - 1] = int_pow(stack[top - 1], in.slot); break;
            default: stack[top - 1] = apply_unary(in.op, stack[top - 1]); break;
        }
    }
    return code_.empty() ? cd{} : stack[0];
}

}  // namespace pathtrans
