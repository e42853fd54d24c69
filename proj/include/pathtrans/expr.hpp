#pragma once

// Small expression language over complex scalars with exact symbolic
// partial differentiation. Carrier for user-supplied potentials, gauge
// functions and path components.

#include <complex>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pathtrans {

using cd = std::complex<double>;

enum class Op { Num, Pi, Var, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Ln, Sqrt, Atan2 };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    Op op;
    cd value{};              // Num
    std::string name;        // Var
    int exponent = 0;        // Pow
    std::vector<NodePtr> args;
};

/// Immutable handle to an expression tree. Default-constructed value is the literal 0.
class Expression {
public:
    Expression();
    explicit Expression(NodePtr node);

    static Expression number(cd value);
    static Expression variable(std::string name);
    static Expression pi();

    const Node& node() const { return *node_; }
    const NodePtr& ptr() const { return node_; }

    bool is_number() const { return node_->op == Op::Num; }
    bool is_zero() const;
    bool is_one() const;

    std::set<std::string> free_variables() const;

private:
    NodePtr node_;
};

// Simplifying constructors: constant folding and 0/1 elimination only.
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression operator-(const Expression& a);
Expression pow(const Expression& base, int exponent);
Expression sin(const Expression& a);
Expression cos(const Expression& a);
Expression exp(const Expression& a);
Expression ln(const Expression& a);
Expression sqrt(const Expression& a);
Expression atan2(const Expression& y, const Expression& x);

/// Parses with precedence ^ > unary minus > * / > + -, all binary operators
/// left-associative. Throws Error(Syntax) with a 1-based position.
Expression parse(std::string_view text);

/// Evaluates with every free variable bound. ln uses the principal branch.
cd eval(const Expression& e, const std::map<std::string, cd>& bindings);

Expression differentiate(const Expression& e, const std::string& var);

Expression substitute(const Expression& e, const std::map<std::string, Expression>& replacements);

/// Printed form re-parses to the same tree.
std::string to_string(const Expression& e);

bool structurally_equal(const Expression& a, const Expression& b);

/// Expression flattened to postfix code with variables resolved to slots.
/// Evaluation is allocation-free for trees of modest depth.
class Program {
public:
    Program() = default;
    Program(const Expression& e, const std::vector<std::string>& variables);

    cd operator()(std::span<const cd> values) const;

    bool is_constant() const { return constant_; }

private:
    struct Instr {
        Op op;
        int slot = 0;
        cd value{};
    };
    std::vector<Instr> code_;
    std::size_t max_depth_ = 0;
    bool constant_ = true;
};

}  // namespace pathtrans
