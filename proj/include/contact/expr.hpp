#pragma once

// Expression language for Lagrangians, Hamiltonians and vector-field
// components.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' exponent)?
//   exponent:= '-' exponent | power
//   primary := number | identifier | function '(' expr ')' | '(' expr ')'
//
// '^' is right-associative and binds tighter than unary minus, so "-x^2" is
// -(x^2) and "2^3^2" is 2^9. Functions are sin, cos, exp, log, sqrt.

#include "contact/ad.hpp"

#include <cstddef>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace contact {

struct SourceSpan
{
    std::size_t begin = 0;
    std::size_t end = 0;
};

enum class NodeKind { literal, variable, unary, binary, call };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node
{
    NodeKind kind = NodeKind::literal;
    double literal = 0.0;
    std::string name; // variable or function name
    UnaryOp unary_op = UnaryOp::neg;
    BinaryOp binary_op = BinaryOp::add;
    std::vector<NodePtr> children;
    SourceSpan span;
};

/// Immutable expression tree.
class Ast
{
public:
    explicit Ast(NodePtr root);

    static Ast literal(double value);
    static Ast variable(std::string name);
    static Ast negate(const Ast& operand);
    static Ast binary(BinaryOp op, const Ast& lhs, const Ast& rhs);
    /// fn is one of sin, cos, exp, log, sqrt.
    static Ast call(UnaryOp fn, const Ast& argument);

    [[nodiscard]] const Node& root() const noexcept { return *root_; }
    [[nodiscard]] const NodePtr& root_ptr() const noexcept { return root_; }

private:
    NodePtr root_;
};

/// Equality of node kinds, operators, names and literal values; spans are ignored.
bool structurally_equal(const Ast& a, const Ast& b);

class ParseError : public std::runtime_error
{
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& detail);

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    [[nodiscard]] const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

Ast parse(std::string_view source);

/// Minimal-parenthesis rendering that reparses to a structurally equal tree.
std::string to_string(const Ast& ast);

std::set<std::string> free_variables(const Ast& ast);

using Parameters = std::map<std::string, double>;
using Chart = std::vector<std::string>;

Chart configuration_chart(std::size_t n);  // q1..qn
Chart extended_configuration_chart(std::size_t n); // q1..qn, z
Chart lagrangian_chart(std::size_t n);     // q1..qn, qd1..qdn, z
Chart hamiltonian_chart(std::size_t n);    // q1..qn, p1..pn, z

class UnboundIdentifier : public std::invalid_argument
{
public:
    explicit UnboundIdentifier(const std::string& name);
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// A real function of the chart variables, defined by an expression tree.
/// Chart variables are active in jet(); parameters are constants.
class ScalarField
{
public:
    /// Throws UnboundIdentifier if a free variable is neither a chart variable nor a parameter.
    ScalarField(Ast ast, Chart chart, Parameters parameters = {});

    static ScalarField parse(std::string_view source, Chart chart, Parameters parameters = {});
    static ScalarField constant(double value, Chart chart);

    [[nodiscard]] Jet2 jet(std::span<const double> point) const;
    [[nodiscard]] double value(std::span<const double> point) const;

    [[nodiscard]] const Ast& ast() const noexcept { return ast_; }
    [[nodiscard]] const Chart& chart() const noexcept { return chart_; }
    [[nodiscard]] const Parameters& parameters() const noexcept { return parameters_; }

    /// The same expression over another chart (e.g. a q-only field viewed on TQ x R).
    [[nodiscard]] ScalarField rebased(Chart chart) const;

    /// Free variables of the expression that are chart variables.
    [[nodiscard]] std::set<std::string> chart_dependencies() const;

private:
    struct Instruction
    {
        enum class Code { constant, variable, unary, binary } code = Code::constant;
        double value = 0.0;
        std::size_t index = 0;
        UnaryOp unary_op = UnaryOp::neg;
        BinaryOp binary_op = BinaryOp::add;
        // pow whose exponent subtree reads no chart variable
        bool constant_exponent = false;
    };

    // Returns true when the subtree is free of chart variables.
    bool compile(const Node& node);

    Ast ast_;
    Chart chart_;
    Parameters parameters_;
    std::vector<Instruction> program_;
};

Jet2 eval_jet2(const ScalarField& field, std::span<const double> point);

} // namespace contact
