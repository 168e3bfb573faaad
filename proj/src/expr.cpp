#include "contact/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace contact {

namespace {

struct FunctionName
{
    std::string_view name;
    UnaryOp op;
};

constexpr FunctionName function_names[] = {
    {"sin", UnaryOp::sin}, {"cos", UnaryOp::cos}, {"exp", UnaryOp::exp}, {"log", UnaryOp::log}, {"sqrt", UnaryOp::sqrt},
};

const FunctionName* find_function(std::string_view name)
{
    for (const auto& f : function_names) {
        if (f.name == name) {
            return &f;
        }
    }
    return nullptr;
}

std::string_view function_name(UnaryOp op)
{
    for (const auto& f : function_names) {
        if (f.op == op) {
            return f.name;
        }
    }
    return "neg";
}

NodePtr make_node(Node node)
{
    return std::make_shared<const Node>(std::move(node));
}

const std::vector<std::string> operand_start = {"number", "identifier", "'('", "'-'"};

class Parser
{
public:
    explicit Parser(std::string_view source) : src_(source) {}

    Ast parse_all()
    {
        NodePtr root = expression();
        skip_space();
        if (pos_ != src_.size()) {
            fail({"operator", "end of input"}, "unexpected character");
        }
        return Ast(root);
    }

private:
    [[noreturn]] void fail(std::vector<std::string> expected, const std::string& detail) const
    {
        throw ParseError(pos_, std::move(expected), detail);
    }

    void skip_space()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_])) != 0) {
            ++pos_;
        }
    }

    bool peek(char c)
    {
        skip_space();
        return pos_ < src_.size() && src_[pos_] == c;
    }

    NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs)
    {
        Node n;
        n.kind = NodeKind::binary;
        n.binary_op = op;
        n.span = {lhs->span.begin, rhs->span.end};
        n.children = {std::move(lhs), std::move(rhs)};
        return make_node(std::move(n));
    }

    NodePtr negation(std::size_t begin, NodePtr operand)
    {
        Node n;
        n.kind = NodeKind::unary;
        n.unary_op = UnaryOp::neg;
        n.span = {begin, operand->span.end};
        n.children = {std::move(operand)};
        return make_node(std::move(n));
    }

    NodePtr expression()
    {
        NodePtr lhs = term();
        for (;;) {
            if (peek('+')) {
                ++pos_;
                lhs = binary(BinaryOp::add, lhs, term());
            } else if (peek('-')) {
                ++pos_;
                lhs = binary(BinaryOp::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term()
    {
        NodePtr lhs = unary();
        for (;;) {
            if (peek('*')) {
                ++pos_;
                lhs = binary(BinaryOp::mul, lhs, unary());
            } else if (peek('/')) {
                ++pos_;
                lhs = binary(BinaryOp::div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary()
    {
        if (peek('-')) {
            const std::size_t begin = pos_++;
            return negation(begin, unary());
        }
        return power();
    }

    NodePtr power()
    {
        NodePtr base = primary();
        if (peek('^')) {
            ++pos_;
            return binary(BinaryOp::pow, base, exponent());
        }
        return base;
    }

    NodePtr exponent()
    {
        if (peek('-')) {
            const std::size_t begin = pos_++;
            return negation(begin, exponent());
        }
        return power();
    }

    NodePtr primary()
    {
        skip_space();
        if (pos_ >= src_.size()) {
            fail(operand_start, "unexpected end of input");
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) != 0 || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) != 0) {
            return identifier();
        }
        if (c == '(') {
            ++pos_;
            NodePtr inner = expression();
            if (!peek(')')) {
                fail({"')'", "operator"}, "unbalanced parenthesis");
            }
            ++pos_;
            return inner;
        }
        fail(operand_start, std::string("unexpected character '") + c + "'");
    }

    NodePtr number()
    {
        const std::size_t begin = pos_;
        auto digits = [&] {
            const std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])) != 0) {
                ++pos_;
            }
            return pos_ - start;
        };
        std::size_t mantissa = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            mantissa += digits();
        }
        if (mantissa == 0) {
            fail({"digit"}, "malformed number");
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) {
                ++pos_;
            }
            if (digits() == 0) {
                fail({"digit"}, "malformed exponent");
            }
        }
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(src_.data() + begin, src_.data() + pos_, value);
        if (ec != std::errc() || ptr != src_.data() + pos_ || !std::isfinite(value)) {
            pos_ = begin;
            fail({"number"}, "number out of range");
        }
        Node n;
        n.kind = NodeKind::literal;
        n.literal = value;
        n.span = {begin, pos_};
        return make_node(std::move(n));
    }

    NodePtr identifier()
    {
        const std::size_t begin = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_])) != 0) {
            ++pos_;
        }
        std::string name(src_.substr(begin, pos_ - begin));
        if (const FunctionName* fn = find_function(name)) {
            if (!peek('(')) {
                fail({"'('"}, "function " + name + " needs an argument list");
            }
            ++pos_;
            NodePtr arg = expression();
            if (!peek(')')) {
                fail({"')'", "operator"}, "unbalanced parenthesis");
            }
            ++pos_;
            Node n;
            n.kind = NodeKind::call;
            n.name = std::move(name);
            n.unary_op = fn->op;
            n.span = {begin, pos_};
            n.children = {std::move(arg)};
            return make_node(std::move(n));
        }
        if (peek('(')) {
            pos_ = begin;
            fail({"sin", "cos", "exp", "log", "sqrt"}, "unknown function '" + name + "'");
        }
        Node n;
        n.kind = NodeKind::variable;
        n.name = std::move(name);
        n.span = {begin, pos_};
        return make_node(std::move(n));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

// Binding levels used by the printer.
enum Level : int { sum = 1, product = 2, prefix = 3, power_level = 4, atom = 5 };

struct Rendered
{
    std::string text;
    int level;
};

Rendered render(const Node& node);

std::string at_least(const Node& node, int level)
{
    Rendered r = render(node);
    return r.level >= level ? r.text : "(" + r.text + ")";
}

std::string render_exponent(const Node& node)
{
    if (node.kind == NodeKind::unary && node.unary_op == UnaryOp::neg) {
        return "-" + render_exponent(*node.children[0]);
    }
    return at_least(node, power_level);
}

std::string format_literal(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Rendered render(const Node& node)
{
    switch (node.kind) {
    case NodeKind::literal:
        return {format_literal(node.literal), node.literal < 0.0 ? int(prefix) : int(atom)};
    case NodeKind::variable: return {node.name, atom};
    case NodeKind::call:
        return {std::string(function_name(node.unary_op)) + "(" + render(*node.children[0]).text + ")", atom};
    case NodeKind::unary: return {"-" + at_least(*node.children[0], prefix), prefix};
    case NodeKind::binary: {
        const Node& l = *node.children[0];
        const Node& r = *node.children[1];
        switch (node.binary_op) {
        case BinaryOp::add: return {at_least(l, sum) + " + " + at_least(r, product), sum};
        case BinaryOp::sub: return {at_least(l, sum) + " - " + at_least(r, product), sum};
        case BinaryOp::mul: return {at_least(l, product) + "*" + at_least(r, prefix), product};
        case BinaryOp::div: return {at_least(l, product) + "/" + at_least(r, prefix), product};
        case BinaryOp::pow: return {at_least(l, atom) + "^" + render_exponent(r), power_level};
        }
    }
    }
    return {"?", atom};
}

bool nodes_equal(const Node& a, const Node& b)
{
    if (a.kind != b.kind || a.children.size() != b.children.size()) {
        return false;
    }
    switch (a.kind) {
    case NodeKind::literal:
        if (a.literal != b.literal) {
            return false;
        }
        break;
    case NodeKind::variable:
        if (a.name != b.name) {
            return false;
        }
        break;
    case NodeKind::unary:
    case NodeKind::call:
        if (a.unary_op != b.unary_op) {
            return false;
        }
        break;
    case NodeKind::binary:
        if (a.binary_op != b.binary_op) {
            return false;
        }
        break;
    }
    for (std::size_t i = 0; i < a.children.size(); ++i) {
        if (!nodes_equal(*a.children[i], *b.children[i])) {
            return false;
        }
    }
    return true;
}

void collect_variables(const Node& node, std::set<std::string>& out)
{
    if (node.kind == NodeKind::variable) {
        out.insert(node.name);
    }
    for (const auto& child : node.children) {
        collect_variables(*child, out);
    }
}

std::string join_expected(const std::vector<std::string>& expected)
{
    std::string s;
    for (std::size_t i = 0; i < expected.size(); ++i) {
        s += (i == 0 ? "" : ", ") + expected[i];
    }
    return s;
}

Chart indexed(std::string_view stem, std::size_t n)
{
    Chart c;
    for (std::size_t i = 1; i <= n; ++i) {
        c.push_back(std::string(stem) + std::to_string(i));
    }
    return c;
}

double apply_unary(UnaryOp op, double x)
{
    switch (op) {
    case UnaryOp::neg: return -x;
    case UnaryOp::sin: return std::sin(x);
    case UnaryOp::cos: return std::cos(x);
    case UnaryOp::exp: return std::exp(x);
    case UnaryOp::log:
        if (!(x > 0.0)) {
            throw std::domain_error("log of non-positive value " + std::to_string(x));
        }
        return std::log(x);
    case UnaryOp::sqrt:
        if (!(x > 0.0)) {
            throw std::domain_error("sqrt needs a positive argument, got " + std::to_string(x));
        }
        return std::sqrt(x);
    }
    return 0.0;
}

bool integer_exponent(double e)
{
    return std::trunc(e) == e && std::abs(e) <= double(1 << 20);
}

} // namespace

Ast::Ast(NodePtr root) : root_(std::move(root))
{
    if (!root_) {
        throw std::invalid_argument("empty expression tree");
    }
}

Ast Ast::literal(double value)
{
    Node n;
    n.kind = NodeKind::literal;
    n.literal = value;
    return Ast(make_node(std::move(n)));
}

Ast Ast::variable(std::string name)
{
    Node n;
    n.kind = NodeKind::variable;
    n.name = std::move(name);
    return Ast(make_node(std::move(n)));
}

Ast Ast::negate(const Ast& operand)
{
    Node n;
    n.kind = NodeKind::unary;
    n.unary_op = UnaryOp::neg;
    n.children = {operand.root_ptr()};
    return Ast(make_node(std::move(n)));
}

Ast Ast::binary(BinaryOp op, const Ast& lhs, const Ast& rhs)
{
    Node n;
    n.kind = NodeKind::binary;
    n.binary_op = op;
    n.children = {lhs.root_ptr(), rhs.root_ptr()};
    return Ast(make_node(std::move(n)));
}

Ast Ast::call(UnaryOp fn, const Ast& argument)
{
    if (fn == UnaryOp::neg) {
        return negate(argument);
    }
    Node n;
    n.kind = NodeKind::call;
    n.unary_op = fn;
    n.name = std::string(function_name(fn));
    n.children = {argument.root_ptr()};
    return Ast(make_node(std::move(n)));
}

bool structurally_equal(const Ast& a, const Ast& b)
{
    return nodes_equal(a.root(), b.root());
}

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& detail)
    : std::runtime_error("syntax error at offset " + std::to_string(offset) + ": " + detail + " (expected "
                         + join_expected(expected) + ")"),
      offset_(offset), expected_(std::move(expected))
{
}

Ast parse(std::string_view source)
{
    return Parser(source).parse_all();
}

std::string to_string(const Ast& ast)
{
    return render(ast.root()).text;
}

std::set<std::string> free_variables(const Ast& ast)
{
    std::set<std::string> names;
    collect_variables(ast.root(), names);
    return names;
}

Chart configuration_chart(std::size_t n)
{
    return indexed("q", n);
}

Chart extended_configuration_chart(std::size_t n)
{
    Chart c = indexed("q", n);
    c.emplace_back("z");
    return c;
}

Chart lagrangian_chart(std::size_t n)
{
    Chart c = indexed("q", n);
    for (auto& v : indexed("qd", n)) {
        c.push_back(std::move(v));
    }
    c.emplace_back("z");
    return c;
}

Chart hamiltonian_chart(std::size_t n)
{
    Chart c = indexed("q", n);
    for (auto& v : indexed("p", n)) {
        c.push_back(std::move(v));
    }
    c.emplace_back("z");
    return c;
}

UnboundIdentifier::UnboundIdentifier(const std::string& name)
    : std::invalid_argument("unbound identifier '" + name + "'"), name_(name)
{
}

ScalarField::ScalarField(Ast ast, Chart chart, Parameters parameters)
    : ast_(std::move(ast)), chart_(std::move(chart)), parameters_(std::move(parameters))
{
    for (const auto& name : chart_) {
        if (parameters_.contains(name)) {
            throw std::invalid_argument("'" + name + "' is both a chart variable and a parameter");
        }
    }
    compile(ast_.root());
}

ScalarField ScalarField::parse(std::string_view source, Chart chart, Parameters parameters)
{
    return ScalarField(contact::parse(source), std::move(chart), std::move(parameters));
}

ScalarField ScalarField::constant(double value, Chart chart)
{
    return ScalarField(Ast::literal(value), std::move(chart));
}

ScalarField ScalarField::rebased(Chart chart) const
{
    return ScalarField(ast_, std::move(chart), parameters_);
}

std::set<std::string> ScalarField::chart_dependencies() const
{
    std::set<std::string> deps;
    for (const auto& name : free_variables(ast_)) {
        if (!parameters_.contains(name)) {
            deps.insert(name);
        }
    }
    return deps;
}

bool ScalarField::compile(const Node& node)
{
    Instruction ins;
    switch (node.kind) {
    case NodeKind::literal:
        ins.code = Instruction::Code::constant;
        ins.value = node.literal;
        program_.push_back(ins);
        return true;
    case NodeKind::variable: {
        for (std::size_t i = 0; i < chart_.size(); ++i) {
            if (chart_[i] == node.name) {
                ins.code = Instruction::Code::variable;
                ins.index = i;
                program_.push_back(ins);
                return false;
            }
        }
        const auto it = parameters_.find(node.name);
        if (it == parameters_.end()) {
            throw UnboundIdentifier(node.name);
        }
        ins.code = Instruction::Code::constant;
        ins.value = it->second;
        program_.push_back(ins);
        return true;
    }
    case NodeKind::unary:
    case NodeKind::call: {
        const bool c = compile(*node.children[0]);
        ins.code = Instruction::Code::unary;
        ins.unary_op = node.unary_op;
        program_.push_back(ins);
        return c;
    }
    case NodeKind::binary: {
        const bool lhs = compile(*node.children[0]);
        const bool rhs = compile(*node.children[1]);
        ins.code = Instruction::Code::binary;
        ins.binary_op = node.binary_op;
        ins.constant_exponent = rhs;
        program_.push_back(ins);
        return lhs && rhs;
    }
    }
    return false;
}

Jet2 ScalarField::jet(std::span<const double> point) const
{
    if (point.size() != chart_.size()) {
        throw std::invalid_argument("point has " + std::to_string(point.size()) + " coordinates, chart has "
                                    + std::to_string(chart_.size()));
    }
    const auto m = static_cast<Eigen::Index>(chart_.size());
    std::vector<Jet2> stack;
    stack.reserve(program_.size());
    for (const Instruction& ins : program_) {
        switch (ins.code) {
        case Instruction::Code::constant: stack.push_back(Jet2::constant(ins.value, m)); break;
        case Instruction::Code::variable:
            stack.push_back(Jet2::variable(point[ins.index], static_cast<Eigen::Index>(ins.index), m));
            break;
        case Instruction::Code::unary: stack.back() = jet2_unary(ins.unary_op, stack.back()); break;
        case Instruction::Code::binary: {
            Jet2 rhs = std::move(stack.back());
            stack.pop_back();
            Jet2& lhs = stack.back();
            if (ins.binary_op == BinaryOp::pow) {
                if (ins.constant_exponent && integer_exponent(rhs.value())) {
                    lhs = pow(lhs, static_cast<int>(rhs.value()));
                } else {
                    if (!(lhs.value() > 0.0)) {
                        throw std::domain_error("non-integer power of non-positive base "
                                                + std::to_string(lhs.value()));
                    }
                    lhs = exp(rhs * log(lhs));
                }
            } else {
                lhs = jet2_binary(ins.binary_op, lhs, rhs);
            }
            break;
        }
        }
    }
    return std::move(stack.back());
}

double ScalarField::value(std::span<const double> point) const
{
    if (point.size() != chart_.size()) {
        throw std::invalid_argument("point has " + std::to_string(point.size()) + " coordinates, chart has "
                                    + std::to_string(chart_.size()));
    }
    std::vector<double> stack;
    stack.reserve(program_.size());
    for (const Instruction& ins : program_) {
        switch (ins.code) {
        case Instruction::Code::constant: stack.push_back(ins.value); break;
        case Instruction::Code::variable: stack.push_back(point[ins.index]); break;
        case Instruction::Code::unary: stack.back() = apply_unary(ins.unary_op, stack.back()); break;
        case Instruction::Code::binary: {
            const double b = stack.back();
            stack.pop_back();
            double& a = stack.back();
            switch (ins.binary_op) {
            case BinaryOp::add: a += b; break;
            case BinaryOp::sub: a -= b; break;
            case BinaryOp::mul: a *= b; break;
            case BinaryOp::div:
                if (b == 0.0) {
                    throw std::domain_error("division by zero");
                }
                a /= b;
                break;
            case BinaryOp::pow:
                if (ins.constant_exponent && integer_exponent(b)) {
                    // Same evaluation route as the jet path.
                    a = pow(Jet2::constant(a, 0), static_cast<int>(b)).value();
                } else {
                    if (!(a > 0.0)) {
                        throw std::domain_error("non-integer power of non-positive base " + std::to_string(a));
                    }
                    a = std::exp(b * std::log(a));
                }
                break;
            }
            break;
        }
        }
    }
    return stack.back();
}

Jet2 eval_jet2(const ScalarField& field, std::span<const double> point)
{
    return field.jet(point);
}

} // namespace contact
