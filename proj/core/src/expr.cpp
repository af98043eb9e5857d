#include "rbelast/expr.hpp"

#include "rbelast/errors.hpp"

#include <cmath>
#include <sstream>
#include <unordered_map>

namespace rbe {

namespace {

double apply(Expr::Op op, double a, double b, int index)
{
    switch (op) {
    case Expr::Op::Add: return a + b;
    case Expr::Op::Sub: return a - b;
    case Expr::Op::Mul: return a * b;
    case Expr::Op::Div: return a / b;
    case Expr::Op::Neg: return -a;
    case Expr::Op::Pow: {
        double r = 1.0;
        const int n = index < 0 ? -index : index;
        for (int i = 0; i < n; ++i)
            r *= a;
        return index < 0 ? 1.0 / r : r;
    }
    case Expr::Op::Sin: return std::sin(a);
    case Expr::Op::Cos: return std::cos(a);
    case Expr::Op::Sqrt: return std::sqrt(a);
    default: break;
    }
    return 0.0;
}

bool is_binary(Expr::Op op)
{
    return op == Expr::Op::Add || op == Expr::Op::Sub || op == Expr::Op::Mul || op == Expr::Op::Div;
}

bool is_unary(Expr::Op op)
{
    return op == Expr::Op::Neg || op == Expr::Op::Pow || op == Expr::Op::Sin || op == Expr::Op::Cos ||
           op == Expr::Op::Sqrt;
}

} // namespace

Expr::Expr(double c)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Const;
    n->value = c;
    node_ = std::move(n);
}

Expr Expr::param(int i)
{
    auto n = std::make_shared<Node>();
    n->op = Op::Param;
    n->index = i;
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

Expr Expr::make(Op op, Expr a, Expr b, int index)
{
    auto n = std::make_shared<Node>();
    n->op = op;
    n->index = index;
    n->a = a.node_;
    if (is_binary(op))
        n->b = b.node_;
    return Expr(std::shared_ptr<const Node>(std::move(n)));
}

double Expr::eval(std::span<const double> mu) const
{
    const Node* n = node_.get();
    switch (n->op) {
    case Op::Const: return n->value;
    case Op::Param:
        if (n->index < 0 || static_cast<std::size_t>(n->index) >= mu.size())
            throw OutOfDomain("parameter index " + std::to_string(n->index) + " not provided");
        return mu[n->index];
    default: break;
    }
    const double a = Expr(n->a).eval(mu);
    const double b = n->b ? Expr(n->b).eval(mu) : 0.0;
    return apply(n->op, a, b, n->index);
}

Expr operator+(const Expr& a, const Expr& b)
{
    if (a.is_const() && b.is_const())
        return Expr(a.const_value() + b.const_value());
    if (a.is_zero())
        return b;
    if (b.is_zero())
        return a;
    return Expr::make(Expr::Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b)
{
    if (a.is_const() && b.is_const())
        return Expr(a.const_value() - b.const_value());
    if (b.is_zero())
        return a;
    if (a.is_zero())
        return -b;
    return Expr::make(Expr::Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b)
{
    if (a.is_const() && b.is_const())
        return Expr(a.const_value() * b.const_value());
    if (a.is_zero() || b.is_zero())
        return Expr(0.0);
    if (a.is_one())
        return b;
    if (b.is_one())
        return a;
    if (a.is_const() && a.const_value() == -1.0)
        return -b;
    if (b.is_const() && b.const_value() == -1.0)
        return -a;
    return Expr::make(Expr::Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b)
{
    if (a.is_const() && b.is_const() && b.const_value() != 0.0)
        return Expr(a.const_value() / b.const_value());
    if (a.is_zero())
        return Expr(0.0);
    if (b.is_one())
        return a;
    return Expr::make(Expr::Op::Div, a, b);
}

Expr operator-(const Expr& a)
{
    if (a.is_const())
        return Expr(-a.const_value());
    if (a.op() == Expr::Op::Neg)
        return Expr(a.node()->a);
    return Expr::make(Expr::Op::Neg, a);
}

Expr pow(const Expr& a, int n)
{
    if (n == 0)
        return Expr(1.0);
    if (n == 1)
        return a;
    if (a.is_const())
        return Expr(apply(Expr::Op::Pow, a.const_value(), 0.0, n));
    return Expr::make(Expr::Op::Pow, a, Expr(), n);
}

Expr sin(const Expr& a)
{
    if (a.is_const())
        return Expr(std::sin(a.const_value()));
    return Expr::make(Expr::Op::Sin, a);
}

Expr cos(const Expr& a)
{
    if (a.is_const())
        return Expr(std::cos(a.const_value()));
    return Expr::make(Expr::Op::Cos, a);
}

Expr sqrt(const Expr& a)
{
    if (a.is_const())
        return Expr(std::sqrt(a.const_value()));
    return Expr::make(Expr::Op::Sqrt, a);
}

std::string Expr::str() const
{
    std::ostringstream os;
    os.precision(17);
    const Node* n = node_.get();
    switch (n->op) {
    case Op::Const: os << n->value; break;
    case Op::Param: os << "mu" << n->index; break;
    case Op::Add: os << "(" << Expr(n->a).str() << " + " << Expr(n->b).str() << ")"; break;
    case Op::Sub: os << "(" << Expr(n->a).str() << " - " << Expr(n->b).str() << ")"; break;
    case Op::Mul: os << Expr(n->a).str() << "*" << Expr(n->b).str(); break;
    case Op::Div: os << Expr(n->a).str() << "/(" << Expr(n->b).str() << ")"; break;
    case Op::Neg: os << "-(" << Expr(n->a).str() << ")"; break;
    case Op::Pow: os << "(" << Expr(n->a).str() << ")^" << n->index; break;
    case Op::Sin: os << "sin(" << Expr(n->a).str() << ")"; break;
    case Op::Cos: os << "cos(" << Expr(n->a).str() << ")"; break;
    case Op::Sqrt: os << "sqrt(" << Expr(n->a).str() << ")"; break;
    }
    return os.str();
}

// ---------------------------------------------------------------------------

Tape Tape::compile(const std::vector<Expr>& exprs)
{
    Tape t;
    std::unordered_map<const Expr::Node*, std::int32_t> slot;

    // iterative post-order so deep sums do not blow the stack
    auto emit = [&](const Expr::Node* root) {
        std::vector<std::pair<const Expr::Node*, bool>> stack{{root, false}};
        while (!stack.empty()) {
            auto [n, expanded] = stack.back();
            stack.pop_back();
            if (slot.count(n))
                continue;
            if (!expanded) {
                stack.emplace_back(n, true);
                if (n->b)
                    stack.emplace_back(n->b.get(), false);
                if (n->a)
                    stack.emplace_back(n->a.get(), false);
                continue;
            }
            Instr ins;
            ins.op = n->op;
            ins.index = n->index;
            ins.value = n->value;
            if (n->a)
                ins.a = slot.at(n->a.get());
            if (n->b)
                ins.b = slot.at(n->b.get());
            slot[n] = static_cast<std::int32_t>(t.code_.size());
            t.code_.push_back(ins);
        }
        return slot.at(root);
    };

    for (const Expr& e : exprs)
        t.outputs_.push_back(emit(e.node()));
    return t;
}

Tape Tape::from_parts(std::vector<Instr> code, std::vector<std::int32_t> outputs)
{
    const auto n = static_cast<std::int32_t>(code.size());
    for (std::int32_t i = 0; i < n; ++i) {
        const Instr& ins = code[i];
        const auto op = static_cast<int>(ins.op);
        if (op < 0 || op > static_cast<int>(Expr::Op::Sqrt))
            throw ArchiveError("bad opcode in expression tape");
        if (is_binary(ins.op) && (ins.a < 0 || ins.a >= i || ins.b < 0 || ins.b >= i))
            throw ArchiveError("bad operand in expression tape");
        if (is_unary(ins.op) && (ins.a < 0 || ins.a >= i))
            throw ArchiveError("bad operand in expression tape");
    }
    for (auto o : outputs)
        if (o < 0 || o >= n)
            throw ArchiveError("bad output slot in expression tape");
    Tape t;
    t.code_ = std::move(code);
    t.outputs_ = std::move(outputs);
    return t;
}

void Tape::eval(std::span<const double> mu, std::span<double> out, std::vector<double>& scratch) const
{
    scratch.resize(code_.size());
    for (std::size_t i = 0; i < code_.size(); ++i) {
        const Instr& ins = code_[i];
        switch (ins.op) {
        case Expr::Op::Const: scratch[i] = ins.value; break;
        case Expr::Op::Param:
            if (ins.index < 0 || static_cast<std::size_t>(ins.index) >= mu.size())
                throw OutOfDomain("parameter index " + std::to_string(ins.index) + " not provided");
            scratch[i] = mu[ins.index];
            break;
        default:
            scratch[i] = apply(ins.op, scratch[ins.a], ins.b >= 0 ? scratch[ins.b] : 0.0, ins.index);
        }
    }
    for (std::size_t k = 0; k < outputs_.size(); ++k)
        out[k] = scratch[outputs_[k]];
}

std::vector<double> Tape::eval(std::span<const double> mu) const
{
    std::vector<double> out(outputs_.size()), scratch;
    eval(mu, out, scratch);
    return out;
}

Expr Tape::expr(std::size_t k) const
{
    std::vector<Expr> built;
    built.reserve(code_.size());
    const auto last = outputs_.at(k);
    for (std::int32_t i = 0; i <= last; ++i) {
        const Instr& ins = code_[i];
        switch (ins.op) {
        case Expr::Op::Const: built.emplace_back(ins.value); break;
        case Expr::Op::Param: built.push_back(Expr::param(ins.index)); break;
        case Expr::Op::Add: built.push_back(built[ins.a] + built[ins.b]); break;
        case Expr::Op::Sub: built.push_back(built[ins.a] - built[ins.b]); break;
        case Expr::Op::Mul: built.push_back(built[ins.a] * built[ins.b]); break;
        case Expr::Op::Div: built.push_back(built[ins.a] / built[ins.b]); break;
        case Expr::Op::Neg: built.push_back(-built[ins.a]); break;
        case Expr::Op::Pow: built.push_back(pow(built[ins.a], ins.index)); break;
        case Expr::Op::Sin: built.push_back(sin(built[ins.a])); break;
        case Expr::Op::Cos: built.push_back(cos(built[ins.a])); break;
        case Expr::Op::Sqrt: built.push_back(sqrt(built[ins.a])); break;
        }
    }
    return built[last];
}

} // namespace rbe
