#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace rbe {

/// Coefficient expression over parameter components mu_i.
///
/// Nodes are immutable and shared, so an Expr is a cheap handle onto a DAG.
/// Construction folds constants and the trivial identities x*1, x*0, x+0.
class Expr {
public:
    enum class Op : std::uint8_t { Const, Param, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Sqrt };

    struct Node {
        Op op = Op::Const;
        double value = 0.0; // Const
        int index = 0;      // Param component, or Pow exponent
        std::shared_ptr<const Node> a, b;
    };

    Expr(double c = 0.0); // NOLINT(google-explicit-constructor)
    static Expr param(int i);

    double eval(std::span<const double> mu) const;

    bool is_const() const { return node_->op == Op::Const; }
    bool is_zero() const { return is_const() && node_->value == 0.0; }
    bool is_one() const { return is_const() && node_->value == 1.0; }
    double const_value() const { return node_->value; }
    Op op() const { return node_->op; }
    const Node* node() const { return node_.get(); }

    std::string str() const;

    friend Expr operator+(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a, const Expr& b);
    friend Expr operator*(const Expr& a, const Expr& b);
    friend Expr operator/(const Expr& a, const Expr& b);
    friend Expr operator-(const Expr& a);
    friend Expr pow(const Expr& a, int n);
    friend Expr sin(const Expr& a);
    friend Expr cos(const Expr& a);
    friend Expr sqrt(const Expr& a);

    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }
    Expr& operator/=(const Expr& o) { return *this = *this / o; }

private:
    explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    static Expr make(Op op, Expr a, Expr b = Expr(), int index = 0);
    std::shared_ptr<const Node> node_;
};

/// Flat evaluation program for a list of expressions; shared subtrees are
/// evaluated once. This is what the online stage and the model archive use.
class Tape {
public:
    struct Instr {
        Expr::Op op = Expr::Op::Const;
        std::int32_t a = -1, b = -1;
        std::int32_t index = 0;
        double value = 0.0;
    };

    static Tape compile(const std::vector<Expr>& exprs);

    void eval(std::span<const double> mu, std::span<double> out, std::vector<double>& scratch) const;
    std::vector<double> eval(std::span<const double> mu) const;

    Expr expr(std::size_t k) const;

    std::size_t size() const { return outputs_.size(); }
    const std::vector<Instr>& code() const { return code_; }
    const std::vector<std::int32_t>& outputs() const { return outputs_; }

    static Tape from_parts(std::vector<Instr> code, std::vector<std::int32_t> outputs);

private:
    std::vector<Instr> code_;
    std::vector<std::int32_t> outputs_;
};

} // namespace rbe
