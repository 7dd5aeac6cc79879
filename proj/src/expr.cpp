#include "woa/expr.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace woa {

struct Expression::Node {
    enum class Op {
        Const, Var, Add, Sub, Mul, Div, Pow, Neg,
        Exp, Log, Sqrt, Sin, Cos, Abs, Min, Max
    };
    Op op = Op::Const;
    double value = 0.0;
    std::shared_ptr<const Node> lhs, rhs;

    double eval(double x) const {
        switch (op) {
            case Op::Const: return value;
            case Op::Var: return x;
            case Op::Add: return lhs->eval(x) + rhs->eval(x);
            case Op::Sub: return lhs->eval(x) - rhs->eval(x);
            case Op::Mul: return lhs->eval(x) * rhs->eval(x);
            case Op::Div: return lhs->eval(x) / rhs->eval(x);
            case Op::Pow: return std::pow(lhs->eval(x), rhs->eval(x));
            case Op::Neg: return -lhs->eval(x);
            case Op::Exp: return std::exp(lhs->eval(x));
            case Op::Log: return std::log(lhs->eval(x));
            case Op::Sqrt: return std::sqrt(lhs->eval(x));
            case Op::Sin: return std::sin(lhs->eval(x));
            case Op::Cos: return std::cos(lhs->eval(x));
            case Op::Abs: return std::fabs(lhs->eval(x));
            case Op::Min: return std::min(lhs->eval(x), rhs->eval(x));
            case Op::Max: return std::max(lhs->eval(x), rhs->eval(x));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse() {
        auto n = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("ExpressionError", "trailing input: " + s_.substr(pos_));
        return n;
    }

private:
    using Node = Expression::Node;
    using Op = Node::Op;

    static NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr, double v = 0.0) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        n->value = v;
        return n;
    }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    NodePtr expr() {
        auto n = term();
        for (;;) {
            if (eat('+')) n = make(Op::Add, n, term());
            else if (eat('-')) n = make(Op::Sub, n, term());
            else return n;
        }
    }

    NodePtr term() {
        auto n = factor();
        for (;;) {
            if (eat('*')) n = make(Op::Mul, n, factor());
            else if (eat('/')) n = make(Op::Div, n, factor());
            else return n;
        }
    }

    NodePtr factor() {
        if (eat('-')) return make(Op::Neg, factor());
        if (eat('+')) return factor();
        auto base = atom();
        if (eat('^')) return make(Op::Pow, base, factor());  // right associative
        return base;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= s_.size()) fail("ExpressionError", "unexpected end of expression");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            auto n = expr();
            if (!eat(')')) fail("ExpressionError", "missing ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t end = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(pos_), &end);
            } catch (...) {
                fail("ExpressionError", "bad number near: " + s_.substr(pos_));
            }
            pos_ += end;
            return make(Op::Const, nullptr, nullptr, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
                ++pos_;
            }
            const std::string name = s_.substr(start, pos_ - start);
            if (name == "x") return make(Op::Var);
            if (name == "pi") return make(Op::Const, nullptr, nullptr, M_PI);
            if (name == "e") return make(Op::Const, nullptr, nullptr, M_E);
            static const std::vector<std::pair<std::string, Op>> unary = {
                {"exp", Op::Exp}, {"log", Op::Log}, {"sqrt", Op::Sqrt},
                {"sin", Op::Sin}, {"cos", Op::Cos}, {"abs", Op::Abs}};
            for (const auto& [fn, op] : unary) {
                if (name == fn) {
                    if (!eat('(')) fail("ExpressionError", fn + " needs '('");
                    auto arg = expr();
                    if (!eat(')')) fail("ExpressionError", "missing ')'");
                    return make(op, arg);
                }
            }
            if (name == "min" || name == "max") {
                if (!eat('(')) fail("ExpressionError", name + " needs '('");
                auto a = expr();
                if (!eat(',')) fail("ExpressionError", name + " needs two arguments");
                auto b = expr();
                if (!eat(')')) fail("ExpressionError", "missing ')'");
                return make(name == "min" ? Op::Min : Op::Max, a, b);
            }
            fail("ExpressionError", "unknown identifier: " + name);
        }
        fail("ExpressionError", std::string("unexpected character: ") + c);
    }

    const std::string& s_;
    size_t pos_ = 0;
};

} // namespace

Expression Expression::parse(const std::string& text) {
    Expression e;
    e.root_ = Parser(text).parse();
    e.text_ = text;
    return e;
}

double Expression::eval(double x) const { return root_->eval(x); }

ScalarFn Expression::as_function() const {
    auto root = root_;
    return [root](double x) { return root->eval(x); };
}

} // namespace woa
