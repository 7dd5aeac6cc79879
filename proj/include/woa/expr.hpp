#pragma once

#include <memory>
#include <string>

#include "woa/model.hpp"

namespace woa {

// Small arithmetic expression grammar for payoff and coefficient functions:
// + - * / ^, exp, log, sqrt, sin, cos, min, max, abs, numeric literals,
// constants pi and e, and the variable x.
class Expression {
public:
    static Expression parse(const std::string& text);

    double eval(double x) const;
    ScalarFn as_function() const;
    const std::string& text() const { return text_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace woa
