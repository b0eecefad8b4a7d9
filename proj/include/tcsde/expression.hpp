#pragma once

#include <map>
#include <memory>
#include <string>

namespace tcsde {

/// Compiled scalar expression over the variables `t` and `x` plus named
/// parameters. Grammar: numbers, + - * / ^, unary minus, parentheses,
/// sin cos exp sqrt, the constant `pi`. `^` is right-associative.
class Expression {
public:
    struct Node;

    static Expression parse(const std::string& text,
                            const std::map<std::string, double>& params = {});

    double operator()(double t, double x) const;
    const std::string& text() const noexcept { return text_; }

private:
    Expression(std::string text, std::shared_ptr<const Node> root)
        : text_(std::move(text)), root_(std::move(root)) {}

    std::string text_;
    std::shared_ptr<const Node> root_;
};

}  // namespace tcsde
