#include "tcsde/expression.hpp"

#include "tcsde/errors.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

namespace tcsde {

struct Expression::Node {
    enum class Kind { constant, var_t, var_x, neg, add, sub, mul, div, pow, sin, cos, exp, sqrt };

    Kind kind = Kind::constant;
    double value = 0.0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;

    double eval(double t, double x) const {
        switch (kind) {
            case Kind::constant: return value;
            case Kind::var_t: return t;
            case Kind::var_x: return x;
            case Kind::neg: return -lhs->eval(t, x);
            case Kind::add: return lhs->eval(t, x) + rhs->eval(t, x);
            case Kind::sub: return lhs->eval(t, x) - rhs->eval(t, x);
            case Kind::mul: return lhs->eval(t, x) * rhs->eval(t, x);
            case Kind::div: return lhs->eval(t, x) / rhs->eval(t, x);
            case Kind::pow: {
                const double base = lhs->eval(t, x);
                const double e = rhs->eval(t, x);
                // integer powers of negative bases, e.g. x^3
                if (e == std::round(e) && std::abs(e) < 64.0) {
                    return std::pow(base, static_cast<int>(e));
                }
                return std::pow(base, e);
            }
            case Kind::sin: return std::sin(lhs->eval(t, x));
            case Kind::cos: return std::cos(lhs->eval(t, x));
            case Kind::exp: return std::exp(lhs->eval(t, x));
            case Kind::sqrt: return std::sqrt(lhs->eval(t, x));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double value = 0.0) {
    auto n = std::make_shared<Expression::Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    n->value = value;
    return n;
}

class Parser {
public:
    Parser(const std::string& text, const std::map<std::string, double>& params)
        : text_(text), params_(params) {}

    NodePtr parse() {
        NodePtr root = expr();
        skip_ws();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ParseError("", "expression '" + text_ + "' at offset " + std::to_string(pos_) +
                                 ": " + why);
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Kind::add, lhs, term());
            } else if (accept('-')) {
                lhs = make(Kind::sub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = make(Kind::mul, lhs, unary());
            } else if (accept('/')) {
                lhs = make(Kind::div, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    NodePtr unary() {
        if (accept('-')) {
            return make(Kind::neg, unary());
        }
        if (accept('+')) {
            return unary();
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept('^')) {
            return make(Kind::pow, base, unary());
        }
        return base;
    }

    NodePtr primary() {
        skip_ws();
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = expr();
            if (!accept(')')) {
                fail("expected ')'");
            }
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            double v = 0.0;
            const char* first = text_.data() + pos_;
            const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), v);
            if (ec != std::errc()) {
                fail("malformed number");
            }
            pos_ += static_cast<std::size_t>(ptr - first);
            return make(Kind::constant, nullptr, nullptr, v);
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                           text_[pos_] == '_')) {
                ++pos_;
            }
            const std::string name = text_.substr(start, pos_ - start);
            if (name == "sin" || name == "cos" || name == "exp" || name == "sqrt") {
                if (!accept('(')) {
                    fail("expected '(' after " + name);
                }
                NodePtr arg = expr();
                if (!accept(')')) {
                    fail("expected ')'");
                }
                const Kind k = name == "sin"   ? Kind::sin
                               : name == "cos" ? Kind::cos
                               : name == "exp" ? Kind::exp
                                               : Kind::sqrt;
                return make(k, arg);
            }
            if (name == "t") {
                return make(Kind::var_t);
            }
            if (name == "x") {
                return make(Kind::var_x);
            }
            if (name == "pi") {
                return make(Kind::constant, nullptr, nullptr, std::numbers::pi);
            }
            if (auto it = params_.find(name); it != params_.end()) {
                return make(Kind::constant, nullptr, nullptr, it->second);
            }
            fail("unknown identifier '" + name + "'");
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    const std::string& text_;
    const std::map<std::string, double>& params_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text, const std::map<std::string, double>& params) {
    Parser p(text, params);
    return Expression(text, p.parse());
}

double Expression::operator()(double t, double x) const { return root_->eval(t, x); }

}  // namespace tcsde
