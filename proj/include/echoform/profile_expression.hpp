#pragma once

// Recursive-descent parser for impedance profiles lambda(t):
//
//   expr   := term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := number | 't' | ('sin'|'cos') '(' expr ')' | '(' expr ')' | '-' factor
//
// Whitespace-insensitive. Syntax errors carry the byte offset.

#include <cctype>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

#include "echoform/forward_solver.hpp"

namespace echoform {

struct ProfileSyntaxError : std::runtime_error {
    std::size_t offset;
    ProfileSyntaxError(const std::string& msg, std::size_t off)
        : std::runtime_error(msg + " (byte " + std::to_string(off) + ")"), offset(off) {}
};

class ProfileExpression {
  public:
    static ProfileExpression parse(const std::string& text) {
        Parser p{text, 0};
        NodePtr root = p.expr();
        p.skip_ws();
        if (p.pos != text.size())
            throw ProfileSyntaxError("unexpected trailing input", p.pos);
        return ProfileExpression(std::move(root), text);
    }

    double eval(double t) const { return eval_node(*root_, t); }

    /// Canonical fully parenthesized rendering; reparsing it evaluates
    /// identically.
    std::string pretty() const { return print_node(*root_); }

    const std::string& text() const { return text_; }

    /// Impedance profile backed by this expression; positivity is validated
    /// (throws with a witness t when the profile is not strictly positive).
    ImpedanceProfile to_profile() const {
        auto root = root_;
        ImpedanceProfile p{[root](double t) { return eval_node(*root, t); }, text_};
        p.validate();
        return p;
    }

  private:
    enum class Op { Num, Var, Neg, Add, Sub, Mul, Sin, Cos };

    struct Node {
        Op op;
        double value = 0.0;
        std::shared_ptr<const Node> lhs, rhs;
    };
    using NodePtr = std::shared_ptr<const Node>;

    ProfileExpression(NodePtr root, std::string text)
        : root_(std::move(root)), text_(std::move(text)) {}

    static double eval_node(const Node& n, double t) {
        switch (n.op) {
            case Op::Num: return n.value;
            case Op::Var: return t;
            case Op::Neg: return -eval_node(*n.lhs, t);
            case Op::Add: return eval_node(*n.lhs, t) + eval_node(*n.rhs, t);
            case Op::Sub: return eval_node(*n.lhs, t) - eval_node(*n.rhs, t);
            case Op::Mul: return eval_node(*n.lhs, t) * eval_node(*n.rhs, t);
            case Op::Sin: return std::sin(eval_node(*n.lhs, t));
            case Op::Cos: return std::cos(eval_node(*n.lhs, t));
        }
        return 0.0;
    }

    static std::string print_node(const Node& n) {
        char buf[40];
        switch (n.op) {
            case Op::Num:
                std::snprintf(buf, sizeof(buf), "%.17g", n.value);
                return buf;
            case Op::Var: return "t";
            case Op::Neg: return "(-" + print_node(*n.lhs) + ")";
            case Op::Add: return "(" + print_node(*n.lhs) + "+" + print_node(*n.rhs) + ")";
            case Op::Sub: return "(" + print_node(*n.lhs) + "-" + print_node(*n.rhs) + ")";
            case Op::Mul: return "(" + print_node(*n.lhs) + "*" + print_node(*n.rhs) + ")";
            case Op::Sin: return "sin(" + print_node(*n.lhs) + ")";
            case Op::Cos: return "cos(" + print_node(*n.lhs) + ")";
        }
        return {};
    }

    struct Parser {
        const std::string& s;
        std::size_t pos;

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        char peek() {
            skip_ws();
            return pos < s.size() ? s[pos] : '\0';
        }
        bool accept(char c) {
            if (peek() == c) {
                ++pos;
                return true;
            }
            return false;
        }
        void expect(char c) {
            if (!accept(c))
                throw ProfileSyntaxError(std::string("expected '") + c + "'", pos);
        }

        NodePtr expr() {
            NodePtr n = term();
            for (;;) {
                if (accept('+')) n = make(Op::Add, n, term());
                else if (accept('-')) n = make(Op::Sub, n, term());
                else return n;
            }
        }

        NodePtr term() {
            NodePtr n = factor();
            while (accept('*')) n = make(Op::Mul, n, factor());
            return n;
        }

        NodePtr factor() {
            const char c = peek();
            if (c == '-') {
                ++pos;
                return make(Op::Neg, factor(), nullptr);
            }
            if (c == '(') {
                ++pos;
                NodePtr n = expr();
                expect(')');
                return n;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
            if (std::isalpha(static_cast<unsigned char>(c))) {
                const std::size_t start = pos;
                std::string id;
                while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos])))
                    id += s[pos++];
                if (id == "t") return make(Op::Var, nullptr, nullptr);
                if (id == "sin" || id == "cos") {
                    expect('(');
                    NodePtr arg = expr();
                    expect(')');
                    return make(id == "sin" ? Op::Sin : Op::Cos, arg, nullptr);
                }
                throw ProfileSyntaxError("unknown identifier '" + id + "'", start);
            }
            throw ProfileSyntaxError("expected number, 't', function, or '('", pos);
        }

        NodePtr number() {
            skip_ws();
            const std::size_t start = pos;
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(s.substr(start), &used);
            } catch (const std::exception&) {
                throw ProfileSyntaxError("malformed number", start);
            }
            pos = start + used;
            auto n = std::make_shared<Node>();
            n->op = Op::Num;
            n->value = v;
            return n;
        }

        static NodePtr make(Op op, NodePtr l, NodePtr r) {
            auto n = std::make_shared<Node>();
            n->op = op;
            n->lhs = std::move(l);
            n->rhs = std::move(r);
            return n;
        }
    };

    NodePtr root_;
    std::string text_;
};

}  // namespace echoform
