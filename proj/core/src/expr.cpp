#include "cutguard/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "cutguard/errors.hpp"

namespace cutguard {
namespace {

using Op = ThresholdExpr::Op;

const std::map<std::string_view, FeatureId>& feature_table() {
    static const std::map<std::string_view, FeatureId> table = {
        {"st0", FeatureId::St0},
        {"lt0", FeatureId::Lt0},
        {"st1_ratio", FeatureId::St1Ratio},
        {"st1_diff", FeatureId::St1Diff},
        {"lt1_ratio", FeatureId::Lt1Ratio},
        {"lt1_diff", FeatureId::Lt1Diff},
        {"mdr", FeatureId::Mdr},
        {"mdr_short", FeatureId::MdrShort},
        {"mdrt", FeatureId::Mdrt},
        {"run_length", FeatureId::RunLength},
    };
    return table;
}

const std::map<std::string_view, Op>& op_table() {
    static const std::map<std::string_view, Op> table = {
        {"+", Op::Add},  {"-", Op::Sub},  {"*", Op::Mul}, {"/", Op::Div},
        {"exp", Op::Exp}, {">", Op::Gt},  {"<", Op::Lt},  {">=", Op::Ge},
        {"<=", Op::Le},  {"and", Op::And}, {"or", Op::Or}, {"not", Op::Not},
    };
    return table;
}

bool is_comparison(Op op) { return op == Op::Gt || op == Op::Lt || op == Op::Ge || op == Op::Le; }
bool is_logical(Op op) { return op == Op::And || op == Op::Or || op == Op::Not; }

double expect_number(const ExprValue& v, const char* where) {
    if (!std::holds_alternative<double>(v))
        throw ConfigInvalid(std::string("boolean operand where a number is required in ") + where);
    return std::get<double>(v);
}

bool expect_boolean(const ExprValue& v, const char* where) {
    if (!std::holds_alternative<bool>(v))
        throw ConfigInvalid(std::string("numeric operand where a boolean is required in ") + where);
    return std::get<bool>(v);
}

double feature_value(FeatureId id, const FrameFeatures& f) {
    switch (id) {
        case FeatureId::St0: return f.st0;
        case FeatureId::Lt0: return f.lt0;
        case FeatureId::St1Ratio:
        case FeatureId::St1Diff:
        case FeatureId::Lt1Ratio:
        case FeatureId::Lt1Diff:
            if (!f.first_order_valid)
                throw InvalidFeature(std::string(feature_name(id)) + " not yet valid at frame " +
                                     std::to_string(f.frame_index));
            switch (id) {
                case FeatureId::St1Ratio: return f.st1_ratio;
                case FeatureId::St1Diff: return f.st1_diff;
                case FeatureId::Lt1Ratio: return f.lt1_ratio;
                default: return f.lt1_diff;
            }
        case FeatureId::Mdr:
        case FeatureId::MdrShort:
            if (!f.mdr_valid)
                throw InvalidFeature(std::string(feature_name(id)) + " not yet valid at frame " +
                                     std::to_string(f.frame_index));
            return id == FeatureId::Mdr ? f.mdr : f.mdr_short;
        case FeatureId::Mdrt: return mdrt(f.run_length);
        case FeatureId::RunLength: return static_cast<double>(f.run_length);
    }
    throw ConfigInvalid("unknown feature id");
}

ExprValue eval_impl(const ThresholdExpr& e, const FrameFeatures& f, double* last_cmp_gap) {
    switch (e.op) {
        case Op::Const:
            if (!e.bound)
                throw ConfigInvalid("constant '" + e.const_name + "' was never bound to a value");
            return e.value;
        case Op::Feature: return feature_value(e.feature, f);
        case Op::Add:
            return expect_number(eval_impl(e.children[0], f, last_cmp_gap), "+") +
                   expect_number(eval_impl(e.children[1], f, last_cmp_gap), "+");
        case Op::Sub:
            if (e.children.size() == 1)
                return -expect_number(eval_impl(e.children[0], f, last_cmp_gap), "-");
            return expect_number(eval_impl(e.children[0], f, last_cmp_gap), "-") -
                   expect_number(eval_impl(e.children[1], f, last_cmp_gap), "-");
        case Op::Mul:
            return expect_number(eval_impl(e.children[0], f, last_cmp_gap), "*") *
                   expect_number(eval_impl(e.children[1], f, last_cmp_gap), "*");
        case Op::Div:
            return expect_number(eval_impl(e.children[0], f, last_cmp_gap), "/") /
                   expect_number(eval_impl(e.children[1], f, last_cmp_gap), "/");
        case Op::Exp:
            return std::exp(expect_number(eval_impl(e.children[0], f, last_cmp_gap), "exp"));
        case Op::Gt:
        case Op::Lt:
        case Op::Ge:
        case Op::Le: {
            const double lhs = expect_number(eval_impl(e.children[0], f, last_cmp_gap), "comparison");
            const double rhs = expect_number(eval_impl(e.children[1], f, last_cmp_gap), "comparison");
            if (last_cmp_gap) *last_cmp_gap = std::abs(lhs - rhs);
            switch (e.op) {
                case Op::Gt: return lhs > rhs;
                case Op::Lt: return lhs < rhs;
                case Op::Ge: return lhs >= rhs;
                default: return lhs <= rhs;
            }
        }
        case Op::And: {
            for (const auto& c : e.children)
                if (!expect_boolean(eval_impl(c, f, last_cmp_gap), "and")) return false;
            return true;
        }
        case Op::Or: {
            for (const auto& c : e.children)
                if (expect_boolean(eval_impl(c, f, last_cmp_gap), "or")) return true;
            return false;
        }
        case Op::Not:
            return !expect_boolean(eval_impl(e.children[0], f, last_cmp_gap), "not");
    }
    throw ConfigInvalid("unknown expression operator");
}

struct Token {
    enum class Kind { LParen, RParen, Atom } kind;
    std::string text;
};

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '#' || c == ';') {
            while (i < text.size() && text[i] != '\n') ++i;
        } else if (c == '(') {
            tokens.push_back({Token::Kind::LParen, "("});
            ++i;
        } else if (c == ')') {
            tokens.push_back({Token::Kind::RParen, ")"});
            ++i;
        } else {
            std::size_t j = i;
            while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) &&
                   text[j] != '(' && text[j] != ')' && text[j] != '#' && text[j] != ';')
                ++j;
            tokens.push_back({Token::Kind::Atom, std::string(text.substr(i, j - i))});
            i = j;
        }
    }
    return tokens;
}

bool parse_number(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

ThresholdExpr parse_atom(const std::string& atom) {
    double num = 0.0;
    if (parse_number(atom, num)) return ThresholdExpr::constant(num);
    const auto& feats = feature_table();
    if (auto it = feats.find(atom); it != feats.end())
        return ThresholdExpr::feature_ref(it->second);
    if (op_table().count(atom))
        throw ConfigInvalid("operator '" + atom + "' used as an operand");
    // Anything else is a named constant, resolved against the config's table.
    ThresholdExpr e = ThresholdExpr::constant(0.0);
    e.const_name = atom;
    e.bound = false;
    return e;
}

ThresholdExpr parse_tokens(const std::vector<Token>& tokens, std::size_t& pos) {
    if (pos >= tokens.size()) throw ConfigInvalid("unexpected end of expression");
    const Token& t = tokens[pos];
    if (t.kind == Token::Kind::Atom) {
        ++pos;
        return parse_atom(t.text);
    }
    if (t.kind == Token::Kind::RParen) throw ConfigInvalid("unexpected ')'");

    ++pos; // consume '('
    if (pos >= tokens.size() || tokens[pos].kind != Token::Kind::Atom)
        throw ConfigInvalid("expected an operator after '('");
    const std::string head = tokens[pos].text;
    const auto& ops = op_table();
    const auto it = ops.find(head);
    if (it == ops.end()) throw ConfigInvalid("unknown operator '" + head + "'");
    ++pos;

    ThresholdExpr e;
    e.op = it->second;
    while (pos < tokens.size() && tokens[pos].kind != Token::Kind::RParen)
        e.children.push_back(parse_tokens(tokens, pos));
    if (pos >= tokens.size()) throw ConfigInvalid("missing ')' in expression");
    ++pos; // consume ')'
    return e;
}

void check_arity(const ThresholdExpr& e) {
    const std::size_t n = e.children.size();
    switch (e.op) {
        case Op::Const:
        case Op::Feature:
            if (n != 0) throw ConfigInvalid("leaf node with operands");
            return;
        case Op::Sub:
            if (n != 1 && n != 2) throw ConfigInvalid("'-' takes one or two operands");
            return;
        case Op::Exp:
        case Op::Not:
            if (n != 1) throw ConfigInvalid("unary operator needs exactly one operand");
            return;
        case Op::And:
        case Op::Or:
            if (n < 2) throw ConfigInvalid("'and'/'or' need at least two operands");
            return;
        default:
            if (n != 2) throw ConfigInvalid("binary operator needs exactly two operands");
            return;
    }
}

} // namespace

const char* feature_name(FeatureId id) {
    switch (id) {
        case FeatureId::St0: return "st0";
        case FeatureId::Lt0: return "lt0";
        case FeatureId::St1Ratio: return "st1_ratio";
        case FeatureId::St1Diff: return "st1_diff";
        case FeatureId::Lt1Ratio: return "lt1_ratio";
        case FeatureId::Lt1Diff: return "lt1_diff";
        case FeatureId::Mdr: return "mdr";
        case FeatureId::MdrShort: return "mdr_short";
        case FeatureId::Mdrt: return "mdrt";
        case FeatureId::RunLength: return "run_length";
    }
    return "?";
}

ExprType check_expr(const ThresholdExpr& e) {
    check_arity(e);
    if (e.op == Op::Const || e.op == Op::Feature) return ExprType::Number;

    std::vector<ExprType> kinds;
    kinds.reserve(e.children.size());
    for (const auto& c : e.children) kinds.push_back(check_expr(c));

    if (is_comparison(e.op)) {
        for (ExprType k : kinds)
            if (k != ExprType::Number) throw ConfigInvalid("comparison over a boolean operand");
        return ExprType::Boolean;
    }
    if (is_logical(e.op)) {
        for (ExprType k : kinds)
            if (k != ExprType::Boolean) throw ConfigInvalid("logical operator over a numeric operand");
        return ExprType::Boolean;
    }
    for (ExprType k : kinds)
        if (k != ExprType::Number) throw ConfigInvalid("arithmetic over a boolean operand");
    return ExprType::Number;
}

ExprValue eval_expr(const ThresholdExpr& expr, const FrameFeatures& features) {
    return eval_impl(expr, features, nullptr);
}

ExprValue eval_expr_margin(const ThresholdExpr& expr, const FrameFeatures& features,
                           double& last_comparison_gap) {
    return eval_impl(expr, features, &last_comparison_gap);
}

ThresholdExpr parse_expr(std::string_view text) {
    const std::vector<Token> tokens = tokenize(text);
    if (tokens.empty()) throw ConfigInvalid("empty expression");
    std::size_t pos = 0;
    ThresholdExpr e = parse_tokens(tokens, pos);
    if (pos != tokens.size()) throw ConfigInvalid("trailing tokens after expression");
    check_expr(e);
    return e;
}

std::string format_expr(const ThresholdExpr& e) {
    std::ostringstream out;
    out.precision(17);
    switch (e.op) {
        case Op::Const:
            if (!e.const_name.empty())
                out << e.const_name;
            else
                out << e.value;
            return out.str();
        case Op::Feature:
            return feature_name(e.feature);
        default: {
            const char* head = nullptr;
            switch (e.op) {
                case Op::Add: head = "+"; break;
                case Op::Sub: head = "-"; break;
                case Op::Mul: head = "*"; break;
                case Op::Div: head = "/"; break;
                case Op::Exp: head = "exp"; break;
                case Op::Gt: head = ">"; break;
                case Op::Lt: head = "<"; break;
                case Op::Ge: head = ">="; break;
                case Op::Le: head = "<="; break;
                case Op::And: head = "and"; break;
                case Op::Or: head = "or"; break;
                case Op::Not: head = "not"; break;
                default: head = "?"; break;
            }
            out << '(' << head;
            for (const auto& c : e.children) out << ' ' << format_expr(c);
            out << ')';
            return out.str();
        }
    }
}

std::size_t bind_constant(ThresholdExpr& expr, const std::string& name, double value) {
    std::size_t hits = 0;
    if (expr.op == Op::Const && expr.const_name == name) {
        expr.value = value;
        expr.bound = true;
        ++hits;
    }
    for (auto& c : expr.children) hits += bind_constant(c, name, value);
    return hits;
}

std::vector<std::string> named_constants(const ThresholdExpr& expr) {
    std::vector<std::string> names;
    auto visit = [&](auto&& self, const ThresholdExpr& e) -> void {
        if (e.op == Op::Const && !e.const_name.empty() &&
            std::find(names.begin(), names.end(), e.const_name) == names.end())
            names.push_back(e.const_name);
        for (const auto& c : e.children) self(self, c);
    };
    visit(visit, expr);
    return names;
}

} // namespace cutguard
