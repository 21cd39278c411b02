#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cutguard/features.hpp"

namespace cutguard {

enum class FeatureId {
    St0,
    Lt0,
    St1Ratio,
    St1Diff,
    Lt1Ratio,
    Lt1Diff,
    Mdr,
    MdrShort,
    Mdrt,
    RunLength,
};

const char* feature_name(FeatureId id);

// Threshold expression over frame features. Written in a prefix s-expression
// syntax, e.g.  (> (* st0 st1_ratio) 287)  or
// (> st1_ratio (+ (exp (* -0.15 (- st0 170))) 1.03)).
//
// Constants may carry a name (bound through a classifier config's constant
// table), which is how the calibrator rewrites free thresholds in place.
struct ThresholdExpr {
    enum class Op {
        Const,
        Feature,
        Add,
        Sub, // unary form is negation
        Mul,
        Div,
        Exp,
        Gt,
        Lt,
        Ge,
        Le,
        And,
        Or,
        Not,
    };

    Op op = Op::Const;
    double value = 0.0;          // Op::Const
    std::string const_name;      // nonempty when the constant is named
    bool bound = true;           // false until a named constant is resolved
    FeatureId feature{};         // Op::Feature
    std::vector<ThresholdExpr> children;

    static ThresholdExpr constant(double v) {
        ThresholdExpr e;
        e.value = v;
        return e;
    }
    static ThresholdExpr feature_ref(FeatureId id) {
        ThresholdExpr e;
        e.op = Op::Feature;
        e.feature = id;
        return e;
    }
};

enum class ExprType { Number, Boolean };

// Static type check: comparisons take numbers, and/or/not take booleans,
// arithmetic takes numbers. Throws ConfigInvalid on arity or type errors.
ExprType check_expr(const ThresholdExpr& expr);

using ExprValue = std::variant<double, bool>;

// Throws InvalidFeature when the expression touches a feature that is not yet
// valid at this frame (first-order slots before two distances of a window
// kind exist, MDR slots before two distances have been observed).
ExprValue eval_expr(const ThresholdExpr& expr, const FrameFeatures& features);

// Same, but additionally reports |lhs - rhs| of the last numeric comparison
// evaluated. Used for calibration margins.
ExprValue eval_expr_margin(const ThresholdExpr& expr, const FrameFeatures& features,
                           double& last_comparison_gap);

// Parses one s-expression. Identifiers that are not feature names become
// named constants with unresolved (zero) values; bind_constant resolves them.
ThresholdExpr parse_expr(std::string_view text);

std::string format_expr(const ThresholdExpr& expr);

// Sets every named constant `name` in the tree to `value`.
// Returns the number of nodes rewritten.
std::size_t bind_constant(ThresholdExpr& expr, const std::string& name, double value);

// Collects the names of named constants, in first-appearance order.
std::vector<std::string> named_constants(const ThresholdExpr& expr);

} // namespace cutguard
