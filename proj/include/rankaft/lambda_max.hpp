#pragma once

#include "rankaft/admm.hpp"

namespace rankaft {

/// No finite lambda zeroes the fit: an unpenalized coefficient has a nonzero
/// gradient at zero, alpha = 0 under the elastic net, or the design is degenerate.
class LambdaMaxError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Gradient of the Gehan loss at beta = 0 over strictly ordered pairs, and the
/// per-coordinate tie contribution:
///   linear[k] = n^-2 sum_ij delta_i (x_ik - x_jk) 1(y_i < y_j)
///   ties[k]   = n^-2 sum_{y_i = y_j} delta_i |x_ik - x_jk|
struct ZeroGradient {
    Vector linear;
    Vector ties;
    bool has_ties = false;
};

ZeroGradient gradient_at_zero(const SurvivalDataset& data);

/// Relative margin added on top of every computed lambda_max so the prox at
/// beta = 0 lands inside its threshold despite rounding.
inline constexpr double kLambdaMaxMargin = 1e-10;

/// Smallest lambda at which the elastic-net fit is exactly zero, from the KKT
/// bound with the tie term included.
double lambda_max_en(const SurvivalDataset& data, const PenaltySpec& spec);

/// Sparse-group-lasso lambda_max. Without ties this solves each group's
/// piecewise-quadratic KKT equation exactly; with ties it starts from a
/// conservative value and shrinks by 5% until the fitted coefficients leave
/// zero, returning the last value that kept them at zero.
double lambda_max_sgl(const GehanProblem& problem, const PenaltySpec& spec, const SolverOptions& opts = {});

/// Smallest lambda with || soft(s, alpha lambda w) ||_2 <= v (1 - alpha) lambda
/// for a single group. Throws LambdaMaxError when no finite lambda qualifies.
double group_kkt_lambda(const Vector& s, const Vector& w, double v, double alpha);

/// Dispatches on spec.kind.
double lambda_max(const GehanProblem& problem, const PenaltySpec& spec, const SolverOptions& opts = {});

}  // namespace rankaft
