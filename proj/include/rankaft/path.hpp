#pragma once

#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "rankaft/admm.hpp"

namespace rankaft {

using SparseVector = Eigen::SparseVector<double>;

/// Coefficients with magnitude below this are stored as exact zeros.
inline constexpr double kPathZeroThreshold = 1e-10;

struct PathOptions {
    std::size_t nlambda = 100;
    double kappa = 0.25;
    /// Overrides the computed path head, e.g. when some coefficients are unpenalized.
    std::optional<double> lambda_max;
    /// Cold-start every grid point instead of reusing the previous solution.
    bool warm_start = true;
    SolverOptions solver;
};

struct SolutionPath {
    std::vector<double> lambdas;
    std::vector<SparseVector> betas;
    std::vector<std::size_t> nnz;
    std::vector<std::size_t> iterations;
    std::vector<bool> converged;
    std::vector<double> objectives;
    double alpha = 1.0;
    PenaltyKind kind = PenaltyKind::ElasticNet;

    std::size_t size() const { return lambdas.size(); }
    Vector beta(std::size_t m) const { return Vector(betas[m]); }
};

SparseVector sparsify(const Vector& beta, double threshold = kPathZeroThreshold);

/// Fits the decreasing sequence `lambdas` in order, each from the previous solution.
SolutionPath fit_path_at(const GehanProblem& problem, const PenaltySpec& spec, const std::vector<double>& lambdas,
                         const SolverOptions& opts = {}, bool warm_start = true);

/// Computes lambda_max for the penalty, lays the log grid down to kappa * lambda_max
/// and fits it with warm starts.
SolutionPath fit_path(const GehanProblem& problem, const PenaltySpec& spec, const PathOptions& opts = {});

}  // namespace rankaft
