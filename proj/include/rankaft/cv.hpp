#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rankaft/path.hpp"

namespace rankaft {

struct CvOptions {
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    /// Folds fitted concurrently; results do not depend on this.
    std::size_t threads = 1;
    SolverOptions solver;
};

struct CvResult {
    std::vector<double> lambdas;
    /// Pooled cross-validated linear predictor score (unnormalized double sum).
    std::vector<double> cv_linear_predictor;
    /// Within-fold Gehan loss, mean and standard error over folds.
    std::vector<double> cv_gehan_loss;
    std::vector<double> cv_gehan_se;
    std::vector<std::size_t> fold_assignment;
    double best_lambda_lp = 0.0;
    double best_lambda_1se = 0.0;
    std::size_t folds = 0;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

/// Random balanced partition of 0..n-1 into K folds; fold sizes differ by at most one.
std::vector<std::size_t> make_folds(std::size_t n, std::size_t folds, std::uint64_t seed);

/// fold_betas[k][m]: coefficients fitted without fold k at lambdas[m].
using FoldBetas = std::vector<std::vector<Vector>>;

FoldBetas fit_fold_paths(const SurvivalDataset& data, const PenaltySpec& spec, const std::vector<double>& lambdas,
                         const std::vector<std::size_t>& fold_of, std::size_t folds, const SolverOptions& opts,
                         std::size_t threads = 1);

/// sum_i sum_j delta_i (e~_i - e~_j)^- with e~_i taken from the model that did
/// not see subject i, one value per lambda.
std::vector<double> pooled_linear_predictor_score(const SurvivalDataset& data, const std::vector<std::size_t>& fold_of,
                                                  const FoldBetas& fold_betas);

struct FoldGehanLoss {
    std::vector<double> mean;
    std::vector<double> se;
    std::vector<std::string> warnings;
};

/// Per-fold held-out Gehan loss (normalized by |V_k|^2); folds with no
/// comparable pairs contribute zero and a warning.
FoldGehanLoss fold_gehan_loss(const SurvivalDataset& data, const std::vector<std::size_t>& fold_of,
                              const FoldBetas& fold_betas);

/// Index of the minimum; ties go to the smallest index (largest lambda).
std::size_t argmin_first(const std::vector<double>& values);

/// Largest lambda whose mean is within one standard error (taken at the minimum) of the minimum.
double one_se_rule(const std::vector<double>& mean, const std::vector<double>& se, const std::vector<double>& lambdas);

/// Both criteria from one set of fold fits.
CvResult cross_validate(const SurvivalDataset& data, const PenaltySpec& spec, const std::vector<double>& lambdas,
                        const CvOptions& opts = {});

}  // namespace rankaft
