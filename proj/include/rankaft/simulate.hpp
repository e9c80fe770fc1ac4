#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rankaft/data.hpp"
#include "rankaft/penalty.hpp"

namespace rankaft {

enum class ErrorDist { Logistic, Normal };

/// Placement of the true nonzero coefficients.
struct BetaStarSpec {
    enum class Kind { SparseOnes, Grouped };
    Kind kind = Kind::SparseOnes;
    /// SparseOnes: `count` randomly placed entries equal to `value`.
    std::size_t count = 10;
    double value = 1.0;
    /// Grouped: consecutive groups of `group_size`; in each group of
    /// `active_groups` (0-based, empty means the second and the last) the
    /// first `active_per_group` entries equal `group_value`.
    std::size_t group_size = 10;
    std::vector<std::size_t> active_groups;
    std::size_t active_per_group = 5;
    double group_value = 0.5;
};

struct SimConfig {
    std::size_t n = 100;
    std::size_t p = 50;
    double rho_ar = 0.5;
    BetaStarSpec beta_star;
    ErrorDist error = ErrorDist::Logistic;
    /// Logistic scale or normal standard deviation.
    double sigma = 2.0;
    /// Censoring times are exponential with mean equal to this quantile of the realized T.
    double censor_quantile = 0.6;
    std::size_t n_validation = 200;
    std::size_t n_test = 1000;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SimData {
    SurvivalDataset train;
    std::optional<SurvivalDataset> validation;
    /// Uncensored test set.
    SurvivalDataset test;
    Vector beta_star;
    Matrix sigma;
    /// Group id per coefficient, consecutive blocks of beta_star.group_size.
    std::vector<std::size_t> groups;
};

/// Draws X ~ N(0, Sigma) with Sigma_jk = rho^|j-k| through the AR(1) recurrence,
/// log T = X beta* + eps, C ~ Exp(mean = quantile of T), y = min(T, C).
SimData generate(const SimConfig& config);

/// `count` i.i.d. draws from the error distribution, as used by generate().
std::vector<double> draw_errors(ErrorDist dist, double sigma, std::size_t count, std::uint64_t seed);

/// Type-7 (linear interpolation) sample quantile.
double empirical_quantile(std::vector<double> values, double q);

struct MethodMetrics {
    std::string method;
    double concordance = 0.0;
    double model_error = 0.0;
    std::size_t nnz = 0;
    double runtime_ms = 0.0;
    double lambda = 0.0;
};

struct ComparisonConfig {
    SimConfig sim;
    PenaltyKind penalty = PenaltyKind::ElasticNet;
    double alpha = 0.5;
    std::size_t nlambda = 100;
    double kappa = 0.1;
    /// Also select the Gehan tuning parameter by K-fold linear-predictor CV.
    bool with_cv = false;
    std::size_t cv_folds = 10;
};

/// One replication of the rank-based versus weighted-least-squares comparison.
/// Both paths are tuned by the Gehan loss on the validation set; metrics are
/// computed on the uncensored test set.
std::vector<MethodMetrics> run_comparison(const ComparisonConfig& config);

}  // namespace rankaft
