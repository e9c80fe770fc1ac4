#pragma once

#include <functional>
#include <vector>

#include "rankaft/data.hpp"
#include "rankaft/penalty.hpp"

namespace rankaft {

/// Kaplan-Meier jump weights in sorted-time order.
struct KmWeights {
    /// xi[i] belongs to the i-th order statistic.
    Vector xi;
    /// sort_perm[i] is the original index of the i-th order statistic.
    std::vector<std::size_t> sort_perm;

    /// Weights re-indexed to the original subject order.
    Vector by_subject() const;
};

/// Order statistics are taken on y with events placed before censorings at equal times.
KmWeights km_weights(const SurvivalDataset& data);

struct WlsOptions {
    /// Stop when ||beta_k - beta_{k-1}|| <= tol * max(1, ||beta_k||).
    double tol = 1e-9;
    std::size_t max_iter = 100000;
    /// Weighted centering of log y and X, i.e. an unpenalized intercept.
    bool center = true;
    /// Called with (iteration, objective) after every accepted step.
    std::function<void(std::size_t, double)> on_iteration;
};

struct WlsResult {
    Vector beta_hat;
    double intercept = 0.0;
    double lambda = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double objective = 0.0;
};

/// Kaplan-Meier-weighted least squares problem
///   (1/2n) sum_i xi_i (log y_i - b0 - x_i' b)^2 + lambda g(b)
/// solved by accelerated proximal gradient with monotone restarts.
class WlsProblem {
public:
    explicit WlsProblem(const SurvivalDataset& data, bool center = true);

    std::size_t n() const { return static_cast<std::size_t>(x_.rows()); }
    std::size_t p() const { return static_cast<std::size_t>(x_.cols()); }

    /// Subject-ordered weights.
    const Vector& weights() const { return xi_; }
    /// Largest eigenvalue of (1/n) X_w' X_w with X_w = diag(sqrt xi) X (centered).
    double lipschitz() const { return lipschitz_; }

    double loss(const Vector& beta) const;
    Vector gradient(const Vector& beta) const;
    double intercept(const Vector& beta) const;

    /// Smallest lambda with an exactly zero fit.
    double lambda_max(const PenaltySpec& spec) const;

    WlsResult fit(const PenaltySpec& spec, double lambda, const WlsOptions& opts = {},
                  const Vector* init = nullptr) const;

private:
    Vector xi_;
    Matrix x_;
    Vector y_;
    Eigen::RowVectorXd x_mean_;
    double y_mean_ = 0.0;
    double lipschitz_ = 0.0;
};

/// One-shot convenience wrapper.
WlsResult fit_wls(const SurvivalDataset& data, const PenaltySpec& spec, double lambda, const WlsOptions& opts = {});

/// Warm-started fits over a decreasing lambda sequence.
std::vector<WlsResult> fit_wls_path(const WlsProblem& problem, const PenaltySpec& spec,
                                    const std::vector<double>& lambdas, const WlsOptions& opts = {});

}  // namespace rankaft
