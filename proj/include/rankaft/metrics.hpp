#pragma once

#include <cstdint>
#include <vector>

#include "rankaft/data.hpp"

namespace rankaft {

/// Harrell's concordance between a predictor of (log) survival time and the
/// observed times. A pair is comparable when the times differ and the shorter
/// one is an event; ties in the predictor count one half. Longer predicted
/// time for the longer-lived subject counts as agreement.
double concordance(const Vector& lin_pred, const Vector& times, const std::vector<std::uint8_t>& delta);

/// Uncensored shorthand.
double concordance(const Vector& lin_pred, const Vector& times);

/// (b - b*)' Sigma (b - b*).
double model_error(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma);

/// Same, for Sigma_jk = rho^|j - k|, in O(p).
double model_error_ar1(const Vector& beta_hat, const Vector& beta_star, double rho);

Matrix ar1_covariance(std::size_t p, double rho);

}  // namespace rankaft
