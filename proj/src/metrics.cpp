#include "rankaft/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace rankaft {

double concordance(const Vector& lin_pred, const Vector& times, const std::vector<std::uint8_t>& delta) {
    const auto n = lin_pred.size();
    if (times.size() != n || static_cast<Eigen::Index>(delta.size()) != n) {
        throw DataError("concordance: dimension mismatch");
    }
    double agree = 0.0;
    double comparable = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!delta[static_cast<std::size_t>(i)]) continue;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!(times[i] < times[j])) continue;
            comparable += 1.0;
            if (lin_pred[i] < lin_pred[j]) {
                agree += 1.0;
            } else if (lin_pred[i] == lin_pred[j]) {
                agree += 0.5;
            }
        }
    }
    if (comparable == 0.0) throw DataError("concordance: no comparable pairs");
    return agree / comparable;
}

double concordance(const Vector& lin_pred, const Vector& times) {
    return concordance(lin_pred, times, std::vector<std::uint8_t>(static_cast<std::size_t>(times.size()), 1));
}

double model_error(const Vector& beta_hat, const Vector& beta_star, const Matrix& sigma) {
    if (beta_hat.size() != beta_star.size() || sigma.rows() != beta_hat.size() || sigma.cols() != beta_hat.size()) {
        throw DataError("model_error: dimension mismatch");
    }
    const Vector d = beta_hat - beta_star;
    return std::max(0.0, d.dot(sigma * d));
}

double model_error_ar1(const Vector& beta_hat, const Vector& beta_star, double rho) {
    if (beta_hat.size() != beta_star.size()) throw DataError("model_error: dimension mismatch");
    // d' Sigma d = sum_j d_j s_j with s_j = sum_k rho^|j-k| d_k, via forward and backward AR sweeps.
    const Vector d = beta_hat - beta_star;
    const auto p = d.size();
    Vector fwd(p), bwd(p);
    double acc = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) fwd[j] = acc = rho * acc + d[j];
    acc = 0.0;
    for (Eigen::Index j = p; j-- > 0;) bwd[j] = acc = rho * acc + d[j];
    double total = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) total += d[j] * (fwd[j] + bwd[j] - d[j]);
    return std::max(0.0, total);
}

Matrix ar1_covariance(std::size_t p, double rho) {
    Matrix s(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (Eigen::Index j = 0; j < s.rows(); ++j) {
        for (Eigen::Index k = 0; k < s.cols(); ++k) s(j, k) = std::pow(rho, static_cast<double>(std::abs(j - k)));
    }
    return s;
}

}  // namespace rankaft
