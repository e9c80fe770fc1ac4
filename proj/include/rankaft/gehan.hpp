#pragma once

#include "rankaft/data.hpp"
#include "rankaft/penalty.hpp"

namespace rankaft {

/// Data, comparable pairs and the majorization constant, bundled once per
/// dataset and shared by every fit on it.
class GehanProblem {
public:
    explicit GehanProblem(SurvivalDataset data);
    /// Uses a caller-supplied eta; it must bound ||X' P' P X|| from above.
    GehanProblem(SurvivalDataset data, double eta);

    const SurvivalDataset& data() const { return data_; }
    const ComparablePairSet& pairs() const { return pairs_; }
    double eta() const { return eta_; }
    /// P_D log y, reused by every iteration's tolerance.
    const Vector& pd_log_y() const { return pd_log_y_; }

    std::size_t n() const { return data_.n(); }
    std::size_t p() const { return data_.p(); }

    /// X' P_D' u, through an n-vector workspace.
    Vector xt_pt(const Vector& u) const;

private:
    SurvivalDataset data_;
    ComparablePairSet pairs_;
    double eta_;
    Vector pd_log_y_;
};

/// Upper bound on the largest eigenvalue of X' P_D' P_D X by matrix-free power
/// iteration, inflated by 1%. Throws DataError when the operator is zero.
double estimate_eta(const SurvivalDataset& data, const ComparablePairSet& pairs);

/// a^- = max(-a, 0).
inline double neg_part(double a) { return a < 0.0 ? -a : 0.0; }

/// Gehan loss (1/n^2) sum_i sum_j delta_i (e_i - e_j)^- by the full double sum.
double gehan_loss_full(const SurvivalDataset& data, const Vector& beta);

/// Same loss evaluated over the comparable pairs only.
double gehan_loss_pairs(const SurvivalDataset& data, const ComparablePairSet& pairs, const Vector& beta);

/// Unnormalized double sum sum_i sum_j delta_i (e_i - e_j)^- for arbitrary residuals e.
double gehan_sum(const Vector& residuals, const std::vector<std::uint8_t>& delta);

/// Gehan loss plus lambda * g(beta).
double gehan_objective(const GehanProblem& problem, const PenaltySpec& spec, double lambda, const Vector& beta);

/// F_rho(theta, beta, Gamma) of the constrained pair formulation.
double augmented_lagrangian(const GehanProblem& problem, const PenaltySpec& spec, double lambda,
                            const Vector& theta, const Vector& beta, const Vector& gamma, double rho);

/// f_D(theta) = n^-2 sum_k { delta_i (theta_k)^- + delta_j (-theta_k)^- }.
double pair_loss(const ComparablePairSet& pairs, const Vector& theta);

}  // namespace rankaft
