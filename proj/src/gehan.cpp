#include "rankaft/gehan.hpp"

#include <cmath>

#include "rankaft/power.hpp"

namespace rankaft {

GehanProblem::GehanProblem(SurvivalDataset data)
    : data_(std::move(data)), pairs_(data_), eta_(estimate_eta(data_, pairs_)), pd_log_y_(pairs_.apply(data_.log_y())) {}

GehanProblem::GehanProblem(SurvivalDataset data, double eta)
    : data_(std::move(data)), pairs_(data_), eta_(eta), pd_log_y_(pairs_.apply(data_.log_y())) {
    if (!(eta_ > 0.0) || !std::isfinite(eta_)) throw DataError("eta must be positive");
}

Vector GehanProblem::xt_pt(const Vector& u) const {
    return data_.x().transpose() * pairs_.apply_transpose(u);
}

double estimate_eta(const SurvivalDataset& data, const ComparablePairSet& pairs) {
    constexpr double safety = 1.01;
    const Matrix& x = data.x();
    Vector xv, pxv, ptpxv;
    const double top = power_iteration(
        [&](const Vector& in, Vector& out) {
            xv.noalias() = x * in;
            pairs.apply(xv, pxv);
            pairs.apply_transpose(pxv, ptpxv);
            out.noalias() = x.transpose() * ptpxv;
        },
        x.cols());
    if (!(top > 0.0)) throw DataError("degenerate design: X' P_D' P_D X is zero");
    return safety * top;
}

double gehan_sum(const Vector& e, const std::vector<std::uint8_t>& delta) {
    const auto n = static_cast<std::size_t>(e.size());
    if (delta.size() != n) throw DataError("gehan_sum: dimension mismatch");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!delta[i]) continue;
        const double ei = e[static_cast<Eigen::Index>(i)];
        for (std::size_t j = 0; j < n; ++j) total += neg_part(ei - e[static_cast<Eigen::Index>(j)]);
    }
    return total;
}

double gehan_loss_full(const SurvivalDataset& data, const Vector& beta) {
    if (static_cast<std::size_t>(beta.size()) != data.p()) throw DataError("gehan_loss: dimension mismatch");
    const Vector e = data.log_y() - data.x() * beta;
    const double n = static_cast<double>(data.n());
    return gehan_sum(e, data.delta()) / (n * n);
}

double pair_loss(const ComparablePairSet& pairs, const Vector& theta) {
    if (static_cast<std::size_t>(theta.size()) != pairs.size()) throw DataError("pair_loss: dimension mismatch");
    const auto& di = pairs.delta_first();
    const auto& dj = pairs.delta_second();
    double total = 0.0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double t = theta[static_cast<Eigen::Index>(k)];
        total += di[k] * neg_part(t) + dj[k] * neg_part(-t);
    }
    const double n = static_cast<double>(pairs.n());
    return total / (n * n);
}

double gehan_loss_pairs(const SurvivalDataset& data, const ComparablePairSet& pairs, const Vector& beta) {
    if (static_cast<std::size_t>(beta.size()) != data.p()) throw DataError("gehan_loss: dimension mismatch");
    const Vector e = data.log_y() - data.x() * beta;
    return pair_loss(pairs, pairs.apply(e));
}

double gehan_objective(const GehanProblem& problem, const PenaltySpec& spec, double lambda, const Vector& beta) {
    return gehan_loss_pairs(problem.data(), problem.pairs(), beta) + lambda * penalty_value(spec, beta);
}

double augmented_lagrangian(const GehanProblem& problem, const PenaltySpec& spec, double lambda,
                            const Vector& theta, const Vector& beta, const Vector& gamma, double rho) {
    const auto& data = problem.data();
    const Vector omega = problem.pairs().apply(data.log_y() - data.x() * beta);
    const Vector gap = theta - omega;
    return pair_loss(problem.pairs(), theta) + lambda * penalty_value(spec, beta) + gamma.dot(gap) +
           0.5 * rho * gap.squaredNorm();
}

}  // namespace rankaft
