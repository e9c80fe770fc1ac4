#include "rankaft/wls.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rankaft/lambda_max.hpp"
#include "rankaft/power.hpp"

namespace rankaft {

Vector KmWeights::by_subject() const {
    Vector out(xi.size());
    for (std::size_t i = 0; i < sort_perm.size(); ++i) out[static_cast<Eigen::Index>(sort_perm[i])] = xi[static_cast<Eigen::Index>(i)];
    return out;
}

KmWeights km_weights(const SurvivalDataset& data) {
    const std::size_t n = data.n();
    const auto& ly = data.log_y();
    const auto& delta = data.delta();

    KmWeights km;
    km.sort_perm.resize(n);
    std::iota(km.sort_perm.begin(), km.sort_perm.end(), 0);
    std::stable_sort(km.sort_perm.begin(), km.sort_perm.end(), [&](std::size_t a, std::size_t b) {
        const double ya = ly[static_cast<Eigen::Index>(a)];
        const double yb = ly[static_cast<Eigen::Index>(b)];
        if (ya != yb) return ya < yb;
        return delta[a] > delta[b];
    });

    km.xi.resize(static_cast<Eigen::Index>(n));
    const double nd = static_cast<double>(n);
    double survive = 1.0;  // prod_{j < i} ((n - j) / (n - j + 1))^{delta_(j)}, 1-based j
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t d = delta[km.sort_perm[i]];
        const double rank = static_cast<double>(i + 1);
        km.xi[static_cast<Eigen::Index>(i)] = d / (nd - rank + 1.0) * survive;
        if (d) survive *= (nd - rank) / (nd - rank + 1.0);
    }
    return km;
}

WlsProblem::WlsProblem(const SurvivalDataset& data, bool center)
    : xi_(km_weights(data).by_subject()), x_(data.x()), y_(data.log_y()) {
    const double total = xi_.sum();
    if (!(total > 0.0)) throw DataError("all Kaplan-Meier weights are zero");
    if (center) {
        x_mean_ = (xi_.transpose() * x_) / total;
        y_mean_ = xi_.dot(y_) / total;
    } else {
        x_mean_ = Eigen::RowVectorXd::Zero(x_.cols());
        y_mean_ = 0.0;
    }
    x_.rowwise() -= x_mean_;
    y_.array() -= y_mean_;

    const double nd = static_cast<double>(n());
    Vector xv;
    lipschitz_ = power_iteration(
                     [&](const Vector& in, Vector& out) {
                         xv.noalias() = x_ * in;
                         xv.array() *= xi_.array();
                         out.noalias() = x_.transpose() * xv / nd;
                     },
                     x_.cols()) *
                 1.01;
    if (!(lipschitz_ > 0.0)) lipschitz_ = 1.0;
}

double WlsProblem::loss(const Vector& beta) const {
    const Vector r = y_ - x_ * beta;
    return 0.5 * xi_.dot(r.cwiseAbs2()) / static_cast<double>(n());
}

Vector WlsProblem::gradient(const Vector& beta) const {
    Vector r = y_ - x_ * beta;
    r.array() *= xi_.array();
    return -(x_.transpose() * r) / static_cast<double>(n());
}

double WlsProblem::intercept(const Vector& beta) const {
    return y_mean_ - x_mean_.dot(beta);
}

double WlsProblem::lambda_max(const PenaltySpec& spec) const {
    spec.validate(p());
    const Vector g = gradient(Vector::Zero(static_cast<Eigen::Index>(p())));
    double best = 0.0;
    if (spec.kind == PenaltyKind::ElasticNet) {
        if (spec.alpha == 0.0) throw LambdaMaxError("alpha = 0 (ridge) never yields an exactly zero fit");
        for (Eigen::Index k = 0; k < g.size(); ++k) {
            if (spec.w[k] == 0.0) {
                if (g[k] != 0.0) throw LambdaMaxError("unpenalized coefficient with nonzero gradient at zero");
                continue;
            }
            best = std::max(best, std::abs(g[k]) / (spec.alpha * spec.w[k]));
        }
    } else {
        for (std::size_t grp = 0; grp < spec.groups.size(); ++grp) {
            const auto& members = spec.groups[grp];
            Vector sg(static_cast<Eigen::Index>(members.size())), wg(static_cast<Eigen::Index>(members.size()));
            for (std::size_t m = 0; m < members.size(); ++m) {
                sg[static_cast<Eigen::Index>(m)] = g[static_cast<Eigen::Index>(members[m])];
                wg[static_cast<Eigen::Index>(m)] = spec.w[static_cast<Eigen::Index>(members[m])];
            }
            best = std::max(best, group_kkt_lambda(sg, wg, spec.v[static_cast<Eigen::Index>(grp)], spec.alpha));
        }
    }
    if (!(best > 0.0)) throw LambdaMaxError("degenerate design: the weighted gradient at zero vanishes");
    return best * (1.0 + kLambdaMaxMargin);
}

WlsResult WlsProblem::fit(const PenaltySpec& spec, double lambda, const WlsOptions& opts, const Vector* init) const {
    spec.validate(p());
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be nonnegative");
    const double step = 1.0 / lipschitz_;
    auto objective = [&](const Vector& b) { return loss(b) + lambda * penalty_value(spec, b); };
    auto prox_step = [&](const Vector& from) {
        Vector z = from - step * gradient(from);
        if (lambda > 0.0) prox_inplace(spec, z, lambda * step);
        return z;
    };

    Vector beta = init ? *init : Vector::Zero(static_cast<Eigen::Index>(p()));
    Vector extrap = beta;
    double momentum = 1.0;
    double current = objective(beta);

    WlsResult out;
    out.lambda = lambda;
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        out.iterations = it;
        Vector candidate = prox_step(extrap);
        double cand_obj = objective(candidate);
        if (cand_obj > current) {
            // Restart from the last accepted point with a plain proximal gradient step.
            momentum = 1.0;
            candidate = prox_step(beta);
            cand_obj = objective(candidate);
        }
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const Vector delta = candidate - beta;
        extrap = candidate + ((momentum - 1.0) / next_momentum) * delta;
        momentum = next_momentum;
        beta = std::move(candidate);
        current = std::min(current, cand_obj);
        if (opts.on_iteration) opts.on_iteration(it, cand_obj);
        if (delta.norm() <= opts.tol * std::max(1.0, beta.norm())) {
            out.converged = true;
            break;
        }
    }
    out.beta_hat = beta;
    out.intercept = intercept(beta);
    out.objective = objective(beta);
    return out;
}

WlsResult fit_wls(const SurvivalDataset& data, const PenaltySpec& spec, double lambda, const WlsOptions& opts) {
    return WlsProblem(data, opts.center).fit(spec, lambda, opts);
}

std::vector<WlsResult> fit_wls_path(const WlsProblem& problem, const PenaltySpec& spec,
                                    const std::vector<double>& lambdas, const WlsOptions& opts) {
    std::vector<WlsResult> out;
    out.reserve(lambdas.size());
    for (double lambda : lambdas) {
        const Vector* init = out.empty() ? nullptr : &out.back().beta_hat;
        out.push_back(problem.fit(spec, lambda, opts, init));
    }
    return out;
}

}  // namespace rankaft
