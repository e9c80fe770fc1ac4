#include "rankaft/admm.hpp"

#include <cmath>

namespace rankaft {

void SolverOptions::validate() const {
    constexpr double golden = 1.6180339887498949;
    if (!(rho_init > 0.0) || !std::isfinite(rho_init)) throw std::invalid_argument("rho must be positive");
    if (!(tau > 0.0 && tau < golden)) throw std::invalid_argument("tau must lie in (0, (1 + sqrt 5) / 2)");
    if (!(eps_abs > 0.0) || !(eps_rel > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (max_iter == 0) throw std::invalid_argument("max_iter must be positive");
}

void theta_update(const Vector& phi, const std::vector<std::uint8_t>& delta_first,
                  const std::vector<std::uint8_t>& delta_second, double rho, std::size_t n, Vector& out) {
    if (!(rho > 0.0)) throw std::invalid_argument("theta_update: rho must be positive");
    const auto m = static_cast<std::size_t>(phi.size());
    if (delta_first.size() != m || delta_second.size() != m) throw DataError("theta_update: dimension mismatch");
    const double scale = 1.0 / (rho * static_cast<double>(n) * static_cast<double>(n));
    out.resize(phi.size());
    for (std::size_t k = 0; k < m; ++k) {
        const double f = phi[static_cast<Eigen::Index>(k)];
        const double upper = delta_second[k] * scale;
        const double lower = delta_first[k] * scale;
        double t = 0.0;
        if (f > upper) {
            t = f - upper;
        } else if (f < -lower) {
            t = f + lower;
        }
        out[static_cast<Eigen::Index>(k)] = t;
    }
}

Vector theta_update(const Vector& phi, const ComparablePairSet& pairs, double rho) {
    Vector out;
    theta_update(phi, pairs.delta_first(), pairs.delta_second(), rho, pairs.n(), out);
    return out;
}

Vector beta_update(const SolverState& state, const PenaltySpec& spec, double lambda, const GehanProblem& problem) {
    const Vector direction = state.omega - state.gamma / state.rho - state.theta;
    Vector z = state.beta + problem.xt_pt(direction) / state.eta;
    if (lambda > 0.0) prox_inplace(spec, z, lambda / (state.rho * state.eta));
    return z;
}

Residuals residuals(const SolverState& state, const Vector& prev_theta, const GehanProblem& problem,
                    const SolverOptions& opts) {
    const double m = static_cast<double>(problem.pairs().size());
    const double p = static_cast<double>(problem.p());
    Residuals res{};
    res.primal = (state.theta - state.omega).norm();
    res.dual = state.rho * problem.xt_pt(state.theta - prev_theta).norm();
    const double pd_xb = (problem.pd_log_y() - state.omega).norm();
    res.eps_primal = opts.eps_abs * std::sqrt(m) +
                     opts.eps_rel * std::max({pd_xb, state.theta.norm(), problem.pd_log_y().norm()});
    res.eps_dual = opts.eps_abs * std::sqrt(p) + opts.eps_rel * problem.xt_pt(state.gamma).norm();
    return res;
}

std::size_t StepSizeSchedule::next() {
    while (true) {
        l_ = started_ ? 1.1 * (l_ + 1.0) : 1.0;
        started_ = true;
        const auto f = static_cast<std::size_t>(std::floor(l_));
        if (f > last_) {
            last_ = f;
            return f;
        }
    }
}

double maybe_update_rho(double rho, const Residuals& res) {
    const double primal = res.primal / res.eps_primal;
    const double dual = res.dual / res.eps_dual;
    if (primal > 10.0 * dual) return 2.0 * rho;
    if (dual > 10.0 * primal) return 0.5 * rho;
    return rho;
}

SolverState initial_state(const GehanProblem& problem, double rho) {
    const auto& pairs = problem.pairs();
    const double n = static_cast<double>(problem.n());
    const double inv_n2 = 1.0 / (n * n);
    SolverState s;
    s.beta = Vector::Zero(static_cast<Eigen::Index>(problem.p()));
    s.omega = problem.pd_log_y();
    s.theta = s.omega;
    s.gamma.resize(s.theta.size());
    // Gamma = -grad f_D(theta); tied pairs take 0, which lies inside their subdifferential.
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const double t = s.theta[static_cast<Eigen::Index>(k)];
        double g = 0.0;
        if (t > 0.0) {
            g = -pairs.delta_second()[k] * inv_n2;
        } else if (t < 0.0) {
            g = pairs.delta_first()[k] * inv_n2;
        }
        s.gamma[static_cast<Eigen::Index>(k)] = g;
    }
    s.rho = rho;
    s.eta = problem.eta();
    return s;
}

FitResult fit(const GehanProblem& problem, const PenaltySpec& spec, double lambda, const SolverOptions& opts,
              const std::optional<SolverState>& init) {
    opts.validate();
    spec.validate(problem.p());
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be nonnegative");

    const auto& data = problem.data();
    const auto& pairs = problem.pairs();
    const Matrix& x = data.x();
    const auto m = static_cast<Eigen::Index>(pairs.size());
    const auto p = static_cast<Eigen::Index>(problem.p());

    SolverState s;
    if (init) {
        s = *init;
        if (s.beta.size() != p || s.theta.size() != m || s.gamma.size() != m) {
            throw DataError("warm start has inconsistent dimensions");
        }
        if (!(s.rho > 0.0)) s.rho = opts.rho_init;
        s.eta = problem.eta();
        s.omega = pairs.apply(data.log_y() - x * s.beta);
    } else {
        s = initial_state(problem, opts.rho_init);
    }
    s.iter = 0;

    Vector direction(m), work_n, xt, z(p), beta_prev, theta_prev(m), phi(m), resid_n;
    StepSizeSchedule schedule;
    std::size_t next_update = schedule.next();
    Residuals res{};
    bool converged = false;
    const bool observe_beta = static_cast<bool>(opts.on_beta_step);

    for (std::size_t t = 1; t <= opts.max_iter; ++t) {
        s.iter = t;
        const double inv_rho = 1.0 / s.rho;

        // beta: prox-linear step on the augmented Lagrangian
        direction = s.omega - inv_rho * s.gamma - s.theta;
        pairs.apply_transpose(direction, work_n);
        xt.noalias() = x.transpose() * work_n;
        z = s.beta + xt / s.eta;
        if (lambda > 0.0) prox_inplace(spec, z, lambda / (s.rho * s.eta));
        if (observe_beta) beta_prev = s.beta;
        s.beta.swap(z);
        if (observe_beta) opts.on_beta_step(BetaStepEvent{t, beta_prev, s.beta, s.theta, s.gamma, s.rho});

        resid_n = data.log_y();
        resid_n.noalias() -= x * s.beta;
        pairs.apply(resid_n, s.omega);

        theta_prev.swap(s.theta);
        phi = s.omega - inv_rho * s.gamma;
        theta_update(phi, pairs.delta_first(), pairs.delta_second(), s.rho, problem.n(), s.theta);

        s.gamma.noalias() += (opts.tau * s.rho) * (s.theta - s.omega);

        res = residuals(s, theta_prev, problem, opts);
        if (opts.on_iteration) opts.on_iteration(s);
        if (res.converged()) {
            converged = true;
            break;
        }
        if (t == next_update) {
            if (opts.adaptive_rho && t <= opts.rho_freeze_after) s.rho = maybe_update_rho(s.rho, res);
            next_update = schedule.next();
        }
    }

    FitResult out;
    out.beta_hat = s.beta;
    out.lambda = lambda;
    out.iterations = s.iter;
    out.converged = converged;
    out.primal_residual = res.primal;
    out.dual_residual = res.dual;
    out.objective = gehan_objective(problem, spec, lambda, s.beta);
    out.rho_final = s.rho;
    out.state = std::move(s);
    return out;
}

}  // namespace rankaft
