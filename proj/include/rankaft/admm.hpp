#pragma once

#include <functional>
#include <optional>

#include "rankaft/gehan.hpp"
#include "rankaft/penalty.hpp"

namespace rankaft {

/// Prox-linear ADMM iterate. `omega` caches P_D(log y - X beta) for the current beta.
struct SolverState {
    Vector beta;
    Vector theta;
    Vector gamma;
    Vector omega;
    double rho = 0.1;
    double eta = 1.0;
    std::size_t iter = 0;
};

/// Passed to SolverOptions::on_beta_step right after each prox step, before theta moves.
struct BetaStepEvent {
    std::size_t iter;
    const Vector& beta_prev;
    const Vector& beta;
    const Vector& theta;
    const Vector& gamma;
    double rho;
};

struct SolverOptions {
    double rho_init = 0.1;
    /// Dual over-relaxation, in (0, (1 + sqrt 5) / 2).
    double tau = 1.0;
    double eps_abs = 1e-8;
    double eps_rel = 2.5e-4;
    std::size_t max_iter = 20000;
    bool adaptive_rho = true;
    /// No step-size changes after this iteration.
    std::size_t rho_freeze_after = 1000;

    std::function<void(const BetaStepEvent&)> on_beta_step;
    std::function<void(const SolverState&)> on_iteration;

    void validate() const;
};

struct FitResult {
    Vector beta_hat;
    double lambda = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    /// Penalized Gehan objective at beta_hat.
    double objective = 0.0;
    double rho_final = 0.0;
    /// Final iterate, for warm starts.
    SolverState state;
};

struct Residuals {
    double primal;
    double dual;
    double eps_primal;
    double eps_dual;

    bool converged() const { return primal <= eps_primal && dual <= eps_dual; }
};

/// Closed-form theta minimizer for phi = Omega - Gamma / rho.
///
///   theta_k = phi_k - d2/(rho n^2)   if phi_k >  d2/(rho n^2)
///   theta_k = phi_k + d1/(rho n^2)   if phi_k < -d1/(rho n^2)
///   theta_k = 0                      otherwise
///
/// where (d1, d2) are the censoring indicators of pair k.
void theta_update(const Vector& phi, const std::vector<std::uint8_t>& delta_first,
                  const std::vector<std::uint8_t>& delta_second, double rho, std::size_t n, Vector& out);
Vector theta_update(const Vector& phi, const ComparablePairSet& pairs, double rho);

/// The prox-linear beta step:
///   Prox_{(lambda/(rho eta)) g}[ eta^-1 X' P_D'(Omega - Gamma/rho - theta) + beta ].
Vector beta_update(const SolverState& state, const PenaltySpec& spec, double lambda, const GehanProblem& problem);

/// Primal/dual residuals and their tolerances at the current iterate.
Residuals residuals(const SolverState& state, const Vector& prev_theta, const GehanProblem& problem,
                    const SolverOptions& opts);

/// Iterations at which the step size may change: floor(l_k), l_1 = 1,
/// l_k = 1.1 (l_{k-1} + 1), with repeated floors dropped.
class StepSizeSchedule {
public:
    /// Next scheduled iteration.
    std::size_t next();

private:
    double l_ = 0.0;
    std::size_t last_ = 0;
    bool started_ = false;
};

/// Doubles rho when the scaled primal residual dominates the scaled dual one
/// by more than 10x, halves it in the opposite case. Gamma is carried
/// unscaled and needs no adjustment.
double maybe_update_rho(double rho, const Residuals& res);

/// The feasible starting point at beta = 0: theta = P_D log y, and Gamma the
/// dual that makes this theta stationary for the theta subproblem.
SolverState initial_state(const GehanProblem& problem, double rho);

/// Runs prox-linear ADMM until both residuals meet their tolerances or
/// `max_iter` is hit (reported through `converged`, not thrown).
FitResult fit(const GehanProblem& problem, const PenaltySpec& spec, double lambda, const SolverOptions& opts = {},
              const std::optional<SolverState>& init = std::nullopt);

}  // namespace rankaft
