#include "rankaft/path.hpp"

#include "rankaft/lambda_max.hpp"

namespace rankaft {

SparseVector sparsify(const Vector& beta, double threshold) {
    SparseVector out(beta.size());
    for (Eigen::Index k = 0; k < beta.size(); ++k) {
        if (std::abs(beta[k]) >= threshold) out.insert(k) = beta[k];
    }
    return out;
}

SolutionPath fit_path_at(const GehanProblem& problem, const PenaltySpec& spec, const std::vector<double>& lambdas,
                         const SolverOptions& opts, bool warm_start) {
    for (std::size_t m = 1; m < lambdas.size(); ++m) {
        if (!(lambdas[m] < lambdas[m - 1])) throw std::invalid_argument("path lambdas must be strictly decreasing");
    }
    SolutionPath path;
    path.alpha = spec.alpha;
    path.kind = spec.kind;
    std::optional<SolverState> state;
    for (double lambda : lambdas) {
        auto result = fit(problem, spec, lambda, opts, warm_start ? state : std::nullopt);
        path.lambdas.push_back(lambda);
        path.betas.push_back(sparsify(result.beta_hat));
        path.nnz.push_back(static_cast<std::size_t>(path.betas.back().nonZeros()));
        path.iterations.push_back(result.iterations);
        path.converged.push_back(result.converged);
        path.objectives.push_back(result.objective);
        state = std::move(result.state);
    }
    return path;
}

SolutionPath fit_path(const GehanProblem& problem, const PenaltySpec& spec, const PathOptions& opts) {
    const double head = opts.lambda_max ? *opts.lambda_max : lambda_max(problem, spec, opts.solver);
    return fit_path_at(problem, spec, lambda_grid(head, opts.nlambda, opts.kappa), opts.solver, opts.warm_start);
}

}  // namespace rankaft
