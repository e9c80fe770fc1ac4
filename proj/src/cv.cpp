#include "rankaft/cv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rankaft/log.hpp"
#include "rankaft/parallel.hpp"

namespace rankaft {

std::vector<std::size_t> make_folds(std::size_t n, std::size_t folds, std::uint64_t seed) {
    if (folds < 2 || folds > n) {
        throw std::invalid_argument("number of folds must lie in [2, n]; got " + std::to_string(folds));
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> fold_of(n);
    for (std::size_t pos = 0; pos < n; ++pos) fold_of[order[pos]] = pos % folds;
    return fold_of;
}

namespace {

std::vector<std::vector<std::size_t>> members_by_fold(const std::vector<std::size_t>& fold_of, std::size_t folds) {
    std::vector<std::vector<std::size_t>> members(folds);
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] >= folds) throw std::invalid_argument("fold id out of range");
        members[fold_of[i]].push_back(i);
    }
    return members;
}

}  // namespace

FoldBetas fit_fold_paths(const SurvivalDataset& data, const PenaltySpec& spec, const std::vector<double>& lambdas,
                         const std::vector<std::size_t>& fold_of, std::size_t folds, const SolverOptions& opts,
                         std::size_t threads) {
    if (fold_of.size() != data.n()) throw std::invalid_argument("fold assignment must cover every subject");
    FoldBetas out(folds);
    parallel_for(folds, threads, [&](std::size_t k) {
        std::vector<std::size_t> train;
        std::size_t events = 0;
        for (std::size_t i = 0; i < data.n(); ++i) {
            if (fold_of[i] == k) continue;
            train.push_back(i);
            events += data.delta()[i];
        }
        if (events == 0) {
            throw DataError("training split without fold " + std::to_string(k + 1) + " has no observed events");
        }
        const GehanProblem problem(data.subset(train));
        const auto path = fit_path_at(problem, spec, lambdas, opts, true);
        out[k].reserve(path.size());
        for (std::size_t m = 0; m < path.size(); ++m) {
            if (!path.converged[m]) {
                log(LogLevel::Info, "fold " + std::to_string(k + 1) + " did not converge at lambda index " +
                                        std::to_string(m));
            }
            out[k].push_back(path.beta(m));
        }
    });
    return out;
}

std::vector<double> pooled_linear_predictor_score(const SurvivalDataset& data, const std::vector<std::size_t>& fold_of,
                                                  const FoldBetas& fold_betas) {
    if (fold_betas.empty()) return {};
    const std::size_t nlambda = fold_betas.front().size();
    std::vector<double> score(nlambda);
    Vector e(static_cast<Eigen::Index>(data.n()));
    for (std::size_t m = 0; m < nlambda; ++m) {
        for (std::size_t i = 0; i < data.n(); ++i) {
            const auto row = static_cast<Eigen::Index>(i);
            e[row] = data.log_y()[row] - data.x().row(row).dot(fold_betas[fold_of[i]][m]);
        }
        score[m] = gehan_sum(e, data.delta());
    }
    return score;
}

FoldGehanLoss fold_gehan_loss(const SurvivalDataset& data, const std::vector<std::size_t>& fold_of,
                              const FoldBetas& fold_betas) {
    const std::size_t folds = fold_betas.size();
    const auto members = members_by_fold(fold_of, folds);
    const std::size_t nlambda = folds ? fold_betas.front().size() : 0;

    FoldGehanLoss out;
    std::vector<bool> empty(folds, false);
    for (std::size_t k = 0; k < folds; ++k) {
        std::size_t events = 0;
        for (auto i : members[k]) events += data.delta()[i];
        if (events == 0 || members[k].size() < 2) {
            empty[k] = true;
            out.warnings.push_back("fold " + std::to_string(k + 1) +
                                   " has no comparable pairs; its held-out Gehan loss is taken as 0");
            log(LogLevel::Info, out.warnings.back());
        }
    }

    out.mean.assign(nlambda, 0.0);
    out.se.assign(nlambda, 0.0);
    std::vector<double> losses(folds);
    for (std::size_t m = 0; m < nlambda; ++m) {
        for (std::size_t k = 0; k < folds; ++k) {
            if (empty[k]) {
                losses[k] = 0.0;
                continue;
            }
            const auto& rows = members[k];
            Vector e(static_cast<Eigen::Index>(rows.size()));
            std::vector<std::uint8_t> d(rows.size());
            for (std::size_t r = 0; r < rows.size(); ++r) {
                const auto i = static_cast<Eigen::Index>(rows[r]);
                e[static_cast<Eigen::Index>(r)] = data.log_y()[i] - data.x().row(i).dot(fold_betas[k][m]);
                d[r] = data.delta()[rows[r]];
            }
            const double size = static_cast<double>(rows.size());
            losses[k] = gehan_sum(e, d) / (size * size);
        }
        const double mean = std::accumulate(losses.begin(), losses.end(), 0.0) / static_cast<double>(folds);
        double ss = 0.0;
        for (double l : losses) ss += (l - mean) * (l - mean);
        out.mean[m] = mean;
        out.se[m] = folds > 1 ? std::sqrt(ss / static_cast<double>(folds - 1)) / std::sqrt(static_cast<double>(folds)) : 0.0;
    }
    return out;
}

std::size_t argmin_first(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("argmin of an empty sequence");
    std::size_t best = 0;
    for (std::size_t m = 1; m < values.size(); ++m) {
        if (values[m] < values[best]) best = m;
    }
    return best;
}

double one_se_rule(const std::vector<double>& mean, const std::vector<double>& se, const std::vector<double>& lambdas) {
    if (mean.size() != se.size() || mean.size() != lambdas.size()) {
        throw std::invalid_argument("one_se_rule: vectors must be aligned");
    }
    const std::size_t best = argmin_first(mean);
    const double threshold = mean[best] + se[best];
    std::size_t chosen = best;
    for (std::size_t m = 0; m < mean.size(); ++m) {
        if (mean[m] <= threshold && lambdas[m] > lambdas[chosen]) chosen = m;
    }
    return lambdas[chosen];
}

CvResult cross_validate(const SurvivalDataset& data, const PenaltySpec& spec, const std::vector<double>& lambdas,
                        const CvOptions& opts) {
    if (lambdas.empty()) throw std::invalid_argument("cross-validation needs at least one lambda");
    CvResult out;
    out.lambdas = lambdas;
    out.folds = opts.folds;
    out.seed = opts.seed;
    out.fold_assignment = make_folds(data.n(), opts.folds, opts.seed);

    const auto betas = fit_fold_paths(data, spec, lambdas, out.fold_assignment, opts.folds, opts.solver, opts.threads);
    out.cv_linear_predictor = pooled_linear_predictor_score(data, out.fold_assignment, betas);
    auto gehan = fold_gehan_loss(data, out.fold_assignment, betas);
    out.cv_gehan_loss = std::move(gehan.mean);
    out.cv_gehan_se = std::move(gehan.se);
    out.warnings = std::move(gehan.warnings);
    out.best_lambda_lp = lambdas[argmin_first(out.cv_linear_predictor)];
    out.best_lambda_1se = one_se_rule(out.cv_gehan_loss, out.cv_gehan_se, lambdas);
    return out;
}

}  // namespace rankaft
