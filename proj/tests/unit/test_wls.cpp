#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rankaft/wls.hpp"

using namespace rankaft;

namespace {

SurvivalDataset with_status(std::vector<double> ly, std::vector<std::uint8_t> d) {
    const auto n = static_cast<Eigen::Index>(ly.size());
    Matrix x(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) x(i, 0) = static_cast<double>(i % 3);
    return SurvivalDataset(Eigen::Map<Vector>(ly.data(), n), std::move(d), x);
}

}  // namespace

TEST_CASE("Kaplan-Meier weight examples") {
    auto km = km_weights(with_status({0.5, 1.0}, {1, 1}));
    CHECK(km.xi[0] == doctest::Approx(0.5));
    CHECK(km.xi[1] == doctest::Approx(0.5));
    km = km_weights(with_status({0.5, 1.0}, {0, 1}));
    CHECK(km.xi[0] == 0.0);
    CHECK(km.xi[1] == doctest::Approx(1.0));

    // Sorting and the reverse mapping.
    km = km_weights(with_status({2.0, 1.0, 3.0}, {1, 1, 0}));
    CHECK(km.sort_perm == std::vector<std::size_t>{1, 0, 2});
    const Vector by = km.by_subject();
    CHECK(by[1] == doctest::Approx(1.0 / 3.0));
    CHECK(by[0] == doctest::Approx(1.0 / 3.0));
    CHECK(by[2] == 0.0);

    // Events precede censorings at tied times.
    km = km_weights(with_status({1.0, 1.0, 2.0}, {0, 1, 1}));
    CHECK(km.sort_perm[0] == 1);
}

TEST_CASE("Kaplan-Meier weights against a product-limit estimate") {
    std::mt19937_64 rng(5);
    std::bernoulli_distribution coin(0.6);
    std::uniform_int_distribution<int> tick(0, 6);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t n = 2 + static_cast<std::size_t>(rep % 19);
        std::vector<double> ly(n);
        std::vector<std::uint8_t> d(n);
        for (std::size_t i = 0; i < n; ++i) {
            ly[i] = tick(rng);  // coarse grid so ties occur
            d[i] = coin(rng);
        }
        d[0] = 1;
        const auto data = with_status(ly, d);
        const auto km = km_weights(data);
        const double surv = oracle::km_survival_at_end(data.log_y(), d);
        CHECK(std::abs(km.xi.sum() - (1.0 - surv)) <= 1e-12);
        CHECK(km.xi[0] == static_cast<double>(d[km.sort_perm[0]]) / static_cast<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            if (!d[km.sort_perm[i]]) CHECK(km.xi[static_cast<Eigen::Index>(i)] == 0.0);
        }
        CHECK(km.xi.sum() <= 1.0 + 1e-15);
    }
}

TEST_CASE("uncensored unpenalized fit is least squares") {
    const auto base = oracle::random_dataset(40, 4, 3, 0.0);
    const SurvivalDataset data(base.log_y(), std::vector<std::uint8_t>(40, 1), base.x());
    WlsOptions opts;
    opts.tol = 1e-13;
    const auto res = fit_wls(data, PenaltySpec::elastic_net(4, 1.0), 0.0, opts);
    Matrix design(40, 5);
    design.col(0).setOnes();
    design.rightCols(4) = data.x();
    const Vector ols = design.colPivHouseholderQr().solve(data.log_y());
    CHECK((res.beta_hat - ols.tail(4)).lpNorm<Eigen::Infinity>() <= 1e-6);
    CHECK(res.intercept == doctest::Approx(ols[0]).epsilon(1e-6));
}

TEST_CASE("weighted lambda_max zeroes the fit") {
    const auto data = oracle::random_dataset(30, 5, 9);
    const WlsProblem problem(data);
    const auto spec = PenaltySpec::elastic_net(5, 0.6);
    const double lmax = problem.lambda_max(spec);
    const Vector g = problem.gradient(Vector::Zero(5));
    CHECK(lmax == doctest::Approx(g.cwiseAbs().maxCoeff() / 0.6).epsilon(1e-9));
    CHECK(problem.fit(spec, lmax).beta_hat.isZero(0.0));
    CHECK_FALSE(problem.fit(spec, 0.5 * lmax).beta_hat.isZero(0.0));

    const auto sgl = PenaltySpec::sparse_group_lasso({0, 0, 1, 1, 1}, 0.5);
    CHECK(problem.fit(sgl, problem.lambda_max(sgl)).beta_hat.isZero(0.0));
}

TEST_CASE("one covariate has a closed form") {
    const auto base = oracle::random_dataset(25, 1, 14);
    const WlsProblem problem(base);
    const Vector xi = problem.weights();
    const double total = xi.sum();
    const Vector x = base.x().col(0), y = base.log_y();
    const double xbar = xi.dot(x) / total, ybar = xi.dot(y) / total;
    const double sxy = (xi.array() * (x.array() - xbar) * (y.array() - ybar)).sum();
    const double sxx = (xi.array() * (x.array() - xbar).square()).sum();
    const double n = 25.0, lambda = 0.05;
    // (1/2n) sum xi (y - b x)^2 + lambda |b|  =>  b = soft(sxy / n, lambda) / (sxx / n).
    const double a = sxy / n;
    const double expect = (a > lambda ? a - lambda : (a < -lambda ? a + lambda : 0.0)) / (sxx / n);
    WlsOptions opts;
    opts.tol = 1e-14;
    CHECK(problem.fit(PenaltySpec::elastic_net(1, 1.0), lambda, opts).beta_hat[0] == doctest::Approx(expect).epsilon(1e-8));
}

TEST_CASE("objective never increases") {
    const auto data = oracle::random_dataset(40, 8, 21);
    const WlsProblem problem(data);
    for (auto spec : {PenaltySpec::elastic_net(8, 0.7), PenaltySpec::sparse_group_lasso({0, 0, 1, 1, 2, 2, 3, 3}, 0.3)}) {
        double last = problem.loss(Vector::Zero(8));
        bool monotone = true;
        WlsOptions opts;
        opts.on_iteration = [&](std::size_t, double obj) {
            if (obj > last + 1e-14 * std::max(1.0, std::abs(last))) monotone = false;
            last = obj;
        };
        const auto res = problem.fit(spec, 0.2 * problem.lambda_max(spec), opts);
        CHECK(res.converged);
        CHECK(monotone);
    }
}

TEST_CASE("subjects with zero weight have no influence") {
    const auto data = oracle::random_dataset(30, 4, 33, 0.4);
    const WlsProblem problem(data);
    const auto spec = PenaltySpec::elastic_net(4, 0.5);
    const auto base = problem.fit(spec, 0.01);
    // Shift each zero-weight response by less than half the gap to its
    // neighbours so the ordering, and hence every weight, is unchanged.
    Vector ly = data.log_y();
    int moved = 0;
    for (Eigen::Index i = 0; i < ly.size(); ++i) {
        if (problem.weights()[i] != 0.0) continue;
        double gap = 1.0;
        for (Eigen::Index j = 0; j < ly.size(); ++j) {
            if (j != i) gap = std::min(gap, std::abs(data.log_y()[i] - data.log_y()[j]));
        }
        ly[i] += 0.4 * gap;
        ++moved;
    }
    REQUIRE(moved > 0);
    const SurvivalDataset shifted(ly, data.delta(), data.x());
    const WlsProblem other(shifted);
    CHECK((other.weights() - problem.weights()).norm() == 0.0);
    CHECK((base.beta_hat - other.fit(spec, 0.01).beta_hat).lpNorm<Eigen::Infinity>() <= 1e-10);
}
