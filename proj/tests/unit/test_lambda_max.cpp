#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rankaft/lambda_max.hpp"

using namespace rankaft;

namespace {

SurvivalDataset two_point() {
    Vector y(2);
    y << 1.0, 2.0;
    Matrix x(2, 1);
    x << 0.0, 1.0;
    return SurvivalDataset::from_times(y, {1, 1}, x);
}

// Root of ||soft(s, alpha lambda w)||^2 = (v (1 - alpha) lambda)^2 by plain bisection.
double bisect_group(const Vector& s, const Vector& w, double v, double alpha) {
    auto h = [&](double lam) {
        double ss = 0.0;
        for (Eigen::Index k = 0; k < s.size(); ++k) {
            const double r = std::max(std::abs(s[k]) - alpha * w[k] * lam, 0.0);
            ss += r * r;
        }
        return std::sqrt(ss) - v * (1.0 - alpha) * lam;
    };
    double lo = 0.0, hi = 1.0;
    while (h(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace

TEST_CASE("two-point elastic net lambda_max is one quarter") {
    const auto data = two_point();
    const auto spec = PenaltySpec::elastic_net(1, 1.0);
    const double lmax = lambda_max_en(data, spec);
    CHECK(lmax == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(lmax >= 0.25);

    const GehanProblem problem(data);
    CHECK(fit(problem, spec, lmax).beta_hat[0] == 0.0);
    CHECK(fit(problem, spec, 0.5 * lmax).beta_hat[0] != 0.0);

    // The reference solver never improves on zero at lambda_max, and does below it.
    const auto at = oracle::subgradient_solve(data, spec, lmax, 20000);
    CHECK(at.best_objective == doctest::Approx(oracle::objective(data, spec, lmax, Vector::Zero(1))).epsilon(1e-12));
    const auto below = oracle::subgradient_solve(data, spec, 0.5 * lmax, 20000);
    CHECK(below.best_objective < oracle::objective(data, spec, 0.5 * lmax, Vector::Zero(1)) - 1e-3);
    CHECK(below.beta[0] > 0.0);
}

TEST_CASE("degenerate and undefined cases") {
    Vector ly(3);
    ly << 0.1, 0.5, 0.9;
    Matrix x = Matrix::Constant(3, 2, 1.5);
    const SurvivalDataset flat(ly, {1, 1, 0}, x);
    CHECK_THROWS_AS(lambda_max_en(flat, PenaltySpec::elastic_net(2, 1.0)), LambdaMaxError);

    const auto data = oracle::random_dataset(12, 3, 8);
    CHECK_THROWS_AS(lambda_max_en(data, PenaltySpec::elastic_net(3, 0.0)), LambdaMaxError);
    auto unpen = PenaltySpec::elastic_net(3, 1.0);
    unpen.w[0] = 0.0;
    CHECK_THROWS_AS(lambda_max_en(data, unpen), LambdaMaxError);

    Vector s(2), w = Vector::Ones(2);
    s << 1.0, 2.0;
    w[1] = 0.0;
    CHECK_THROWS_AS(group_kkt_lambda(s, w, 1.0, 1.0), LambdaMaxError);
}

TEST_CASE("ties enlarge the bound") {
    // Subjects 0 and 1 share a time; both are events.
    Vector ly(3);
    ly << 1.0, 1.0, 2.0;
    Matrix x(3, 1);
    x << 0.0, 1.0, 0.5;
    const SurvivalDataset data(ly, {1, 1, 1}, x);
    const auto g = gradient_at_zero(data);
    CHECK(g.has_ties);
    CHECK(g.ties[0] > 0.0);
    const double with_ties = lambda_max_en(data, PenaltySpec::elastic_net(1, 1.0));
    CHECK(with_ties > std::abs(g.linear[0]));
    // By hand: linear = (0 - 0.5) + (1 - 0.5) = 0 over 9, ties = 2 * 1 / 9.
    CHECK(g.linear[0] == doctest::Approx(0.0));
    CHECK(g.ties[0] == doctest::Approx(2.0 / 9.0));
    const GehanProblem problem(data);
    CHECK(fit(problem, PenaltySpec::elastic_net(1, 1.0), with_ties).beta_hat.isZero(0.0));
}

TEST_CASE("gradient at zero matches the double sum") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto data = oracle::random_dataset(15, 3, seed);
        const auto g = gradient_at_zero(data);
        Vector lin = Vector::Zero(3);
        for (std::size_t i = 0; i < data.n(); ++i) {
            for (std::size_t j = 0; j < data.n(); ++j) {
                if (data.delta()[i] && data.log_y()[static_cast<Eigen::Index>(i)] < data.log_y()[static_cast<Eigen::Index>(j)]) {
                    lin += (data.x().row(static_cast<Eigen::Index>(i)) - data.x().row(static_cast<Eigen::Index>(j))).transpose();
                }
            }
        }
        lin /= 225.0;
        CHECK((g.linear - lin).lpNorm<Eigen::Infinity>() <= 1e-12);
        CHECK_FALSE(g.has_ties);
    }
}

TEST_CASE("group KKT equation") {
    Vector s(2), w = Vector::Ones(2);
    s << 2.0, 1.0;
    // (2 - l/2)^2 + (1 - l/2)^2 = l^2 / 4 on [0, 2] has the root l = 2.
    CHECK(group_kkt_lambda(s, w, 1.0, 0.5) == doctest::Approx(2.0).epsilon(1e-12));

    // alpha = 0: ||s|| / v.
    CHECK(group_kkt_lambda(s, w, 2.0, 0.0) == doctest::Approx(std::sqrt(5.0) / 2.0).epsilon(1e-12));
    // alpha = 1: largest breakpoint.
    CHECK(group_kkt_lambda(s, w, 2.0, 1.0) == doctest::Approx(2.0).epsilon(1e-12));

    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int rep = 0; rep < 200; ++rep) {
        const Eigen::Index m = 1 + rep % 6;
        Vector ss(m), ww(m);
        for (auto& x : ss) x = z(rng);
        for (auto& x : ww) x = u(rng);
        const double v = u(rng), alpha = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        CHECK(group_kkt_lambda(ss, ww, v, alpha) == doctest::Approx(bisect_group(ss, ww, v, alpha)).epsilon(1e-9));
    }
}

TEST_CASE("sparse group lasso lambda_max") {
    const auto data = oracle::random_dataset(20, 4, 17);
    const GehanProblem problem(data);
    const auto g = gradient_at_zero(data);

    auto a0 = PenaltySpec::sparse_group_lasso({0, 0, 1, 1}, 0.0);
    const double expect = std::max(g.linear.head(2).norm() / a0.v[0], g.linear.tail(2).norm() / a0.v[1]);
    CHECK(lambda_max_sgl(problem, a0) == doctest::Approx(expect).epsilon(1e-9));

    auto a1 = PenaltySpec::sparse_group_lasso({0, 0, 1, 1}, 1.0);
    CHECK(lambda_max_sgl(problem, a1) == doctest::Approx(lambda_max_en(data, PenaltySpec::elastic_net(4, 1.0))).epsilon(1e-12));

    auto half = PenaltySpec::sparse_group_lasso({0, 0, 1, 1}, 0.5);
    const double lmax = lambda_max(problem, half);
    CHECK(fit(problem, half, lmax).beta_hat.isZero(0.0));
    CHECK_FALSE(fit(problem, half, 0.8 * lmax).beta_hat.isZero(0.0));
}

TEST_CASE("sparse group lasso lambda_max with ties") {
    auto data = oracle::random_dataset(16, 4, 23, 0.2);
    Vector ly = data.log_y();
    ly[3] = ly[1];
    ly[7] = ly[5];
    const SurvivalDataset tied(ly, data.delta(), data.x());
    REQUIRE(gradient_at_zero(tied).has_ties);
    const GehanProblem problem(tied);
    auto spec = PenaltySpec::sparse_group_lasso({0, 0, 1, 1}, 0.5);
    const double lmax = lambda_max(problem, spec);
    CHECK(fit(problem, spec, lmax).beta_hat.isZero(0.0));
    CHECK_FALSE(fit(problem, spec, 0.95 * lmax).beta_hat.isZero(0.0));
}
