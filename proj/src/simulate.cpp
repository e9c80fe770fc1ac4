#include "rankaft/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <random>

#include "rankaft/cv.hpp"
#include "rankaft/lambda_max.hpp"
#include "rankaft/metrics.hpp"
#include "rankaft/path.hpp"
#include "rankaft/wls.hpp"

namespace rankaft {

void SimConfig::validate() const {
    if (n < 2 || p < 1) throw std::invalid_argument("simulation needs n >= 2 and p >= 1");
    if (!(censor_quantile > 0.0 && censor_quantile < 1.0)) throw std::invalid_argument("censor_quantile must lie in (0, 1)");
    if (!(sigma > 0.0)) throw std::invalid_argument("error scale must be positive");
    if (!(rho_ar > -1.0 && rho_ar < 1.0)) throw std::invalid_argument("rho_ar must lie in (-1, 1)");
    if (beta_star.kind == BetaStarSpec::Kind::SparseOnes && beta_star.count > p) {
        throw std::invalid_argument("more true nonzeros than coefficients");
    }
    if (beta_star.kind == BetaStarSpec::Kind::Grouped && (beta_star.group_size == 0 || p % beta_star.group_size != 0)) {
        throw std::invalid_argument("p must be a multiple of the group size");
    }
}

double empirical_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw std::invalid_argument("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

namespace {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double normal() { return normal_(rng_); }

    double uniform_open() {
        double u = 0.0;
        while (u == 0.0 || u == 1.0) u = uniform_(rng_);
        return u;
    }

    double error(ErrorDist dist, double scale) {
        if (dist == ErrorDist::Normal) return scale * normal();
        const double u = uniform_open();
        return scale * std::log(u / (1.0 - u));
    }

    double exponential(double mean) { return -mean * std::log(uniform_open()); }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_;
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

Matrix draw_design(Sampler& s, std::size_t n, std::size_t p, double rho) {
    Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    const double innov = std::sqrt(1.0 - rho * rho);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double prev = s.normal();
        x(i, 0) = prev;
        for (Eigen::Index k = 1; k < x.cols(); ++k) {
            prev = rho * prev + innov * s.normal();
            x(i, k) = prev;
        }
    }
    return x;
}

SurvivalDataset draw_sample(Sampler& s, const SimConfig& c, const Vector& beta_star, std::size_t n, bool censored) {
    Matrix x = draw_design(s, n, c.p, c.rho_ar);
    Vector log_t = x * beta_star;
    for (Eigen::Index i = 0; i < log_t.size(); ++i) log_t[i] += s.error(c.error, c.sigma);
    std::vector<std::uint8_t> delta(n, 1);
    if (!censored) return SurvivalDataset(std::move(log_t), std::move(delta), std::move(x));

    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = std::exp(log_t[static_cast<Eigen::Index>(i)]);
    const double mean = empirical_quantile(t, c.censor_quantile);
    Vector log_y(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const double cens = s.exponential(mean);
        delta[i] = t[i] <= cens ? 1 : 0;
        log_y[static_cast<Eigen::Index>(i)] = delta[i] ? log_t[static_cast<Eigen::Index>(i)] : std::log(cens);
    }
    // An all-censored draw is possible only for tiny n; keep the earliest failure observed.
    if (std::none_of(delta.begin(), delta.end(), [](auto d) { return d == 1; })) {
        const auto first = static_cast<std::size_t>(std::min_element(t.begin(), t.end()) - t.begin());
        delta[first] = 1;
        log_y[static_cast<Eigen::Index>(first)] = log_t[static_cast<Eigen::Index>(first)];
    }
    return SurvivalDataset(std::move(log_y), std::move(delta), std::move(x));
}

Vector draw_beta_star(Sampler& s, const SimConfig& c) {
    Vector b = Vector::Zero(static_cast<Eigen::Index>(c.p));
    const auto& spec = c.beta_star;
    if (spec.kind == BetaStarSpec::Kind::SparseOnes) {
        std::vector<std::size_t> idx(c.p);
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), s.engine());
        for (std::size_t k = 0; k < spec.count; ++k) b[static_cast<Eigen::Index>(idx[k])] = spec.value;
        return b;
    }
    const std::size_t num_groups = c.p / spec.group_size;
    auto active = spec.active_groups;
    if (active.empty()) active = {std::min<std::size_t>(1, num_groups - 1), num_groups - 1};
    for (auto g : active) {
        if (g >= num_groups) throw std::invalid_argument("active group out of range");
        for (std::size_t k = 0; k < std::min(spec.active_per_group, spec.group_size); ++k) {
            b[static_cast<Eigen::Index>(g * spec.group_size + k)] = spec.group_value;
        }
    }
    return b;
}

}  // namespace

std::vector<double> draw_errors(ErrorDist dist, double sigma, std::size_t count, std::uint64_t seed) {
    Sampler s(seed);
    std::vector<double> out(count);
    for (auto& v : out) v = s.error(dist, sigma);
    return out;
}

SimData generate(const SimConfig& config) {
    config.validate();
    Sampler s(config.seed);
    Vector beta_star = draw_beta_star(s, config);
    auto train = draw_sample(s, config, beta_star, config.n, true);
    std::optional<SurvivalDataset> validation;
    if (config.n_validation > 0) validation = draw_sample(s, config, beta_star, config.n_validation, true);
    auto test = draw_sample(s, config, beta_star, std::max<std::size_t>(config.n_test, 2), false);

    std::vector<std::size_t> groups(config.p);
    const std::size_t gs = std::max<std::size_t>(config.beta_star.group_size, 1);
    for (std::size_t k = 0; k < config.p; ++k) groups[k] = k / gs;
    return SimData{std::move(train), std::move(validation), std::move(test), std::move(beta_star),
                   ar1_covariance(config.p, config.rho_ar), std::move(groups)};
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

MethodMetrics score(const std::string& method, const SimData& d, const Vector& beta, double lambda, double ms) {
    MethodMetrics m;
    m.method = method;
    m.concordance = concordance(d.test.x() * beta, d.test.log_y());
    m.model_error = model_error(beta, d.beta_star, d.sigma);
    m.nnz = static_cast<std::size_t>((beta.array() != 0.0).count());
    m.runtime_ms = ms;
    m.lambda = lambda;
    return m;
}

}  // namespace

std::vector<MethodMetrics> run_comparison(const ComparisonConfig& config) {
    const SimData d = generate(config.sim);
    if (!d.validation) throw std::invalid_argument("the comparison needs a validation set");
    const PenaltySpec spec = config.penalty == PenaltyKind::ElasticNet
                                 ? PenaltySpec::elastic_net(config.sim.p, config.alpha)
                                 : PenaltySpec::sparse_group_lasso(d.groups, config.alpha);
    std::vector<MethodMetrics> out;

    {
        const auto start = Clock::now();
        const GehanProblem problem(d.train);
        const auto lambdas = lambda_grid(lambda_max(problem, spec), config.nlambda, config.kappa);
        const auto path = fit_path_at(problem, spec, lambdas);
        std::vector<double> val(path.size());
        for (std::size_t m = 0; m < path.size(); ++m) val[m] = gehan_loss_full(*d.validation, path.beta(m));
        const auto best = argmin_first(val);
        out.push_back(score("gehan-val", d, path.beta(best), lambdas[best], elapsed_ms(start)));

        if (config.with_cv) {
            const auto cv_start = Clock::now();
            CvOptions cv;
            cv.folds = config.cv_folds;
            cv.seed = config.sim.seed;
            const auto res = cross_validate(d.train, spec, lambdas, cv);
            const auto idx = static_cast<std::size_t>(
                std::find(lambdas.begin(), lambdas.end(), res.best_lambda_lp) - lambdas.begin());
            out.push_back(score("gehan-cv", d, path.beta(idx), lambdas[idx], elapsed_ms(cv_start)));
        }
    }
    {
        const auto start = Clock::now();
        const WlsProblem problem(d.train);
        const auto lambdas = lambda_grid(problem.lambda_max(spec), config.nlambda, config.kappa);
        const auto fits = fit_wls_path(problem, spec, lambdas);
        std::vector<double> val(fits.size());
        for (std::size_t m = 0; m < fits.size(); ++m) val[m] = gehan_loss_full(*d.validation, fits[m].beta_hat);
        const auto best = argmin_first(val);
        out.push_back(score("wls-val", d, fits[best].beta_hat, lambdas[best], elapsed_ms(start)));
    }
    return out;
}

}  // namespace rankaft
