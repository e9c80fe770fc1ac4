#include "rankaft/lambda_max.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace rankaft {

ZeroGradient gradient_at_zero(const SurvivalDataset& data) {
    const std::size_t n = data.n();
    const auto p = static_cast<Eigen::Index>(data.p());
    const Vector& ly = data.log_y();
    const auto& delta = data.delta();
    const Matrix& x = data.x();

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
        return ly[static_cast<Eigen::Index>(a)] < ly[static_cast<Eigen::Index>(b)];
    });

    ZeroGradient g;
    g.linear = Vector::Zero(p);
    g.ties = Vector::Zero(p);

    // Walk tie blocks from the largest time down, keeping the running sum and
    // count of strictly larger times.
    Vector greater_sum = Vector::Zero(p);
    double greater_count = 0.0;
    std::size_t end = n;
    while (end > 0) {
        std::size_t begin = end - 1;
        const double t = ly[static_cast<Eigen::Index>(order[begin])];
        while (begin > 0 && ly[static_cast<Eigen::Index>(order[begin - 1])] == t) --begin;

        for (std::size_t a = begin; a < end; ++a) {
            const auto i = static_cast<Eigen::Index>(order[a]);
            if (!delta[order[a]]) continue;
            g.linear += greater_count * x.row(i).transpose() - greater_sum;
            for (std::size_t b = begin; b < end; ++b) {
                if (b == a) continue;
                g.has_ties = true;
                g.ties += (x.row(i) - x.row(static_cast<Eigen::Index>(order[b]))).cwiseAbs().transpose();
            }
        }
        for (std::size_t a = begin; a < end; ++a) greater_sum += x.row(static_cast<Eigen::Index>(order[a])).transpose();
        greater_count += static_cast<double>(end - begin);
        end = begin;
    }
    const double n2 = static_cast<double>(n) * static_cast<double>(n);
    g.linear /= n2;
    g.ties /= n2;
    return g;
}

double lambda_max_en(const SurvivalDataset& data, const PenaltySpec& spec) {
    spec.validate(data.p());
    if (spec.kind != PenaltyKind::ElasticNet) throw PenaltyError("lambda_max_en needs an elastic-net penalty");
    if (spec.alpha == 0.0) throw LambdaMaxError("alpha = 0 (ridge) never yields an exactly zero fit");

    const auto g = gradient_at_zero(data);
    double best = 0.0;
    for (Eigen::Index k = 0; k < g.linear.size(); ++k) {
        const double bound = std::abs(g.linear[k]) + g.ties[k];
        if (spec.w[k] == 0.0) {
            if (bound > 0.0) {
                throw LambdaMaxError("unpenalized coefficient " + std::to_string(k) +
                                     " has a nonzero gradient at zero; lambda_max is undefined");
            }
            continue;
        }
        best = std::max(best, bound / (spec.alpha * spec.w[k]));
    }
    if (!(best > 0.0)) throw LambdaMaxError("degenerate design: every covariate is constant over comparable pairs");
    return best * (1.0 + kLambdaMaxMargin);
}

namespace {

struct Coord {
    double a;  // |s_k|
    double b;  // alpha * w_k
    double breakpoint() const { return b > 0.0 ? a / b : std::numeric_limits<double>::infinity(); }
};

double h_value(const std::vector<Coord>& coords, double c, double lambda) {
    double sum = 0.0;
    for (const auto& k : coords) {
        const double r = std::max(k.a - k.b * lambda, 0.0);
        sum += r * r;
    }
    return sum - c * c * lambda * lambda;
}

// Root of q2 x^2 + q1 x + q0 inside [lo, hi], where the quadratic changes sign on the bracket.
double bracketed_root(double q2, double q1, double q0, double lo, double hi, const std::vector<Coord>& coords,
                      double c) {
    auto inside = [&](double r) { return std::isfinite(r) && r >= lo - 1e-12 * (1.0 + hi) && r <= hi + 1e-12 * (1.0 + hi); };
    if (std::isfinite(hi)) {
        double best = std::numeric_limits<double>::quiet_NaN();
        if (std::abs(q2) <= 1e-300) {
            if (q1 != 0.0) best = -q0 / q1;
        } else {
            const double disc = q1 * q1 - 4.0 * q2 * q0;
            if (disc >= 0.0) {
                const double sq = std::sqrt(disc);
                const double qq = -0.5 * (q1 + std::copysign(sq, q1));
                const double r1 = qq / q2;
                const double r2 = qq != 0.0 ? q0 / qq : r1;
                if (inside(r1)) best = r1;
                if (inside(r2) && (!inside(best) || std::abs(h_value(coords, c, r2)) < std::abs(h_value(coords, c, best)))) {
                    best = r2;
                }
            }
        }
        if (inside(best)) return std::clamp(best, lo, hi);
        // Bisection on the monotone function as a fallback.
        double a = lo, b = hi;
        for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
            const double mid = 0.5 * (a + b);
            (h_value(coords, c, mid) > 0.0 ? a : b) = mid;
        }
        return b;
    }
    // Unbounded last piece: q2 < 0 there, single positive root.
    const double disc = q1 * q1 - 4.0 * q2 * q0;
    const double sq = std::sqrt(std::max(disc, 0.0));
    const double r1 = (-q1 - sq) / (2.0 * q2);
    const double r2 = (-q1 + sq) / (2.0 * q2);
    return std::max({r1, r2, lo});
}

}  // namespace

double group_kkt_lambda(const Vector& s, const Vector& w, double v, double alpha) {
    const double c = v * (1.0 - alpha);
    std::vector<Coord> coords;
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s[k] == 0.0) continue;
        coords.push_back({std::abs(s[k]), alpha * w[k]});
    }
    if (coords.empty()) return 0.0;
    const bool unbounded = std::any_of(coords.begin(), coords.end(), [](const Coord& k) { return k.b == 0.0; });
    if (unbounded && c == 0.0) {
        throw LambdaMaxError("an unpenalized coefficient has a nonzero gradient at zero; lambda_max is undefined");
    }
    if (c == 0.0) {
        double top = 0.0;
        for (const auto& k : coords) top = std::max(top, k.breakpoint());
        return top;
    }

    std::vector<double> breaks;
    for (const auto& k : coords) {
        if (k.b > 0.0) breaks.push_back(k.breakpoint());
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.push_back(std::numeric_limits<double>::infinity());

    double lo = 0.0;
    for (double hi : breaks) {
        if (hi <= lo) continue;
        const bool last = !std::isfinite(hi);
        if (last || h_value(coords, c, hi) <= 0.0) {
            double q2 = -c * c, q1 = 0.0, q0 = 0.0;
            for (const auto& k : coords) {
                if (k.breakpoint() <= lo) continue;
                q2 += k.b * k.b;
                q1 -= 2.0 * k.a * k.b;
                q0 += k.a * k.a;
            }
            if (last && q2 >= 0.0) {
                // Only reachable with c = 0 after all breakpoints, where h is already zero.
                return lo;
            }
            return bracketed_root(q2, q1, q0, lo, hi, coords, c);
        }
        lo = hi;
    }
    return lo;
}

namespace {

double sgl_bound(const PenaltySpec& spec, const Vector& s) {
    double best = 0.0;
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const auto& members = spec.groups[g];
        Vector sg(static_cast<Eigen::Index>(members.size()));
        Vector wg(static_cast<Eigen::Index>(members.size()));
        for (std::size_t m = 0; m < members.size(); ++m) {
            sg[static_cast<Eigen::Index>(m)] = s[static_cast<Eigen::Index>(members[m])];
            wg[static_cast<Eigen::Index>(m)] = spec.w[static_cast<Eigen::Index>(members[m])];
        }
        best = std::max(best, group_kkt_lambda(sg, wg, spec.v[static_cast<Eigen::Index>(g)], spec.alpha));
    }
    return best;
}

}  // namespace

double lambda_max_sgl(const GehanProblem& problem, const PenaltySpec& spec, const SolverOptions& opts) {
    spec.validate(problem.p());
    if (spec.kind != PenaltyKind::SparseGroupLasso) throw PenaltyError("lambda_max_sgl needs a sparse-group-lasso penalty");

    const auto g = gradient_at_zero(problem.data());
    const double exact = sgl_bound(spec, g.linear);
    if (!g.has_ties) {
        if (!(exact > 0.0)) throw LambdaMaxError("degenerate design: the gradient at zero vanishes");
        return exact * (1.0 + kLambdaMaxMargin);
    }

    // Ties: every subgradient selection is dominated coordinatewise by |linear| + ties.
    const Vector worst = g.linear.cwiseAbs() + g.ties;
    double lambda = std::max(10.0 * exact, sgl_bound(spec, worst)) * (1.0 + kLambdaMaxMargin);
    if (!(lambda > 0.0)) throw LambdaMaxError("degenerate design: the gradient at zero vanishes");

    auto is_zero = [&](double lam) { return fit(problem, spec, lam, opts).beta_hat.isZero(0.0); };
    for (int grow = 0; grow < 64 && !is_zero(lambda); ++grow) lambda *= 2.0;

    constexpr double shrink = 0.95;
    constexpr int max_trials = 1000;
    for (int trial = 0; trial < max_trials; ++trial) {
        const double next = shrink * lambda;
        if (!is_zero(next)) return lambda;
        lambda = next;
    }
    return lambda;
}

double lambda_max(const GehanProblem& problem, const PenaltySpec& spec, const SolverOptions& opts) {
    if (spec.kind == PenaltyKind::ElasticNet) return lambda_max_en(problem.data(), spec);
    return lambda_max_sgl(problem, spec, opts);
}

}  // namespace rankaft
