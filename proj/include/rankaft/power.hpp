#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace rankaft {

/// Largest eigenvalue of a symmetric positive semidefinite operator given only
/// its action `apply(in, out)`. Stops when the Rayleigh quotient changes by at
/// most `rel_tol` relative. Returns 0 when the operator annihilates the start vector.
template <typename Apply>
double power_iteration(Apply&& apply, Eigen::Index dim, double rel_tol = 1e-6, std::size_t max_iter = 100000,
                       std::uint64_t seed = 0x5eedULL) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(dim), av(dim);
    for (Eigen::Index k = 0; k < dim; ++k) v[k] = normal(rng);
    v.normalize();

    double mu = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        apply(v, av);
        const double next = v.dot(av);
        const double norm = av.norm();
        if (!(norm > 0.0)) return 0.0;
        v = av / norm;
        const bool done = it > 0 && std::abs(next - mu) <= rel_tol * next;
        mu = next;
        if (done) break;
    }
    return mu;
}

}  // namespace rankaft
