#pragma once

#include <string>
#include <vector>

#include "rankaft/data.hpp"

namespace rankaft {

enum class PenaltyKind { ElasticNet, SparseGroupLasso };

std::string to_string(PenaltyKind kind);
PenaltyKind penalty_kind_from_string(const std::string& s);

/// Raised when a penalty configuration violates its invariants.
class PenaltyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Weighted elastic net or weighted sparse group lasso.
///
///   elastic net:        alpha * ||w o b||_1 + (1 - alpha)/2 * ||b||_2^2
///   sparse group lasso: alpha * ||w o b||_1 + (1 - alpha) * sum_g v_g ||b_g||_2
///
/// A coefficient with w_k = 0 (and, for the group penalty, sitting in a group
/// with v_g = 0) is unpenalized.
struct PenaltySpec {
    PenaltyKind kind = PenaltyKind::ElasticNet;
    double alpha = 1.0;
    Vector w;
    /// Partition of {0..p-1}; empty for the elastic net.
    std::vector<std::vector<std::size_t>> groups;
    /// One weight per group; empty for the elastic net.
    Vector v;

    /// Unit weights.
    static PenaltySpec elastic_net(std::size_t p, double alpha);
    /// `group_of[k]` is the 0-based group of coefficient k. Weights default to
    /// w = 1 and v_g = sqrt(|G_g|).
    static PenaltySpec sparse_group_lasso(const std::vector<std::size_t>& group_of, double alpha);

    std::size_t p() const { return static_cast<std::size_t>(w.size()); }

    /// Throws PenaltyError on any broken invariant, including a dimension other than `p`.
    void validate(std::size_t p) const;
};

/// argmin_b { 1/2 ||z - b||^2 + t * g(b) }, computed in closed form.
Vector prox(const PenaltySpec& spec, const Vector& z, double t);
/// Same, without re-validating the spec; for solver inner loops.
void prox_inplace(const PenaltySpec& spec, Vector& z, double t);

/// g(beta), without the lambda factor.
double penalty_value(const PenaltySpec& spec, const Vector& beta);

/// M log-equally spaced values from lambda_max down to kappa * lambda_max.
std::vector<double> lambda_grid(double lambda_max, std::size_t m, double kappa);

/// Reads a `feature,group` CSV and returns the 0-based group of each feature in
/// `feature_names`. Group labels are numbered in order of first appearance.
std::vector<std::size_t> parse_groups_csv(const std::string& text, const std::vector<std::string>& feature_names);
std::vector<std::size_t> read_groups_csv(const std::string& path, const std::vector<std::string>& feature_names);

}  // namespace rankaft
