#include "rankaft/penalty.hpp"

#include <cmath>
#include <map>

#include "csv.hpp"

namespace rankaft {

std::string to_string(PenaltyKind kind) {
    return kind == PenaltyKind::ElasticNet ? "en" : "sgl";
}

PenaltyKind penalty_kind_from_string(const std::string& s) {
    if (s == "en") return PenaltyKind::ElasticNet;
    if (s == "sgl") return PenaltyKind::SparseGroupLasso;
    throw PenaltyError("unknown penalty '" + s + "' (expected en or sgl)");
}

PenaltySpec PenaltySpec::elastic_net(std::size_t p, double alpha) {
    PenaltySpec spec;
    spec.kind = PenaltyKind::ElasticNet;
    spec.alpha = alpha;
    spec.w = Vector::Ones(static_cast<Eigen::Index>(p));
    spec.validate(p);
    return spec;
}

PenaltySpec PenaltySpec::sparse_group_lasso(const std::vector<std::size_t>& group_of, double alpha) {
    PenaltySpec spec;
    spec.kind = PenaltyKind::SparseGroupLasso;
    spec.alpha = alpha;
    const std::size_t p = group_of.size();
    spec.w = Vector::Ones(static_cast<Eigen::Index>(p));
    std::size_t num_groups = 0;
    for (auto g : group_of) num_groups = std::max(num_groups, g + 1);
    spec.groups.resize(num_groups);
    for (std::size_t k = 0; k < p; ++k) spec.groups[group_of[k]].push_back(k);
    spec.v.resize(static_cast<Eigen::Index>(num_groups));
    for (std::size_t g = 0; g < num_groups; ++g) {
        spec.v[static_cast<Eigen::Index>(g)] = std::sqrt(static_cast<double>(spec.groups[g].size()));
    }
    spec.validate(p);
    return spec;
}

void PenaltySpec::validate(std::size_t p_expected) const {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw PenaltyError("alpha must lie in [0, 1]");
    if (p() != p_expected) {
        throw PenaltyError("penalty has " + std::to_string(p()) + " weights, expected " + std::to_string(p_expected));
    }
    if (!w.allFinite() || (w.array() < 0.0).any()) throw PenaltyError("weights w must be finite and nonnegative");
    if (kind == PenaltyKind::ElasticNet) {
        if (!groups.empty() || v.size() != 0) throw PenaltyError("elastic net takes no groups");
        return;
    }
    if (static_cast<std::size_t>(v.size()) != groups.size()) throw PenaltyError("need one weight per group");
    if (!v.allFinite() || (v.array() < 0.0).any()) throw PenaltyError("group weights v must be finite and nonnegative");
    std::vector<char> seen(p_expected, 0);
    for (const auto& g : groups) {
        if (g.empty()) throw PenaltyError("groups must be nonempty");
        for (auto k : g) {
            if (k >= p_expected) throw PenaltyError("group member out of range");
            if (seen[k]) throw PenaltyError("groups overlap at coefficient " + std::to_string(k));
            seen[k] = 1;
        }
    }
    for (std::size_t k = 0; k < p_expected; ++k) {
        if (!seen[k]) throw PenaltyError("coefficient " + std::to_string(k) + " belongs to no group");
    }
}

namespace {

inline double soft(double a, double thresh) {
    const double m = std::abs(a) - thresh;
    return m > 0.0 ? std::copysign(m, a) : 0.0;
}

}  // namespace

void prox_inplace(const PenaltySpec& spec, Vector& z, double t) {
    if (!(t > 0.0) || !std::isfinite(t)) throw PenaltyError("prox step must be positive");
    if (static_cast<std::size_t>(z.size()) != spec.p()) throw PenaltyError("prox: dimension mismatch");

    const double l1 = spec.alpha * t;
    for (Eigen::Index k = 0; k < z.size(); ++k) z[k] = soft(z[k], spec.w[k] * l1);

    if (spec.kind == PenaltyKind::ElasticNet) {
        z /= 1.0 + (1.0 - spec.alpha) * t;
        return;
    }
    const double l2 = (1.0 - spec.alpha) * t;
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const double thresh = spec.v[static_cast<Eigen::Index>(g)] * l2;
        if (thresh == 0.0) continue;
        const auto& members = spec.groups[g];
        double sq = 0.0;
        for (auto k : members) sq += z[static_cast<Eigen::Index>(k)] * z[static_cast<Eigen::Index>(k)];
        const double norm = std::sqrt(sq);
        const double scale = norm > thresh ? (norm - thresh) / norm : 0.0;
        for (auto k : members) z[static_cast<Eigen::Index>(k)] *= scale;
    }
}

Vector prox(const PenaltySpec& spec, const Vector& z, double t) {
    spec.validate(static_cast<std::size_t>(z.size()));
    Vector out = z;
    prox_inplace(spec, out, t);
    return out;
}

double penalty_value(const PenaltySpec& spec, const Vector& beta) {
    if (static_cast<std::size_t>(beta.size()) != spec.p()) throw PenaltyError("penalty_value: dimension mismatch");
    const double l1 = spec.alpha * spec.w.cwiseProduct(beta).lpNorm<1>();
    if (spec.kind == PenaltyKind::ElasticNet) return l1 + 0.5 * (1.0 - spec.alpha) * beta.squaredNorm();
    double group = 0.0;
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        double sq = 0.0;
        for (auto k : spec.groups[g]) sq += beta[static_cast<Eigen::Index>(k)] * beta[static_cast<Eigen::Index>(k)];
        group += spec.v[static_cast<Eigen::Index>(g)] * std::sqrt(sq);
    }
    return l1 + (1.0 - spec.alpha) * group;
}

std::vector<double> lambda_grid(double lambda_max, std::size_t m, double kappa) {
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) throw PenaltyError("lambda_max must be positive");
    if (m < 1) throw PenaltyError("the grid needs at least one value");
    if (!(kappa > 0.0 && kappa < 1.0)) throw PenaltyError("kappa must lie in (0, 1)");
    std::vector<double> grid(m);
    grid[0] = lambda_max;
    if (m == 1) return grid;
    const double hi = std::log10(lambda_max);
    const double lo = std::log10(kappa * lambda_max);
    for (std::size_t i = 1; i < m; ++i) {
        const double mu = hi + (lo - hi) * static_cast<double>(i) / static_cast<double>(m - 1);
        grid[i] = std::pow(10.0, mu);
    }
    return grid;
}

std::vector<std::size_t> parse_groups_csv(const std::string& text, const std::vector<std::string>& feature_names) {
    auto lines = detail::nonempty_lines(text);
    if (lines.empty()) throw DataError("groups CSV is empty");
    if (lines[0].rfind("\xEF\xBB\xBF", 0) == 0) lines[0].erase(0, 3);
    const auto header = detail::split_csv_line(lines[0]);
    if (header.size() != 2 || header[0] != "feature" || header[1] != "group") {
        throw DataError("groups CSV header must be 'feature,group'");
    }
    std::map<std::string, std::size_t> feature_index;
    for (std::size_t k = 0; k < feature_names.size(); ++k) feature_index.emplace(feature_names[k], k);

    constexpr auto unset = static_cast<std::size_t>(-1);
    std::vector<std::size_t> group_of(feature_names.size(), unset);
    std::map<std::string, std::size_t> label_ids;
    for (std::size_t r = 1; r < lines.size(); ++r) {
        const auto cells = detail::split_csv_line(lines[r]);
        const std::string where = "groups CSV line " + std::to_string(r + 1);
        if (cells.size() != 2) throw DataError(where + ": expected 2 columns");
        const auto it = feature_index.find(cells[0]);
        if (it == feature_index.end()) throw DataError(where + ": unknown feature '" + cells[0] + "'");
        if (group_of[it->second] != unset) throw DataError(where + ": feature '" + cells[0] + "' listed twice");
        const auto [lab, inserted] = label_ids.emplace(cells[1], label_ids.size());
        group_of[it->second] = lab->second;
    }
    for (std::size_t k = 0; k < group_of.size(); ++k) {
        if (group_of[k] == unset) throw DataError("feature '" + feature_names[k] + "' has no group");
    }
    return group_of;
}

std::vector<std::size_t> read_groups_csv(const std::string& path, const std::vector<std::string>& feature_names) {
    return parse_groups_csv(detail::read_file(path), feature_names);
}

}  // namespace rankaft
