#include "rankaft/data.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csv.hpp"

namespace rankaft {

SurvivalDataset::SurvivalDataset(Vector log_y, std::vector<std::uint8_t> delta, Matrix x,
                                 std::vector<std::string> feature_names)
    : log_y_(std::move(log_y)),
      delta_(std::move(delta)),
      x_(std::move(x)),
      feature_names_(std::move(feature_names)) {
    const auto n = static_cast<std::size_t>(log_y_.size());
    if (delta_.size() != n || static_cast<std::size_t>(x_.rows()) != n) {
        throw DataError("log_y, delta and X must have the same number of rows");
    }
    if (n < 2) throw DataError("need at least two observations");
    if (n > std::numeric_limits<std::uint32_t>::max()) throw DataError("too many observations");
    if (!log_y_.allFinite()) throw DataError("log-times must be finite");
    if (!x_.allFinite()) throw DataError("covariate matrix contains non-finite values");
    for (auto d : delta_) {
        if (d > 1) throw DataError("censoring indicators must be 0 or 1");
    }
    if (num_events() == 0) throw DataError("all observations are censored");
    if (feature_names_.empty()) {
        feature_names_.reserve(p());
        for (std::size_t k = 0; k < p(); ++k) feature_names_.push_back("x" + std::to_string(k + 1));
    } else if (feature_names_.size() != p()) {
        throw DataError("feature_names must have one entry per column of X");
    }
}

SurvivalDataset SurvivalDataset::from_times(const Vector& y, std::vector<std::uint8_t> delta, Matrix x,
                                            std::vector<std::string> feature_names) {
    Vector log_y(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0) || !std::isfinite(y[i])) {
            throw DataError("time must be positive and finite (row " + std::to_string(i + 1) + ")");
        }
        log_y[i] = std::log(y[i]);
    }
    return SurvivalDataset(std::move(log_y), std::move(delta), std::move(x), std::move(feature_names));
}

std::size_t SurvivalDataset::num_events() const {
    return static_cast<std::size_t>(std::count(delta_.begin(), delta_.end(), std::uint8_t{1}));
}

SurvivalDataset SurvivalDataset::subset(const std::vector<std::size_t>& rows) const {
    Vector ly(static_cast<Eigen::Index>(rows.size()));
    std::vector<std::uint8_t> d(rows.size());
    Matrix xs(static_cast<Eigen::Index>(rows.size()), x_.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(rows[r]);
        if (rows[r] >= n()) throw DataError("subset row out of range");
        ly[static_cast<Eigen::Index>(r)] = log_y_[i];
        d[r] = delta_[rows[r]];
        xs.row(static_cast<Eigen::Index>(r)) = x_.row(i);
    }
    return SurvivalDataset(std::move(ly), std::move(d), std::move(xs), feature_names_);
}

ComparablePairSet::ComparablePairSet(const SurvivalDataset& data) : n_(data.n()) {
    const auto& delta = data.delta();
    std::size_t count = 0;
    // Pairs with first member an event: all later j. Otherwise only later events.
    std::vector<std::size_t> events_after(n_ + 1, 0);
    for (std::size_t i = n_; i-- > 0;) events_after[i] = events_after[i + 1] + delta[i];
    for (std::size_t i = 0; i < n_; ++i) count += delta[i] ? (n_ - i - 1) : events_after[i + 1];

    first_.reserve(count);
    second_.reserve(count);
    delta_first_.reserve(count);
    delta_second_.reserve(count);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            if (delta[i] + delta[j] == 0) continue;
            first_.push_back(static_cast<std::uint32_t>(i));
            second_.push_back(static_cast<std::uint32_t>(j));
            delta_first_.push_back(delta[i]);
            delta_second_.push_back(delta[j]);
        }
    }
}

void ComparablePairSet::apply(const Vector& v, Vector& out) const {
    if (static_cast<std::size_t>(v.size()) != n_) throw DataError("apply: vector length must equal n");
    out.resize(static_cast<Eigen::Index>(size()));
    const double* vp = v.data();
    double* op = out.data();
    for (std::size_t k = 0; k < first_.size(); ++k) op[k] = vp[first_[k]] - vp[second_[k]];
}

Vector ComparablePairSet::apply(const Vector& v) const {
    Vector out;
    apply(v, out);
    return out;
}

void ComparablePairSet::apply_transpose(const Vector& u, Vector& out) const {
    if (static_cast<std::size_t>(u.size()) != size()) {
        throw DataError("apply_transpose: vector length must equal the number of pairs");
    }
    out.setZero(static_cast<Eigen::Index>(n_));
    const double* up = u.data();
    double* op = out.data();
    for (std::size_t k = 0; k < first_.size(); ++k) {
        op[first_[k]] += up[k];
        op[second_[k]] -= up[k];
    }
}

Vector ComparablePairSet::apply_transpose(const Vector& u) const {
    Vector out;
    apply_transpose(u, out);
    return out;
}

std::size_t ComparablePairSet::memory_bytes() const {
    return first_.capacity() * sizeof(std::uint32_t) + second_.capacity() * sizeof(std::uint32_t) +
           delta_first_.capacity() + delta_second_.capacity();
}

SurvivalDataset parse_survival_csv(const std::string& text) {
    auto lines = detail::nonempty_lines(text);
    if (lines.empty()) throw DataError("input CSV is empty");
    if (lines[0].rfind("\xEF\xBB\xBF", 0) == 0) lines[0].erase(0, 3);

    const auto header = detail::split_csv_line(lines[0]);
    if (header.size() < 2 || header[0] != "time" || header[1] != "status") {
        throw DataError("CSV header must start with 'time,status'");
    }
    const std::size_t p = header.size() - 2;
    const std::size_t n = lines.size() - 1;
    std::vector<std::string> names(header.begin() + 2, header.end());

    Vector y(static_cast<Eigen::Index>(n));
    std::vector<std::uint8_t> delta(n);
    Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    for (std::size_t r = 0; r < n; ++r) {
        const auto cells = detail::split_csv_line(lines[r + 1]);
        const std::string row = "line " + std::to_string(r + 2);
        if (cells.size() != header.size()) {
            throw DataError(row + ": expected " + std::to_string(header.size()) + " columns, got " +
                            std::to_string(cells.size()));
        }
        y[static_cast<Eigen::Index>(r)] = detail::parse_number(cells[0], row + ", column 'time'");
        const double status = detail::parse_number(cells[1], row + ", column 'status'");
        if (status != 0.0 && status != 1.0) throw DataError(row + ": status must be 0 or 1");
        delta[r] = static_cast<std::uint8_t>(status);
        for (std::size_t k = 0; k < p; ++k) {
            x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) =
                detail::parse_number(cells[k + 2], row + ", column '" + header[k + 2] + "'");
        }
    }
    return SurvivalDataset::from_times(y, std::move(delta), std::move(x), std::move(names));
}

SurvivalDataset read_survival_csv(const std::string& path) {
    return parse_survival_csv(detail::read_file(path));
}

}  // namespace rankaft
