#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rankaft {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Raised for malformed input: shape mismatches, invalid indicators, bad CSV cells.
class DataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Right-censored observations on the log-time scale.
///
/// Immutable after construction. `delta[i] == 1` means the failure time of
/// subject i was observed; 0 means it was censored.
class SurvivalDataset {
public:
    /// Takes log-times directly.
    SurvivalDataset(Vector log_y, std::vector<std::uint8_t> delta, Matrix x,
                    std::vector<std::string> feature_names = {});

    /// Takes raw positive times and applies the natural log. Non-positive times are rejected.
    static SurvivalDataset from_times(const Vector& y, std::vector<std::uint8_t> delta, Matrix x,
                                      std::vector<std::string> feature_names = {});

    std::size_t n() const { return static_cast<std::size_t>(log_y_.size()); }
    std::size_t p() const { return static_cast<std::size_t>(x_.cols()); }

    const Vector& log_y() const { return log_y_; }
    const std::vector<std::uint8_t>& delta() const { return delta_; }
    const Matrix& x() const { return x_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    std::size_t num_events() const;

    /// Rows in `rows`, in that order.
    SurvivalDataset subset(const std::vector<std::size_t>& rows) const;

private:
    Vector log_y_;
    std::vector<std::uint8_t> delta_;
    Matrix x_;
    std::vector<std::string> feature_names_;
};

/// The comparable-pair set: all (i, j), i < j, with at least one observed event.
///
/// Pairs are stored in lexicographic order as two index arrays; the difference
/// operator rows carry implicit +1 at `first` and -1 at `second`, so nothing of
/// size |D| x n is ever materialized.
class ComparablePairSet {
public:
    explicit ComparablePairSet(const SurvivalDataset& data);

    std::size_t size() const { return first_.size(); }
    std::size_t n() const { return n_; }

    const std::vector<std::uint32_t>& first() const { return first_; }
    const std::vector<std::uint32_t>& second() const { return second_; }
    /// Censoring indicator of the first / second member of each pair (columns of the pair-censoring matrix).
    const std::vector<std::uint8_t>& delta_first() const { return delta_first_; }
    const std::vector<std::uint8_t>& delta_second() const { return delta_second_; }

    /// out_k = v_i - v_j for pair k = (i, j).
    Vector apply(const Vector& v) const;
    void apply(const Vector& v, Vector& out) const;

    /// Adjoint of apply.
    Vector apply_transpose(const Vector& u) const;
    void apply_transpose(const Vector& u, Vector& out) const;

    /// Bytes held by the pair storage.
    std::size_t memory_bytes() const;

private:
    std::size_t n_;
    std::vector<std::uint32_t> first_;
    std::vector<std::uint32_t> second_;
    std::vector<std::uint8_t> delta_first_;
    std::vector<std::uint8_t> delta_second_;
};

inline ComparablePairSet build_pairs(const SurvivalDataset& data) { return ComparablePairSet(data); }

/// Reads `time,status,<features...>` CSV with a header row. Strict: any
/// non-numeric cell is an error.
SurvivalDataset read_survival_csv(const std::string& path);
SurvivalDataset parse_survival_csv(const std::string& text);

}  // namespace rankaft
