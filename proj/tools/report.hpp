#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rankaft/cv.hpp"
#include "rankaft/path.hpp"
#include "rankaft/simulate.hpp"
#include "rankaft/wls.hpp"

namespace rank_aft_cli {

using json = nlohmann::ordered_json;

/// Shortest decimal that round-trips; "nan"/"inf" spelled out.
std::string fmt(double x);

json fit_json(const rankaft::FitResult& fit, const rankaft::PenaltySpec& spec, const std::vector<std::string>& names);
json wls_fit_json(const rankaft::WlsResult& fit, const rankaft::PenaltySpec& spec,
                  const std::vector<std::string>& names);

/// {lambdas, alpha, kind, betas: [{index: value}], iterations, converged}; indices are 0-based.
json path_json(const rankaft::SolutionPath& path, const std::vector<std::string>& names);
json cv_json(const rankaft::CvResult& cv);

/// One row per lambda, one column per coefficient.
void write_trace_csv(std::ostream& out, const rankaft::SolutionPath& path, const std::vector<std::string>& names);
void write_cv_curve_csv(std::ostream& out, const rankaft::CvResult& cv);

struct SimRow {
    std::size_t n = 0;
    std::size_t p = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    rankaft::MethodMetrics metrics;
};
void write_sim_csv(std::ostream& out, const std::vector<SimRow>& rows);

struct BenchRow {
    std::size_t n = 0;
    std::size_t p = 0;
    double alpha = 0.0;
    std::size_t rep = 0;
    std::uint64_t seed = 0;
    std::size_t pairs = 0;
    double lambda_max = 0.0;
    double seconds = 0.0;
    std::size_t total_iterations = 0;
    std::size_t unconverged = 0;
};
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

/// Writes `text` to `path`, or stdout when `path` is empty or "-".
void emit(const std::string& path, const std::string& text);

}  // namespace rank_aft_cli
