#include "report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

namespace rank_aft_cli {

using namespace rankaft;

std::string fmt(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

namespace {

json vec(const Vector& v) {
    json out = json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v[k]);
    return out;
}

json penalty_fields(const PenaltySpec& spec) {
    return {{"penalty", to_string(spec.kind)}, {"alpha", spec.alpha}};
}

// CSV cells are written raw; quote only when a name would break the row.
std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

}  // namespace

json fit_json(const FitResult& fit, const PenaltySpec& spec, const std::vector<std::string>& names) {
    json out = {{"method", "gehan"}};
    out.update(penalty_fields(spec));
    out["lambda"] = fit.lambda;
    out["feature_names"] = names;
    out["beta_hat"] = vec(fit.beta_hat);
    out["iterations"] = fit.iterations;
    out["converged"] = fit.converged;
    out["primal_residual"] = fit.primal_residual;
    out["dual_residual"] = fit.dual_residual;
    out["objective"] = fit.objective;
    out["rho_final"] = fit.rho_final;
    return out;
}

json wls_fit_json(const WlsResult& fit, const PenaltySpec& spec, const std::vector<std::string>& names) {
    json out = {{"method", "wls"}};
    out.update(penalty_fields(spec));
    out["lambda"] = fit.lambda;
    out["feature_names"] = names;
    out["beta_hat"] = vec(fit.beta_hat);
    out["intercept"] = fit.intercept;
    out["iterations"] = fit.iterations;
    out["converged"] = fit.converged;
    out["objective"] = fit.objective;
    return out;
}

json path_json(const SolutionPath& path, const std::vector<std::string>& names) {
    json betas = json::array();
    for (const auto& b : path.betas) {
        json entry = json::object();
        for (SparseVector::InnerIterator it(b); it; ++it) entry[std::to_string(it.index())] = it.value();
        betas.push_back(std::move(entry));
    }
    json conv = json::array();
    for (bool c : path.converged) conv.push_back(c);
    return {{"lambdas", path.lambdas},     {"alpha", path.alpha},         {"kind", to_string(path.kind)},
            {"feature_names", names},      {"betas", std::move(betas)},   {"nnz", path.nnz},
            {"iterations", path.iterations}, {"converged", std::move(conv)}, {"objectives", path.objectives}};
}

json cv_json(const CvResult& cv) {
    json out = {{"lambdas", cv.lambdas},
                {"cv_lp", cv.cv_linear_predictor},
                {"cv_gehan_mean", cv.cv_gehan_loss},
                {"cv_gehan_se", cv.cv_gehan_se},
                {"best_lambda_lp", cv.best_lambda_lp},
                {"best_lambda_1se", cv.best_lambda_1se},
                {"K", cv.folds},
                {"seed", cv.seed},
                {"fold_assignment", cv.fold_assignment}};
    if (!cv.warnings.empty()) out["warnings"] = cv.warnings;
    return out;
}

void write_trace_csv(std::ostream& out, const SolutionPath& path, const std::vector<std::string>& names) {
    out << "lambda";
    for (const auto& name : names) out << ',' << csv_cell(name);
    out << '\n';
    for (std::size_t m = 0; m < path.size(); ++m) {
        const Vector b = path.beta(m);
        out << fmt(path.lambdas[m]);
        for (Eigen::Index k = 0; k < b.size(); ++k) out << ',' << fmt(b[k]);
        out << '\n';
    }
}

void write_cv_curve_csv(std::ostream& out, const CvResult& cv) {
    out << "lambda,cv_lp,cv_gehan_mean,cv_gehan_se\n";
    for (std::size_t m = 0; m < cv.lambdas.size(); ++m) {
        out << fmt(cv.lambdas[m]) << ',' << fmt(cv.cv_linear_predictor[m]) << ',' << fmt(cv.cv_gehan_loss[m]) << ','
            << fmt(cv.cv_gehan_se[m]) << '\n';
    }
}

void write_sim_csv(std::ostream& out, const std::vector<SimRow>& rows) {
    out << "method,n,p,sigma,seed,concordance,model_error,nnz,runtime_ms,lambda\n";
    for (const auto& r : rows) {
        out << r.metrics.method << ',' << r.n << ',' << r.p << ',' << fmt(r.sigma) << ',' << r.seed << ','
            << fmt(r.metrics.concordance) << ',' << fmt(r.metrics.model_error) << ',' << r.metrics.nnz << ','
            << fmt(r.metrics.runtime_ms) << ',' << fmt(r.metrics.lambda) << '\n';
    }
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "n,p,alpha,rep,seed,pairs,lambda_max,seconds,total_iterations,unconverged\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.p << ',' << fmt(r.alpha) << ',' << r.rep << ',' << r.seed << ',' << r.pairs << ','
            << fmt(r.lambda_max) << ',' << fmt(r.seconds) << ',' << r.total_iterations << ',' << r.unconverged << '\n';
    }
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << text;
    if (!f) throw std::runtime_error("failed writing " + path);
}

}  // namespace rank_aft_cli
