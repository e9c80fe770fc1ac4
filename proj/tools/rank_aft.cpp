// rank_aft: fit, path, cv, simulate and bench front end for the rankaft library.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rankaft/cv.hpp"
#include "rankaft/lambda_max.hpp"
#include "rankaft/log.hpp"
#include "rankaft/parallel.hpp"
#include "rankaft/path.hpp"
#include "rankaft/simulate.hpp"
#include "rankaft/wls.hpp"
#include "report.hpp"

using namespace rankaft;
using namespace rank_aft_cli;

namespace {

/// Raised when --strict is set and some fit stopped at max_iter.
struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverArgs {
    double eps_rel = SolverOptions{}.eps_rel;
    double eps_abs = SolverOptions{}.eps_abs;
    std::size_t max_iter = SolverOptions{}.max_iter;
    double tau = SolverOptions{}.tau;
    double rho = SolverOptions{}.rho_init;
    bool fixed_rho = false;

    SolverOptions options() const {
        SolverOptions o;
        o.eps_rel = eps_rel;
        o.eps_abs = eps_abs;
        o.max_iter = max_iter;
        o.tau = tau;
        o.rho_init = rho;
        o.adaptive_rho = !fixed_rho;
        return o;
    }
};

struct ModelArgs {
    std::string input;
    std::string groups;
    std::string penalty = "en";
    std::string method = "gehan";
    double alpha = 1.0;
    std::vector<std::string> unpenalized;
    std::optional<double> lambda_max;
    bool strict = false;
    SolverArgs solver;
};

void add_solver_flags(CLI::App* cmd, SolverArgs& s) {
    cmd->add_option("--eps-rel", s.eps_rel, "Relative residual tolerance")->capture_default_str();
    cmd->add_option("--eps-abs", s.eps_abs, "Absolute residual tolerance")->capture_default_str();
    cmd->add_option("--max-iter", s.max_iter, "Iteration cap per fit")->capture_default_str();
    cmd->add_option("--tau", s.tau, "Dual step over-relaxation, in (0, 1.618)")->capture_default_str();
    cmd->add_option("--rho", s.rho, "Initial ADMM step size")->capture_default_str();
    cmd->add_flag("--fixed-rho", s.fixed_rho, "Keep rho at its initial value");
}

void add_model_flags(CLI::App* cmd, ModelArgs& m, bool with_method) {
    cmd->add_option("--input,-i", m.input, "CSV with time, status and feature columns")->required()->check(
        CLI::ExistingFile);
    cmd->add_option("--groups", m.groups, "feature,group CSV (required for --penalty sgl)")->check(CLI::ExistingFile);
    cmd->add_option("--penalty", m.penalty, "Penalty family")->check(CLI::IsMember({"en", "sgl"}))->capture_default_str();
    cmd->add_option("--alpha", m.alpha, "Mixing parameter in [0, 1]")->capture_default_str();
    cmd->add_option("--unpenalized", m.unpenalized, "Feature names left unpenalized")->delimiter(',');
    if (with_method) {
        cmd->add_option("--method", m.method, "Estimator")->check(CLI::IsMember({"gehan", "wls"}))->capture_default_str();
    }
    cmd->add_flag("--strict", m.strict, "Exit with code 2 if any fit hits --max-iter");
    add_solver_flags(cmd, m.solver);
}

PenaltySpec build_spec(const ModelArgs& m, const SurvivalDataset& data) {
    const auto& names = data.feature_names();
    PenaltySpec spec;
    if (m.penalty == "sgl") {
        if (m.groups.empty()) throw std::invalid_argument("--penalty sgl needs --groups");
        spec = PenaltySpec::sparse_group_lasso(read_groups_csv(m.groups, names), m.alpha);
    } else {
        if (!m.groups.empty()) log(LogLevel::Info, "--groups ignored for the elastic net");
        spec = PenaltySpec::elastic_net(data.p(), m.alpha);
    }
    for (const auto& name : m.unpenalized) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) throw std::invalid_argument("--unpenalized: unknown feature '" + name + "'");
        spec.w[it - names.begin()] = 0.0;
    }
    // A group made only of unpenalized features drops its group term too.
    for (std::size_t g = 0; g < spec.groups.size(); ++g) {
        const bool free = std::all_of(spec.groups[g].begin(), spec.groups[g].end(),
                                      [&](std::size_t k) { return spec.w[static_cast<Eigen::Index>(k)] == 0.0; });
        if (free) spec.v[static_cast<Eigen::Index>(g)] = 0.0;
    }
    spec.validate(data.p());
    return spec;
}

void check_strict(bool strict, std::size_t unconverged, const std::string& what) {
    if (unconverged == 0) return;
    const std::string msg = what + ": " + std::to_string(unconverged) + " fit(s) stopped at --max-iter";
    if (strict) throw NotConverged(msg);
    log(LogLevel::Error, "warning: " + msg);
}

double head_lambda(const ModelArgs& m, const GehanProblem& problem, const PenaltySpec& spec, const SolverOptions& o) {
    if (m.lambda_max) {
        if (!(*m.lambda_max > 0.0)) throw std::invalid_argument("--lambda-max must be positive");
        return *m.lambda_max;
    }
    return lambda_max(problem, spec, o);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- fit

struct FitArgs {
    ModelArgs model;
    double lambda = 0.0;
    std::string output;
};

void cmd_fit(const FitArgs& a) {
    const auto data = read_survival_csv(a.model.input);
    const auto spec = build_spec(a.model, data);
    json out;
    bool converged = true;
    if (a.model.method == "wls") {
        WlsOptions wo;
        wo.max_iter = a.model.solver.max_iter;
        const auto r = fit_wls(data, spec, a.lambda, wo);
        converged = r.converged;
        out = wls_fit_json(r, spec, data.feature_names());
    } else {
        const GehanProblem problem(data);
        const auto r = fit(problem, spec, a.lambda, a.model.solver.options());
        log(LogLevel::Info, "fit: " + std::to_string(r.iterations) + " iterations, |D| = " +
                                std::to_string(problem.pairs().size()));
        converged = r.converged;
        out = fit_json(r, spec, data.feature_names());
    }
    emit(a.output, out.dump(2) + "\n");
    check_strict(a.model.strict, converged ? 0 : 1, "fit");
}

// ---- path

struct PathArgs {
    ModelArgs model;
    std::size_t nlambda = 100;
    double kappa = 0.25;
    bool cold = false;
    std::string output;
    std::string trace;
};

SolutionPath wls_path(const ModelArgs& m, const SurvivalDataset& data, const PenaltySpec& spec, std::size_t nlambda,
                      double kappa) {
    const WlsProblem problem(data);
    const double top = m.lambda_max ? *m.lambda_max : problem.lambda_max(spec);
    WlsOptions wo;
    wo.max_iter = m.solver.max_iter;
    SolutionPath path;
    path.lambdas = lambda_grid(top, nlambda, kappa);
    path.alpha = spec.alpha;
    path.kind = spec.kind;
    for (const auto& r : fit_wls_path(problem, spec, path.lambdas, wo)) {
        path.betas.push_back(sparsify(r.beta_hat));
        path.nnz.push_back(static_cast<std::size_t>(path.betas.back().nonZeros()));
        path.iterations.push_back(r.iterations);
        path.converged.push_back(r.converged);
        path.objectives.push_back(r.objective);
    }
    return path;
}

void cmd_path(const PathArgs& a) {
    const auto data = read_survival_csv(a.model.input);
    const auto spec = build_spec(a.model, data);
    const auto t0 = std::chrono::steady_clock::now();
    SolutionPath path;
    if (a.model.method == "wls") {
        path = wls_path(a.model, data, spec, a.nlambda, a.kappa);
    } else {
        const GehanProblem problem(data);
        const auto opts = a.model.solver.options();
        const double top = head_lambda(a.model, problem, spec, opts);
        path = fit_path_at(problem, spec, lambda_grid(top, a.nlambda, a.kappa), opts, !a.cold);
    }
    log(LogLevel::Info, "path: " + std::to_string(path.size()) + " fits in " + fmt(seconds_since(t0)) + " s");

    emit(a.output, path_json(path, data.feature_names()).dump(2) + "\n");
    if (!a.trace.empty()) {
        std::ostringstream csv;
        write_trace_csv(csv, path, data.feature_names());
        emit(a.trace, csv.str());
    }
    check_strict(a.model.strict, static_cast<std::size_t>(std::count(path.converged.begin(), path.converged.end(), false)),
                 "path");
}

// ---- cv

struct CvArgs {
    ModelArgs model;
    std::size_t nlambda = 100;
    double kappa = 0.25;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string output;
    std::string curve;
};

void cmd_cv(const CvArgs& a) {
    if (a.model.method != "gehan") throw std::invalid_argument("cv supports --method gehan only");
    const auto data = read_survival_csv(a.model.input);
    const auto spec = build_spec(a.model, data);
    const GehanProblem problem(data);
    CvOptions co;
    co.folds = a.folds;
    co.seed = a.seed;
    co.threads = a.threads;
    co.solver = a.model.solver.options();

    // Non-convergence is counted through the iteration hook, which sees every fold fit.
    std::atomic<std::size_t> capped{0};
    co.solver.on_iteration = [&, cap = co.solver.max_iter](const SolverState& s) {
        if (s.iter == cap) ++capped;
    };
    const auto lambdas = lambda_grid(head_lambda(a.model, problem, spec, a.model.solver.options()), a.nlambda, a.kappa);
    const auto cv = cross_validate(data, spec, lambdas, co);
    for (const auto& w : cv.warnings) log(LogLevel::Error, "warning: " + w);

    emit(a.output, cv_json(cv).dump(2) + "\n");
    if (!a.curve.empty()) {
        std::ostringstream csv;
        write_cv_curve_csv(csv, cv);
        emit(a.curve, csv.str());
    }
    // A fit that converges exactly at the cap is counted too; that errs on the safe side.
    check_strict(a.model.strict, capped.load(), "cv");
}

// ---- simulate

struct SimArgs {
    std::size_t n = 100;
    std::size_t p = 50;
    double sigma = 2.0;
    std::string error = "logistic";
    double rho_ar = 0.5;
    std::string beta = "sparse";
    std::size_t nonzero = 10;
    std::size_t group_size = 10;
    std::size_t reps = 10;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::string penalty = "en";
    double alpha = 0.5;
    std::size_t nlambda = 100;
    double kappa = 0.1;
    bool with_cv = false;
    std::size_t folds = 10;
    std::size_t n_validation = 200;
    std::size_t n_test = 1000;
    std::string output;
};

void cmd_simulate(const SimArgs& a) {
    if (a.reps == 0) throw std::invalid_argument("--reps must be positive");
    ComparisonConfig base;
    base.sim.n = a.n;
    base.sim.p = a.p;
    base.sim.sigma = a.sigma;
    base.sim.error = a.error == "normal" ? ErrorDist::Normal : ErrorDist::Logistic;
    base.sim.rho_ar = a.rho_ar;
    base.sim.n_validation = a.n_validation;
    base.sim.n_test = a.n_test;
    base.sim.beta_star.group_size = a.group_size;
    if (a.beta == "grouped") {
        base.sim.beta_star.kind = BetaStarSpec::Kind::Grouped;
    } else {
        base.sim.beta_star.count = a.nonzero;
    }
    base.penalty = a.penalty == "sgl" ? PenaltyKind::SparseGroupLasso : PenaltyKind::ElasticNet;
    base.alpha = a.alpha;
    base.nlambda = a.nlambda;
    base.kappa = a.kappa;
    base.with_cv = a.with_cv;
    base.cv_folds = a.folds;
    base.sim.validate();

    std::vector<std::vector<MethodMetrics>> per_rep(a.reps);
    parallel_for(a.reps, a.threads, [&](std::size_t r) {
        ComparisonConfig c = base;
        c.sim.seed = a.seed + r;
        per_rep[r] = run_comparison(c);
        log(LogLevel::Info, "simulate: replication " + std::to_string(r) + " done");
    });

    std::vector<SimRow> rows;
    for (std::size_t r = 0; r < a.reps; ++r) {
        for (const auto& m : per_rep[r]) rows.push_back({a.n, a.p, a.sigma, a.seed + r, m});
    }
    std::ostringstream csv;
    write_sim_csv(csv, rows);
    emit(a.output, csv.str());
}

// ---- bench

struct BenchArgs {
    std::vector<std::size_t> n{100};
    std::vector<std::size_t> p{100, 200};
    std::vector<double> alpha{1.0};
    std::string penalty = "en";
    std::size_t group_size = 10;
    std::size_t reps = 1;
    std::uint64_t seed = 1;
    std::size_t threads = 1;
    std::size_t nlambda = 100;
    double kappa = 0.25;
    bool strict = false;
    SolverArgs solver;
    std::string output;
};

void cmd_bench(const BenchArgs& a) {
    struct Cell {
        std::size_t n, p;
        double alpha;
        std::size_t rep;
    };
    std::vector<Cell> cells;
    for (auto n : a.n)
        for (auto p : a.p)
            for (auto al : a.alpha)
                for (std::size_t r = 0; r < a.reps; ++r) cells.push_back({n, p, al, r});

    const auto opts = a.solver.options();
    std::vector<BenchRow> rows(cells.size());
    parallel_for(cells.size(), a.threads, [&](std::size_t i) {
        const auto& c = cells[i];
        SimConfig sc;
        sc.n = c.n;
        sc.p = c.p;
        sc.n_validation = 0;
        sc.n_test = 2;
        sc.beta_star.count = std::min<std::size_t>(10, c.p);
        sc.seed = a.seed + c.rep;
        const auto sim = generate(sc);

        PenaltySpec spec;
        if (a.penalty == "sgl") {
            std::vector<std::size_t> group_of(c.p);
            for (std::size_t k = 0; k < c.p; ++k) group_of[k] = k / a.group_size;
            spec = PenaltySpec::sparse_group_lasso(group_of, c.alpha);
        } else {
            spec = PenaltySpec::elastic_net(c.p, c.alpha);
        }

        // Timed from problem setup (pairs, eta) through the last grid point.
        const auto t0 = std::chrono::steady_clock::now();
        const GehanProblem problem(sim.train);
        const double top = lambda_max(problem, spec, opts);
        const auto path = fit_path_at(problem, spec, lambda_grid(top, a.nlambda, a.kappa), opts);
        const double secs = seconds_since(t0);

        BenchRow& row = rows[i];
        row.n = c.n;
        row.p = c.p;
        row.alpha = c.alpha;
        row.rep = c.rep;
        row.seed = sc.seed;
        row.pairs = problem.pairs().size();
        row.lambda_max = top;
        row.seconds = secs;
        for (auto it : path.iterations) row.total_iterations += it;
        row.unconverged = static_cast<std::size_t>(std::count(path.converged.begin(), path.converged.end(), false));
        log(LogLevel::Info, "bench: n=" + std::to_string(c.n) + " p=" + std::to_string(c.p) + " alpha=" +
                                fmt(c.alpha) + " " + fmt(secs) + " s");
    });

    std::ostringstream csv;
    write_bench_csv(csv, rows);
    emit(a.output, csv.str());
    std::size_t unconverged = 0;
    for (const auto& r : rows) unconverged += r.unconverged;
    check_strict(a.strict, unconverged, "bench");
}

std::string one_line(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Penalized Gehan-loss AFT regression fitted by prox-linear ADMM"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "rank_aft 1.0");

    FitArgs fa;
    auto* fit_cmd = app.add_subcommand("fit", "Fit at one lambda; FitResult JSON");
    add_model_flags(fit_cmd, fa.model, true);
    fit_cmd->add_option("--lambda", fa.lambda, "Penalty level")->required()->check(CLI::NonNegativeNumber);
    fit_cmd->add_option("--output,-o", fa.output, "JSON destination (default stdout)");

    PathArgs pa;
    auto* path_cmd = app.add_subcommand("path", "Warm-started solution path; path JSON and trace CSV");
    add_model_flags(path_cmd, pa.model, true);
    path_cmd->add_option("--nlambda", pa.nlambda, "Grid size")->capture_default_str()->check(CLI::PositiveNumber);
    path_cmd->add_option("--kappa", pa.kappa, "Smallest lambda as a fraction of lambda_max")->capture_default_str();
    path_cmd->add_option("--lambda-max", pa.model.lambda_max, "Override the computed path head");
    path_cmd->add_flag("--cold", pa.cold, "Cold-start every grid point");
    path_cmd->add_option("--output,-o", pa.output, "Path JSON destination (default stdout)");
    path_cmd->add_option("--trace", pa.trace, "Coefficient trace CSV destination");

    CvArgs ca;
    auto* cv_cmd = app.add_subcommand("cv", "K-fold cross-validation; CV JSON and curve CSV");
    add_model_flags(cv_cmd, ca.model, true);
    cv_cmd->add_option("--nlambda", ca.nlambda, "Grid size")->capture_default_str()->check(CLI::PositiveNumber);
    cv_cmd->add_option("--kappa", ca.kappa, "Smallest lambda as a fraction of lambda_max")->capture_default_str();
    cv_cmd->add_option("--lambda-max", ca.model.lambda_max, "Override the computed grid head");
    cv_cmd->add_option("--K", ca.folds, "Number of folds")->capture_default_str();
    cv_cmd->add_option("--seed", ca.seed, "Fold assignment seed")->capture_default_str();
    cv_cmd->add_option("--threads", ca.threads, "Folds fitted concurrently")->capture_default_str()->check(
        CLI::PositiveNumber);
    cv_cmd->add_option("--output,-o", ca.output, "CV JSON destination (default stdout)");
    cv_cmd->add_option("--curve", ca.curve, "CV curve CSV destination");

    SimArgs sa;
    auto* sim_cmd = app.add_subcommand("simulate", "Gehan versus weighted least squares on synthetic data");
    sim_cmd->add_option("--n", sa.n, "Training size")->capture_default_str();
    sim_cmd->add_option("--p", sa.p, "Number of covariates")->capture_default_str();
    sim_cmd->add_option("--sigma", sa.sigma, "Error scale")->capture_default_str();
    sim_cmd->add_option("--error", sa.error, "Error law")->check(CLI::IsMember({"logistic", "normal"}))->capture_default_str();
    sim_cmd->add_option("--rho-ar", sa.rho_ar, "AR(1) correlation of the covariates")->capture_default_str();
    sim_cmd->add_option("--beta", sa.beta, "True coefficient layout")
        ->check(CLI::IsMember({"sparse", "grouped"}))
        ->capture_default_str();
    sim_cmd->add_option("--nonzero", sa.nonzero, "Nonzero true coefficients (sparse layout)")->capture_default_str();
    sim_cmd->add_option("--group-size", sa.group_size, "Group size (grouped layout, sgl)")->capture_default_str();
    sim_cmd->add_option("--reps", sa.reps, "Replications")->capture_default_str();
    sim_cmd->add_option("--seed", sa.seed, "Seed of replication 0; replication r uses seed + r")->capture_default_str();
    sim_cmd->add_option("--threads", sa.threads, "Replications run concurrently")->capture_default_str()->check(
        CLI::PositiveNumber);
    sim_cmd->add_option("--penalty", sa.penalty, "Penalty family")->check(CLI::IsMember({"en", "sgl"}))->capture_default_str();
    sim_cmd->add_option("--alpha", sa.alpha, "Mixing parameter")->capture_default_str();
    sim_cmd->add_option("--nlambda", sa.nlambda, "Grid size")->capture_default_str();
    sim_cmd->add_option("--kappa", sa.kappa, "Smallest lambda as a fraction of lambda_max")->capture_default_str();
    sim_cmd->add_flag("--cv", sa.with_cv, "Add a Gehan fit tuned by linear-predictor CV");
    sim_cmd->add_option("--K", sa.folds, "Folds for --cv")->capture_default_str();
    sim_cmd->add_option("--n-validation", sa.n_validation, "Validation set size")->capture_default_str();
    sim_cmd->add_option("--n-test", sa.n_test, "Test set size")->capture_default_str();
    sim_cmd->add_option("--output,-o", sa.output, "Metrics CSV destination (default stdout)");

    BenchArgs ba;
    auto* bench_cmd = app.add_subcommand("bench", "Full-path timing over an (n, p, alpha) grid");
    bench_cmd->add_option("--n", ba.n, "Sample sizes")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--p", ba.p, "Covariate counts")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--alpha", ba.alpha, "Mixing parameters")->delimiter(',')->capture_default_str();
    bench_cmd->add_option("--penalty", ba.penalty, "Penalty family")->check(CLI::IsMember({"en", "sgl"}))->capture_default_str();
    bench_cmd->add_option("--group-size", ba.group_size, "Consecutive group size for sgl")->capture_default_str();
    bench_cmd->add_option("--reps", ba.reps, "Replications per cell")->capture_default_str();
    bench_cmd->add_option("--seed", ba.seed, "Seed of replication 0")->capture_default_str();
    bench_cmd->add_option("--threads", ba.threads, "Cells run concurrently (timings then share cores)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--nlambda", ba.nlambda, "Grid size")->capture_default_str();
    bench_cmd->add_option("--kappa", ba.kappa, "Smallest lambda as a fraction of lambda_max")->capture_default_str();
    bench_cmd->add_flag("--strict", ba.strict, "Exit with code 2 if any fit hits --max-iter");
    add_solver_flags(bench_cmd, ba.solver);
    bench_cmd->add_option("--output,-o", ba.output, "Timing CSV destination (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == static_cast<int>(CLI::ExitCodes::Success)) return app.exit(e);
        std::cerr << "error: " << one_line(e.what()) << '\n';
        return 1;
    }

    try {
        if (fit_cmd->parsed()) cmd_fit(fa);
        if (path_cmd->parsed()) cmd_path(pa);
        if (cv_cmd->parsed()) cmd_cv(ca);
        if (sim_cmd->parsed()) cmd_simulate(sa);
        if (bench_cmd->parsed()) cmd_bench(ba);
    } catch (const NotConverged& e) {
        std::cerr << "error: " << one_line(e.what()) << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << one_line(e.what()) << '\n';
        return 1;
    }
    return 0;
}
