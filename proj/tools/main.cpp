#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qfisher/estimation.hpp"
#include "qfisher/fisher.hpp"
#include "qfisher/score.hpp"
#include "qfisher/verify.hpp"
#include "qfisher/werner.hpp"

namespace {

using json = nlohmann::ordered_json;

// Shortest round-trip decimal form; keeps emitted files byte-stable across runs.
std::string format_double(double value) {
    std::array<char, 32> buffer{};
    const auto [ptr, ec] = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
    return std::string(buffer.data(), ptr);
}

void write_output(const std::string &content, const std::string &out_path) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        throw qfisher::Error("cannot open output file: " + out_path);
    }
    file << content;
}

struct GridSpec {
    double start = 0.0;
    double stop = 0.9;
    int count = 10;
};

bool parse_grid(const std::vector<double> &raw, GridSpec &grid, std::string &error) {
    if (raw.size() != 3) {
        error = "--theta-grid expects start,stop,count";
        return false;
    }
    grid.start = raw[0];
    grid.stop = raw[1];
    grid.count = static_cast<int>(raw[2]);
    if (static_cast<double>(grid.count) != raw[2] || grid.count < 2) {
        error = "--theta-grid count must be an integer >= 2";
        return false;
    }
    if (!(grid.start >= 0.0 && grid.start < grid.stop && grid.stop < 1.0)) {
        error = "--theta-grid requires 0 <= start < stop < 1";
        return false;
    }
    return true;
}

std::vector<double> grid_points(const GridSpec &grid) {
    std::vector<double> points(static_cast<std::size_t>(grid.count));
    for (int i = 0; i < grid.count; ++i) {
        points[static_cast<std::size_t>(i)] =
            (grid.start * (grid.count - 1 - i) + grid.stop * i) / (grid.count - 1);
    }
    return points;
}

int cmd_scan(int d, int n, const GridSpec &grid, bool check_dense, const std::string &format,
             const std::string &out_path, std::uint64_t dense_cap) {
    const qfisher::QuditSystem system(d, n);
    const double threshold = qfisher::separability_threshold(system);

    std::optional<qfisher::HermitianOperator> drho;
    if (check_dense) {
        drho.emplace(qfisher::derivative(system, dense_cap));
    }

    struct Row {
        double theta;
        double qfi_closed;
        std::optional<double> qfi_dense;
        double fidelity_closed;
        double cr_bound;
        bool is_entangled;
    };
    std::vector<Row> rows;
    for (double theta : grid_points(grid)) {
        Row row{};
        row.theta = theta;
        row.qfi_closed = qfisher::werner_qfi_closed_form(system, theta);
        row.fidelity_closed = qfisher::werner_fidelity_closed_form(system, theta);
        row.cr_bound = 1.0 / row.qfi_closed;
        row.is_entangled = theta > threshold;
        if (check_dense) {
            const qfisher::HermitianOperator rho =
                qfisher::density(qfisher::WernerState(system, theta), dense_cap);
            row.qfi_dense = qfisher::qfi_sld(rho, *drho);
        }
        rows.push_back(row);
    }

    if (format == "json") {
        json doc = json::array();
        for (const Row &row : rows) {
            json entry;
            entry["theta"] = row.theta;
            entry["qfi_closed"] = row.qfi_closed;
            entry["qfi_dense"] = row.qfi_dense ? json(*row.qfi_dense) : json(nullptr);
            entry["fidelity_closed"] = row.fidelity_closed;
            entry["cr_bound"] = row.cr_bound;
            entry["is_entangled"] = row.is_entangled;
            doc.push_back(std::move(entry));
        }
        write_output(doc.dump(2) + "\n", out_path);
    } else {
        std::ostringstream csv;
        csv << "theta,qfi_closed,qfi_dense,fidelity_closed,cr_bound,is_entangled\n";
        for (const Row &row : rows) {
            csv << format_double(row.theta) << ',' << format_double(row.qfi_closed) << ','
                << (row.qfi_dense ? format_double(*row.qfi_dense) : std::string{}) << ','
                << format_double(row.fidelity_closed) << ',' << format_double(row.cr_bound)
                << ',' << (row.is_entangled ? '1' : '0') << '\n';
        }
        write_output(csv.str(), out_path);
    }
    return 0;
}

int cmd_thresholds(int d_max, int n_max, const std::string &format,
                   const std::string &out_path) {
    struct Row {
        int d;
        int n;
        std::uint64_t dim;
        double theta_star;
        double theta_min;
        double gap;
        double fidelity_at_min;
    };
    std::vector<Row> rows;
    for (int d = 2; d <= d_max; ++d) {
        for (int n = 2; n <= n_max; ++n) {
            try {
                const qfisher::QuditSystem system(d, n);
                Row row{};
                row.d = d;
                row.n = n;
                row.dim = system.dim;
                row.theta_star = qfisher::separability_threshold(system);
                row.theta_min = qfisher::qfi_minimizer(system);
                row.gap = row.theta_min - row.theta_star;
                row.fidelity_at_min =
                    qfisher::werner_fidelity_closed_form(system, row.theta_min);
                rows.push_back(row);
            } catch (const qfisher::ValidationError &e) {
                std::cerr << "warning: skipping d=" << d << ", n=" << n << ": " << e.what()
                          << "\n";
            }
        }
    }

    if (format == "json") {
        json doc = json::array();
        for (const Row &row : rows) {
            json entry;
            entry["d"] = row.d;
            entry["n"] = row.n;
            entry["dim"] = row.dim;
            entry["theta_star"] = row.theta_star;
            entry["theta_min"] = row.theta_min;
            entry["gap"] = row.gap;
            entry["fidelity_at_min"] = row.fidelity_at_min;
            doc.push_back(std::move(entry));
        }
        write_output(doc.dump(2) + "\n", out_path);
    } else {
        std::ostringstream csv;
        csv << "d,n,D,theta_star,theta_min,gap,fidelity_at_min\n";
        for (const Row &row : rows) {
            csv << row.d << ',' << row.n << ',' << row.dim << ','
                << format_double(row.theta_star) << ',' << format_double(row.theta_min) << ','
                << format_double(row.gap) << ',' << format_double(row.fidelity_at_min) << '\n';
        }
        write_output(csv.str(), out_path);
    }
    return 0;
}

int cmd_score(int d, int n, double theta, double quad_tol, const std::string &out_path,
              std::uint64_t dense_cap) {
    const qfisher::QuditSystem system(d, n);
    const qfisher::WernerState state(system, theta);
    const qfisher::HermitianOperator rho = qfisher::density(state, dense_cap);
    const qfisher::HermitianOperator drho = qfisher::derivative(system, dense_cap);

    const qfisher::ScoreTriple triple = qfisher::score_triple(rho, drho);
    qfisher::QuadratureConfig cfg;
    cfg.rel_tol = quad_tol;
    const qfisher::HermitianOperator quadrature =
        qfisher::exact_score_quadrature(rho, drho, cfg);

    const auto dist = [](const qfisher::ComplexMatrix &a, const qfisher::ComplexMatrix &b) {
        return (a - b).norm();
    };
    const qfisher::ComplexMatrix &l_sld = triple.sld.matrix();
    const qfisher::ComplexMatrix &l_rld = triple.rld;
    const qfisher::ComplexMatrix &l_exact = triple.exact.matrix();
    const qfisher::ComplexMatrix &l_quad = quadrature.matrix();

    json doc;
    doc["d"] = d;
    doc["n"] = n;
    doc["theta"] = theta;
    doc["quad_rel_tol"] = quad_tol;
    json distances;
    distances["sld_rld"] = dist(l_sld, l_rld);
    distances["sld_exact_spectral"] = dist(l_sld, l_exact);
    distances["sld_exact_quadrature"] = dist(l_sld, l_quad);
    distances["rld_exact_spectral"] = dist(l_rld, l_exact);
    distances["rld_exact_quadrature"] = dist(l_rld, l_quad);
    distances["exact_spectral_exact_quadrature"] = dist(l_exact, l_quad);
    doc["frobenius_distances"] = std::move(distances);
    doc["sld_hermiticity_residual"] = (l_sld - l_sld.adjoint()).norm();
    json defining;
    defining["sld"] =
        ((rho.matrix() * l_sld + l_sld * rho.matrix()) / 2.0 - drho.matrix()).norm();
    defining["rld"] = (rho.matrix() * l_rld - drho.matrix()).norm();
    doc["defining_relation_residuals"] = std::move(defining);

    write_output(doc.dump(2) + "\n", out_path);
    return 0;
}

int cmd_simulate(int d, int n, double theta, std::uint64_t shots, std::uint64_t trials,
                 std::uint64_t seed, const std::string &povm_name,
                 const std::string &out_path, std::uint64_t dense_cap) {
    const qfisher::QuditSystem system(d, n);
    std::optional<qfisher::Povm> povm;
    if (povm_name == "ghz") {
        povm.emplace(qfisher::ghz_projective_povm(system, dense_cap));
    } else if (povm_name == "computational") {
        povm.emplace(
            qfisher::Povm::computational_basis(static_cast<Eigen::Index>(system.dim)));
    } else {
        povm.emplace(qfisher::Povm::trivial(static_cast<Eigen::Index>(system.dim)));
    }

    const qfisher::EstimationReport report =
        qfisher::run_experiment(system, theta, *povm, shots, trials, seed, dense_cap);

    json doc;
    json config;
    config["d"] = d;
    config["n"] = n;
    config["theta"] = theta;
    config["n_shots"] = shots;
    config["n_trials"] = trials;
    config["seed"] = seed;
    config["povm"] = povm_name;
    doc["config"] = std::move(config);
    json rep;
    rep["theta_true"] = report.theta_true;
    rep["n_shots"] = report.n_shots;
    rep["n_trials"] = report.n_trials;
    rep["seed"] = report.seed;
    rep["estimate_mean"] = report.estimate_mean;
    rep["estimate_variance"] = report.estimate_variance;
    rep["classical_bound"] = report.classical_bound;
    rep["quantum_bound"] = report.quantum_bound;
    json fisher;
    fisher["theta"] = report.fisher.theta;
    fisher["quantum_sld"] = report.fisher.quantum_sld;
    fisher["quantum_rld"] = report.fisher.quantum_rld;
    fisher["classical"] = report.fisher.classical;
    fisher["cr_bound"] = report.fisher.cr_bound;
    rep["fisher"] = std::move(fisher);
    doc["report"] = std::move(rep);

    write_output(doc.dump(2) + "\n", out_path);
    return 0;
}

int cmd_verify(bool as_json, bool fast, double tol_override, bool has_override) {
    qfisher::VerifyOptions options;
    options.fast = fast;
    if (has_override) {
        options.tolerance_override = tol_override;
    }
    const std::vector<qfisher::CheckResult> results = qfisher::run_verification(options);

    std::size_t failed = 0;
    if (as_json) {
        json doc;
        json checks = json::array();
        for (const auto &result : results) {
            if (!result.passed) {
                ++failed;
            }
            json entry;
            entry["criterion"] = result.criterion;
            entry["name"] = result.name;
            entry["detail"] = result.detail;
            entry["residual"] = result.residual;
            entry["tolerance"] = result.tolerance;
            entry["passed"] = result.passed;
            entry["elapsed_seconds"] = result.elapsed_seconds;
            checks.push_back(std::move(entry));
        }
        doc["passed"] = failed == 0;
        doc["checks"] = std::move(checks);
        std::cout << doc.dump(2) << "\n";
    } else {
        for (const auto &result : results) {
            if (!result.passed) {
                ++failed;
            }
            std::cout << (result.passed ? "PASS " : "FAIL ") << result.name << " (criterion "
                      << result.criterion << "): residual " << result.residual
                      << (result.passed ? " <= " : " > ") << "tolerance " << result.tolerance
                      << "; " << result.detail << "\n";
        }
        std::cout << (results.size() - failed) << "/" << results.size() << " checks passed\n";
    }
    return failed == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Quantum Fisher information toolkit for Werner-type N-qudit states"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Key=value configuration file; command-line flags take precedence");

    std::uint64_t dense_cap = qfisher::kDefaultDenseCap;
    app.add_option("--dense-cap", dense_cap,
                   "Largest dimension D = d^N for which dense matrices are built")
        ->envname("QFISHER_DENSE_CAP")
        ->check(CLI::PositiveNumber);

    // scan
    auto *scan = app.add_subcommand(
        "scan", "Tabulate QFI, fidelity, and the estimation bound over a theta grid");
    scan->fallthrough();
    int scan_d = 2, scan_n = 2;
    std::vector<double> scan_grid_raw{0.0, 0.9, 10.0};
    bool scan_check_dense = false;
    std::string scan_format = "csv", scan_out;
    scan->add_option("--d", scan_d, "Levels per particle")->check(CLI::Range(2, 1 << 20));
    scan->add_option("--n", scan_n, "Particle count")->check(CLI::Range(2, 64));
    scan->add_option("--theta-grid", scan_grid_raw,
                     "Grid spec start,stop,count with 0 <= start < stop < 1")
        ->delimiter(',')
        ->expected(1, 3);
    scan->add_flag("--check-dense", scan_check_dense,
                   "Also compute the QFI by dense linear algebra (requires D within the "
                   "dense cap)");
    scan->add_option("--format", scan_format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    scan->add_option("--out", scan_out, "Output path (default stdout)");

    // thresholds
    auto *thresholds = app.add_subcommand(
        "thresholds", "Separability thresholds and QFI minimizers over a (d, N) range");
    thresholds->fallthrough();
    int thr_d_max = 5, thr_n_max = 5;
    std::string thr_format = "csv", thr_out;
    thresholds->add_option("--d-max", thr_d_max, "Largest d")->check(CLI::Range(2, 1 << 20));
    thresholds->add_option("--n-max", thr_n_max, "Largest N")->check(CLI::Range(2, 1 << 10));
    thresholds->add_option("--format", thr_format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
    thresholds->add_option("--out", thr_out, "Output path (default stdout)");

    // score
    auto *score = app.add_subcommand(
        "score", "Cross-check the four logarithmic-derivative computations at one point");
    score->fallthrough();
    int score_d = 2, score_n = 2;
    double score_theta = 0.5, score_quad_tol = 1e-8;
    std::string score_out;
    score->add_option("--d", score_d, "Levels per particle")->check(CLI::Range(2, 1 << 20));
    score->add_option("--n", score_n, "Particle count")->check(CLI::Range(2, 64));
    score->add_option("--theta", score_theta, "Mixing parameter in [0, 1)")->required();
    score->add_option("--quad-tol", score_quad_tol,
                      "Relative tolerance of the double-integral score")
        ->check(CLI::PositiveNumber);
    score->add_option("--out", score_out, "Output path (default stdout)");

    // simulate
    auto *simulate = app.add_subcommand(
        "simulate", "Monte Carlo Cramer-Rao experiment with a locally unbiased estimator");
    simulate->fallthrough();
    int sim_d = 2, sim_n = 2;
    double sim_theta = 1.0 / 3.0;
    std::uint64_t sim_shots = 10000, sim_trials = 200, sim_seed = 1;
    std::string sim_povm = "ghz", sim_out;
    simulate->add_option("--d", sim_d, "Levels per particle")->check(CLI::Range(2, 1 << 20));
    simulate->add_option("--n", sim_n, "Particle count")->check(CLI::Range(2, 64));
    simulate->add_option("--theta", sim_theta, "True mixing parameter in [0, 1)");
    simulate->add_option("--shots", sim_shots, "Measurements per trial")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--trials", sim_trials, "Independent trials")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--seed", sim_seed, "Base seed; trial t draws from stream (seed, t)");
    simulate->add_option("--povm", sim_povm,
                         "Measurement: ghz (saturating), computational, or trivial "
                         "(errors out: carries no information)")
        ->check(CLI::IsMember({"ghz", "computational", "trivial"}));
    simulate->add_option("--out", sim_out, "Output path (default stdout)");

    // verify
    auto *verify = app.add_subcommand("verify", "Run the full self-verification suite");
    verify->fallthrough();
    bool verify_json = false, verify_fast = false;
    double verify_tol_override = 0.0;
    verify->add_flag("--json", verify_json, "Machine-readable results");
    verify->add_flag("--fast", verify_fast, "Thinner grids and fewer random instances");
    auto *tol_opt = verify->add_option("--tol-override", verify_tol_override,
                                       "Replace every check's tolerance (for exercising "
                                       "the failure-reporting path)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (scan->parsed()) {
            GridSpec grid;
            std::string error;
            if (!parse_grid(scan_grid_raw, grid, error)) {
                std::cerr << "error: " << error << "\n";
                return 1;
            }
            return cmd_scan(scan_d, scan_n, grid, scan_check_dense, scan_format, scan_out,
                            dense_cap);
        }
        if (thresholds->parsed()) {
            return cmd_thresholds(thr_d_max, thr_n_max, thr_format, thr_out);
        }
        if (score->parsed()) {
            return cmd_score(score_d, score_n, score_theta, score_quad_tol, score_out,
                             dense_cap);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sim_d, sim_n, sim_theta, sim_shots, sim_trials, sim_seed,
                                sim_povm, sim_out, dense_cap);
        }
        if (verify->parsed()) {
            return cmd_verify(verify_json, verify_fast, verify_tol_override,
                              tol_opt->count() > 0);
        }
    } catch (const qfisher::Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
