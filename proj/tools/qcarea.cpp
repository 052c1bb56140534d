// Command-line front end: verification points and sweeps, the Beltrami
// solver, and transform self-tests. Exit status: 0 all verdicts pass,
// 1 a verdict failed (or the solver diverged), 2 configuration error.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcarea/beltrami.hpp"
#include "qcarea/report_io.hpp"
#include "qcarea/verifier.hpp"

namespace fs = std::filesystem;
using namespace qcarea;

namespace {

struct CommonOpts {
    double p = 0.0;
    double r = 0.6;
    std::optional<double> big_k;
    std::optional<double> little_k;
    std::size_t samples = 1'000'000;
    std::uint64_t seed = 7;
    std::size_t grid_n = 512;
    double window = 4.0;
    std::string out;
    std::string format = "json";

    double resolve_K() const {
        if (big_k && little_k) throw CLI::ValidationError("--K and --k are mutually exclusive");
        if (little_k) {
            if (!(*little_k >= 0.0 && *little_k < 1.0))
                throw CLI::ValidationError("--k must lie in [0, 1)");
            return (1.0 + *little_k) / (1.0 - *little_k);
        }
        const double K = big_k.value_or(2.0);
        if (!(K >= 1.0)) throw CLI::ValidationError("--K must be >= 1");
        return K;
    }

    void validate() const {
        if (!(p >= 0.0 && p < 1.0)) throw CLI::ValidationError("--p must lie in [0, 1)");
        if (!(r > 0.0 && r < 1.0)) throw CLI::ValidationError("--r must lie in (0, 1)");
        if (format != "json" && format != "csv")
            throw CLI::ValidationError("--format must be json or csv");
    }

    QuadSpec quad() const { return QuadSpec{QuadMethod::montecarlo, samples, seed, 256}; }
};

void add_common_flags(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--p", opts.p, "pole location in [0, 1)");
    cmd->add_option("--r", opts.r, "critical radius in (0, 1)");
    auto* kflag = cmd->add_option("--K", opts.big_k, "maximal dilatation K >= 1");
    cmd->add_option("--k", opts.little_k, "dilatation bound k in [0, 1)")->excludes(kflag);
    cmd->add_option("--samples", opts.samples, "Monte Carlo sample budget");
    cmd->add_option("--seed", opts.seed, "random seed");
    cmd->add_option("--grid-n", opts.grid_n, "transform grid resolution (power of two)");
    cmd->add_option("--L", opts.window, "transform window half-width");
    cmd->add_option("--out", opts.out, "output report path");
    cmd->add_option("--format", opts.format, "report format: json | csv");
}

fs::path output_path(const CommonOpts& opts, const std::string& stem) {
    if (!opts.out.empty()) return opts.out;
    const char* dir = std::getenv("QCAREA_OUT_DIR");
    fs::path base = dir ? fs::path(dir) : fs::path(".");
    return base / (stem + "." + opts.format);
}

void write_reports(const CommonOpts& opts, const std::string& stem,
                   const std::vector<DistortionReport>& reports) {
    const fs::path path = output_path(opts, stem);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file " + path.string());
    if (opts.format == "csv")
        write_reports_csv(out, reports);
    else
        write_reports_json(out, reports);
    std::cout << "wrote " << path.string() << "\n";
}

void print_report_line(const DistortionReport& rep) {
    std::cout << (rep.pass ? "[pass] " : "[FAIL] ") << rep.theorem << " p=" << rep.p
              << " r=" << rep.r << " K=" << rep.big_k << " lhs=" << rep.lhs << " rhs=" << rep.rhs
              << " ratio=" << rep.ratio << " (" << rep.mode << ")\n";
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    if (out.empty()) throw CLI::ValidationError("empty value list: " + csv);
    return out;
}

int run_verify(const std::string& theorem, const CommonOpts& opts, const std::string& mask_path) {
    opts.validate();
    const double K = opts.resolve_K();
    std::vector<DistortionReport> reports;
    if (theorem == "th1i") {
        reports.push_back(verify_th1_i(opts.p, opts.r, K, opts.quad()));
    } else if (theorem == "th1ii") {
        reports.push_back(verify_th1_ii(opts.p, opts.r, K, opts.quad()));
    } else if (theorem == "th1iii") {
        reports.push_back(verify_th1_iii(opts.p, opts.r, K, opts.quad()));
    } else if (theorem == "th2") {
        std::vector<double> radii{opts.r, opts.r};
        Th2Reports pair = verify_th2_stacked(opts.p, K, radii, feasible_pweights(radii), opts.quad());
        reports.push_back(pair.lower);
        reports.push_back(pair.upper);
    } else if (theorem == "th3") {
        if (!mask_path.empty()) {
            std::ifstream in(mask_path);
            if (!in) throw CLI::ValidationError("cannot open grid mask " + mask_path);
            const GridMask mask = read_grid_mask(in);
            reports.push_back(verify_th3_mask(opts.p, mask, GridSpec{opts.window, opts.grid_n}));
        } else {
            reports.push_back(verify_th3(opts.p, opts.r, GridSpec{opts.window, opts.grid_n}));
        }
    } else {
        throw CLI::ValidationError("unknown theorem id: " + theorem);
    }
    for (const auto& rep : reports) print_report_line(rep);
    write_reports(opts, "qcarea_verify_" + theorem, reports);
    for (const auto& rep : reports)
        if (!rep.pass) return 1;
    return 0;
}

int run_sweep(const CommonOpts& opts, const std::string& theorem, const std::string& p_list,
              const std::string& r_list, const std::string& k_list,
              const std::string& grid_file) {
    opts.validate();
    SweepSpec spec;
    spec.theorem = theorem;
    spec.quad = opts.quad();
    spec.grid_n = opts.grid_n;
    spec.window = opts.window;
    if (!grid_file.empty()) {
        std::ifstream in(grid_file);
        if (!in) throw CLI::ValidationError("cannot open grid file " + grid_file);
        nlohmann::json grid = nlohmann::json::parse(in);
        spec.ps = grid.at("p").get<std::vector<double>>();
        spec.rs = grid.at("r").get<std::vector<double>>();
        spec.big_ks = grid.at("K").get<std::vector<double>>();
    } else {
        spec.ps = parse_list(p_list);
        spec.rs = parse_list(r_list);
        spec.big_ks = parse_list(k_list);
    }
    for (double p : spec.ps)
        if (!(p >= 0.0 && p < 1.0)) throw CLI::ValidationError("sweep: p out of range");
    for (double r : spec.rs)
        if (!(r > 0.0 && r < 1.0)) throw CLI::ValidationError("sweep: r out of range");
    for (double K : spec.big_ks)
        if (!(K >= 1.0)) throw CLI::ValidationError("sweep: K out of range");

    std::vector<DistortionReport> reports = sweep(spec);
    for (const auto& rep : reports) print_report_line(rep);
    write_reports(opts, "qcarea_sweep_" + theorem, reports);
    for (const auto& rep : reports)
        if (!rep.pass) return 1;
    return 0;
}

int run_solve(const CommonOpts& opts, const std::string& mu_path, double tol,
              std::size_t max_iter, const std::string& out_prefix) {
    if (!(opts.p >= 0.0 && opts.p < 1.0)) throw CLI::ValidationError("--p must lie in [0, 1)");
    std::ifstream in(mu_path);
    if (!in) throw CLI::ValidationError("cannot open dilatation dump " + mu_path);
    ComplexField mu_field = read_field(in);
    mu_field.support = Disk{0.0, 1.0};
    double k = 0.0;
    for (const Cplx v : mu_field.values) k = std::max(k, std::abs(v));
    if (!(k < 1.0)) throw CLI::ValidationError("dilatation dump has |mu| >= 1");

    BeltramiSolution sol = neumann_solve(DilatationField{std::move(mu_field), k}, opts.p, tol,
                                         max_iter);

    auto dump = [&](const ComplexField& f, const std::string& tag) {
        const fs::path path = out_prefix + "_" + tag + ".dump";
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot open " + path.string());
        write_field(out, f);
        std::cout << "wrote " << path.string() << "\n";
    };
    dump(sol.w, "w");
    dump(sol.dg, "dg");
    dump(sol.g, "g");

    nlohmann::json summary{{"iterations", sol.iterations},
                           {"residual", sol.residual},
                           {"k", k},
                           {"p", opts.p}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

int run_selftest(const CommonOpts& opts) {
    GridSpec grid{opts.window, opts.grid_n};
    bool all_pass = true;

    const std::pair<double, double> cases[] = {{0.0, 0.5}, {0.4, 0.5}, {0.5, 0.7}};
    for (auto [p, r] : cases) {
        const double err = hilbert_closed_form_error(p, r, grid);
        const bool pass = err < 0.02;
        all_pass = all_pass && pass;
        std::cout << (pass ? "[pass] " : "[FAIL] ") << "hilbert closed form p=" << p << " r=" << r
                  << " rel_l2=" << err << "\n";
    }
    for (int i = 0; i < 10; ++i) {
        const double ratio = hilbert_isometry_ratio(grid, opts.seed + i);
        const bool pass = std::abs(ratio - 1.0) < 0.01;
        all_pass = all_pass && pass;
        std::cout << (pass ? "[pass] " : "[FAIL] ") << "hilbert isometry bump " << i
                  << " ratio=" << ratio << "\n";
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasiconformal area-distortion verification toolkit"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* verify = app.add_subcommand("verify", "verify one theorem at a single parameter point");
    std::string theorem, mask_path;
    verify->add_option("theorem", theorem, "th1i | th1ii | th1iii | th2 | th3")->required();
    verify->add_option("--mask", mask_path, "grid-mask file: arbitrary raster set E (th3 only)");
    add_common_flags(verify, opts);

    auto* sweep_cmd = app.add_subcommand("sweep", "verify a theorem over a parameter grid");
    std::string sweep_theorem, p_list = "0", r_list = "0.6", k_list = "2", grid_file;
    sweep_cmd->add_option("--theorem", sweep_theorem, "theorem id")->required();
    sweep_cmd->add_option("--p-list", p_list, "comma-separated p values");
    sweep_cmd->add_option("--r-list", r_list, "comma-separated r values");
    sweep_cmd->add_option("--K-list", k_list, "comma-separated K values");
    sweep_cmd->add_option("--grid-file", grid_file, "JSON file with p/r/K arrays");
    add_common_flags(sweep_cmd, opts);

    auto* solve = app.add_subcommand("solve", "solve the Beltrami equation for a dumped mu");
    std::string mu_path, out_prefix = "solution";
    double tol = -1.0;
    std::size_t max_iter = 200;
    solve->add_option("--mu", mu_path, "dilatation field dump")->required();
    solve->add_option("--out-prefix", out_prefix, "output dump prefix");
    solve->add_option("--tol", tol, "absolute L2 stopping tolerance (default 1e-6 ||w0||)");
    solve->add_option("--max-iter", max_iter, "iteration cap");
    add_common_flags(solve, opts);

    auto* selftest = app.add_subcommand("selftest", "run built-in transform self-tests");
    std::string selftest_what;
    selftest->add_option("what", selftest_what, "currently: transforms")->required();
    add_common_flags(selftest, opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints usage/message
        return e.get_exit_code() == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return run_verify(theorem, opts, mask_path);
        if (sweep_cmd->parsed())
            return run_sweep(opts, sweep_theorem, p_list, r_list, k_list, grid_file);
        if (solve->parsed()) return run_solve(opts, mu_path, tol, max_iter, out_prefix);
        if (selftest->parsed()) {
            if (selftest_what != "transforms") {
                std::cerr << "unknown selftest target: " << selftest_what << "\n";
                return 2;
            }
            return run_selftest(opts);
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
