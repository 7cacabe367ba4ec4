// Command-line front end: certified dimension bounds, covering-sum tables,
// verification suites, and gasket rendering.
//
// Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget
// exceeded.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "rauzy/rauzy.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitBudget = 3;

constexpr int kBoxdimWordLen = 40;

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing " + path);
}

// Machine output goes to the requested file, with a one-line summary on
// stdout; without a file the machine output itself goes to stdout.
void emit(const std::string& json_path, const std::string& machine, const std::string& summary) {
    if (json_path.empty()) {
        std::cout << machine;
    } else {
        write_text_file(json_path, machine);
        std::cout << summary << "\n";
    }
}

struct CommonFlags {
    int threads = 0;
    std::uint64_t budget = rauzy::kDefaultEnumerationBudget;
};

void add_common(CLI::App* cmd, CommonFlags& common) {
    cmd->add_option("--threads", common.threads,
                    "worker threads (0 = RAUZY_THREADS or hardware)");
    cmd->add_option("--budget", common.budget, "maximum enumerated words per level");
}

int run_bound(int d_value, double tol, long kmax, const std::string& json_path,
              const CommonFlags& common) {
    rauzy::Dimension d(d_value);
    rauzy::SeriesOptions opts;
    opts.threads = common.threads;
    rauzy::BisectionResult result = rauzy::min_delta(d, tol, kmax, opts);

    rauzy::OrderedJson params;
    params["d"] = d_value;
    params["tol"] = tol;
    params["kmax"] = kmax;
    params["threads"] = common.threads;
    rauzy::OrderedJson env = rauzy::report_envelope("bound", params);
    env["result"] = rauzy::bisection_json(result);

    emit(json_path, env.dump(2) + "\n",
         "certified dim upper bound " + rauzy::float_repr(result.dim_upper_bound) + " at delta=" +
             rauzy::float_repr(result.delta_star) + " (" + std::to_string(result.iterations) +
             " bisection steps)");
    return kExitOk;
}

int run_xsum(int d_value, int n, double delta, bool exact, bool delta_given,
             const std::string& csv_path, const CommonFlags& common) {
    rauzy::Dimension d(d_value);
    rauzy::DeltaMode mode = delta_given && !exact ? rauzy::DeltaMode::floating(delta)
                                                  : rauzy::DeltaMode::exact_unit();
    rauzy::EnumOptions opts;
    opts.budget = common.budget;
    opts.threads = common.threads;
    auto records = rauzy::x_series(d, n, mode, opts);
    std::string csv = rauzy::xrecords_csv(records);
    if (csv_path.empty()) {
        std::cout << csv;
    } else {
        write_text_file(csv_path, csv);
        std::cout << "wrote " << records.size() << " covering-sum rows to " << csv_path << "\n";
    }
    return kExitOk;
}

int run_verify(const std::string& suite_name, int d_value, int n_max,
               const std::string& json_path, const CommonFlags& common) {
    rauzy::VerifySuite suite = rauzy::parse_suite(suite_name);
    rauzy::Dimension d(d_value);
    rauzy::SuiteOptions opts;
    opts.n_max = n_max;
    opts.enumeration.budget = common.budget;
    opts.enumeration.threads = common.threads;
    auto reports = rauzy::run_suite(suite, d, opts);

    bool all_pass = true;
    for (const auto& r : reports) all_pass = all_pass && r.pass;

    rauzy::OrderedJson params;
    params["suite"] = suite_name;
    params["d"] = d_value;
    params["n_max"] = n_max;
    params["threads"] = common.threads;
    params["budget"] = common.budget;
    rauzy::OrderedJson env = rauzy::report_envelope("verify", params);
    env["pass"] = all_pass;
    env["checks"] = rauzy::checks_json(reports);

    std::string summary = "suite " + suite_name + ": " + std::to_string(reports.size()) +
                          " checks, " + (all_pass ? "all passed" : "FAILURES present");
    emit(json_path, env.dump(2) + "\n", summary);
    if (!all_pass) {
        for (const auto& r : reports) {
            if (!r.pass) {
                std::cerr << "check " << r.name << " failed: " << r.witness.value_or("(no witness)")
                          << "\n";
            }
        }
    }
    return all_pass ? kExitOk : kExitVerificationFailure;
}

int run_render(int depth, const std::string& min_volume, const std::string& out_path,
               const std::string& format, const CommonFlags& common) {
    rauzy::EnumOptions opts;
    opts.budget = common.budget;
    opts.threads = common.threads;
    rauzy::Rational cutoff = rauzy::parse_rational(min_volume);
    auto cells = rauzy::subdivide(rauzy::Dimension(3), depth, cutoff, opts);
    if (format == "svg") {
        rauzy::write_svg(cells, out_path);
    } else if (format == "ppm") {
        rauzy::write_ppm(rauzy::rasterize(cells), out_path);
    } else {
        throw std::invalid_argument("format must be svg or ppm");
    }
    std::cout << "wrote " << cells.size() << " cells at depth " << depth << " to " << out_path
              << "\n";
    return kExitOk;
}

int run_boxdim(long points, int k_min, int k_max, std::uint64_t seed) {
    rauzy::PointCloud cloud = rauzy::chaos_game(points, 0, seed, kBoxdimWordLen);
    double slope = rauzy::box_count(cloud, k_min, k_max);
    std::cout << "boxdim: points=" << points << " seed=" << seed << " scheme=" << cloud.meta.scheme
              << " word_len=" << cloud.meta.word_len << " scales=" << k_min << ".." << k_max
              << " slope=" << rauzy::float_repr(slope) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rauzy gasket dimension bounds, verification, and rendering"};
    app.require_subcommand(1);

    CommonFlags common;

    auto* bound = app.add_subcommand("bound", "bisect for the smallest certified exponent");
    int bound_d = 3;
    double bound_tol = rauzy::kDefaultBisectionTol;
    long bound_kmax = rauzy::kDefaultSeriesK;
    std::string bound_json;
    bound->add_option("--d", bound_d, "ambient dimension (>= 3)");
    bound->add_option("--tol", bound_tol, "bisection tolerance");
    bound->add_option("--kmax", bound_kmax, "series truncation index");
    bound->add_option("--json", bound_json, "write the JSON report here (default: stdout)");
    add_common(bound, common);

    auto* xsum = app.add_subcommand("xsum", "exact or float covering-sum table");
    int xsum_d = 3;
    int xsum_n = 0;
    double xsum_delta = 1.0;
    bool xsum_exact = false;
    std::string xsum_csv;
    xsum->add_option("--d", xsum_d, "ambient dimension (>= 3)");
    xsum->add_option("--n", xsum_n, "maximum word length")->required();
    auto* delta_opt = xsum->add_option("--delta", xsum_delta, "exponent delta in (0,1]");
    auto* exact_opt = xsum->add_flag("--exact", xsum_exact, "exact rationals at delta=1");
    delta_opt->excludes(exact_opt);
    xsum->add_option("--csv", xsum_csv, "write the CSV table here (default: stdout)");
    add_common(xsum, common);

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    std::string verify_suite = "all";
    int verify_d = 3;
    int verify_n_max = 8;
    std::string verify_json;
    verify->add_option("--suite", verify_suite, "all|appendix|lemma52|lemma53|section6");
    verify->add_option("--d", verify_d, "ambient dimension (>= 3)");
    verify->add_option("--n-max", verify_n_max, "depth for the inequality suites");
    verify->add_option("--json", verify_json, "write the JSON report here (default: stdout)");
    add_common(verify, common);

    auto* render = app.add_subcommand("render", "volume-pruned subdivision image of the gasket");
    int render_depth = 8;
    std::string render_min_volume = "0";
    std::string render_out;
    std::string render_format = "svg";
    render->add_option("--depth", render_depth, "subdivision depth");
    render->add_option("--min-volume", render_min_volume, "prune cells at or below this volume");
    render->add_option("--out", render_out, "output path")->required();
    render->add_option("--format", render_format, "svg or ppm");
    add_common(render, common);

    auto* boxdim = app.add_subcommand("boxdim", "box-counting slope of a sampled cloud");
    long boxdim_points = 0;
    int boxdim_kmin = 4;
    int boxdim_kmax = 10;
    std::uint64_t boxdim_seed = 1;
    boxdim->add_option("--points", boxdim_points, "number of sampled points")->required();
    boxdim->add_option("--kmin", boxdim_kmin, "smallest dyadic scale index");
    boxdim->add_option("--kmax", boxdim_kmax, "largest dyadic scale index");
    boxdim->add_option("--seed", boxdim_seed, "sampler seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (bound->parsed()) {
            return run_bound(bound_d, bound_tol, bound_kmax, bound_json, common);
        }
        if (xsum->parsed()) {
            return run_xsum(xsum_d, xsum_n, xsum_delta, xsum_exact, delta_opt->count() > 0,
                            xsum_csv, common);
        }
        if (verify->parsed()) {
            return run_verify(verify_suite, verify_d, verify_n_max, verify_json, common);
        }
        if (render->parsed()) {
            return run_render(render_depth, render_min_volume, render_out, render_format, common);
        }
        if (boxdim->parsed()) {
            return run_boxdim(boxdim_points, boxdim_kmin, boxdim_kmax, boxdim_seed);
        }
    } catch (const rauzy::BudgetError& e) {
        std::cerr << "budget exceeded: " << e.what() << "\n";
        return kExitBudget;
    } catch (const rauzy::NoCertificateError& e) {
        std::cerr << "no certificate: " << e.what() << "\n";
        return kExitVerificationFailure;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::domain_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
