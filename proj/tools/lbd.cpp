// Command-line front end: grid inspection, detection on CSV input, planning
// diagnostics, the interval utility, and the Monte Carlo coverage harness.
//
// Exit codes: 0 success, 2 invalid input data, 3 invalid configuration.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <span>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lbd/lbd.hpp"

namespace {

using nlohmann::json;

constexpr const char* schema_version = "1";
constexpr int exit_ok = 0;
constexpr int exit_bad_data = 2;
constexpr int exit_bad_config = 3;

double json_safe(double v) {
    // JSON has no inf/nan; the only non-finite value we ever emit is the
    // degenerate +inf t-statistic.
    if (std::isinf(v)) return v > 0 ? 1e308 : -1e308;
    return v;
}

struct ModelChoice {
    std::string name = "gaussian-known";
    double sigma = 1.0;
    bool sigma_given = false;
    bool wilcoxon_exact = false;
};

lbd::TestModel make_model(const ModelChoice& choice) {
    if (choice.name == "gaussian-known") return lbd::GaussianKnownSigma{choice.sigma};
    if (choice.name == "gaussian-unknown") return lbd::GaussianUnknownSigma{};
    if (choice.name == "poisson") return lbd::Poisson{};
    if (choice.name == "exponential") return lbd::Exponential{};
    if (choice.name == "wilcoxon")
        return lbd::Wilcoxon{choice.wilcoxon_exact ? lbd::Wilcoxon::Mode::exact
                                                   : lbd::Wilcoxon::Mode::bound};
    throw lbd::invalid_argument_error("unknown model: " + choice.name);
}

json model_json(const ModelChoice& choice) {
    json j{{"name", choice.name}};
    if (choice.name == "gaussian-known") j["sigma"] = choice.sigma;
    if (choice.name == "wilcoxon") j["exact"] = choice.wilcoxon_exact;
    return j;
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("LBD_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return 1;
}

// --- grid --------------------------------------------------------------------

int run_grid(std::int64_t n, bool stats, bool as_json) {
    const auto plan = lbd::scan_plan(n);
    if (as_json) {
        // One JSON object per triplet, streamed in canonical order.
        for (const auto& t : lbd::build_triplets(n)) {
            json j{{"s", t.s}, {"m", t.m}, {"e", t.e}, {"level", t.level}, {"block", t.block}};
            std::cout << j.dump() << '\n';
        }
        return exit_ok;
    }

    const int levels = lbd::max_level(n) + 1;
    std::vector<std::int64_t> per_level(static_cast<std::size_t>(levels), 0);
    std::vector<std::int64_t> per_level_intervals(static_cast<std::size_t>(levels), 0);
    for (const auto& g : plan) per_level[static_cast<std::size_t>(g.level)] += g.count();
    for (const auto& iv : lbd::build_intervals(n))
        ++per_level_intervals[static_cast<std::size_t>(iv.level)];
    const auto blocks = lbd::block_sizes(n);
    const std::int64_t total = lbd::triplet_count(n);
    const double bound = 24.0 * static_cast<double>(n) *
                         std::pow(std::log(std::numbers::e * static_cast<double>(n)), 2.5);

    std::cout << "n = " << n << ", levels = " << levels << ", blocks = " << blocks.size() << "\n";
    std::cout << "triplets = " << total << " (bound 24 n ln^2.5(en) = " << std::llround(bound)
              << ": " << (static_cast<double>(total) <= bound ? "ok" : "VIOLATED") << ")\n";
    if (stats) {
        std::cout << "level  spacing  intervals  triplets  block\n";
        for (int level = 0; level < levels; ++level)
            std::cout << std::setw(5) << level << std::setw(9) << lbd::grid_spacing(level, n)
                      << std::setw(11) << per_level_intervals[static_cast<std::size_t>(level)]
                      << std::setw(10) << per_level[static_cast<std::size_t>(level)] << std::setw(7)
                      << lbd::block_index(level, n) << "\n";
        std::cout << "block sizes:";
        for (std::size_t b = 0; b < blocks.size(); ++b) std::cout << " " << blocks[b];
        std::cout << "\n";
    }
    return exit_ok;
}

// --- detect --------------------------------------------------------------------

json detections_json(const lbd::DetectionResult& result) {
    json out = json::array();
    for (const auto& d : result.detections)
        out.push_back(json{{"lo", d.lo},
                           {"hi", d.hi},
                           {"s", d.triplet.s},
                           {"m", d.triplet.m},
                           {"e", d.triplet.e},
                           {"level", d.triplet.level},
                           {"block", d.triplet.block},
                           {"stat", json_safe(d.stat)},
                           {"threshold", d.threshold},
                           {"alpha_t", d.alpha_t}});
    return out;
}

json intervals_json(const std::vector<lbd::ClosedInterval>& ivs) {
    json out = json::array();
    for (const auto& iv : ivs) out.push_back(json{{"lo", iv.lo}, {"hi", iv.hi}});
    return out;
}

void write_plot_data(const std::string& path, std::span<const double> y,
                     const std::vector<lbd::ClosedInterval>& minimal) {
    std::ofstream out(path);
    if (!out) throw lbd::invalid_argument_error("cannot open plot data path: " + path);
    for (std::size_t i = 0; i < y.size(); ++i) out << (i + 1) << '\t' << y[i] << '\n';
    out << '\n';
    for (const auto& iv : minimal) out << iv.lo << '\t' << iv.hi << '\n';
}

int run_detect(const std::string& input, int column, const ModelChoice& choice, double alpha,
               double max_len_exp, int threads, const std::string& output,
               const std::string& plot_path) {
    const lbd::CsvSeries series = lbd::read_csv_series(input, column);
    if (static_cast<std::int64_t>(series.values.size()) < lbd::min_series_length)
        throw lbd::invalid_data_error("series too short: need at least 8 observations");
    lbd::DetectorConfig config;
    config.model = make_model(choice);
    config.alpha = alpha;
    config.max_length_exponent = max_len_exp;
    config.threads = threads;

    lbd::DetectionResult result;
    try {
        result = lbd::detect(series.values, config);
    } catch (const lbd::invalid_data_error& err) {
        if (err.index >= 0 && err.index < static_cast<std::int64_t>(series.lines.size())) {
            std::ostringstream msg;
            msg << err.what() << " (line " << series.lines[static_cast<std::size_t>(err.index)] << ")";
            throw lbd::invalid_data_error(msg.str(), err.index);
        }
        throw;
    }

    if (!plot_path.empty()) write_plot_data(plot_path, series.values, result.minimal);

    if (output == "json") {
        json j{{"schema_version", schema_version},
               {"config",
                {{"n", result.n},
                 {"model", model_json(choice)},
                 {"alpha", result.alpha},
                 {"max_len_exponent", max_len_exp},
                 {"threads", threads},
                 {"grid",
                  {{"evaluated_triplets", result.grid.evaluated_triplets},
                   {"levels", result.grid.levels},
                   {"blocks", result.grid.blocks},
                   {"block_sizes", result.grid.block_sizes}}}}},
               {"detections", detections_json(result)},
               {"minimal", intervals_json(result.minimal)},
               {"disjoint", intervals_json(result.disjoint)},
               {"n_lower_bound", result.lower_bound}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "n = " << result.n << ", model = " << choice.name << ", alpha = " << result.alpha
                  << "\n";
        std::cout << "significant triplets: " << result.detections.size() << "\n";
        std::cout << "minimal intervals (" << result.minimal.size() << "):";
        for (const auto& iv : result.minimal) std::cout << " [" << iv.lo << "," << iv.hi << "]";
        std::cout << "\n";
        std::cout << "disjoint intervals (" << result.disjoint.size() << "):";
        for (const auto& iv : result.disjoint) std::cout << " [" << iv.lo << "," << iv.hi << "]";
        std::cout << "\n";
        std::cout << "changepoint count lower bound: " << result.lower_bound << "\n";
    }
    return exit_ok;
}

// --- plan ----------------------------------------------------------------------

int run_plan(const lbd::ChangepointGeometry& geometry) {
    const double e = lbd::energy(geometry);
    const double thr = lbd::detection_threshold(geometry);
    const double cnt = lbd::count_threshold(geometry);
    std::cout << "energy                 = " << e << "\n";
    std::cout << "detection threshold    = " << thr << "\n";
    std::cout << "count threshold        = " << cnt << "\n";
    std::cout << "detectable             = " << (e >= thr ? "yes" : "no") << "\n";
    std::cout << "separable (disjoint)   = " << (e >= cnt ? "yes" : "no") << "\n";
    if (e >= thr) {
        try {
            std::cout << "precision bound        = " << lbd::precision_bound(geometry) << "\n";
        } catch (const lbd::unbounded_precision_error&) {
            std::cout << "precision bound        = unbounded\n";
        }
    }
    return exit_ok;
}

// --- intervals -------------------------------------------------------------------

std::vector<lbd::ClosedInterval> parse_interval_list(const std::string& input) {
    json j;
    if (!input.empty() && input.front() == '[') {
        j = json::parse(input);
    } else if (input == "-") {
        j = json::parse(std::cin);
    } else {
        std::ifstream in(input);
        if (!in) throw lbd::invalid_data_error("cannot open input file: " + input);
        j = json::parse(in);
    }
    if (!j.is_array()) throw lbd::invalid_data_error("expected a JSON array of intervals");
    std::vector<lbd::ClosedInterval> out;
    for (const auto& item : j) {
        if (item.is_array() && item.size() == 2)
            out.push_back({item[0].get<std::int64_t>(), item[1].get<std::int64_t>()});
        else if (item.is_object())
            out.push_back({item.at("lo").get<std::int64_t>(), item.at("hi").get<std::int64_t>()});
        else
            throw lbd::invalid_data_error("intervals must be [lo, hi] pairs or {lo, hi} objects");
    }
    return out;
}

int run_intervals(const std::string& input) {
    const auto summary = lbd::minimal_and_disjoint(parse_interval_list(input));
    json j{{"schema_version", schema_version},
           {"minimal", intervals_json(summary.minimal)},
           {"disjoint", intervals_json(summary.disjoint)},
           {"n_lower_bound", summary.lower_bound}};
    std::cout << j.dump() << "\n";
    return exit_ok;
}

// --- simulate --------------------------------------------------------------------

int run_simulate(const lbd::SignalSpec& spec, const ModelChoice& choice, double alpha,
                 std::int64_t n_sim, std::uint64_t seed, int threads, bool as_json) {
    if (choice.name == "poisson" || choice.name == "exponential")
        throw lbd::invalid_argument_error(
            "the simulation harness draws Gaussian noise; use gaussian-known, gaussian-unknown, or wilcoxon");
    // The known-variance model defaults to the generating noise level.
    ModelChoice effective = choice;
    if (choice.name == "gaussian-known" && !choice.sigma_given) effective.sigma = spec.sigma;

    const auto report =
        lbd::coverage_experiment(spec, make_model(effective), alpha, n_sim, seed, 0, threads);

    if (as_json) {
        json hist = json::object();
        for (const auto& [diff, freq] : report.shortfall_hist) hist[std::to_string(diff)] = freq;
        json j{{"schema_version", schema_version},
               {"config",
                {{"signal", spec.name},
                 {"n", spec.n},
                 {"true_changepoints", report.true_changepoints},
                 {"sigma", spec.sigma},
                 {"model", model_json(effective)},
                 {"alpha", alpha},
                 {"n_sim", report.n_sim},
                 {"seed", report.seed},
                 {"rng", "splitmix64"},
                 {"threads", threads}}},
               {"p1_hat", report.p1_hat},
               {"p2_hat", report.p2_hat},
               {"mean_n_lower_bound", report.mean_lower_bound},
               {"hist_n_minus_k", hist}};
        std::cout << j.dump() << "\n";
    } else {
        std::cout << "signal " << spec.name << " (n = " << spec.n
                  << ", K = " << report.true_changepoints << ", sigma = " << spec.sigma << ")\n";
        std::cout << "replicates = " << report.n_sim << ", seed = " << report.seed
                  << ", alpha = " << alpha << ", model = " << effective.name << "\n";
        std::cout << "p1 (all intervals cover) = " << report.p1_hat << "\n";
        std::cout << "p2 (N <= K)              = " << report.p2_hat << "\n";
        std::cout << "mean N(alpha)            = " << report.mean_lower_bound << "\n";
        std::cout << "N - K histogram:\n";
        for (const auto& [diff, freq] : report.shortfall_hist)
            std::cout << "  " << std::setw(4) << diff << "  " << freq << "\n";
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lean Bonferroni changepoint detection"};
    app.require_subcommand(1);

    int threads_flag = 0;
    app.add_option("--threads", threads_flag, "worker thread cap (default 1; env LBD_THREADS)");

    // grid
    auto* grid = app.add_subcommand("grid", "inspect the triplet grid for a series length");
    std::int64_t grid_n = 0;
    bool grid_stats = false, grid_json = false;
    grid->add_option("--n", grid_n, "series length")->required();
    grid->add_flag("--stats", grid_stats, "per-level and per-block detail");
    grid->add_flag("--json", grid_json, "dump the grid as JSON lines {s,m,e,level,block}");

    // detect
    auto* det = app.add_subcommand("detect", "run detection on a CSV series");
    std::string det_input, det_output = "json", det_plot;
    int det_column = 0;
    ModelChoice det_model;
    double det_alpha = 0.1, det_maxlen = 1.0;
    det->add_option("--input", det_input, "CSV file, one value per row")->required();
    det->add_option("--column", det_column, "0-based CSV column (default 0)");
    det->add_option("--model", det_model.name,
                    "gaussian-known|gaussian-unknown|poisson|exponential|wilcoxon")
        ->required();
    det->add_option("--sigma", det_model.sigma, "noise level for gaussian-known");
    det->add_flag("--wilcoxon-exact", det_model.wilcoxon_exact,
                  "exact permutation null where tractable");
    det->add_option("--alpha", det_alpha, "simultaneous level (default 0.1)");
    det->add_option("--max-len-exp", det_maxlen, "evaluate only spans e-s <= n^p (default 1)");
    det->add_option("--output", det_output, "json|text (default json)")
        ->check(CLI::IsMember({"json", "text"}));
    det->add_option("--emit-plot-data", det_plot, "write TSV plot data to this path");

    // plan
    auto* plan = app.add_subcommand("plan", "detectability and localization diagnostics");
    lbd::ChangepointGeometry geometry;
    plan->add_option("--n", geometry.n, "series length")->required();
    plan->add_option("--jump", geometry.jump, "mean jump in noise units")->required();
    plan->add_option("--dleft", geometry.d_left, "distance to previous changepoint")->required();
    plan->add_option("--dright", geometry.d_right, "distance to next changepoint")->required();
    plan->add_option("--m", geometry.m_n, "changepoints targeted simultaneously (default 1)");
    plan->add_option("--b", geometry.b_n, "slack term (default 3)");

    // intervals
    auto* ivs = app.add_subcommand("intervals", "minimal/disjoint summary of an interval list");
    std::string ivs_input;
    ivs->add_option("--input", ivs_input, "JSON array of [lo,hi] pairs: inline, path, or - for stdin")
        ->required();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo coverage experiment");
    std::string sim_signal;
    bool sim_hard = false, sim_json = false;
    std::int64_t sim_n = 0, sim_m = 0, sim_nsim = 10000;
    double sim_eps = 1.0, sim_alpha = 0.1;
    std::uint64_t sim_seed = 20240801;
    ModelChoice sim_model;
    sim->add_option("--signal", sim_signal, "builtin signal name");
    sim->add_flag("--hard-instance", sim_hard, "use the equally-spaced boundary signal");
    sim->add_option("--n", sim_n, "length for --hard-instance");
    sim->add_option("--m", sim_m, "target changepoint count for --hard-instance");
    sim->add_option("--eps", sim_eps, "boundary slack for --hard-instance (0, 4)");
    sim->add_option("--alpha", sim_alpha, "simultaneous level (default 0.1)");
    sim->add_option("--nsim", sim_nsim, "replicates (default 10000)");
    sim->add_option("--seed", sim_seed, "master seed (default 20240801)");
    sim->add_option("--model", sim_model.name, "gaussian-known|gaussian-unknown|wilcoxon");
    sim->add_option("--sigma", sim_model.sigma, "override sigma for gaussian-known");
    sim->add_flag("--json", sim_json, "JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_bad_config;
    }

    const int threads = resolve_threads(threads_flag);
    try {
        if (grid->parsed()) return run_grid(grid_n, grid_stats, grid_json);
        if (det->parsed()) {
            det_model.sigma_given = det->count("--sigma") > 0;
            return run_detect(det_input, det_column, det_model, det_alpha, det_maxlen, threads,
                              det_output, det_plot);
        }
        if (plan->parsed()) return run_plan(geometry);
        if (ivs->parsed()) return run_intervals(ivs_input);
        if (sim->parsed()) {
            sim_model.sigma_given = sim->count("--sigma") > 0;
            if (sim_hard ? !sim_signal.empty() : sim_signal.empty())
                throw lbd::invalid_argument_error("choose exactly one of --signal or --hard-instance");
            lbd::SignalSpec spec =
                sim_hard ? lbd::hard_instance(sim_n, sim_m, sim_eps) : lbd::builtin_signal(sim_signal);
            return run_simulate(spec, sim_model, sim_alpha, sim_nsim, sim_seed, threads, sim_json);
        }
        throw lbd::invalid_argument_error("no subcommand selected");
    } catch (const lbd::invalid_data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_bad_data;
    } catch (const lbd::invalid_argument_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_bad_config;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_bad_data;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_bad_config;
    }
}
