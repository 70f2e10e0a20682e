// ltblab: numerical laboratory for the endstate of marginally bound dust
// collapse. Subcommands: classify, sweep, geodesic, roots, verify, constants.
//
// Exit codes: 0 success, 1 verification failure, 2 input error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ltb/classify.hpp"
#include "ltb/geodesics.hpp"
#include "ltb/model.hpp"
#include "ltb/roots.hpp"
#include "ltb/sweep.hpp"
#include "ltb/verify.hpp"
#include "ltb/version.hpp"

namespace {

using nlohmann::ordered_json;

std::string num(double v) { return ordered_json(v).dump(); }

struct ModelOptions {
    int n = 1;
    double a = 1.0;
    std::vector<std::string> gamma;
    double r_max = 0.1;
    std::string config;
};

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
    cmd->add_option("--n", opts.n, "Perturbation order n (>= 1)");
    cmd->add_option("--a", opts.a, "Leading amplitude a (> 0)");
    cmd->add_option("--gamma", opts.gamma,
                    "Higher-order k(r) term power:coeff (repeatable, power >= n+1)");
    cmd->add_option("--r-max", opts.r_max, "Domain cutoff r_max");
    cmd->add_option("--config", opts.config, "JSON model configuration file (overrides flags)");
}

ltb::ModelParams resolve_params(const ModelOptions& opts) {
    if (!opts.config.empty()) return ltb::load_model_config(opts.config);
    ltb::ModelParams params;
    params.n = opts.n;
    params.a = opts.a;
    params.r_max = opts.r_max;
    for (const auto& spec : opts.gamma) {
        const auto colon = spec.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("--gamma expects power:coeff, got \"" + spec + "\"");
        params.gamma.push_back(
            {std::stoi(spec.substr(0, colon)), std::stod(spec.substr(colon + 1))});
    }
    return params;
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output file " + out_path);
    out << text;
}

ordered_json report_json(const ltb::ClassificationReport& rep) {
    ordered_json j;
    j["n"] = rep.params.n;
    j["a"] = rep.params.a;
    j["analytic"] = {{"verdict", to_string(rep.analytic.verdict)},
                     {"rule", to_string(rep.analytic.rule)}};
    ordered_json numeric;
    numeric["verdict"] = to_string(rep.numeric.verdict);
    if (!rep.numeric.note.empty()) numeric["note"] = rep.numeric.note;
    if (rep.numeric.evidence.start) {
        numeric["start"] = {{"alpha", rep.numeric.evidence.start->alpha},
                            {"x0", rep.numeric.evidence.start->x0},
                            {"epsilon", rep.numeric.evidence.start->epsilon}};
    }
    if (rep.numeric.evidence.termination) {
        numeric["termination"] = to_string(rep.numeric.evidence.termination->kind);
        numeric["r_escape"] = rep.numeric.evidence.r_escape;
    }
    if (!rep.numeric.evidence.probes.empty()) {
        auto probes = ordered_json::array();
        for (const auto& p : rep.numeric.evidence.probes)
            probes.push_back({{"r1", p.r1}, {"t1", p.t1}, {"limit", p.limit}});
        numeric["probes"] = std::move(probes);
    }
    if (rep.numeric.evidence.horizon_slope)
        numeric["horizon_slope"] = *rep.numeric.evidence.horizon_slope;
    j["numeric"] = std::move(numeric);
    j["agree"] = rep.agree;
    j["marginal"] = rep.marginal;
    return j;
}

int cmd_classify(const ModelOptions& opts, const ltb::ClassifySettings& settings) {
    const ltb::Model model(resolve_params(opts));
    const auto report = ltb::classify(model, settings);
    std::cout << report_json(report).dump(2) << '\n';
    return 0;
}

int cmd_roots(double a) {
    const ltb::RootReport report = ltb::solve_roots(a);
    const ltb::CriticalConstants c = ltb::critical_constants();
    ordered_json j;
    j["a"] = report.a;
    j["coefficients"] = report.quartic_coeffs;
    auto roots = ordered_json::array();
    for (const auto& z : report.all_roots) roots.push_back({{"re", z.real()}, {"im", z.imag()}});
    j["roots"] = std::move(roots);
    j["admissible"] = report.admissible;
    j["double_root"] = report.double_root;
    j["regime"] = a <= c.a_0 ? "low" : (a < c.a_c ? "gap" : "super-critical");
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_constants(bool recover) {
    const ltb::CriticalConstants c = ltb::critical_constants();
    ordered_json j;
    j["a_c"] = c.a_c;
    j["a_0"] = c.a_0;
    j["horizon_threshold"] = c.horizon_threshold;
    if (recover) {
        j["a_c_numeric"] = ltb::find_critical_a_numeric();
        j["a_0_numeric"] = ltb::find_a0_numeric();
    }
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_geodesic(const ModelOptions& opts, double eps, const std::string& root_choice,
                 const std::string& format, const std::string& out_path) {
    const ltb::Model model(resolve_params(opts));
    const auto choice =
        root_choice == "largest" ? ltb::RootChoice::Largest : ltb::RootChoice::Smallest;
    auto start = ltb::singular_start(model, choice);
    if (!start) {
        std::cerr << "error: no singular start exists for n=" << model.n() << ", a=" << model.a()
                  << " (no naked-geodesic ansatz)\n";
        return 2;
    }
    start->epsilon = eps;
    const auto path = ltb::integrate_from_singularity(model, *start, model.r_max());
    write_output(format == "json" ? ltb::path_to_json(model, path)
                                  : ltb::path_to_csv(model, path),
                 out_path);
    return 0;
}

int cmd_verify(bool plain) {
    struct Case {
        int n;
        double a;
    };
    const std::vector<Case> cases = {{1, 1.0}, {2, 0.5}, {3, 4.0}, {4, 1.0}};
    std::vector<double> grid;
    for (int i = 0; i < 40; ++i) grid.push_back(1e-4 * std::pow(1e3, i / 39.0));

    ordered_json summary;
    bool all_pass = true;
    for (const auto& c : cases) {
        const ltb::Model model({c.n, c.a, {}, 0.1});
        const auto sub = ltb::check_subsolution_margin(model, grid);
        const auto phi_h = ltb::check_phi_on_horizon(model, grid);
        const auto dphi = ltb::check_dphidt_on_horizon(model, grid);
        const std::string tag = "n=" + std::to_string(c.n) + ",a=" + num(c.a);
        summary[tag] = {
            {"subsolution_margin",
             {{"max_rel_err", sub.max_rel_err}, {"pass", sub.pass}}},
            {"phi_on_horizon",
             {{"max_rel_err", phi_h.max_rel_err}, {"pass", phi_h.pass}}},
            {"dphidt_leading_order",
             {{"max_rel_err", dphi.convergence.max_rel_err}, {"pass", dphi.convergence.pass}}},
        };
        all_pass = all_pass && sub.pass && phi_h.pass && dphi.convergence.pass;
    }
    for (const int n : {1, 2}) {
        const double a = n == 1 ? 1.0 : 8.0;
        const ltb::Model model({n, a, {}, 0.1});
        const auto bounds = ltb::estimate_envelope(model, 1e-2, n == 1 ? 0.02 : 0.08);
        const double mid = 0.5 * (bounds.c_lo + bounds.c_hi);
        const double eps = 1e-6;
        const double alpha = 1.0 + 2.0 * n / 3.0;
        const auto path = ltb::integrate_x_from(
            model, alpha, eps, std::cbrt(a * a) + mid * std::pow(eps, bounds.beta), 1e-2);
        const auto contain = ltb::check_envelope_containment(model, path, bounds);
        const std::string tag = "n=" + std::to_string(n) + ",a=" + num(a);
        summary[tag]["envelope_containment"] = {{"worst_margin", contain.max_rel_err},
                                                {"pass", contain.pass}};
        all_pass = all_pass && contain.pass;
    }
    if (plain) {
        for (const auto& [tag, checks] : summary.items())
            for (const auto& [name, data] : checks.items())
                std::cout << (data.at("pass").get<bool>() ? "PASS " : "FAIL ") << tag << " "
                          << name << '\n';
    } else {
        std::cout << summary.dump(2) << '\n';
    }
    return all_pass ? 0 : 1;
}

int cmd_sweep(const ltb::SweepGrid& grid, ltb::SweepSettings settings, const std::string& format,
              const std::string& out_path) {
    const auto result = ltb::run_sweep(grid, settings);
    write_output(format == "json" ? ltb::sweep_to_json(result) : ltb::sweep_to_csv(result),
                 out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Endstate laboratory for marginally bound dust collapse"};
    app.set_version_flag("--version", std::string(ltb::version));
    app.require_subcommand(1);

    ModelOptions model_opts;
    ltb::ClassifySettings classify_settings;

    auto* classify = app.add_subcommand("classify", "Classify one (n, a) model");
    add_model_options(classify, model_opts);
    classify->add_option("--probe-margin", classify_settings.probe_margin,
                         "Probe evidence margin below t = 1");
    classify->add_option("--probe-depth", classify_settings.probe_depth,
                         "Relative probe anchor depth below the horizon");
    classify->add_option("--r-floor", classify_settings.probe_r_floor,
                         "Backward probe floor radius");
    classify->add_option("--eps", classify_settings.start_epsilon,
                         "Start radius for forward shots");
    classify->add_option("--rel-tol", classify_settings.integration.rel_tol,
                         "Integrator relative tolerance");
    classify->add_option("--abs-tol", classify_settings.integration.abs_tol,
                         "Integrator absolute tolerance");
    bool largest_root = false;
    classify->add_flag("--largest-root", largest_root,
                       "Seed the n=3 shot with the largest admissible root");

    auto* sweep = app.add_subcommand("sweep", "Classify an (n, a) grid");
    ltb::SweepGrid grid;
    grid.n_values = {3};
    std::string sweep_spacing = "log";
    std::string sweep_format = "csv";
    std::string sweep_out;
    ltb::SweepSettings sweep_settings;
    sweep->add_option("--n", grid.n_values, "Perturbation orders (repeatable)");
    sweep->add_option("--a-min", grid.a_min, "Grid lower endpoint");
    sweep->add_option("--a-max", grid.a_max, "Grid upper endpoint");
    sweep->add_option("--steps", grid.a_steps, "Number of a values (inclusive endpoints)");
    sweep->add_option("--spacing", sweep_spacing, "linear or log")
        ->check(CLI::IsMember({"linear", "log"}));
    sweep->add_option("--r-max", sweep_settings.r_max, "Domain cutoff for every model");
    sweep->add_option("--format", sweep_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sweep->add_option("--out", sweep_out, "Output path (default stdout)");
    sweep->add_option("--workers", sweep_settings.workers,
                      "Worker threads (default: LTBLAB_WORKERS env or hardware)");
    sweep->add_option("--eps", sweep_settings.classify.start_epsilon,
                      "Start radius for forward shots");
    sweep->add_option("--rel-tol", sweep_settings.classify.integration.rel_tol,
                      "Integrator relative tolerance");
    sweep->add_option("--abs-tol", sweep_settings.classify.integration.abs_tol,
                      "Integrator absolute tolerance");
    sweep->add_option("--probe-margin", sweep_settings.classify.probe_margin,
                      "Probe evidence margin below t = 1");
    sweep->add_option("--probe-depth", sweep_settings.classify.probe_depth,
                      "Relative probe anchor depth below the horizon");
    sweep->add_option("--r-floor", sweep_settings.classify.probe_r_floor,
                      "Backward probe floor radius");

    auto* geodesic = app.add_subcommand("geodesic", "Integrate the central null geodesic");
    ModelOptions geo_opts;
    add_model_options(geodesic, geo_opts);
    double geo_eps = 1e-6;
    std::string geo_root = "smallest";
    std::string geo_format = "csv";
    std::string geo_out;
    geodesic->add_option("--eps", geo_eps, "Start radius epsilon");
    geodesic->add_option("--root", geo_root, "n=3 root choice: smallest or largest")
        ->check(CLI::IsMember({"smallest", "largest"}));
    geodesic->add_option("--format", geo_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    geodesic->add_option("--out", geo_out, "Output path (default stdout)");

    auto* roots = app.add_subcommand("roots", "Solve the critical root equation");
    double roots_a = 4.0;
    roots->add_option("--a", roots_a, "Amplitude a")->required();

    auto* verify = app.add_subcommand("verify", "Run the closed-form identity suite");
    bool verify_plain = false;
    verify->add_flag("--plain", verify_plain, "One PASS/FAIL line per identity instead of JSON");

    auto* constants = app.add_subcommand("constants", "Print the critical constants");
    bool recover = false;
    constants->add_flag("--recover", recover, "Also recover a_c and a_0 by bisection");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (classify->parsed()) {
            if (largest_root) classify_settings.root_choice = ltb::RootChoice::Largest;
            return cmd_classify(model_opts, classify_settings);
        }
        if (sweep->parsed()) {
            grid.spacing =
                sweep_spacing == "linear" ? ltb::Spacing::Linear : ltb::Spacing::Logarithmic;
            return cmd_sweep(grid, sweep_settings, sweep_format, sweep_out);
        }
        if (geodesic->parsed()) return cmd_geodesic(geo_opts, geo_eps, geo_root, geo_format, geo_out);
        if (roots->parsed()) return cmd_roots(roots_a);
        if (verify->parsed()) return cmd_verify(verify_plain);
        if (constants->parsed()) return cmd_constants(recover);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "input error: " << ex.what() << '\n';
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
    return 0;
}
