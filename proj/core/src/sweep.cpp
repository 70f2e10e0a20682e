#include "ltb/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "ltb/version.hpp"
#include "detail/format.hpp"

namespace ltb {

using nlohmann::ordered_json;

std::vector<double> expand_grid(const SweepGrid& grid) {
    if (grid.a_steps < 2) throw std::invalid_argument("SweepGrid: a_steps must be >= 2");
    if (!(grid.a_min > 0.0) || !(grid.a_min < grid.a_max))
        throw std::invalid_argument("SweepGrid: need 0 < a_min < a_max");
    std::vector<double> values(grid.a_steps);
    for (int i = 0; i < grid.a_steps; ++i) {
        const double f = static_cast<double>(i) / (grid.a_steps - 1);
        values[i] = grid.spacing == Spacing::Linear
                        ? grid.a_min + f * (grid.a_max - grid.a_min)
                        : grid.a_min * std::pow(grid.a_max / grid.a_min, f);
    }
    values.front() = grid.a_min;
    values.back() = grid.a_max;
    return values;
}

namespace {

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

unsigned resolve_workers(unsigned requested) {
    if (requested == 0) {
        if (const char* env = std::getenv("LTBLAB_WORKERS")) {
            const long parsed = std::strtol(env, nullptr, 10);
            if (parsed > 0) return static_cast<unsigned>(parsed);
        }
        const unsigned hw = std::thread::hardware_concurrency();
        return hw > 0 ? hw : 1;
    }
    return requested;
}

}  // namespace

SweepResult run_sweep(const SweepGrid& grid, const SweepSettings& settings) {
    const std::vector<double> a_values = expand_grid(grid);

    SweepResult result;
    result.grid = grid;
    result.provenance = {ltb::version,
                         settings.classify.integration.rel_tol,
                         settings.classify.integration.abs_tol,
                         settings.classify.probe_margin,
                         settings.classify.probe_depth,
                         settings.classify.probe_r_floor,
                         settings.classify.start_epsilon,
                         utc_timestamp()};

    struct Point {
        int n;
        double a;
    };
    std::vector<Point> points;
    for (const int n : grid.n_values)
        for (const double a : a_values) points.push_back({n, a});
    result.rows.resize(points.size());

    std::atomic<std::size_t> next{0};
    const auto work = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= points.size()) return;
            SweepRow& row = result.rows[i];
            row.n = points[i].n;
            row.a = points[i].a;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                ModelParams params{points[i].n, points[i].a, settings.gamma, settings.r_max};
                const Model model(params);
                row.report = classify(model, settings.classify);
            } catch (const std::exception& ex) {
                row.failed = true;
                row.error = ex.what();
            }
            row.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
        }
    };

    const unsigned workers =
        std::min<unsigned>(resolve_workers(settings.workers),
                           static_cast<unsigned>(std::max<std::size_t>(points.size(), 1)));
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return result;
}

std::string sweep_to_csv(const SweepResult& result) {
    std::string out = "n,a,analytic,rule,numeric,agree,x0,alpha,termination,r_escape\n";
    for (const auto& row : result.rows) {
        out += std::to_string(row.n);
        out += ',';
        out += detail::format_double(row.a);
        if (row.failed) {
            out += ",,,,,,,,\n";
            continue;
        }
        const auto& rep = row.report;
        out += ',' + to_string(rep.analytic.verdict);
        out += ',' + to_string(rep.analytic.rule);
        out += ',' + to_string(rep.numeric.verdict);
        out += rep.agree ? ",true" : ",false";
        if (rep.numeric.evidence.start) {
            out += ',' + detail::format_double(rep.numeric.evidence.start->x0);
            out += ',' + detail::format_double(rep.numeric.evidence.start->alpha);
        } else {
            out += ",,";
        }
        if (rep.numeric.evidence.termination) {
            out += ',' + to_string(rep.numeric.evidence.termination->kind);
            out += ',' + detail::format_double(rep.numeric.evidence.r_escape);
        } else {
            out += ",,";
        }
        out += '\n';
    }
    return out;
}

namespace {

ordered_json params_to_json(const ModelParams& p) {
    auto gamma = ordered_json::array();
    for (const auto& g : p.gamma) gamma.push_back({g.power, g.coeff});
    return {{"n", p.n}, {"a", p.a}, {"gamma", std::move(gamma)}, {"r_max", p.r_max}};
}

ordered_json report_to_json(const ClassificationReport& rep) {
    ordered_json j;
    j["params"] = params_to_json(rep.params);
    j["analytic"] = {{"verdict", to_string(rep.analytic.verdict)},
                     {"rule", to_string(rep.analytic.rule)}};
    ordered_json numeric;
    numeric["verdict"] = to_string(rep.numeric.verdict);
    numeric["note"] = rep.numeric.note;
    ordered_json evidence;
    if (rep.numeric.evidence.start) {
        evidence["start"] = {{"alpha", rep.numeric.evidence.start->alpha},
                             {"x0", rep.numeric.evidence.start->x0},
                             {"epsilon", rep.numeric.evidence.start->epsilon}};
    } else {
        evidence["start"] = nullptr;
    }
    if (rep.numeric.evidence.termination) {
        evidence["termination"] = {{"kind", to_string(rep.numeric.evidence.termination->kind)},
                                   {"r", rep.numeric.evidence.termination->r}};
        evidence["r_escape"] = rep.numeric.evidence.r_escape;
    } else {
        evidence["termination"] = nullptr;
    }
    auto probes = ordered_json::array();
    for (const auto& p : rep.numeric.evidence.probes)
        probes.push_back({{"r1", p.r1}, {"t1", p.t1}, {"limit", p.limit}});
    evidence["probes"] = std::move(probes);
    if (rep.numeric.evidence.horizon_slope)
        evidence["horizon_slope"] = *rep.numeric.evidence.horizon_slope;
    numeric["evidence"] = std::move(evidence);
    j["numeric"] = std::move(numeric);
    j["agree"] = rep.agree;
    j["marginal"] = rep.marginal;
    return j;
}

ModelParams params_from_json(const ordered_json& j) {
    ModelParams p;
    p.n = j.at("n").get<int>();
    p.a = j.at("a").get<double>();
    for (const auto& g : j.at("gamma")) p.gamma.push_back({g.at(0).get<int>(), g.at(1).get<double>()});
    p.r_max = j.at("r_max").get<double>();
    return p;
}

Verdict verdict_from_string(const std::string& s) {
    return s == "Naked" ? Verdict::Naked : Verdict::BlackHole;
}

Rule rule_from_string(const std::string& s) {
    if (s == "T4.1") return Rule::T41;
    if (s == "T3.1") return Rule::T31;
    if (s == "P5.1") return Rule::P51;
    if (s == "P5.2") return Rule::P52;
    return Rule::P53;
}

NumericVerdict numeric_verdict_from_string(const std::string& s) {
    if (s == "Naked") return NumericVerdict::Naked;
    if (s == "BlackHole") return NumericVerdict::BlackHole;
    return NumericVerdict::Inconclusive;
}

TerminationKind termination_from_string(const std::string& s) {
    if (s == "ReachedRMax") return TerminationKind::ReachedRMax;
    if (s == "CrossedHorizon") return TerminationKind::CrossedHorizon;
    if (s == "HitSingularity") return TerminationKind::HitSingularity;
    return TerminationKind::StepFailure;
}

ClassificationReport report_from_json(const ordered_json& j) {
    ClassificationReport rep;
    rep.params = params_from_json(j.at("params"));
    rep.analytic.verdict = verdict_from_string(j.at("analytic").at("verdict"));
    rep.analytic.rule = rule_from_string(j.at("analytic").at("rule"));
    const auto& numeric = j.at("numeric");
    rep.numeric.verdict = numeric_verdict_from_string(numeric.at("verdict"));
    rep.numeric.note = numeric.at("note").get<std::string>();
    const auto& evidence = numeric.at("evidence");
    if (!evidence.at("start").is_null()) {
        const auto& s = evidence.at("start");
        rep.numeric.evidence.start = SingularStart{s.at("alpha").get<double>(),
                                                   s.at("x0").get<double>(),
                                                   s.at("epsilon").get<double>()};
    }
    if (!evidence.at("termination").is_null()) {
        const auto& t = evidence.at("termination");
        rep.numeric.evidence.termination =
            Termination{termination_from_string(t.at("kind")), t.at("r").get<double>()};
        rep.numeric.evidence.r_escape = evidence.at("r_escape").get<double>();
    }
    for (const auto& p : evidence.at("probes"))
        rep.numeric.evidence.probes.push_back({p.at("r1").get<double>(), p.at("t1").get<double>(),
                                               p.at("limit").get<double>()});
    if (evidence.contains("horizon_slope"))
        rep.numeric.evidence.horizon_slope = evidence.at("horizon_slope").get<double>();
    rep.agree = j.at("agree").get<bool>();
    rep.marginal = j.at("marginal").get<bool>();
    return rep;
}

}  // namespace

std::string sweep_to_json(const SweepResult& result) {
    ordered_json j;
    j["grid"] = {{"n_values", result.grid.n_values},
                 {"a_min", result.grid.a_min},
                 {"a_max", result.grid.a_max},
                 {"a_steps", result.grid.a_steps},
                 {"spacing", result.grid.spacing == Spacing::Linear ? "linear" : "logarithmic"}};
    j["provenance"] = {{"tool_version", result.provenance.tool_version},
                       {"rel_tol", result.provenance.rel_tol},
                       {"abs_tol", result.provenance.abs_tol},
                       {"probe_margin", result.provenance.probe_margin},
                       {"probe_depth", result.provenance.probe_depth},
                       {"probe_r_floor", result.provenance.probe_r_floor},
                       {"start_epsilon", result.provenance.start_epsilon},
                       {"timestamp", result.provenance.timestamp}};
    auto rows = ordered_json::array();
    for (const auto& row : result.rows) {
        ordered_json r;
        r["n"] = row.n;
        r["a"] = row.a;
        r["failed"] = row.failed;
        r["wall_ms"] = row.wall_ms;
        if (row.failed)
            r["error"] = row.error;
        else
            r["report"] = report_to_json(row.report);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2);
}

SweepResult sweep_from_json(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    SweepResult result;
    const auto& grid = j.at("grid");
    result.grid.n_values = grid.at("n_values").get<std::vector<int>>();
    result.grid.a_min = grid.at("a_min").get<double>();
    result.grid.a_max = grid.at("a_max").get<double>();
    result.grid.a_steps = grid.at("a_steps").get<int>();
    result.grid.spacing =
        grid.at("spacing").get<std::string>() == "linear" ? Spacing::Linear : Spacing::Logarithmic;
    const auto& prov = j.at("provenance");
    result.provenance = {prov.at("tool_version").get<std::string>(),
                         prov.at("rel_tol").get<double>(),
                         prov.at("abs_tol").get<double>(),
                         prov.at("probe_margin").get<double>(),
                         prov.at("probe_depth").get<double>(),
                         prov.at("probe_r_floor").get<double>(),
                         prov.at("start_epsilon").get<double>(),
                         prov.at("timestamp").get<std::string>()};
    for (const auto& r : j.at("rows")) {
        SweepRow row;
        row.n = r.at("n").get<int>();
        row.a = r.at("a").get<double>();
        row.failed = r.at("failed").get<bool>();
        row.wall_ms = r.at("wall_ms").get<double>();
        if (row.failed)
            row.error = r.at("error").get<std::string>();
        else
            row.report = report_from_json(r.at("report"));
        result.rows.push_back(std::move(row));
    }
    return result;
}

ModelParams model_params_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw std::invalid_argument(std::string("model config: ") + ex.what());
    }
    if (!j.is_object()) throw std::invalid_argument("model config: top level must be an object");
    for (const auto& [key, value] : j.items()) {
        if (key != "n" && key != "a" && key != "gamma" && key != "r_max")
            throw std::invalid_argument("model config: unknown key \"" + key + "\"");
    }
    for (const char* key : {"n", "a", "gamma", "r_max"}) {
        if (!j.contains(key))
            throw std::invalid_argument(std::string("model config: missing key \"") + key + "\"");
    }
    if (!j.at("n").is_number_integer())
        throw std::invalid_argument("model config: n must be an integer");
    if (!j.at("a").is_number()) throw std::invalid_argument("model config: a must be a number");
    if (!j.at("r_max").is_number())
        throw std::invalid_argument("model config: r_max must be a number");
    if (!j.at("gamma").is_array())
        throw std::invalid_argument("model config: gamma must be an array of [power, coeff]");

    ModelParams params;
    params.n = j.at("n").get<int>();
    params.a = j.at("a").get<double>();
    params.r_max = j.at("r_max").get<double>();
    for (const auto& entry : j.at("gamma")) {
        if (!entry.is_array() || entry.size() != 2 || !entry.at(0).is_number_integer() ||
            !entry.at(1).is_number())
            throw std::invalid_argument("model config: gamma entries must be [power, coeff]");
        params.gamma.push_back({entry.at(0).get<int>(), entry.at(1).get<double>()});
    }
    Model validate(params);  // enforces the invariants; throws with the violated rule
    return params;
}

ModelParams load_model_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("model config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return model_params_from_json_text(text);
}

}  // namespace ltb
