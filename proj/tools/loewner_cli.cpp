#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "loewner/io.hpp"
#include "loewner/loewner.hpp"

using namespace loewner;
using nlohmann::json;

namespace {

struct Config {
    std::string command;
    std::string driver, driver2;
    std::string out = "out";
    std::size_t steps = 0; // 0: command default
    std::size_t grid = 0;
    std::size_t count = 0;
    double tol = 0.0;
    std::uint64_t seed = 1;
    std::string experiment;
    std::string mode = "sinusoid";

    json to_json() const
    {
        json j{{"command", command}, {"out", out}, {"steps", steps}, {"grid", grid}, {"count", count},
               {"tol", tol},         {"seed", seed}};
        if (!driver.empty()) j["driver"] = driver;
        if (!driver2.empty()) j["driver2"] = driver2;
        if (!experiment.empty()) j["experiment"] = experiment;
        if (command == "experiment" && experiment == "perturbation") j["mode"] = mode;
        return j;
    }
};

// Raised when an experiment's assertions fail; maps to exit code 4.
struct CheckFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::size_t pick(std::size_t v, std::size_t dflt) { return v ? v : dflt; }
double pick(double v, double dflt) { return v > 0.0 ? v : dflt; }

StepPolicy policy_of(const Config& c)
{
    StepPolicy p;
    if (c.steps) p.base_step = 1.0 / static_cast<double>(c.steps);
    return p;
}

std::string path(const Config& c, const std::string& name) { return (std::filesystem::path(c.out) / name).string(); }

void write_json(const Config& c, const std::string& name, const json& j) { io::write_file(path(c, name), j.dump(2) + "\n"); }

Driver need_driver(const std::string& arg, const char* what)
{
    if (arg.empty()) throw InputError(std::string("missing ") + what);
    return io::read_driver(arg);
}

io::Polyline driver_curve(const Driver& d, const std::string& color, std::size_t n = 2000)
{
    io::Polyline p;
    p.color = color;
    for (std::size_t k = 0; k <= n; ++k) {
        double t = d.horizon() * static_cast<double>(k) / static_cast<double>(n);
        p.pts.emplace_back(t, d(t));
    }
    return p;
}

io::Polyline curve_line(const Curve& c, const std::string& color)
{
    io::Polyline p;
    p.color = color;
    for (auto z : c.points) p.pts.emplace_back(z.real(), z.imag());
    return p;
}

// Collects named checks; the report fails if any does.
struct Checks {
    json list = json::array();
    bool ok = true;

    void add(const std::string& name, double value, const std::string& relation, double limit, bool pass)
    {
        list.push_back({{"name", name}, {"value", value}, {"relation", relation}, {"limit", limit}, {"pass", pass}});
        ok = ok && pass;
    }
    void at_most(const std::string& name, double value, double limit) { add(name, value, "<=", limit, value <= limit); }
    void at_least(const std::string& name, double value, double limit) { add(name, value, ">=", limit, value >= limit); }
};

void finish_report(const Config& c, json results, const Checks& ch)
{
    json r{{"config", c.to_json()}, {"results", std::move(results)}, {"checks", ch.list}, {"pass", ch.ok}};
    write_json(c, "report.json", r);
    for (const auto& e : ch.list)
        std::printf("%s %s = %.6g (%s %.6g)\n", e["pass"].get<bool>() ? "ok  " : "FAIL", e["name"].get<std::string>().c_str(),
                    e["value"].get<double>(), e["relation"].get<std::string>().c_str(), e["limit"].get<double>());
    if (!ch.ok) throw CheckFailed("experiment checks failed");
}

void cmd_hitting(const Config& c)
{
    Driver d = need_driver(c.driver, "--driver");
    HittingProfile p = hitting_profile(d, pick(c.grid, 64), policy_of(c));
    io::Csv csv({"x", "tau", "branch"});
    for (auto it = p.left.rbegin(); it != p.left.rend(); ++it)
        csv.row_text({io::Csv::number(it->first), io::Csv::number(it->second), "left"});
    for (auto [x, t] : p.right) csv.row_text({io::Csv::number(x), io::Csv::number(t), "right"});
    io::write_file(path(c, "hitting.csv"), csv.str());
    write_json(c, "endpoints.json",
               {{"a", p.a}, {"b", p.b}, {"T", p.horizon}, {"origin", p.origin}, {"a_resolved", p.a_resolved},
                {"b_resolved", p.b_resolved}, {"max_inversion", p.max_inversion}, {"config", c.to_json()}});
    std::printf("a = %.12g, b = %.12g, T = %.12g\n", p.a, p.b, p.horizon);
}

void cmd_welding(const Config& c)
{
    Driver d = need_driver(c.driver, "--driver");
    Welding w = compute_welding(d, pick(c.grid, 64), policy_of(c));
    io::Csv csv({"x", "phi", "tau"});
    io::Polyline line;
    for (std::size_t k = 0; k < w.samples.size(); ++k) {
        double x = w.origin + w.samples[k].first, y = w.origin + w.samples[k].second;
        csv.row({x, y, w.tau[k]});
        line.pts.emplace_back(x, y);
    }
    io::write_file(path(c, "welding.csv"), csv.str());
    io::write_file(path(c, "welding.svg"), io::svg({line}));
    write_json(c, "welding.json",
               {{"origin", w.origin}, {"a", w.a}, {"b", w.b}, {"T", w.horizon}, {"max_residual", w.max_residual},
                {"config", c.to_json()}});
    std::printf("%zu samples, max residual %.3g\n", w.samples.size(), w.max_residual);
}

void cmd_trace(const Config& c)
{
    Driver d = need_driver(c.driver, "--driver");
    std::size_t n = pick(c.steps, 2000);
    Curve cv = trace_curve(d, n);
    auto dump = [&](const Curve& k, const std::string& name) {
        io::Csv csv({"t", "re", "im"});
        for (std::size_t i = 0; i < k.points.size(); ++i) csv.row({k.times[i], k.points[i].real(), k.points[i].imag()});
        io::write_file(path(c, name), csv.str());
    };
    dump(cv, "curve.csv");
    io::write_file(path(c, "curve.svg"), io::svg({curve_line(cv, "black")}));
    json summary{{"tip", {cv.tip().real(), cv.tip().imag()}}, {"base", cv.base}, {"simple", is_simple(cv)},
                 {"chord_deviation", chord_deviation(cv)}, {"config", c.to_json()}};
    if (!c.driver2.empty()) {
        Curve c2 = trace_curve(io::read_driver(c.driver2), n);
        dump(c2, "curve2.csv");
        io::write_file(path(c, "curves.svg"), io::svg({curve_line(cv, "black"), curve_line(c2, "red")}));
        summary["tip2"] = {c2.tip().real(), c2.tip().imag()};
        summary["curve_distance"] = curve_distance(cv, c2);
    }
    write_json(c, "trace.json", summary);
    std::printf("tip = (%.12g, %.12g)\n", cv.tip().real(), cv.tip().imag());
}

void exp_oscillating(const Config& c)
{
    Driver src = make_angled_line_source();
    std::vector<int> meshes{4, 16, 64};
    if (c.grid) meshes = {static_cast<int>(c.grid)};
    auto rows = oscillating_experiment(src, meshes, pick(c.tol, 1e-3), policy_of(c));
    io::Csv csv({"n", "sup_distance", "weld_error"});
    std::vector<io::Polyline> lines{driver_curve(src, "black")};
    const char* colors[] = {"red", "green", "blue", "orange"};
    json res = json::array();
    Checks ch;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        csv.row({static_cast<double>(rows[k].n), rows[k].sup_distance, rows[k].weld_error});
        lines.push_back(driver_curve(rows[k].driver, colors[k % 4], 20000));
        res.push_back({{"n", rows[k].n}, {"sup_distance", rows[k].sup_distance}, {"weld_error", rows[k].weld_error}});
        if (k > 0)
            ch.add("sup_distance[n=" + std::to_string(rows[k].n) + "] < previous", rows[k].sup_distance, "<",
                   rows[k - 1].sup_distance, rows[k].sup_distance < rows[k - 1].sup_distance);
        ch.at_most("weld_error[n=" + std::to_string(rows[k].n) + "]", rows[k].weld_error, 1e-6);
    }
    io::write_file(path(c, "oscillating.csv"), csv.str());
    io::write_file(path(c, "oscillating.svg"), io::svg(lines, 720.0, 360.0));
    finish_report(c, {{"epsilon", pick(c.tol, 1e-3)}, {"rows", res}}, ch);
}

void exp_counterexample(const Config& c)
{
    int n = static_cast<int>(pick(c.grid, 20));
    double tol = pick(c.tol, 1e-3);
    CounterexampleReport r = counterexample_experiment(n, policy_of(c));
    io::Csv csv({"k", "x", "target", "residual"});
    for (int k = 1; k <= n; ++k)
        csv.row({static_cast<double>(k), -static_cast<double>(k) / n, static_cast<double>(k) / n,
                 r.residuals[static_cast<std::size_t>(k - 1)]});
    io::write_file(path(c, "counterexample.csv"), csv.str());
    io::write_file(path(c, "counterexample.svg"), io::svg({driver_curve(r.driver, "black", 40000)}, 720.0, 360.0));
    Checks ch;
    ch.at_least("sup|xi_n|", r.sup, 1.0 - 3.0 / n);
    ch.at_most("max mesh residual", r.max_residual, tol);
    ch.at_most("total welding time", r.horizon, 2.0 / (static_cast<double>(n) * n));
    ch.at_most("welding distance to x -> -x", r.distance_to_reflection, 0.05);
    finish_report(c,
                  {{"n", n}, {"horizon", r.horizon}, {"sup", r.sup}, {"max_residual", r.max_residual},
                   {"distance_to_reflection", r.distance_to_reflection}, {"driver", io::driver_to_json(r.driver)}},
                  ch);
}

void exp_perturbation(const Config& c)
{
    Driver base = c.driver.empty() ? make_constant(0.0, 1.0) : io::read_driver(c.driver);
    PerturbationMode mode = perturbation_mode_from_string(c.mode);
    std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
    auto rows = driver_perturbation_experiment(base, deltas, mode, pick(c.grid, 128), policy_of(c), c.seed);
    io::Csv csv({"delta", "distance", "da", "db"});
    json res = json::array();
    Checks ch;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        csv.row({r.delta, r.distance, r.da, r.db});
        res.push_back({{"delta", r.delta}, {"distance", r.distance}, {"da", r.da}, {"db", r.db}});
        char tag_buf[32];
        std::snprintf(tag_buf, sizeof tag_buf, "[delta=%g]", r.delta);
        std::string tag = tag_buf;
        if (k > 0)
            ch.add("distance" + tag + " < previous", r.distance, "<", rows[k - 1].distance, r.distance < rows[k - 1].distance);
        ch.at_most("|a_delta - a|" + tag, r.da, r.delta + 1e-6);
        ch.at_most("|b_delta - b|" + tag, r.db, r.delta + 1e-6);
    }
    if (mode == PerturbationMode::Sinusoid && c.driver.empty()) ch.at_most("final distance", rows.back().distance, 0.05);
    io::write_file(path(c, "perturbation.csv"), csv.str());
    finish_report(c, {{"mode", to_string(mode)}, {"rows", res}}, ch);
}

void exp_energy(const Config& c)
{
    double tol = pick(c.tol, 1e-3);
    MinimizeConfig mc;
    Checks ch;
    MinimizationResult single = minimize_energy(PartitionWeldingProblem{{{-1.0, 1.0}}}, mc);
    ch.at_most("single pair energy", single.energy, tol);
    ch.at_most("single pair sup norm", single.driver.sup_norm(), 1e-2);

    Driver src = c.driver.empty() ? make_piecewise_linear({{0.0, 0.0}, {0.5, 0.3}, {1.0, 0.1}}) : io::read_driver(c.driver);
    std::vector<std::size_t> depths{2, 4, 8};
    if (c.grid) depths = {c.grid};
    auto rows = partition_refinement_experiment(src, depths, mc);
    io::Csv csv({"pairs", "energy", "source_energy", "curve_distance", "max_residual", "converged"});
    json res = json::array();
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const auto& r = rows[k];
        csv.row({static_cast<double>(r.pairs), r.energy, r.source_energy, r.curve_distance, r.max_residual,
                 r.converged ? 1.0 : 0.0});
        res.push_back({{"pairs", r.pairs}, {"energy", r.energy}, {"source_energy", r.source_energy},
                       {"curve_distance", r.curve_distance}, {"max_residual", r.max_residual}, {"converged", r.converged}});
        std::string tag = "[N=" + std::to_string(r.pairs) + "]";
        ch.at_most("energy" + tag, r.energy, r.source_energy + tol);
        if (k > 0) ch.at_least("energy" + tag + " vs previous", r.energy, rows[k - 1].energy - tol);
        ch.at_most("welding residual" + tag, r.max_residual, tol);
    }
    io::write_file(path(c, "energy.csv"), csv.str());
    finish_report(c,
                  {{"single_pair", {{"energy", single.energy}, {"sup_norm", single.driver.sup_norm()}}},
                   {"source", io::driver_to_json(src)}, {"rows", res}},
                  ch);
}

void exp_lipschitz(const Config& c)
{
    std::size_t count = pick(c.count, 200);
    LipschitzSweep s = lipschitz_sweep(count, c.seed, pick(c.grid, 64), policy_of(c));
    io::Csv csv({"seed", "delta", "gap"});
    for (std::size_t k = 0; k < count; ++k) csv.row({static_cast<double>(c.seed + k), s.delta[k], s.gap[k]});
    io::write_file(path(c, "lipschitz.csv"), csv.str());
    double eps = 0.05;
    std::vector<double> tg;
    for (int k = 1; k <= 64; ++k) tg.push_back(k / 64.0);
    double sharp = lipschitz_check(make_constant(0.0, 1.0), make_constant(eps, 1.0), tg, policy_of(c));
    Checks ch;
    ch.at_most("max gap - delta", s.max_excess, 1e-6);
    ch.at_most("max gap / delta", s.max_ratio, 1.0 + 1e-5);
    ch.at_most("sandwich violations", static_cast<double>(s.sandwich_violations), 0.0);
    ch.at_most("|gap(0, eps) - eps|", std::abs(sharp - eps), 1e-9);
    finish_report(c,
                  {{"pairs", count}, {"max_excess", s.max_excess}, {"max_ratio", s.max_ratio},
                   {"sandwich_rows", s.sandwich_rows}, {"sandwich_violations", s.sandwich_violations},
                   {"sandwich_max_violation", s.max_violation}, {"sharpness_gap", sharp}},
                  ch);
}

void exp_identities(const Config& c)
{
    IdentityReport r = identities_experiment(pick(c.count, 50), c.seed, 100, policy_of(c));
    io::Csv csv({"seed", "delta", "tau", "bound"});
    for (const auto& f : r.faster) csv.row({static_cast<double>(f.seed), f.delta, f.tau, f.bound});
    io::write_file(path(c, "faster_times.csv"), csv.str());
    Checks ch;
    ch.at_most("interval width, zero driver", r.width_zero, 1e-6);
    ch.at_most("interval width, random drivers", r.width_random, 1e-5);
    ch.at_most("appendix 1, constant drivers", r.appendix1_const, 1e-4);
    ch.at_most("appendix 2, constant drivers", r.appendix2_const, 1e-4);
    ch.at_most("appendix 1, random drivers", r.appendix1_random, 1e-3);
    ch.at_most("appendix 2, random drivers", r.appendix2_random, 1e-3);
    ch.add("appendix 1 refined < coarse", r.appendix1_refined, "<", r.appendix1_random, r.appendix1_refined < r.appendix1_random);
    ch.add("appendix 2 refined < coarse", r.appendix2_refined, "<", r.appendix2_random, r.appendix2_refined < r.appendix2_random);
    ch.at_most("max-time violations", static_cast<double>(r.max_time_violations), 0.0);
    ch.at_most("max-time equality error", r.max_time_equality, 1e-9);
    ch.at_most("faster-times violations", static_cast<double>(r.faster_violations), 0.0);
    ch.at_most("f(0) - 0.25", std::abs(faster_times_bound(1.0, 0.0).f - 0.25), 0.0);
    finish_report(c,
                  {{"width_zero", r.width_zero}, {"width_random", r.width_random}, {"appendix1_const", r.appendix1_const},
                   {"appendix2_const", r.appendix2_const}, {"appendix1_random", r.appendix1_random},
                   {"appendix2_random", r.appendix2_random}, {"appendix1_refined", r.appendix1_refined},
                   {"appendix2_refined", r.appendix2_refined}, {"max_time_pairs", r.max_time_pairs},
                   {"max_time_excess", r.max_time_excess}, {"faster_excess", r.faster_excess}},
                  ch);
}

void cmd_experiment(const Config& c)
{
    if (c.experiment == "oscillating") return exp_oscillating(c);
    if (c.experiment == "counterexample") return exp_counterexample(c);
    if (c.experiment == "perturbation") return exp_perturbation(c);
    if (c.experiment == "energy-refinement") return exp_energy(c);
    if (c.experiment == "lipschitz") return exp_lipschitz(c);
    if (c.experiment == "identities") return exp_identities(c);
    throw InputError("unknown experiment '" + c.experiment + "'");
}

// Identity residuals and the maximal-time bound on a user driver, at left points
// spread over the welded interval.
void cmd_verify(const Config& c)
{
    Driver d = need_driver(c.driver, "--driver");
    StepPolicy pol = policy_of(c);
    double tol = pick(c.tol, 1e-3);
    HittingProfile p = hitting_profile(d, 64, pol);
    std::size_t n = pick(c.grid, 8);
    Discretization D(d, pol);
    io::Csv csv({"x", "phi", "tau", "interval_width", "appendix_1", "appendix_2", "max_time_margin"});
    json rows = json::array();
    Checks ch;
    double w_iw = 0.0, w_a1 = 0.0, w_a2 = 0.0, w_mt = -kInf;
    for (std::size_t k = 1; k <= n; ++k) {
        double x = p.origin - 0.95 * p.a * static_cast<double>(k) / static_cast<double>(n);
        double y = weld_partner(D, x);
        if (std::isinf(y)) continue;
        double tau = D.hitting_time(x);
        double iw = interval_width_residual(d, x, y, pol);
        double a1 = appendix_identity_1(d, x, pol), a2 = appendix_identity_2(d, x, pol);
        double margin = tau - (y - x) * (y - x) / 16.0;
        csv.row({x, y, tau, iw, a1, a2, margin});
        rows.push_back({{"x", x}, {"phi", y}, {"tau", tau}, {"interval_width", iw}, {"appendix_1", a1}, {"appendix_2", a2},
                        {"max_time_margin", margin}});
        w_iw = std::max(w_iw, iw);
        w_a1 = std::max(w_a1, a1);
        w_a2 = std::max(w_a2, a2);
        w_mt = std::max(w_mt, margin);
    }
    io::write_file(path(c, "verify.csv"), csv.str());
    ch.at_most("interval width residual", w_iw, tol);
    ch.at_most("appendix 1 residual", w_a1, tol);
    ch.at_most("appendix 2 residual", w_a2, tol);
    ch.at_most("tau - (y - x)^2 / 16", w_mt, 1e-9);
    finish_report(c, {{"rows", rows}}, ch);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Loewner flow, hitting times and conformal welding"};
    app.require_subcommand(1);
    Config cfg;
    auto common = [&cfg](CLI::App* s) {
        s->add_option("--driver", cfg.driver, "driver spec: JSON file or inline JSON");
        s->add_option("--out", cfg.out, "output directory")->capture_default_str();
        s->add_option("--steps", cfg.steps, "flow steps per unit time (trace: slit steps)");
        s->add_option("--grid", cfg.grid, "grid size");
        s->add_option("--tol", cfg.tol, "tolerance")->check(CLI::PositiveNumber);
        s->add_option("--seed", cfg.seed, "seed for randomized sweeps")->capture_default_str();
    };
    auto* hit = app.add_subcommand("hitting", "hitting-time profile and welding endpoints");
    auto* weld = app.add_subcommand("welding", "conformal welding on a uniform grid");
    auto* trace = app.add_subcommand("trace", "trace the generated curve");
    auto* exp = app.add_subcommand("experiment", "run a named experiment");
    auto* ver = app.add_subcommand("verify", "identity residuals on a driver");
    for (auto* s : {hit, weld, trace, exp, ver}) common(s);
    trace->add_option("--driver2", cfg.driver2, "second driver for a paired trace");
    exp->add_option("--experiment,name", cfg.experiment,
                    "oscillating | counterexample | perturbation | energy-refinement | lipschitz | identities")
        ->required();
    exp->add_option("--count", cfg.count, "number of random drivers or pairs");
    exp->add_option("--mode", cfg.mode, "perturbation mode: sinusoid | constant | random-pl")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    cfg.command = app.get_subcommands().front()->get_name();
    try {
        std::filesystem::create_directories(cfg.out);
        if (cfg.command == "hitting") cmd_hitting(cfg);
        else if (cfg.command == "welding") cmd_welding(cfg);
        else if (cfg.command == "trace") cmd_trace(cfg);
        else if (cfg.command == "experiment") cmd_experiment(cfg);
        else cmd_verify(cfg);
    } catch (const InputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const NumericalDiagnostic& e) {
        std::fprintf(stderr, "numerical diagnostic: %s\n", e.what());
        return 3;
    } catch (const CheckFailed& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
