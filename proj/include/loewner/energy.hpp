#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "loewner/tracer.hpp"
#include "loewner/welding.hpp"

namespace loewner {

struct EnergyReport {
    double total = 0.0;
    std::vector<double> per_segment;
    bool infinite = false;
};

// 1/2 int xi'^2 dt, per segment; only [0, until] counts when until is given.
inline EnergyReport loewner_energy(const Driver& d, double until = kInf)
{
    EnergyReport r;
    for (std::size_t i = 0; i < d.segments().size(); ++i) {
        const Segment& s = d.segments()[i];
        double s0 = d.segment_start(i);
        double keep = std::clamp(until - s0, 0.0, s.duration);
        double e = 0.0;
        if (keep > 0.0) {
            if (std::holds_alternative<Linear>(s.shape)) {
                const auto& l = std::get<Linear>(s.shape);
                double slope = (l.v1 - l.v0) / s.duration;
                e = 0.5 * slope * slope * keep;
            } else if (std::holds_alternative<SqrtCap>(s.shape)) {
                e = std::get<SqrtCap>(s.shape).coef == 0.0 ? 0.0 : kInf;
            } else if (const auto* q = std::get_if<Sampled>(&s.shape)) {
                for (std::size_t k = 1; k < q->t.size(); ++k) {
                    double h = q->t[k] - q->t[k - 1];
                    double part = std::clamp(keep - q->t[k - 1], 0.0, h);
                    double slope = (q->v[k] - q->v[k - 1]) / h;
                    e += 0.5 * slope * slope * part;
                }
            }
        }
        if (std::isinf(e)) r.infinite = true;
        r.per_segment.push_back(e);
        r.total += e;
    }
    return r;
}

// Knots (t, xi(t)) of a block sampled uniformly; the block's own start and end are kept.
inline std::vector<std::pair<double, double>> render_linear(const Driver& block, std::size_t steps, double t0)
{
    std::vector<std::pair<double, double>> k;
    double T = block.horizon();
    for (std::size_t j = 0; j <= steps; ++j) {
        double t = j == steps ? T : T * static_cast<double>(j) / static_cast<double>(steps);
        k.emplace_back(t0 + t, block(t));
    }
    return k;
}

inline Driver driver_from_knots(const std::vector<std::pair<double, double>>& knots)
{
    std::vector<Segment> segs;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        double dt = knots[i].first - knots[i - 1].first;
        if (dt > 0.0) segs.push_back(Segment{dt, Linear{knots[i - 1].second, knots[i].second}});
    }
    return Driver(std::move(segs), Orientation::Upward);
}

// Welds the pairs one at a time: after the blocks so far, the images of (x_j, y_j) are
// welded by a tilted-slit block, rendered piecewise-linearly with steps_per_pair pieces.
inline Driver zipper_initializer(const PartitionWeldingProblem& p, std::size_t steps_per_pair = 64,
                                 StepPolicy policy = {})
{
    p.validate();
    if (steps_per_pair < 1) throw InputError("zipper_initializer: steps_per_pair must be positive");
    std::vector<std::pair<double, double>> knots{{0.0, 0.0}};
    for (auto [x0, y0] : p.pairs) {
        double t0 = knots.back().first, v = knots.back().second;
        double x = x0, y = y0;
        if (knots.size() > 1) {
            Driver cur = driver_from_knots(knots);
            Discretization D(cur, policy);
            auto ex = D.evolve(x0), ey = D.evolve(y0);
            if (ex.welded() || ey.welded())
                throw NumericalDiagnostic("zipper_initializer: an outer pair was welded by an inner block");
            x = ex.samples.back().second;
            y = ey.samples.back().second;
        }
        if (!(x < v && v < y) || y - x < 1e-12)
            throw NumericalDiagnostic("zipper_initializer: image pair degenerated");
        Driver block = slit_block(x - v, y - v, v);
        auto add = render_linear(block, steps_per_pair, t0);
        knots.insert(knots.end(), add.begin() + 1, add.end());
    }
    // Constant tail so the last weld falls inside the horizon.
    double T = knots.back().first;
    knots.emplace_back(T * (1.0 + 1e-6), knots.back().second);
    return driver_from_knots(knots);
}

struct MinimizeConfig {
    std::size_t knots = 0;                       // pieces of the optimised driver; 0 means 8 N
    std::vector<double> penalties{10.0, 1e2, 1e3, 1e4};
    std::size_t max_sweeps = 200;                // per penalty level
    double min_step = 1e-5;
    double tolerance = 1e-3;                     // welding residual accepted as converged
    std::size_t steps_per_pair = 64;
    StepPolicy policy{2e-4};
};

struct MinimizationResult {
    PartitionWeldingProblem problem;
    Driver driver;
    double energy = 0.0;              // on [0, tau(x_N)]
    double initial_energy = 0.0;      // the initializer's, on the same interval
    std::vector<double> welding_residuals; // |phi(x_j) - y_j|, recomputed independently
    bool converged = false;
    std::size_t iterations = 0;
};

namespace detail {

// Hitting time, continued past the horizon by holding the driver at its final value.
inline double held_hitting_time(const Discretization& D, double x0)
{
    BoundaryTrajectory tr = D.evolve(x0, false);
    if (tr.welded()) return tr.tau;
    double u = tr.x_end - D.driver().final_value();
    return D.horizon() + u * u / 4.0;
}

inline Driver knots_driver(const std::vector<double>& v, double T0)
{
    std::vector<std::pair<double, double>> k;
    std::size_t m = v.size() - 1;
    for (std::size_t j = 0; j <= m; ++j)
        k.emplace_back(j == m ? T0 : T0 * static_cast<double>(j) / static_cast<double>(m), v[j]);
    return make_piecewise_linear(k);
}

} // namespace detail

// Penalty method over the knot values of a piecewise-linear driver on [0, T0],
// T0 = 1.05 (y_N - x_N)^2 / 16, by coordinate descent from the zipper initializer. The
// penalty uses the hitting-time mismatch of each pair, rescaled to welding-map units; the
// reported residuals come from a separate welding computation.
inline MinimizationResult minimize_energy(const PartitionWeldingProblem& p, MinimizeConfig cfg = {})
{
    p.validate();
    const std::size_t N = p.pairs.size();
    const std::size_t m = cfg.knots ? cfg.knots : 8 * N;
    auto [xN, yN] = p.pairs.back();
    const double T0 = 1.05 * (yN - xN) * (yN - xN) / 16.0;

    Driver init = zipper_initializer(p, cfg.steps_per_pair, cfg.policy);
    std::vector<double> v(m + 1);
    for (std::size_t j = 0; j <= m; ++j) v[j] = init(T0 * static_cast<double>(j) / static_cast<double>(m));
    v[0] = 0.0;

    auto penalty_terms = [&](const Driver& d) {
        Discretization D(d, cfg.policy);
        double s = 0.0;
        for (auto [x, y] : p.pairs) {
            double r = 4.0 * (detail::held_hitting_time(D, y) - detail::held_hitting_time(D, x)) / (y - x);
            s += r * r;
        }
        return s;
    };
    double mu = 0.0;
    auto objective = [&](const std::vector<double>& w) {
        Driver d = detail::knots_driver(w, T0);
        return loewner_energy(d).total + mu * penalty_terms(d);
    };

    MinimizationResult res;
    res.problem = p;
    double step0 = 0.05 * (yN - xN);
    for (std::size_t lv = 0; lv < cfg.penalties.size(); ++lv) {
        mu = cfg.penalties[lv];
        double f = objective(v);
        double step = lv == 0 ? step0 : 0.1 * step0;
        for (std::size_t sweep = 0; sweep < cfg.max_sweeps && step >= cfg.min_step; ++sweep) {
            ++res.iterations;
            bool improved = false;
            for (std::size_t j = 1; j <= m; ++j) {
                for (double dir : {1.0, -1.0}) {
                    double keep = v[j];
                    v[j] = keep + dir * step;
                    double g = objective(v);
                    if (g < f) {
                        f = g;
                        improved = true;
                        break;
                    }
                    v[j] = keep;
                }
            }
            if (!improved) step *= 0.5;
        }
    }

    res.driver = detail::knots_driver(v, T0);
    Discretization D(res.driver, cfg.policy);
    double tN = D.hitting_time(xN);
    res.energy = loewner_energy(res.driver, tN).total;
    Discretization Di(init, cfg.policy);
    res.initial_energy = loewner_energy(init, Di.hitting_time(xN)).total;
    res.converged = !beyond_horizon(tN);
    for (auto [x, y] : p.pairs) {
        double phi = weld_partner(D, x);
        double r = std::isinf(phi) ? kInf : std::abs(phi - y);
        res.welding_residuals.push_back(r);
        if (!(r <= cfg.tolerance)) res.converged = false;
    }
    return res;
}

struct RefinementRow {
    std::size_t pairs;
    double energy;
    double source_energy;
    double curve_distance;
    double max_residual;
    bool converged;
};

// Partitions of the source's welding at uniform hitting-time levels j T / N; the traced
// minimiser is compared with the traced source over the shorter capacity interval.
inline std::vector<RefinementRow> partition_refinement_experiment(const Driver& source, const std::vector<std::size_t>& depths,
                                                                  MinimizeConfig cfg = {}, std::size_t trace_steps = 2000)
{
    if (source.initial_value() != 0.0) throw InputError("partition_refinement_experiment: source must start at 0");
    HittingProfile prof = hitting_profile(source, 64, cfg.policy);
    const double T = source.horizon();
    const double Es = loewner_energy(source).total;
    Curve gamma = trace_curve(source, trace_steps);
    std::vector<RefinementRow> rows;
    for (std::size_t N : depths) {
        if (N < 1) throw InputError("partition depth must be positive");
        PartitionWeldingProblem p;
        for (std::size_t j = 1; j <= N; ++j) {
            double t = T * static_cast<double>(j) / static_cast<double>(N);
            p.pairs.emplace_back(inverse_hitting(prof, t, Side::Left), inverse_hitting(prof, t, Side::Right));
        }
        MinimizationResult r = minimize_energy(p, cfg);
        Discretization D(r.driver, cfg.policy);
        double tN = std::min(D.hitting_time(p.pairs.back().first), r.driver.horizon());
        std::vector<std::pair<double, double>> k;
        for (const auto& s : r.driver.segments()) {
            double t0 = k.empty() ? 0.0 : k.back().first;
            if (k.empty()) k.emplace_back(0.0, s.start_value());
            if (t0 >= tN) break;
            double t1 = std::min(t0 + s.duration, tN);
            k.emplace_back(t1, s.value(t1 - t0));
        }
        Curve gn = trace_curve(driver_from_knots(k), trace_steps);
        double md = 0.0;
        for (double e : r.welding_residuals) md = std::max(md, e);
        rows.push_back({N, r.energy, Es, curve_distance(gamma, gn), md, r.converged});
    }
    return rows;
}

} // namespace loewner
