#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "loewner/energy.hpp"
#include "loewner/identities.hpp"
#include "loewner/welders.hpp"

namespace loewner {

struct DriverPair {
    Driver d1, d2;
    double delta; // sup distance
};

// Two piecewise-linear drivers on [0, 1] with 8 pieces; knotwise differences at most 0.3.
inline DriverPair random_driver_pair(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<std::pair<double, double>> k1{{0.0, 0.0}}, k2{{0.0, 0.3 * U(rng)}};
    for (int i = 1; i <= 8; ++i) {
        double v = 0.5 * U(rng);
        k1.emplace_back(i / 8.0, v);
        k2.emplace_back(i / 8.0, v + 0.3 * U(rng));
    }
    DriverPair p{make_piecewise_linear(k1), make_piecewise_linear(k2), 0.0};
    p.delta = sup_distance(p.d1, p.d2);
    return p;
}

struct LipschitzSweep {
    std::vector<double> delta, gap;
    double max_excess = -kInf; // max gap - delta
    double max_ratio = 0.0;    // max gap / delta
    std::size_t sandwich_rows = 0;
    std::size_t sandwich_violations = 0;
    double max_violation = 0.0;
};

inline LipschitzSweep lipschitz_sweep(std::size_t count, std::uint64_t seed, std::size_t grid = 64, StepPolicy policy = {})
{
    LipschitzSweep s;
    std::vector<double> tg, yg;
    for (std::size_t k = 1; k <= grid; ++k) tg.push_back(static_cast<double>(k) / static_cast<double>(grid));
    for (std::size_t k = 0; k < grid; ++k) yg.push_back(-2.5 + 5.0 * (static_cast<double>(k) + 0.5) / static_cast<double>(grid));
    for (std::size_t r = 0; r < count; ++r) {
        DriverPair p = random_driver_pair(seed + r);
        double g = lipschitz_check(p.d1, p.d2, tg, policy);
        s.delta.push_back(p.delta);
        s.gap.push_back(g);
        s.max_excess = std::max(s.max_excess, g - p.delta);
        s.max_ratio = std::max(s.max_ratio, g / p.delta);
        SandwichReport sr = sandwich_check(p.d1, p.d2, yg, policy);
        s.sandwich_rows += sr.rows.size();
        s.sandwich_violations += sr.violations;
        s.max_violation = std::max(s.max_violation, sr.max_violation);
    }
    return s;
}

struct OscillatingRow {
    int n;
    double sup_distance;
    double weld_error; // max |tau_n(x_j) - t_j| over the targeted pairs
    Driver driver;
};

inline std::vector<OscillatingRow> oscillating_experiment(const Driver& source, const std::vector<int>& meshes,
                                                          double epsilon = 1e-3, StepPolicy policy = {})
{
    HittingProfile p = hitting_profile(source, 64, policy);
    const double T = p.horizon;
    std::vector<OscillatingRow> rows;
    for (int n : meshes) {
        Driver w = make_oscillating_welder(p, n, epsilon, policy);
        Discretization D(w, policy);
        double worst = 0.0;
        for (int j = 1; j < n; ++j) {
            double t = T * j / n;
            for (Side s : {Side::Left, Side::Right})
                worst = std::max(worst, std::abs(D.hitting_time(inverse_hitting(p, t, s)) - t));
        }
        rows.push_back({n, sup_distance(w, source), worst, std::move(w)});
    }
    return rows;
}

struct CounterexampleReport {
    int n = 0;
    Driver driver;
    double horizon = 0.0;
    double sup = 0.0;
    std::vector<double> residuals; // |phi(-k/n) - k/n|
    double max_residual = 0.0;
    double distance_to_reflection = 0.0; // sup over [-1, 0] of |phi(x) + x|
};

inline CounterexampleReport counterexample_experiment(int n, StepPolicy policy = {}, std::size_t samples = 100)
{
    CounterexampleReport r;
    r.n = n;
    r.driver = make_counterexample_welder(n, 0.0, policy);
    r.horizon = r.driver.horizon();
    r.sup = r.driver.sup_norm();
    Discretization D(r.driver, policy);
    for (int k = 1; k <= n; ++k) {
        double e = std::abs(weld_partner(D, -static_cast<double>(k) / n) - static_cast<double>(k) / n);
        r.residuals.push_back(e);
        r.max_residual = std::max(r.max_residual, e);
    }
    Welding w = compute_welding(r.driver, samples, policy);
    Welding z = compute_welding(make_constant(0.0, 0.25), samples, policy);
    r.distance_to_reflection = welding_distance(z, w);
    return r;
}

struct IdentityReport {
    double width_zero = 0.0;       // interval width, zero driver, (-1, 1)
    double width_random = 0.0;     // max over random drivers
    double appendix1_const = 0.0;  // constant drivers
    double appendix2_const = 0.0;
    double appendix1_random = 0.0; // max over random drivers
    double appendix2_random = 0.0;
    double appendix1_refined = 0.0; // same trajectories, twice the quadrature samples per step
    double appendix2_refined = 0.0;
    std::size_t max_time_pairs = 0;
    std::size_t max_time_violations = 0;
    double max_time_excess = -kInf;   // max tau - (y0 - x0)^2 / 16
    double max_time_equality = 0.0;   // max |tau - bound| for constant-average drivers
    std::vector<FasterTimesSample> faster;
    std::size_t faster_violations = 0;
    double faster_excess = -kInf;     // max tau - f(delta)
};

inline IdentityReport identities_experiment(std::size_t drivers, std::uint64_t seed, std::size_t faster_count = 100,
                                            StepPolicy policy = {})
{
    IdentityReport r;
    r.width_zero = interval_width_residual(make_constant(0.0, 1.0), -1.0, 1.0, policy);
    for (auto [c, x0] : {std::pair{0.3, -0.9}, std::pair{-0.5, 0.4}, std::pair{1.0, 0.2}}) {
        Driver d = make_constant(c, 1.0);
        r.appendix1_const = std::max(r.appendix1_const, appendix_identity_1(d, x0, policy));
        double xl = std::min(x0, 2.0 * c - x0);
        r.appendix2_const = std::max(r.appendix2_const, appendix_identity_2(d, xl, policy));
        auto v = max_time_check(d, {{xl, 2.0 * c - xl}}, policy);
        for (const auto& e : v) r.max_time_equality = std::max(r.max_time_equality, std::abs(e.tau - e.bound));
    }
    auto count = [&r](const std::vector<MaxTimeVerdict>& v) {
        for (const auto& e : v) {
            ++r.max_time_pairs;
            if (!e.ok) ++r.max_time_violations;
            r.max_time_excess = std::max(r.max_time_excess, e.tau - e.bound);
        }
    };
    for (std::size_t k = 0; k < drivers; ++k) {
        Driver d = make_random_piecewise_linear(seed + k, 8, 1.0, 0.5);
        Discretization D(d, policy);
        double x0 = d.initial_value() - 0.8;
        double y0 = weld_partner(D, x0);
        while (std::isinf(y0)) {
            x0 = 0.5 * (x0 + d.initial_value());
            y0 = weld_partner(D, x0);
        }
        r.width_random = std::max(r.width_random, interval_width_residual(d, x0, y0, policy));
        r.appendix1_random = std::max(r.appendix1_random, appendix_identity_1(d, x0, policy));
        r.appendix2_random = std::max(r.appendix2_random, appendix_identity_2(d, x0, policy));
        r.appendix1_refined = std::max(r.appendix1_refined, appendix_identity_1(d, x0, policy, 2));
        r.appendix2_refined = std::max(r.appendix2_refined, appendix_identity_2(d, x0, policy, 2));
        std::vector<std::pair<double, double>> pairs;
        for (double f : {0.25, 0.5, 0.75, 1.0}) {
            double x = d.initial_value() + f * (x0 - d.initial_value());
            pairs.emplace_back(x, weld_partner(D, x));
        }
        count(max_time_check(d, pairs, policy));
    }
    r.faster = faster_times_sweep(faster_count, seed, 1.0, policy);
    for (const auto& f : r.faster) {
        if (!f.ok) ++r.faster_violations;
        r.faster_excess = std::max(r.faster_excess, f.tau - f.bound);
        ++r.max_time_pairs;
        double bound = 0.25;
        if (f.tau > bound + 1e-9) ++r.max_time_violations;
        r.max_time_excess = std::max(r.max_time_excess, f.tau - bound);
    }
    return r;
}

} // namespace loewner
