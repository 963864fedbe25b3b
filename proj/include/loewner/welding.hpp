#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "loewner/hitting.hpp"

namespace loewner {

// Samples are in coordinates centred at xi(0): x in [-a, 0], phi(x) in [0, b].
struct Welding {
    double origin = 0.0;
    double horizon = 0.0;
    double a = 0.0, b = 0.0;
    std::vector<std::pair<double, double>> samples; // (x, phi(x)), x increasing
    std::vector<double> tau;                        // tau_-(x) per sample
    double max_residual = 0.0;                      // max |tau_-(x) - tau_+(phi(x))|

    double phi(double x) const;
};

namespace detail {

// Linear interpolation on samples sorted by first coordinate; clamps outside.
inline double interp(const std::vector<std::pair<double, double>>& s, double x)
{
    if (x <= s.front().first) return s.front().second;
    if (x >= s.back().first) return s.back().second;
    auto it = std::lower_bound(s.begin(), s.end(), x, [](const auto& p, double v) { return p.first < v; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    if (hi.first == lo.first) return hi.second;
    double f = (x - lo.first) / (hi.first - lo.first);
    return lo.second + f * (hi.second - lo.second);
}

} // namespace detail

inline double Welding::phi(double x) const { return detail::interp(samples, x); }

// Partner of a boundary point under the discrete flow: the point on the other side of the
// driver with the same hitting time. Absolute coordinates; +inf if x is not welded.
inline double weld_partner(const Discretization& D, double x, double tol = 1e-11)
{
    double o = D.driver().initial_value();
    if (x == o) return o;
    double t = D.hitting_time(x);
    if (beyond_horizon(t)) return kInf;
    int side = x < o ? 1 : -1;
    double reach = detail::reach_of(D.driver());
    return detail::invert(D, t, side, tol, reach);
}

// Welding on explicit left points, given relative to xi(0) (each in [-a, 0]).
inline Welding compute_welding_at(const HittingProfile& p, std::vector<double> xs)
{
    const Discretization& D = *p.disc;
    Welding w;
    w.origin = p.origin;
    w.horizon = p.horizon;
    w.a = p.a;
    w.b = p.b;
    std::sort(xs.begin(), xs.end());
    const double reach = detail::reach_of(D.driver());
    for (double x : xs) {
        if (x > 0.0 || x < -p.a) throw InputError("compute_welding: sample outside [-a, 0]");
        if (x == 0.0) {
            w.samples.emplace_back(0.0, 0.0);
            w.tau.push_back(0.0);
            continue;
        }
        double t = D.hitting_time(p.origin + x);
        if (beyond_horizon(t)) t = p.horizon;
        double tol = 1e-11 * (1.0 + std::abs(x));
        double y = detail::invert(D, t, +1, tol, reach);
        double ty = D.hitting_time(y);
        w.max_residual = std::max(w.max_residual, std::abs(ty - t));
        w.samples.emplace_back(x, y - p.origin);
        w.tau.push_back(t);
    }
    return w;
}

// phi = tau_+^{-1} o tau_- on n + 1 uniform left points of [-a, 0], by root-finding on the
// discrete hitting times.
inline Welding compute_welding(const Driver& d, std::size_t n, StepPolicy policy = {}, std::size_t profile_points = 64)
{
    if (n < 1) throw InputError("compute_welding: need at least one sample");
    HittingProfile p = hitting_profile(d, profile_points, policy);
    std::vector<double> xs;
    for (std::size_t k = 0; k <= n; ++k) xs.push_back(-p.a * (1.0 - static_cast<double>(k) / static_cast<double>(n)));
    return compute_welding_at(p, xs);
}

// sup over the common domain [-c, 0] of |phi1 - phi2|, phi2 interpolated on w1's grid.
inline double welding_distance(const Welding& w1, const Welding& w2, double shrink = 0.0)
{
    double c = std::min(w1.a, w2.a) - shrink;
    if (!(c > 0.0) || w1.samples.empty() || w2.samples.empty())
        throw InputError("welding_distance: weldings have no common domain");
    double worst = 0.0;
    std::size_t used = 0;
    for (auto [x, y] : w1.samples) {
        if (x < -c) continue;
        worst = std::max(worst, std::abs(y - w2.phi(x)));
        ++used;
    }
    if (used == 0) throw InputError("welding_distance: no samples on the common domain");
    return worst;
}

enum class PerturbationMode { Sinusoid, Constant, RandomPiecewiseLinear };

inline std::string to_string(PerturbationMode m)
{
    switch (m) {
    case PerturbationMode::Sinusoid: return "sinusoid";
    case PerturbationMode::Constant: return "constant";
    default: return "random-pl";
    }
}

inline PerturbationMode perturbation_mode_from_string(const std::string& s)
{
    if (s == "sinusoid") return PerturbationMode::Sinusoid;
    if (s == "constant") return PerturbationMode::Constant;
    if (s == "random-pl") return PerturbationMode::RandomPiecewiseLinear;
    throw InputError("unknown perturbation mode: " + s);
}

struct PerturbationRow {
    double delta;
    double distance; // sup |phi_delta - phi|
    double da;       // |a_delta - a|, endpoints in absolute coordinates
    double db;
};

// d plus a perturbation of sup-norm exactly delta.
inline Driver perturb(const Driver& d, double delta, PerturbationMode mode, std::uint64_t seed = 1)
{
    const double T = d.horizon();
    switch (mode) {
    case PerturbationMode::Constant: return shifted(d, delta);
    case PerturbationMode::Sinusoid:
        return perturbed(d, [&](double t) { return delta * std::sin(4.0 * M_PI * t / T); });
    default: {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        const std::size_t m = 16;
        std::vector<std::pair<double, double>> knots;
        std::size_t peak = static_cast<std::size_t>(rng() % (m + 1));
        for (std::size_t k = 0; k <= m; ++k) {
            double v = k == peak ? (u(rng) < 0 ? -1.0 : 1.0) : u(rng);
            knots.emplace_back(T * static_cast<double>(k) / static_cast<double>(m), delta * v);
        }
        knots.back().first = T;
        Driver g = make_piecewise_linear(knots);
        return perturbed(d, [&](double t) { return g(t); });
    }
    }
}

inline std::vector<PerturbationRow> driver_perturbation_experiment(const Driver& d, const std::vector<double>& deltas,
                                                                   PerturbationMode mode, std::size_t n = 128,
                                                                   StepPolicy policy = {}, std::uint64_t seed = 1)
{
    Welding base = compute_welding(d, n, policy);
    std::vector<PerturbationRow> rows;
    for (double delta : deltas) {
        if (delta < 0.0) throw InputError("perturbation amplitude must be non-negative");
        if (delta == 0.0) {
            rows.push_back({0.0, 0.0, 0.0, 0.0});
            continue;
        }
        Driver q = perturb(d, delta, mode, seed);
        Welding w = compute_welding(q, n, policy);
        PerturbationRow r{delta, welding_distance(base, w), 0.0, 0.0};
        r.da = std::abs((w.origin - w.a) - (base.origin - base.a));
        r.db = std::abs((w.origin + w.b) - (base.origin + base.b));
        rows.push_back(r);
    }
    return rows;
}

} // namespace loewner
