#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "loewner/welding.hpp"

namespace loewner {

struct PairTrajectory {
    BoundaryTrajectory x, y;
    std::vector<std::pair<double, double>> alpha_samples; // (t, alpha), xi = (1 - alpha) x + alpha y
    double tau = kInf;                                    // min of the two hitting times
};

inline PairTrajectory pair_trajectory(const Discretization& D, double x0, double y0)
{
    double o = D.driver().initial_value();
    if (!(x0 < o && o < y0)) throw InputError("pair_trajectory: need x0 < xi(0) < y0");
    PairTrajectory p;
    p.x = D.evolve(x0);
    p.y = D.evolve(y0);
    p.tau = std::min(p.x.tau, p.y.tau);
    const auto& s = p.x.tau <= p.y.tau ? p.x : p.y;
    for (std::size_t i = 0; i + 1 < s.samples.size(); ++i) {
        double t = s.samples[i].first;
        double xt = p.x.samples[i].second, yt = p.y.samples[i].second;
        p.alpha_samples.emplace_back(t, (D.driver()(t) - xt) / (yt - xt));
    }
    return p;
}

namespace detail {

// Integral over [0, tau] of f(t, tau - t, i), where f is smooth on each piece [knots[i], knots[i+1]]
// and may blow up like (tau - t)^(-1/2) at the last knot tau. Up to (1 - tail) tau each piece
// gets the trapezoid rule; after that u = sqrt(tau - t) and the midpoint rule in u. With
// gauss set, both are replaced by adaptive Gauss-Legendre. Otherwise every piece is split
// into sub panels. cum, if given, receives the running integral at every knot.
template <class F>
long double singular_quadrature(const std::vector<double>& knots, F&& f, std::vector<long double>* cum = nullptr,
                                bool gauss = false, int sub = 1, double tail = 0.01)
{
    static constexpr long double gx[4] = {-0.861136311594052575224L, -0.339981043584856264803L,
                                          0.339981043584856264803L, 0.861136311594052575224L};
    static constexpr long double gw[4] = {0.347854845137453857374L, 0.652145154862546142627L,
                                          0.652145154862546142627L, 0.347854845137453857374L};
    const double tau = knots.back();
    const double ts = (1.0 - tail) * tau;
    long double acc = 0.0L;
    if (cum) cum->assign(1, 0.0L);
    // Adaptive 4-point Gauss-Legendre of g on [a, b]: a step can end just short of a
    // near-hit, where the integrand has a square-root branch point.
    auto adapt = [&](auto&& g, long double a, long double b) {
        auto gl = [&](long double lo, long double hi) {
            long double m = 0.5L * (lo + hi), r = 0.5L * (hi - lo), v = 0.0L;
            for (int j = 0; j < 4; ++j) v += r * gw[j] * g(m + r * gx[j]);
            return v;
        };
        auto rec = [&](auto&& self, long double lo, long double hi, long double whole, int depth) -> long double {
            long double m = 0.5L * (lo + hi);
            long double l = gl(lo, m), h = gl(m, hi);
            if (depth >= 24 || std::abs(l + h - whole) <= 1e-13L * std::abs(whole) + 1e-17L) return l + h;
            return self(self, lo, m, l, depth + 1) + self(self, m, hi, h, depth + 1);
        };
        return rec(rec, a, b, gl(a, b), 0);
    };
    auto in_t = [&](std::size_t i, double a, double b) {
        if (!gauss) {
            double h = (b - a) / sub;
            for (int j = 0; j < sub; ++j) {
                double lo = j == 0 ? a : a + j * h, hi = j + 1 == sub ? b : a + (j + 1) * h;
                acc += 0.5L * (hi - lo) * (static_cast<long double>(f(lo, tau - lo, i)) + f(hi, tau - hi, i));
            }
            return;
        }
        acc += adapt([&](long double t) { return static_cast<long double>(f(static_cast<double>(t), static_cast<double>(tau - t), i)); }, a, b);
    };
    auto in_u = [&](std::size_t i, double a, double b) {
        double ua = std::sqrt(std::max(tau - a, 0.0)), ub = std::sqrt(std::max(tau - b, 0.0));
        auto g = [&](long double u) {
            return 2.0L * u * f(static_cast<double>(tau - u * u), static_cast<double>(u * u), i);
        };
        if (gauss) {
            acc += adapt(g, ub, ua);
            return;
        }
        int k = (b >= tau ? 16 : 4) * sub;
        double h = (ua - ub) / k;
        for (int j = 0; j < k; ++j) acc += h * g(ub + (j + 0.5) * h);
    };
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        double a = knots[i], b = knots[i + 1];
        if (b > a) {
            if (b <= ts) {
                in_t(i, a, b);
            } else if (a >= ts) {
                in_u(i, a, b);
            } else {
                in_t(i, a, ts);
                in_u(i, ts, b);
            }
        }
        if (cum) cum->push_back(acc);
    }
    return acc;
}

// Position on piece i at time t = tau - rem; on the last piece of a welded trajectory,
// c +- 2 sqrt(tau_tr - t), with rem carrying tau - t without cancellation.
inline double position(const BoundaryTrajectory& tr, std::size_t i, double t, double tau, double rem)
{
    if (tr.welded() && i + 2 == tr.samples.size()) {
        double c = tr.drive[i];
        double u = tr.samples[i].second - c;
        return c + (u < 0 ? -2.0 : 2.0) * std::sqrt(std::max(tr.tau - tau + rem, 0.0));
    }
    return tr.at_piece(i, t);
}

inline std::vector<double> knot_times(const BoundaryTrajectory& tr)
{
    std::vector<double> k;
    k.reserve(tr.samples.size());
    for (auto& s : tr.samples) k.push_back(s.first);
    return k;
}

inline void require_welded_together(const PairTrajectory& p, double T)
{
    if (!p.x.welded() || !p.y.welded()) throw InputError("pair is not welded by the horizon");
    if (std::abs(p.x.tau - p.y.tau) > 1e-9 * std::max(1.0, T))
        throw InputError("pair does not weld together (different welding times)");
}

} // namespace detail

// max over sample times of |I(t) - sqrt(I(0)^2 - 4 int_0^t ds / (alpha (1 - alpha)))|.
inline double interval_width_residual(const Driver& d, double x0, double y0, StepPolicy policy = {})
{
    Discretization D(d, policy);
    PairTrajectory p = pair_trajectory(D, x0, y0);
    detail::require_welded_together(p, d.horizon());
    const auto& s = p.x.tau <= p.y.tau ? p.x : p.y;
    std::vector<double> knots = detail::knot_times(s);
    knots.back() = p.tau;
    // 1 / (alpha (1 - alpha)) = I^2 / ((xi - x)(y - xi)), xi the step value.
    auto f = [&](double t, double rem, std::size_t i) {
        double c = s.drive[i];
        double xt = detail::position(p.x, i, t, p.tau, rem), yt = detail::position(p.y, i, t, p.tau, rem);
        double I = yt - xt;
        return I * I / ((c - xt) * (yt - c));
    };
    std::vector<long double> F;
    detail::singular_quadrature(knots, f, &F, true);
    const long double I0 = y0 - x0;
    double worst = 0.0;
    for (std::size_t k = 0; k < knots.size(); ++k) {
        double I = k + 1 < knots.size() ? p.y.samples[k].second - p.x.samples[k].second
                                        : detail::position(p.y, k - 1, p.tau, p.tau, 0.0) - detail::position(p.x, k - 1, p.tau, p.tau, 0.0);
        long double r = I0 * I0 - 4.0L * F[k];
        double formula = static_cast<double>(std::sqrt(std::max(r, 0.0L)));
        worst = std::max(worst, std::abs(I - formula));
    }
    return worst;
}

struct MaxTimeVerdict {
    double x0, y0;
    double tau;
    double bound; // (y0 - x0)^2 / 16
    bool ok;
};

// tau <= (y0 - x0)^2 / 16 for each welded pair; pairs that do not weld are skipped.
inline std::vector<MaxTimeVerdict> max_time_check(const Driver& d, const std::vector<std::pair<double, double>>& pairs,
                                                  StepPolicy policy = {}, double slack = 1e-9)
{
    Discretization D(d, policy);
    std::vector<MaxTimeVerdict> out;
    for (auto [x0, y0] : pairs) {
        double tx = D.hitting_time(x0), ty = D.hitting_time(y0);
        if (beyond_horizon(tx) || beyond_horizon(ty)) continue;
        double tau = std::max(tx, ty);
        double bound = (y0 - x0) * (y0 - x0) / 16.0;
        out.push_back({x0, y0, tau, bound, tau <= bound + slack});
    }
    return out;
}

struct FasterTimesBound {
    double f1, f2, f;
};

// Bound on the welding time of the symmetric pair (-y0, y0) when |xi(tau)| = delta.
inline FasterTimesBound faster_times_bound(double y0, double delta)
{
    if (!(y0 > 0.0)) throw InputError("faster_times_bound: y0 must be positive");
    if (!(delta >= 0.0)) throw InputError("faster_times_bound: delta must be non-negative");
    double x0 = -y0;
    double base = (y0 - x0) * (y0 - x0) / 16.0;
    double eps0 = delta * delta * (y0 + delta) * (y0 + delta) / (32.0 * y0 * y0);
    double a0 = 0.5 + delta / (4.0 * y0);
    FasterTimesBound b;
    b.f1 = base - eps0;
    b.f2 = base - (1.0 / (4.0 * a0 * (1.0 - a0)) - 1.0) * eps0;
    b.f = std::min(b.f1, b.f2);
    return b;
}

struct FasterTimesSample {
    std::uint64_t seed;
    double delta; // |xi(tau)|
    double tau;
    double bound;
    bool ok;
};

// Driver welding (-y0, y0): a random piecewise-linear prefix, then a hold at the midpoint
// of the images of the pair, which welds them together.
inline Driver faster_times_driver(std::uint64_t seed, double y0 = 1.0, StepPolicy policy = {})
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int attempt = 0; attempt < 16; ++attempt) {
        double t1 = 0.02 + 0.1 * u(rng);
        double amp = 0.4 * y0 * u(rng);
        std::size_t m = 2 + static_cast<std::size_t>(rng() % 6);
        Driver pre = make_random_piecewise_linear(rng(), m, t1, amp);
        Discretization D(pre, policy);
        auto ex = D.evolve(-y0), ey = D.evolve(y0);
        if (ex.welded() || ey.welded()) continue;
        double xe = ex.samples.back().second, ye = ey.samples.back().second;
        double mid = 0.5 * (xe + ye), g = 0.5 * (ye - xe);
        std::vector<Segment> segs = pre.segments();
        segs.push_back(Segment{1e-9, Linear{pre.final_value(), mid}});
        segs.push_back(Segment{g * g / 4.0 * (1.0 + 1e-6), Constant{mid}});
        return Driver(std::move(segs), Orientation::Upward);
    }
    throw NumericalDiagnostic("faster_times_driver: every prefix welds the pair");
}

inline std::vector<FasterTimesSample> faster_times_sweep(std::size_t count, std::uint64_t seed, double y0 = 1.0,
                                                         StepPolicy policy = {}, double slack = 1e-6)
{
    std::vector<FasterTimesSample> out;
    for (std::size_t k = 0; k < count; ++k) {
        std::uint64_t s = seed + k;
        Driver d = faster_times_driver(s, y0, policy);
        Discretization D(d, policy);
        double tx = D.hitting_time(-y0), ty = D.hitting_time(y0);
        if (beyond_horizon(tx) || beyond_horizon(ty))
            throw NumericalDiagnostic("faster_times_sweep: constructed driver does not weld the pair");
        double tau = std::max(tx, ty);
        double delta = std::abs(d(tau));
        double f = faster_times_bound(y0, delta).f;
        out.push_back({s, delta, tau, f, tau <= f + slack});
    }
    return out;
}

// |tau - (x0^2 - x(tau)^2) / 4 + int_0^tau xi / (x - xi) dt|.
inline double appendix_identity_1(const Driver& d, double x0, StepPolicy policy = {}, int samples_per_step = 1)
{
    if (samples_per_step < 1) throw InputError("appendix_identity_1: samples_per_step must be positive");
    Discretization D(d, policy);
    BoundaryTrajectory tr = D.evolve(x0);
    if (!tr.welded()) throw InputError("appendix_identity_1: point is not welded by the horizon");
    std::vector<double> knots = detail::knot_times(tr);
    auto f = [&](double t, double rem, std::size_t i) {
        double c = tr.drive[i];
        return c / (detail::position(tr, i, t, tr.tau, rem) - c);
    };
    long double I = detail::singular_quadrature(knots, f, nullptr, false, samples_per_step);
    long double xt = tr.samples.back().second;
    long double rhs = 0.25L * (static_cast<long double>(x0) * x0 - xt * xt) - I;
    return static_cast<double>(std::abs(tr.tau - rhs));
}

// |phi(x0)^2 - x0^2 - 4 int_0^tau xi (y - x) / ((xi - x)(y - xi)) dt|, phi from the welding.
inline double appendix_identity_2(const Driver& d, double x0, StepPolicy policy = {}, int samples_per_step = 1)
{
    if (samples_per_step < 1) throw InputError("appendix_identity_2: samples_per_step must be positive");
    Discretization D(d, policy);
    if (!(x0 < d.initial_value())) throw InputError("appendix_identity_2: need x0 < xi(0)");
    double y0 = weld_partner(D, x0);
    if (std::isinf(y0)) throw InputError("appendix_identity_2: point is not welded by the horizon");
    PairTrajectory p = pair_trajectory(D, x0, y0);
    detail::require_welded_together(p, d.horizon());
    const auto& s = p.x.tau <= p.y.tau ? p.x : p.y;
    std::vector<double> knots = detail::knot_times(s);
    knots.back() = p.tau;
    auto f = [&](double t, double rem, std::size_t i) {
        double c = s.drive[i];
        double xt = detail::position(p.x, i, t, p.tau, rem), yt = detail::position(p.y, i, t, p.tau, rem);
        return c * (yt - xt) / ((c - xt) * (yt - c));
    };
    long double I = detail::singular_quadrature(knots, f, nullptr, false, samples_per_step);
    long double lhs = static_cast<long double>(y0) * y0 - static_cast<long double>(x0) * x0;
    return static_cast<double>(std::abs(lhs - 4.0L * I));
}

} // namespace loewner
