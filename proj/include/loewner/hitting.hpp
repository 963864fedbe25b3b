#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <utility>
#include <vector>

#include "loewner/flow.hpp"

namespace loewner {

enum class Side { Left, Right };

inline int sign_of(Side s) { return s == Side::Left ? -1 : 1; }

inline bool beyond_horizon(double tau) { return std::isinf(tau); }

inline double hitting_time(const Driver& d, double x0, StepPolicy policy = {})
{
    if (d.orientation() != Orientation::Upward) throw InputError("hitting_time: driver must be upward");
    if (x0 == d.initial_value()) return 0.0;
    return Discretization(d, policy).hitting_time(x0);
}

namespace detail {

inline std::vector<double> union_breaks(const Driver& a, const Driver& b)
{
    std::vector<double> v = a.breakpoints();
    auto w = b.breakpoints();
    v.insert(v.end(), w.begin(), w.end());
    std::sort(v.begin(), v.end());
    return v;
}

// Point on the given side whose hitting time is t: the discrete backward flow gives the
// guess, which is then bracketed and bisected on the predicate tau(x) <= t. Returns the
// inner end of the final bracket, so tau(result) <= t always holds.
inline double invert(const Discretization& D, double t, int side, double tol, double reach)
{
    const double o = D.driver().initial_value();
    const double s = side < 0 ? -1.0 : 1.0;
    auto pred = [&](double x) { return x == o || (x - o) * s < 0.0 || D.hitting_time(x, t) <= t; };
    double g = D.backward(t, side);
    if ((g - o) * s <= 0.0) g = o + s * tol;
    double tg = D.hitting_time(g, t);
    if (std::abs(tg - t) <= 1e-13 * std::max(1.0, t)) return g;

    double inner, outer;
    double eta = std::max(tol, 1e-12 * (1.0 + std::abs(g)));
    if (tg <= t) {
        inner = g;
        outer = g + s * eta;
        while (pred(outer)) {
            inner = outer;
            eta *= 4.0;
            outer = g + s * eta;
            if (std::abs(outer - o) > reach) {
                outer = o + s * reach;
                if (pred(outer)) return outer;
                break;
            }
        }
    } else {
        outer = g;
        inner = g - s * eta;
        while (!pred(inner)) {
            outer = inner;
            eta *= 4.0;
            inner = g - s * eta;
            if ((inner - o) * s <= 0.0) {
                inner = o;
                break;
            }
        }
    }
    while (std::abs(outer - inner) > tol) {
        double mid = 0.5 * (inner + outer);
        if (mid == inner || mid == outer) break;
        (pred(mid) ? inner : outer) = mid;
    }
    return inner;
}

inline double reach_of(const Driver& d)
{
    return 2.0 * std::sqrt(d.horizon()) + 2.0 * d.sup_norm() + 1.0;
}

} // namespace detail

struct HittingProfile {
    std::shared_ptr<const Driver> source; // owned copy; disc refers to it
    std::shared_ptr<const Discretization> disc;
    double origin = 0.0; // xi(0)
    double horizon = 0.0;
    // (x, tau) ordered outward from the origin; left has x <= origin, right has x >= origin.
    std::vector<std::pair<double, double>> left, right;
    // Endpoints sit at origin - a and origin + b. A false flag means the bisection bracket
    // was exhausted and the value is only a lower bound.
    double a = 0.0, b = 0.0;
    bool a_resolved = true, b_resolved = true;
    double max_inversion = 0.0; // largest raw adjacent inversion before re-sorting
    int refinements = 0;

    const Driver& driver() const { return *source; }
};

inline std::vector<double> branch_grid(double extent, std::size_t n)
{
    // Geometric near the origin, where tau is quadratic, then uniform out to the endpoint.
    std::vector<double> g;
    std::size_t ng = n / 4;
    double split = 0.05 * extent;
    if (ng > 0) {
        double lo = 1e-4 * extent;
        for (std::size_t k = 0; k < ng; ++k)
            g.push_back(lo * std::pow(split / lo, static_cast<double>(k) / static_cast<double>(ng)));
    } else {
        split = 0.0;
    }
    std::size_t nu = n - ng;
    for (std::size_t k = 1; k <= nu; ++k)
        g.push_back(split + (extent - split) * static_cast<double>(k) / static_cast<double>(nu));
    return g;
}

inline HittingProfile hitting_profile(const Driver& d, std::size_t n, StepPolicy policy = {})
{
    if (n < 2) throw InputError("hitting_profile: need at least 2 points per branch");
    if (d.orientation() != Orientation::Upward) throw InputError("hitting_profile: driver must be upward");
    const double reach = detail::reach_of(d);
    HittingProfile p;
    p.source = std::make_shared<const Driver>(d);
    p.origin = d.initial_value();
    p.horizon = d.horizon();
    const double T = p.horizon;

    for (int round = 0; round < 2; ++round) {
        auto D = std::make_shared<const Discretization>(*p.source, policy);
        p.disc = D;
        p.refinements = round;
        auto endpoint = [&](int s, bool& resolved) {
            double far = p.origin + s * reach;
            resolved = !(D->hitting_time(far, T) <= T);
            if (!resolved) return reach;
            double guess = D->backward(T, s);
            double tol = 1e-9 * (1.0 + std::abs(guess));
            return std::abs(detail::invert(*D, T, s, tol, reach) - p.origin);
        };
        p.a = endpoint(-1, p.a_resolved);
        p.b = endpoint(+1, p.b_resolved);

        double worst = 0.0;
        auto fill = [&](std::vector<std::pair<double, double>>& br, double extent, int s) {
            br.clear();
            br.emplace_back(p.origin, 0.0);
            for (double r : branch_grid(extent, n)) {
                double x = p.origin + s * r;
                br.emplace_back(x, D->hitting_time(x, T));
            }
            for (std::size_t k = 1; k < br.size(); ++k)
                worst = std::max(worst, br[k - 1].second - br[k].second);
        };
        fill(p.left, p.a, -1);
        fill(p.right, p.b, +1);
        p.max_inversion = worst;
        if (worst <= 1e-8) break;
        if (round == 1) {
            std::ostringstream os;
            os << "hitting profile not monotone: inversion " << worst << " after refinement to base step "
               << policy.base_step;
            throw MonotonicityViolation(os.str());
        }
        policy.base_step *= 0.5;
    }
    for (auto* br : {&p.left, &p.right})
        for (std::size_t k = 1; k < br->size(); ++k)
            (*br)[k].second = std::max((*br)[k].second, (*br)[k - 1].second);
    return p;
}

inline double inverse_hitting(const HittingProfile& p, double t, Side side)
{
    if (!(t > 0.0 && t <= p.horizon)) throw InputError("inverse_hitting: t must lie in (0, T]");
    double reach = detail::reach_of(p.driver());
    return detail::invert(*p.disc, t, sign_of(side), 1e-9, reach);
}

struct SandwichRow {
    double y;
    double tau_inner; // tau(y -+ delta; d1), the point nearer the driver
    double tau_mid;   // tau(y; d2)
    double tau_outer; // tau(y +- delta; d1)
    double violation; // 0 when both inequalities hold
};

struct SandwichReport {
    double delta = 0.0;
    std::vector<SandwichRow> rows;
    double max_violation = 0.0;
    std::size_t violations = 0;
};

inline double excess(double lo, double hi)
{
    if (std::isinf(lo) && std::isinf(hi)) return 0.0;
    return std::max(lo - hi, 0.0);
}

// tau(y - delta; d1) <= tau(y; d2) <= tau(y + delta; d1) on the right, mirrored on the left,
// with delta the sup distance. Points within delta of d1(0) are skipped.
inline SandwichReport sandwich_check(const Driver& d1, const Driver& d2, const std::vector<double>& grid,
                                     StepPolicy policy = {}, double slack = 1e-7)
{
    auto br = detail::union_breaks(d1, d2);
    Discretization D1(d1, policy, br), D2(d2, policy, br);
    SandwichReport rep;
    rep.delta = sup_distance(d1, d2);
    const double o = d1.initial_value();
    for (double y : grid) {
        if (std::abs(y - o) <= rep.delta) continue;
        double s = y > o ? 1.0 : -1.0;
        SandwichRow r{y, D1.hitting_time(y - s * rep.delta), D2.hitting_time(y), D1.hitting_time(y + s * rep.delta), 0.0};
        r.violation = std::max(excess(r.tau_inner, r.tau_mid), excess(r.tau_mid, r.tau_outer));
        if (r.violation > slack) ++rep.violations;
        rep.max_violation = std::max(rep.max_violation, r.violation);
        rep.rows.push_back(r);
    }
    return rep;
}

// max over t_grid and both branches of |tau^-1(t; d1) - tau^-1(t; d2)|.
inline double lipschitz_check(const Driver& d1, const Driver& d2, const std::vector<double>& t_grid,
                              StepPolicy policy = {})
{
    if (d1.orientation() != Orientation::Upward || d2.orientation() != Orientation::Upward)
        throw InputError("lipschitz_check: drivers must be upward");
    if (std::abs(d1.horizon() - d2.horizon()) > 1e-12 * std::max(1.0, d1.horizon()))
        throw InputError("lipschitz_check: drivers need a common horizon");
    auto br = detail::union_breaks(d1, d2);
    Discretization D1(d1, policy, br), D2(d2, policy, br);
    double reach = std::max(detail::reach_of(d1), detail::reach_of(d2));
    double gap = 0.0;
    for (double t : t_grid) {
        if (!(t > 0.0 && t <= d1.horizon())) continue;
        for (int s : {-1, 1}) {
            double x1 = detail::invert(D1, t, s, 1e-9, reach);
            double x2 = detail::invert(D2, t, s, 1e-9, reach);
            gap = std::max(gap, std::abs(x1 - x2));
        }
    }
    return gap;
}

} // namespace loewner
