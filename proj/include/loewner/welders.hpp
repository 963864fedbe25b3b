#pragma once

#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "loewner/hitting.hpp"

namespace loewner {

namespace detail {

// Builds a driver segment by segment while flowing a set of boundary points with exactly
// the arithmetic of Discretization, so that the built driver reproduces the recorded
// hitting times under the same step policy.
class Builder {
public:
    Builder(double start, StepPolicy p, std::vector<double> pts, bool record = true)
        : v_(start), p_(p), x_(std::move(pts)), tau_(x_.size(), kInf), record_(record)
    {
        if (p_.near_hit_refinement != 0) throw InputError("welders require near_hit_refinement = 0");
    }

    double time() const { return t_; }
    double value() const { return v_; }
    double point(std::size_t i) const { return x_[i]; }
    double tau(std::size_t i) const { return tau_[i]; }
    bool alive(std::size_t i) const { return std::isinf(tau_[i]); }

    Builder probe(std::vector<std::size_t> idx) const
    {
        Builder b(v_, p_, {}, false);
        for (std::size_t i : idx) {
            b.x_.push_back(x_[i]);
            b.tau_.push_back(tau_[i]);
        }
        b.t_ = t_;
        return b;
    }

    void linear(double to, double L)
    {
        close_sampled();
        const double V = (to - v_) / L;
        for_each_linear_step(L, v_, to, p_.base_step, [&](double, double dt, double c, double) { step(c, dt, V); });
        if (record_) segs_.push_back(Segment{L, to == v_ ? Shape{Constant{v_}} : Shape{Linear{v_, to}}});
        v_ = to;
    }

    void hold(double L) { linear(v_, L); }

    // One knot of a sampled run: linear to `to` over h, taken as a single step when h <= base_step.
    void knot(double to, double h)
    {
        if (!open_) {
            run_ = Sampled{{0.0}, {v_}};
            open_ = true;
        }
        run_.t.push_back(run_.t.back() + h);
        run_.v.push_back(to);
        double dt = run_.t.back() - run_.t[run_.t.size() - 2];
        const double V = (to - v_) / dt;
        for_each_linear_step(dt, v_, to, p_.base_step, [&](double, double d, double c, double) { step(c, d, V); });
        v_ = to;
    }

    // Linear move over L rendered as m equal knots.
    void ramp(double to, double L, std::size_t m)
    {
        double from = v_;
        for (std::size_t k = 1; k <= m; ++k)
            knot(k == m ? to : from + (to - from) * (static_cast<double>(k) / static_cast<double>(m)), L / static_cast<double>(m));
    }

    Driver finish(Orientation o = Orientation::Upward)
    {
        close_sampled();
        return Driver(std::move(segs_), o);
    }

private:
    void close_sampled()
    {
        if (!open_) return;
        open_ = false;
        if (record_) segs_.push_back(Segment{run_.t.back(), std::move(run_)});
        run_ = {};
    }

    void step(double c, double dt, double V)
    {
        for (std::size_t i = 0; i < x_.size(); ++i) {
            if (!std::isinf(tau_[i])) continue;
            double u = x_[i] - c;
            double u2 = u * u;
            if (u == 0.0 || u2 <= 4.0 * dt) {
                tau_[i] = t_ + hit_sub_time(x_[i], c, c - 0.5 * V * dt);
                x_[i] = c;
                continue;
            }
            x_[i] = c + (u < 0 ? -1.0 : 1.0) * std::sqrt(u2 - 4.0 * dt);
        }
        t_ += dt;
    }

    double v_;
    double t_ = 0.0;
    StepPolicy p_;
    std::vector<double> x_, tau_;
    bool record_;
    std::vector<Segment> segs_;
    Sampled run_;
    bool open_ = false;
};

// Knot count for a move of size dist over time L such that each step moves the driver by at
// most half the radius 2 sqrt(dt) inside which a boundary point is welded. A driver that
// jumps over a boundary point in one step would otherwise carry it to the other side.
inline std::size_t ramp_knots(double dist, double L, double base_step)
{
    double m = std::max(std::ceil(dist * dist / L), std::ceil(L / base_step - 1e-9));
    return m < 1.0 ? 1 : static_cast<std::size_t>(m);
}

inline double advance(double w, double c, double dt)
{
    double u = w - c;
    double u2 = u * u;
    if (u2 <= 4.0 * dt) return c;
    return c + (u < 0 ? -1.0 : 1.0) * std::sqrt(u2 - 4.0 * dt);
}

// Capture gadget for the pair (ix, iy): a linear move of duration eps to within eps of the
// right image, feedback tracking that keeps that gap at eps while the driver runs back to
// the midpoint of the two images, then a hold until both are welded. Returns the weld time.
inline double capture(Builder& B, std::size_t ix, std::size_t iy, double eps)
{
    auto fail = [](const char* what) {
        throw ScheduleInfeasible(std::string("capture gadget: ") + what);
    };
    if (!B.alive(ix) || !B.alive(iy)) fail("pair already welded");

    // Move so that the right image ends at distance eps.
    {
        double lo = B.value(), hi = B.point(iy);
        const std::size_t m = ramp_knots(hi - lo, eps, 1e-5);
        auto gap_after = [&](double v1) {
            Builder q = B.probe({iy});
            q.ramp(v1, eps, m);
            if (!q.alive(0)) return -1.0;
            return q.point(0) - v1;
        };
        if (gap_after(lo) < eps) fail("right image already within eps of the driver");
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
            double mid = 0.5 * (lo + hi);
            (gap_after(mid) >= eps ? lo : hi) = mid;
        }
        B.ramp(lo, eps, m);
    }

    // The gap dynamics at fixed slope are unstable, so each knot is solved for the gap.
    const double h = eps * eps / 8.0;
    const std::size_t cap = 100000000;
    for (std::size_t k = 0;; ++k) {
        if (k > cap) fail("tracking did not reach the midpoint");
        if (!B.alive(ix) || !B.alive(iy)) fail("pair welded during tracking");
        double a = B.value(), x = B.point(ix), y = B.point(iy);
        double b = y - 2.0 * h / (y - a) - eps;
        for (int it = 0; it < 3; ++it) b = advance(y, a + (b - a) * 0.5, h) - eps;
        auto excess = [&](double bb) {
            double c = a + (bb - a) * 0.5;
            return bb - 0.5 * (advance(x, c, h) + advance(y, c, h));
        };
        if (excess(b) > 0.0) {
            B.knot(b, h);
            continue;
        }
        double lo = b, hi = a;
        if (excess(hi) <= 0.0) fail("midpoint passed before tracking");
        for (int it = 0; it < 200 && hi - lo > 1e-16 * (1.0 + std::abs(hi)); ++it) {
            double mid = 0.5 * (lo + hi);
            (excess(mid) > 0.0 ? hi : lo) = mid;
        }
        B.knot(hi, h);
        break;
    }
    double g = std::max(B.point(iy) - B.value(), B.value() - B.point(ix));
    B.hold(g * g / 4.0 * (1.0 + 1e-12));
    if (B.alive(ix) || B.alive(iy)) fail("hold did not weld the pair");
    return std::max(B.tau(ix), B.tau(iy));
}

} // namespace detail

// Welds (-k/n, k/n) for k = 1..n in order, one capture gadget per pair. eps is halved until
// the whole schedule fits in 2/n^2.
inline Driver make_counterexample_welder(int n, double epsilon = 0.0, StepPolicy policy = {}, int max_refinements = 8)
{
    if (n < 2) throw InputError("make_counterexample_welder: n must be at least 2");
    double nn = static_cast<double>(n);
    double eps = epsilon > 0.0 ? epsilon : 1.0 / (nn * nn * nn);
    const double budget = 2.0 / (nn * nn);
    for (int round = 0; round <= max_refinements; ++round, eps *= 0.5) {
        std::vector<double> pts;
        for (int k = 1; k <= n; ++k) {
            pts.push_back(-k / nn);
            pts.push_back(k / nn);
        }
        detail::Builder B(0.0, policy, pts);
        try {
            for (int k = 0; k < n; ++k) detail::capture(B, 2 * k, 2 * k + 1, eps);
        } catch (const ScheduleInfeasible&) {
            continue;
        }
        if (B.time() <= budget) return B.finish();
    }
    std::ostringstream os;
    os << "make_counterexample_welder: schedule does not fit in 2/n^2 for n = " << n;
    throw ScheduleInfeasible(os.str());
}

// Welds tau_-^{-1}(jT/n) to tau_+^{-1}(jT/n) at exactly jT/n: per block a move of duration
// eps to the midpoint of the images, a hold, and a capture gadget timed to finish at jT/n.
inline Driver make_oscillating_welder(const HittingProfile& target, int n, double epsilon, StepPolicy policy = {})
{
    const double T = target.horizon;
    if (n < 1) throw InputError("make_oscillating_welder: n must be positive");
    if (!(epsilon > 0.0 && epsilon < T / (4.0 * n)))
        throw InputError("make_oscillating_welder: epsilon must lie in (0, T/(4n))");
    std::vector<double> pts;
    for (int j = 1; j <= n; ++j) {
        double t = T * j / n;
        pts.push_back(j == n ? target.origin - target.a : inverse_hitting(target, t, Side::Left));
        pts.push_back(j == n ? target.origin + target.b : inverse_hitting(target, t, Side::Right));
    }
    detail::Builder B(target.origin, policy, pts);
    for (int j = 0; j < n; ++j) {
        const std::size_t ix = 2 * j, iy = 2 * j + 1;
        const double t_end = j + 1 == n ? T : T * (j + 1) / n;
        if (!B.alive(ix) || !B.alive(iy)) throw ScheduleInfeasible("make_oscillating_welder: pair welded early");

        double lo = B.point(ix), hi = B.point(iy);
        const std::size_t knots = detail::ramp_knots(std::max(std::abs(hi - B.value()), std::abs(lo - B.value())), epsilon, 1e-5);
        auto off_mid = [&](double m) {
            detail::Builder q = B.probe({ix, iy});
            q.ramp(m, epsilon, knots);
            return m - 0.5 * (q.point(0) + q.point(1));
        };
        for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(hi)); ++it) {
            double mid = 0.5 * (lo + hi);
            (off_mid(mid) > 0.0 ? hi : lo) = mid;
        }
        B.ramp(0.5 * (lo + hi), epsilon, knots);

        const double now = B.time();
        // Holding alone welds the pair at now + g^2/4.
        double g = std::max(B.point(iy) - B.value(), B.value() - B.point(ix));
        double t_hold = now + g * g / 4.0;
        // Pairs come from the profile with tolerance about 1e-9 in x, hence the window.
        const double tol = 1e-8 * std::max(1.0, T);
        if (t_hold <= t_end + tol) {
            if (t_hold < t_end - tol) throw ScheduleInfeasible("make_oscillating_welder: hold welds the pair early");
            B.hold(std::max(t_end - now, t_hold - now) * (1.0 + 1e-12));
            continue;
        }
        auto weld_at = [&](double s) {
            detail::Builder q = B.probe({ix, iy});
            if (s > now) q.hold(s - now);
            if (!q.alive(0) || !q.alive(1)) return -kInf;
            try {
                return detail::capture(q, 0, 1, epsilon);
            } catch (const ScheduleInfeasible&) {
                return kInf; // images already too close for a gadget: too late
            }
        };
        double w0 = weld_at(now);
        if (!(w0 <= t_end)) {
            std::ostringstream os;
            os << "make_oscillating_welder: block " << j + 1 << " cannot weld by " << t_end << " at eps " << epsilon;
            throw ScheduleInfeasible(os.str());
        }
        // The last pair is aimed just inside the horizon so that it counts as welded.
        const double target = j + 1 == n ? t_end - 1e-10 * T : t_end;
        double s_lo = now, s_hi = t_end;
        for (int it = 0; it < 200 && s_hi - s_lo > 1e-15 * T; ++it) {
            double mid = 0.5 * (s_lo + s_hi);
            double w = weld_at(mid);
            if (w == -kInf) throw ScheduleInfeasible("make_oscillating_welder: hold welds the pair early");
            (w <= target ? s_lo : s_hi) = mid;
        }
        if (s_lo > now) B.hold(s_lo - now);
        double welded = detail::capture(B, ix, iy, epsilon);
        if (std::abs(welded - target) > 1e-9 * std::max(1.0, T))
            throw ScheduleInfeasible("make_oscillating_welder: could not time the capture to the block end");
        if (t_end - B.time() > 1e-14 * T) B.hold(t_end - B.time());
    }
    return B.finish();
}

// Upward driver of a straight line leaving the real axis at angle alpha*pi for capacity
// time line_time, continued by straight growth at its far end for hold_time.
inline Driver make_angled_line_source(double alpha = 1.0 / 3.0, double line_time = 2.0, double hold_time = 1.0)
{
    if (!(line_time > 0.0 && hold_time > 0.0)) throw InputError("make_angled_line_source: durations must be positive");
    double C = sqrt_slit_coefficient(alpha);
    Driver down({Segment{line_time, SqrtCap{0.0, C, false}}, Segment{hold_time, Constant{C * std::sqrt(line_time)}}},
                Orientation::Downward);
    return reverse(down);
}

} // namespace loewner
