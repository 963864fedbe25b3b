#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "loewner/driver.hpp"

namespace loewner {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct StepPolicy {
    double base_step = 1e-4;
    int near_hit_refinement = 0;
    double oracle_step = 1e-5;

    void validate() const
    {
        if (!(base_step > 0.0)) throw InputError("base_step must be positive");
        if (near_hit_refinement < 0) throw InputError("near_hit_refinement must be non-negative");
        if (!(oracle_step > 0.0)) throw InputError("oracle_step must be positive");
    }
};

enum class Status { AliveAtHorizon, Welded };

struct BoundaryTrajectory {
    double x0 = 0.0;
    // (t, x(t)). The driver is constant, equal to drive[i], on (samples[i].t, samples[i+1].t).
    std::vector<std::pair<double, double>> samples;
    std::vector<double> drive;
    Status status = Status::AliveAtHorizon;
    double tau = kInf;
    double x_end = 0.0; // position where the evolution stopped, recorded or not

    bool welded() const { return status == Status::Welded; }

    // Position at time t computed from the start of piece i (driver drive[i]).
    double at_piece(std::size_t i, double t) const
    {
        double c = drive[i];
        double u = samples[i].second - c;
        double r = u * u - 4.0 * (t - samples[i].first);
        return c + (u < 0 ? -1.0 : 1.0) * std::sqrt(std::max(r, 0.0));
    }

    // Exact position at time t under the recorded piecewise-constant driver.
    double at(double t) const
    {
        if (t <= samples.front().first) return samples.front().second;
        std::size_t lo = 0, hi = samples.size() - 1;
        if (t >= samples[hi].first) return samples[hi].second;
        while (hi - lo > 1) {
            std::size_t mid = (lo + hi) / 2;
            (samples[mid].first <= t ? lo : hi) = mid;
        }
        double c = drive[lo];
        double u = samples[lo].second - c;
        double r = u * u - 4.0 * (t - samples[lo].first);
        return c + (u < 0 ? -1.0 : 1.0) * std::sqrt(std::max(r, 0.0));
    }
};

struct StepResult {
    bool hit;
    double value;    // new position when not hit
    double sub_time; // time into the step at which the hit happens
};

// One step of length dt with the driver frozen at c: c + sign(w-c) sqrt((w-c)^2 - 4dt).
inline StepResult step_constant(double w, double c, double dt)
{
    if (!(dt > 0.0)) throw InputError("step_constant: dt must be positive");
    double u = w - c;
    if (u == 0.0) throw InputError("step_constant: point already on the driver");
    double u2 = u * u;
    if (u2 <= 4.0 * dt) return {true, c, u2 / 4.0};
    return {false, c + (u < 0 ? -1.0 : 1.0) * std::sqrt(u2 - 4.0 * dt), 0.0};
}

// Same map on the closed upper half-plane. Real points inside the slit land on it (the +i0 side).
inline std::complex<double> step_constant(std::complex<double> w, double c, double dt)
{
    std::complex<double> u = w - c;
    if (u == 0.0) return {c, 2.0 * std::sqrt(dt)};
    std::complex<double> r = u * std::sqrt(1.0 - 4.0 * dt / (u * u));
    if (r.imag() < 0.0) r = -r;
    return c + r;
}

// Time into a step of length dt, driver frozen at c, at which a point w is welded, given
// that the hit happens in this step. A point lying between the step's starting driver value
// va and c has already been swept over by the driver and is welded at the start of the step;
// otherwise u^2 / 4. This keeps hitting times monotone when the driver crosses points.
inline double hit_sub_time(double w, double c, double va)
{
    if ((w - va) * (w - c) <= 0.0) return 0.0;
    double u = w - c;
    return u * u / 4.0;
}

// Steps of a linear piece of length L from a to b: ceil(L / base_step) equal steps, each
// given as f(offset, dt, midpoint value, oscillation).
template <class F>
inline void for_each_linear_step(double L, double a, double b, double base_step, F&& f)
{
    double q = std::ceil(L / base_step - 1e-9);
    std::size_t k = q < 1.0 ? 1 : static_cast<std::size_t>(q);
    double h = L / static_cast<double>(k);
    for (std::size_t j = 0; j < k; ++j) {
        double fa = static_cast<double>(j) / static_cast<double>(k);
        double fb = static_cast<double>(j + 1) / static_cast<double>(k);
        double c = k == 1 ? a + (b - a) * 0.5 : a + (b - a) * ((static_cast<double>(j) + 0.5) / static_cast<double>(k));
        double va = a + (b - a) * fa, vb = a + (b - a) * fb;
        f(static_cast<double>(j) * h, h, c, std::max(std::abs(va - c), std::abs(vb - c)));
    }
}

// Piecewise-constant rendering of a driver: steps never straddle a segment or sampled knot,
// each piece is split into equal steps no longer than base_step, and each step carries the
// driver value at its midpoint plus the largest deviation from it over the step.
class Discretization {
public:
    // extra_breaks: additional times at which steps must start, so that two drivers can
    // share one step grid.
    Discretization(const Driver& d, StepPolicy p = {}, std::vector<double> extra_breaks = {})
        : d_(&d), p_(p)
    {
        p_.validate();
        std::vector<Piece> ps;
        const auto& segs = d.segments();
        for (std::size_t i = 0; i < segs.size(); ++i) {
            const Segment& s = segs[i];
            double s0 = d.segment_start(i);
            if (auto* q = std::get_if<Sampled>(&s.shape)) {
                for (std::size_t k = 1; k < q->t.size(); ++k)
                    ps.push_back({s0 + q->t[k - 1], q->t[k] - q->t[k - 1], true, q->v[k - 1], q->v[k], i});
            } else if (auto* l = std::get_if<Linear>(&s.shape)) {
                ps.push_back({s0, s.duration, true, l->v0, l->v1, i});
            } else if (auto* c = std::get_if<Constant>(&s.shape)) {
                ps.push_back({s0, s.duration, true, c->c, c->c, i});
            } else {
                ps.push_back({s0, s.duration, false, 0.0, 0.0, i});
            }
        }
        std::sort(extra_breaks.begin(), extra_breaks.end());
        const double eps = 1e-13 * std::max(1.0, d.horizon());
        auto eb = extra_breaks.begin();
        for (const Piece& pc : ps) {
            double lo = pc.t0, hi = pc.t0 + pc.L;
            while (eb != extra_breaks.end() && *eb <= lo + eps) ++eb;
            double cur = lo;
            double va = pc.a;
            bool split = false;
            for (auto it = eb; it != extra_breaks.end() && *it < hi - eps; ++it) {
                double f = (*it - lo) / pc.L;
                double vb = pc.a + (pc.b - pc.a) * f;
                emit(pc, cur, *it - cur, va, vb);
                cur = *it;
                va = vb;
                split = true;
            }
            emit(pc, cur, split ? hi - cur : pc.L, va, pc.b);
        }
    }

    const Driver& driver() const { return *d_; }
    const StepPolicy& policy() const { return p_; }
    double horizon() const { return d_->horizon(); }
    std::size_t size() const { return c_.size(); }
    double step_start(std::size_t j) const { return t0_[j]; }
    double step_length(std::size_t j) const { return dt_[j]; }
    double step_value(std::size_t j) const { return c_[j]; }
    double step_slope(std::size_t j) const { return V_[j]; }

    // Forward flow of a real point. Stops at the hit, at the horizon, or once the
    // current step starts at or after t_cap.
    BoundaryTrajectory evolve(double x0, bool record = true, double t_cap = kInf) const
    {
        BoundaryTrajectory tr;
        tr.x0 = x0;
        if (record) tr.samples.emplace_back(0.0, x0);
        double w = x0;
        const int L = p_.near_hit_refinement;
        for (std::size_t j = 0; j < c_.size(); ++j) {
            double t0 = t0_[j], dt = dt_[j], c = c_[j];
            if (t0 >= t_cap) break;
            double u = w - c;
            double u2 = u * u;
            if (u == 0.0 || (L == 0 && u2 <= 4.0 * dt)) {
                finish(tr, record, t0 + hit_sub_time(w, c, c - 0.5 * V_[j] * dt), c, c);
                return tr;
            }
            double gap = std::max(std::abs(u) - osc_[j], 0.0);
            if (gap * gap <= 4.0 * dt) {
                std::size_t mark = tr.samples.size();
                Sub r = sub(w, t0, dt, c, L, record ? &tr : nullptr);
                if (r.hit) {
                    finish(tr, record, r.time, r.c, r.c);
                    return tr;
                }
                if (record) {
                    tr.samples.resize(mark);
                    tr.drive.resize(mark - 1);
                }
                if (u2 <= 4.0 * dt) {
                    finish(tr, record, t0 + dt, c, c);
                    return tr;
                }
            }
            w = c + (u < 0 ? -1.0 : 1.0) * std::sqrt(u2 - 4.0 * dt);
            if (record) {
                tr.samples.emplace_back(t0 + dt, w);
                tr.drive.push_back(c);
            }
        }
        tr.status = Status::AliveAtHorizon;
        tr.tau = kInf;
        tr.x_end = w;
        return tr;
    }

    // Hitting time, or +inf when the point survives past min(t_cap, horizon).
    double hitting_time(double x0, double t_cap = kInf) const
    {
        BoundaryTrajectory tr = evolve(x0, false, t_cap);
        return tr.welded() ? tr.tau : kInf;
    }

    // The point on the given side (+1 right, -1 left) of the driver that is welded at time t,
    // obtained by running the discrete flow backwards from the driver. Mirrors the forward
    // refinement inside the hitting step.
    double backward(double t, int side) const
    {
        if (!(t > 0.0)) return d_->initial_value();
        double s = side < 0 ? -1.0 : 1.0;
        std::size_t j = 0;
        {
            std::size_t lo = 0, hi = c_.size();
            while (lo < hi) {
                std::size_t mid = (lo + hi) / 2;
                if (t0_[mid] + dt_[mid] >= t) hi = mid;
                else lo = mid + 1;
            }
            j = std::min(lo, c_.size() - 1);
        }
        double w = back_sub(t, t0_[j], dt_[j], c_[j], p_.near_hit_refinement, s);
        for (std::size_t k = j; k-- > 0;) {
            double u = w - c_[k];
            w = c_[k] + s * std::sqrt(u * u + 4.0 * dt_[k]);
        }
        return w;
    }

    std::vector<std::pair<double, std::complex<double>>> evolve_interior(std::complex<double> z0) const
    {
        std::vector<std::pair<double, std::complex<double>>> out;
        out.reserve(c_.size() + 1);
        out.emplace_back(0.0, z0);
        std::complex<double> z = z0;
        for (std::size_t j = 0; j < c_.size(); ++j) {
            z = step_constant(z, c_[j], dt_[j]);
            out.emplace_back(t0_[j] + dt_[j], z);
        }
        return out;
    }

private:
    struct Sub {
        bool hit;
        double time;
        double c;
    };

    struct Piece {
        double t0, L;
        bool lin;
        double a, b;
        std::size_t seg;
    };

    void emit(const Piece& pc, double t0, double L, double a, double b)
    {
        if (pc.lin) {
            add_linear_piece(t0, L, a, b);
            return;
        }
        // sqrt blocks: steps uniform in q = sqrt(distance to the singular end), so the driver
        // moves by the same amount on every step and the singular end is resolved.
        const Segment& s = d_->segments()[pc.seg];
        const SqrtCap& q = std::get<SqrtCap>(s.shape);
        const double D = s.duration;
        const double seg0 = d_->segment_start(pc.seg);
        auto qmap = [&](double r) { return std::sqrt(std::max(q.from_end ? D - r : r, 0.0)); };
        auto rmap = [&](double x) { return q.from_end ? D - x * x : x * x; };
        double ra = t0 - seg0, rb = ra + L;
        double qa = qmap(ra), qb = qmap(rb);
        double dq = p_.base_step / (2.0 * std::max(qa, qb));
        double kk = std::ceil(std::abs(qb - qa) / dq - 1e-9);
        std::size_t k = std::max<std::size_t>(pieces(L), kk < 1.0 ? 1 : static_cast<std::size_t>(kk));
        double r_prev = ra;
        for (std::size_t j = 1; j <= k; ++j) {
            double r1 = j == k ? rb : rmap(qa + (qb - qa) * static_cast<double>(j) / static_cast<double>(k));
            double c = s.value(0.5 * (r_prev + r1));
            double osc = std::max(std::abs(s.value(r_prev) - c), std::abs(s.value(r1) - c));
            push(seg0 + r_prev, r1 - r_prev, c, osc, (s.value(r1) - s.value(r_prev)) / (r1 - r_prev));
            r_prev = r1;
        }
    }

    void add_linear_piece(double t0, double L, double a, double b)
    {
        const double V = (b - a) / L;
        for_each_linear_step(L, a, b, p_.base_step,
                             [&](double off, double dt, double c, double osc) { push(t0 + off, dt, c, osc, V); });
    }

    std::size_t pieces(double L) const
    {
        double q = std::ceil(L / p_.base_step - 1e-9);
        return q < 1.0 ? 1 : static_cast<std::size_t>(q);
    }

    void push(double t0, double dt, double c, double osc, double V)
    {
        V_.push_back(V);
        t0_.push_back(t0);
        dt_.push_back(dt);
        c_.push_back(c);
        osc_.push_back(osc);
    }

    static void finish(BoundaryTrajectory& tr, bool record, double tau, double x, double c)
    {
        tr.status = Status::Welded;
        tr.tau = tau;
        tr.x_end = x;
        if (record) {
            tr.samples.emplace_back(tau, x);
            tr.drive.push_back(c);
        }
    }

    // Dyadic refinement of a step [t0, t0+dt] with midpoint value c: each half is taken as
    // one step at its own midpoint value, and the half that hits is refined further. A
    // refined miss inside a half that hit at the coarser level is clamped to the half's end,
    // which keeps hitting times monotone in the starting point.
    Sub sub(double w, double t0, double dt, double c, int level, BoundaryTrajectory* tr) const
    {
        if (level == 0) {
            double u = w - c;
            if (u * u <= 4.0 * dt) return {true, t0 + u * u / 4.0, c};
            return {false, t0 + dt, c};
        }
        double h = 0.5 * dt;
        double c1 = (*d_)(t0 + 0.5 * h);
        double u = w - c1;
        if (u * u <= 4.0 * h) {
            Sub r = sub(w, t0, h, c1, level - 1, tr);
            if (!r.hit) return {true, t0 + h, c1};
            return r;
        }
        double w1 = c1 + (u < 0 ? -1.0 : 1.0) * std::sqrt(u * u - 4.0 * h);
        if (tr) {
            tr->samples.emplace_back(t0 + h, w1);
            tr->drive.push_back(c1);
        }
        double c2 = (*d_)(t0 + 1.5 * h);
        double u2 = w1 - c2;
        if (u2 * u2 <= 4.0 * h) {
            Sub r = sub(w1, t0 + h, h, c2, level - 1, tr);
            if (!r.hit) return {true, t0 + dt, c2};
            return r;
        }
        return {false, t0 + dt, c2};
    }

    double back_sub(double t, double t0, double dt, double c, int level, double s) const
    {
        if (level == 0) return c + s * std::sqrt(4.0 * std::max(t - t0, 0.0));
        double h = 0.5 * dt;
        if (t <= t0 + h) return back_sub(t, t0, h, (*d_)(t0 + 0.5 * h), level - 1, s);
        double w1 = back_sub(t, t0 + h, h, (*d_)(t0 + 1.5 * h), level - 1, s);
        double c1 = (*d_)(t0 + 0.5 * h);
        double u = w1 - c1;
        return c1 + s * std::sqrt(u * u + 4.0 * h);
    }

    const Driver* d_;
    StepPolicy p_;
    std::vector<double> t0_, dt_, c_, osc_, V_; // V_: driver slope over the step
};

inline BoundaryTrajectory evolve_point(const Driver& d, double x0, StepPolicy policy = {})
{
    if (d.orientation() != Orientation::Upward) throw InputError("evolve_point: driver must be upward");
    if (x0 == d.initial_value()) throw InputError("evolve_point: starting point equals the initial driver value");
    return Discretization(d, policy).evolve(x0);
}

inline std::vector<std::pair<double, std::complex<double>>> evolve_interior(const Driver& d, std::complex<double> z0,
                                                                            StepPolicy policy = {})
{
    if (!(z0.imag() > 0.0)) throw InputError("evolve_interior: starting point must lie in the upper half-plane");
    return Discretization(d, policy).evolve_interior(z0);
}

// Classical RK4 on x' = -2/(x - xi(t)). Stops once |x - xi| < 10 sqrt(h) and adds the
// constant-driver tail (x - xi)^2 / 4.
inline BoundaryTrajectory rk4_oracle(const Driver& d, double x0, double h)
{
    if (!(h > 0.0)) throw InputError("rk4_oracle: step must be positive");
    if (x0 == d.initial_value()) throw InputError("rk4_oracle: starting point equals the initial driver value");
    BoundaryTrajectory tr;
    tr.x0 = x0;
    tr.samples.emplace_back(0.0, x0);
    const double T = d.horizon();
    const double stop = 10.0 * std::sqrt(h);
    auto f = [&d](double t, double x) { return -2.0 / (x - d(t)); };
    double t = 0.0, x = x0;
    while (true) {
        double g = x - d(t);
        if (std::abs(g) < stop) {
            double tau = t + g * g / 4.0;
            if (tau <= T) {
                tr.status = Status::Welded;
                tr.tau = tau;
                tr.samples.emplace_back(tau, d(tau));
                tr.drive.push_back(d(t));
                return tr;
            }
            break;
        }
        if (t >= T) break;
        double hh = std::min(h, T - t);
        double k1 = f(t, x);
        double k2 = f(t + 0.5 * hh, x + 0.5 * hh * k1);
        double k3 = f(t + 0.5 * hh, x + 0.5 * hh * k2);
        double k4 = f(t + hh, x + hh * k3);
        x += hh / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += hh;
        if (T - t < 1e-15 * T) t = T;
        tr.samples.emplace_back(t, x);
        tr.drive.push_back(d(t - 0.5 * hh));
    }
    tr.status = Status::AliveAtHorizon;
    tr.tau = kInf;
    return tr;
}

} // namespace loewner
