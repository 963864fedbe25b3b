#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <type_traits>
#include <variant>
#include <vector>

#include "loewner/errors.hpp"

namespace loewner {

enum class Orientation { Upward, Downward };

struct Constant {
    double c;
};

struct Linear {
    double v0, v1;
};

// v0 + coef*sqrt(r) on [0, D]. With from_end the profile is mirrored in time:
// v0 + coef*(sqrt(D - r) - sqrt(D)), which is what reversing a sqrt block gives.
struct SqrtCap {
    double v0;
    double coef;
    bool from_end = false;
};

// Knot times are relative to the segment start: t.front() == 0, t.back() == duration.
struct Sampled {
    std::vector<double> t;
    std::vector<double> v;
};

using Shape = std::variant<Constant, Linear, SqrtCap, Sampled>;

struct Segment {
    double duration;
    Shape shape;

    double value(double r) const
    {
        r = std::clamp(r, 0.0, duration);
        struct V {
            double r, d;
            double operator()(const Constant& s) const { return s.c; }
            double operator()(const Linear& s) const
            {
                if (r >= d) return s.v1;
                return s.v0 + (s.v1 - s.v0) * (r / d);
            }
            double operator()(const SqrtCap& s) const
            {
                if (s.from_end) return s.v0 + s.coef * (std::sqrt(std::max(d - r, 0.0)) - std::sqrt(d));
                return s.v0 + s.coef * std::sqrt(r);
            }
            double operator()(const Sampled& s) const
            {
                auto it = std::upper_bound(s.t.begin(), s.t.end(), r);
                if (it == s.t.begin()) return s.v.front();
                if (it == s.t.end()) return s.v.back();
                std::size_t k = static_cast<std::size_t>(it - s.t.begin());
                double t0 = s.t[k - 1], t1 = s.t[k];
                return s.v[k - 1] + (s.v[k] - s.v[k - 1]) * ((r - t0) / (t1 - t0));
            }
        };
        return std::visit(V{r, duration}, shape);
    }

    double start_value() const { return value(0.0); }
    double end_value() const { return value(duration); }
};

class Driver {
public:
    Driver() = default;

    explicit Driver(std::vector<Segment> segs, Orientation o = Orientation::Upward)
        : o_(o), segs_(std::move(segs))
    {
        T_ = 0.0;
        for (const auto& s : segs_) T_ += s.duration;
        validate();
    }

    Driver(double horizon, std::vector<Segment> segs, Orientation o)
        : Driver(std::move(segs), o)
    {
        if (!(horizon > 0.0)) throw InputError("driver horizon must be positive");
        if (std::abs(T_ - horizon) > 1e-12 * std::max(1.0, horizon))
            throw InputError("segment durations do not sum to the horizon");
        T_ = horizon;
    }

    double horizon() const { return T_; }
    Orientation orientation() const { return o_; }
    const std::vector<Segment>& segments() const { return segs_; }
    double segment_start(std::size_t i) const { return starts_[i]; }

    std::size_t segment_index(double t) const
    {
        auto it = std::upper_bound(starts_.begin(), starts_.end(), t);
        std::size_t k = it == starts_.begin() ? 0 : static_cast<std::size_t>(it - starts_.begin()) - 1;
        return std::min(k, segs_.size() - 1);
    }

    double operator()(double t) const
    {
        t = std::clamp(t, 0.0, T_);
        std::size_t k = segment_index(t);
        return segs_[k].value(t - starts_[k]);
    }

    double initial_value() const { return segs_.front().start_value(); }
    double final_value() const { return segs_.back().end_value(); }

    // Segment boundaries and interior sampled knots, sorted, in absolute time.
    std::vector<double> breakpoints() const
    {
        std::vector<double> out;
        for (std::size_t i = 0; i < segs_.size(); ++i) {
            out.push_back(starts_[i]);
            if (auto* s = std::get_if<Sampled>(&segs_[i].shape))
                for (std::size_t k = 1; k + 1 < s->t.size(); ++k) out.push_back(starts_[i] + s->t[k]);
        }
        out.push_back(T_);
        return out;
    }

    double sup_norm(std::size_t extra = 4096) const;

private:
    void validate()
    {
        if (segs_.empty()) throw InputError("driver needs at least one segment");
        starts_.resize(segs_.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < segs_.size(); ++i) {
            const auto& s = segs_[i];
            if (!(s.duration > 0.0) || !std::isfinite(s.duration))
                throw InputError("segment duration must be positive and finite");
            if (auto* p = std::get_if<Sampled>(&s.shape)) {
                if (p->t.size() < 2 || p->t.size() != p->v.size())
                    throw InputError("sampled segment needs matching grids of at least 2 points");
                for (std::size_t k = 1; k < p->t.size(); ++k)
                    if (!(p->t[k] > p->t[k - 1])) throw InputError("sampled grid must be strictly increasing");
                if (p->t.front() != 0.0 || std::abs(p->t.back() - s.duration) > 1e-12 * std::max(1.0, s.duration))
                    throw InputError("sampled grid must span the segment");
                for (double v : p->v)
                    if (!std::isfinite(v)) throw InputError("sampled values must be finite");
            }
            if (auto* p = std::get_if<SqrtCap>(&s.shape))
                if (!std::isfinite(p->coef) || !std::isfinite(p->v0)) throw InputError("sqrt segment must be finite");
            if (!std::isfinite(s.start_value()) || !std::isfinite(s.end_value()))
                throw InputError("segment values must be finite");
            starts_[i] = acc;
            acc += s.duration;
            if (i > 0) {
                double a = segs_[i - 1].end_value(), b = s.start_value();
                if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
                    throw InputError("driver is discontinuous at segment " + std::to_string(i));
            }
        }
    }

    double T_ = 0.0;
    Orientation o_ = Orientation::Upward;
    std::vector<Segment> segs_;
    std::vector<double> starts_;
};

// Sup of |a - b| over [0, min horizon], evaluated on the union of both breakpoint
// sets plus a uniform grid. Exact for piecewise-linear pairs.
inline double sup_distance(const Driver& a, const Driver& b, std::size_t extra = 4096)
{
    double T = std::min(a.horizon(), b.horizon());
    std::vector<double> ts = a.breakpoints();
    auto tb = b.breakpoints();
    ts.insert(ts.end(), tb.begin(), tb.end());
    for (std::size_t k = 0; k <= extra; ++k) ts.push_back(T * static_cast<double>(k) / static_cast<double>(extra));
    double m = 0.0;
    for (double t : ts)
        if (t <= T) m = std::max(m, std::abs(a(t) - b(t)));
    return m;
}

inline double Driver::sup_norm(std::size_t extra) const
{
    double m = 0.0;
    for (double t : breakpoints()) m = std::max(m, std::abs((*this)(t)));
    for (std::size_t k = 0; k <= extra; ++k)
        m = std::max(m, std::abs((*this)(T_ * static_cast<double>(k) / static_cast<double>(extra))));
    return m;
}

inline Driver make_constant(double c, double T, Orientation o = Orientation::Upward)
{
    if (!(T > 0.0) || !std::isfinite(T)) throw InputError("make_constant: horizon must be positive");
    return Driver({Segment{T, Constant{c}}}, o);
}

inline Driver make_piecewise_linear(const std::vector<std::pair<double, double>>& knots,
                                    Orientation o = Orientation::Upward)
{
    if (knots.size() < 2) throw InputError("make_piecewise_linear: need at least 2 knots");
    if (knots.front().first != 0.0) throw InputError("make_piecewise_linear: first knot must be at t = 0");
    std::vector<Segment> segs;
    segs.reserve(knots.size() - 1);
    for (std::size_t i = 1; i < knots.size(); ++i) {
        double dt = knots[i].first - knots[i - 1].first;
        if (!(dt > 0.0)) throw InputError("make_piecewise_linear: knot times must be strictly increasing");
        segs.push_back(Segment{dt, Linear{knots[i - 1].second, knots[i].second}});
    }
    return Driver(std::move(segs), o);
}

// m uniform pieces on [0, T], knot values v0 + amp * U(-1, 1) (the first knot is v0).
inline Driver make_random_piecewise_linear(std::uint64_t seed, std::size_t m, double T, double amp, double v0 = 0.0)
{
    if (m < 1) throw InputError("make_random_piecewise_linear: need at least one piece");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<std::pair<double, double>> knots{{0.0, v0}};
    for (std::size_t k = 1; k <= m; ++k)
        knots.emplace_back(T * static_cast<double>(k) / static_cast<double>(m), v0 + amp * u(rng));
    knots.back().first = T;
    return make_piecewise_linear(knots);
}

// Coefficient C of the downward driver C*sqrt(t) whose slit leaves 0 at angle alpha*pi.
// C*sqrt(1/4) is the constant term of the tilted slit map at infinity.
inline double sqrt_slit_coefficient(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    return 2.0 * (1.0 - 2.0 * alpha) / std::sqrt(alpha * (1.0 - alpha));
}

inline Driver make_sqrt_slit(double alpha, double T)
{
    double C = sqrt_slit_coefficient(alpha);
    if (!(T > 0.0)) throw InputError("make_sqrt_slit: horizon must be positive");
    return Driver({Segment{T, SqrtCap{0.0, C, false}}}, Orientation::Downward);
}

// out(t) = in(T - t) - in(T), orientation flipped.
inline Driver reverse(const Driver& d)
{
    const double e = d.final_value();
    std::vector<Segment> out;
    out.reserve(d.segments().size());
    for (auto it = d.segments().rbegin(); it != d.segments().rend(); ++it) {
        const Segment& s = *it;
        struct R {
            double e, D;
            const Segment& s;
            Shape operator()(const Constant& c) const { return Constant{c.c - e}; }
            Shape operator()(const Linear& l) const { return Linear{l.v1 - e, l.v0 - e}; }
            Shape operator()(const SqrtCap& q) const
            {
                return SqrtCap{s.end_value() - e, q.coef, !q.from_end};
            }
            Shape operator()(const Sampled& p) const
            {
                Sampled r;
                std::size_t n = p.t.size();
                r.t.resize(n);
                r.v.resize(n);
                for (std::size_t k = 0; k < n; ++k) {
                    r.t[k] = D - p.t[n - 1 - k];
                    r.v[k] = p.v[n - 1 - k] - e;
                }
                r.t.front() = 0.0;
                r.t.back() = D;
                return r;
            }
        };
        out.push_back(Segment{s.duration, std::visit(R{e, s.duration, s}, s.shape)});
    }
    Orientation o = d.orientation() == Orientation::Upward ? Orientation::Downward : Orientation::Upward;
    return Driver(std::move(out), o);
}

inline Driver shifted(const Driver& d, double delta)
{
    std::vector<Segment> out = d.segments();
    for (auto& s : out) {
        std::visit(
            [delta](auto& sh) {
                using S = std::decay_t<decltype(sh)>;
                if constexpr (std::is_same_v<S, Constant>) sh.c += delta;
                else if constexpr (std::is_same_v<S, Linear>) { sh.v0 += delta; sh.v1 += delta; }
                else if constexpr (std::is_same_v<S, SqrtCap>) sh.v0 += delta;
                else for (auto& v : sh.v) v += delta;
            },
            s.shape);
    }
    return Driver(std::move(out), d.orientation());
}

// Single sampled segment holding d(t) + f(t) on the breakpoints of d plus n uniform points.
template <class F>
Driver perturbed(const Driver& d, F&& f, std::size_t n = 2048)
{
    double T = d.horizon();
    std::vector<double> ts = d.breakpoints();
    for (std::size_t k = 0; k <= n; ++k) ts.push_back(T * static_cast<double>(k) / static_cast<double>(n));
    std::sort(ts.begin(), ts.end());
    Sampled s;
    for (double t : ts) {
        if (!s.t.empty() && t - s.t.back() <= 1e-14 * std::max(1.0, T)) continue;
        s.t.push_back(t);
        s.v.push_back(d(t) + f(t));
    }
    s.t.back() = T;
    return Driver({Segment{T, std::move(s)}}, d.orientation());
}

struct Lemma36Pair {
    Driver xi;
    Driver xi_tilde;
    double y0;
};

// xi = -t/delta on [0, delta], then -1; xi_tilde = xi - delta; marked point y0 = 2 delta.
// The S0 variant prefixes a delta^2 block in which xi rests at 0 and xi_tilde moves
// linearly from 0 to -delta; y0 is then the point mapped to 2 delta by that block.
inline Lemma36Pair make_lemma36_pair(double delta, bool s0 = false, double T = 1.0)
{
    if (!(delta > 0.0 && delta <= 0.1)) throw InputError("make_lemma36_pair: delta must lie in (0, 0.1]");
    if (!(T > delta + delta * delta)) throw InputError("make_lemma36_pair: horizon too short");
    Lemma36Pair p;
    if (!s0) {
        p.xi = make_piecewise_linear({{0.0, 0.0}, {delta, -1.0}, {T, -1.0}});
        p.xi_tilde = make_piecewise_linear({{0.0, -delta}, {delta, -1.0 - delta}, {T, -1.0 - delta}});
        p.y0 = 2.0 * delta;
        return p;
    }
    double h = delta * delta;
    p.xi = make_piecewise_linear({{0.0, 0.0}, {h, 0.0}, {h + delta, -1.0}, {h + T, -1.0}});
    p.xi_tilde = make_piecewise_linear({{0.0, 0.0}, {h, -delta}, {h + delta, -1.0 - delta}, {h + T, -1.0 - delta}});
    p.y0 = std::sqrt(4.0 * delta * delta + 4.0 * h);
    return p;
}

struct PartitionWeldingProblem {
    // (x_j, y_j), innermost first.
    std::vector<std::pair<double, double>> pairs;

    void validate() const
    {
        if (pairs.empty()) throw InputError("partition needs at least one pair");
        for (std::size_t j = 0; j < pairs.size(); ++j) {
            auto [x, y] = pairs[j];
            if (!(x < 0.0 && y > 0.0)) throw InputError("partition pairs must satisfy x < 0 < y");
            if (j > 0 && !(x < pairs[j - 1].first && y > pairs[j - 1].second))
                throw InputError("partition pairs must be strictly nested");
        }
    }
};

} // namespace loewner
