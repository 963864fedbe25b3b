#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "loewner/flow.hpp"

namespace loewner {

using cplx = std::complex<double>;

// Points of the hull generated by an upward driver on [0, T], ordered by the capacity
// time t_k = k T / n at which they are reached growing from the base: points[0] = base =
// xi(T) on the real line, points[n] = tip = h_T(xi(0)).
struct Curve {
    std::vector<cplx> points;
    std::vector<double> times;
    double base = 0.0;

    cplx tip() const { return points.back(); }
    double horizon() const { return times.back(); }
};

// Vertical-slit composition with n equal steps, driver frozen at each step's midpoint value.
// The point at capacity time t_k is the slit tip of step n-k+1 pushed through the later
// steps, so the whole trace costs O(n^2) slit maps.
inline Curve trace_curve(const Driver& d, std::size_t n_steps)
{
    if (d.orientation() != Orientation::Upward) throw InputError("trace_curve: driver must be upward");
    if (n_steps < 1) throw InputError("trace_curve: need at least one step");
    const double T = d.horizon();
    const double dt = T / static_cast<double>(n_steps);
    std::vector<double> c(n_steps);
    for (std::size_t j = 0; j < n_steps; ++j) c[j] = d((static_cast<double>(j) + 0.5) * dt);

    // Slit map on the closed upper half-plane: c + sqrt((z - c)^2 - 4 dt), root with Im >= 0.
    auto slit = [dt](double& x, double& y, double cj) {
        double u = x - cj;
        double p = u * u - y * y - 4.0 * dt, q = 2.0 * u * y;
        double m = std::sqrt(p * p + q * q);
        double re, im;
        if (p >= 0.0) {
            re = std::sqrt(0.5 * (m + p));
            im = re > 0.0 ? q / (2.0 * re) : 0.0;
        } else {
            im = std::sqrt(0.5 * (m - p));
            re = q / (2.0 * im);
        }
        if (im < 0.0 || (im == 0.0 && u < 0.0)) {
            re = -re;
            im = -im;
        }
        x = cj + re;
        y = im;
    };

    Curve cv;
    cv.base = d.final_value();
    cv.points.push_back({cv.base, 0.0});
    cv.times.push_back(0.0);
    for (std::size_t k = 1; k <= n_steps; ++k) {
        std::size_t first = n_steps - k; // zero-based index of the step that creates the point
        double x = c[first], y = 2.0 * std::sqrt(dt);
        for (std::size_t j = first + 1; j < n_steps; ++j) slit(x, y, c[j]);
        cv.points.emplace_back(x, y);
        cv.times.push_back(static_cast<double>(k) * dt);
    }
    cv.times.back() = T;
    return cv;
}

// F(z) = (z - b)^alpha (z + a)^(1 - alpha): maps H onto H minus a segment from 0 at angle
// alpha*pi, welding -a to b. F(z) = z + drift - 1/(2z) + O(1/z^2).
struct TiltedSlitMap {
    double alpha;
    double a, b;
    double hcap;  // 1/2
    double time;  // hcap / 2
    double drift; // (1 - 2 alpha) / sqrt(alpha (1 - alpha))
    cplx tip;

    cplx operator()(cplx z) const
    {
        return std::pow(z - b, alpha) * std::pow(z + a, 1.0 - alpha);
    }
};

inline TiltedSlitMap tilted_slit_map(double alpha)
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("tilted_slit_map: alpha must lie in (0, 1)");
    TiltedSlitMap m;
    m.alpha = alpha;
    m.b = std::sqrt(alpha / (1.0 - alpha));
    m.a = 1.0 / m.b;
    // Coefficient of 1/z is -alpha (1 - alpha) (a + b)^2 / 2, and (a + b)^2 = 1 / (alpha (1 - alpha)).
    m.hcap = alpha * (1.0 - alpha) * (m.a + m.b) * (m.a + m.b) / 2.0;
    m.time = m.hcap / 2.0;
    m.drift = (1.0 - alpha) * m.a - alpha * m.b;
    m.tip = std::pow(alpha, alpha - 0.5) * std::pow(1.0 - alpha, 0.5 - alpha) * std::polar(1.0, alpha * M_PI);
    return m;
}

struct PairSlit {
    double alpha;
    double scale; // scale * b = y, scale * a = -x
    double time;  // scale^2 / 4
    TiltedSlitMap map;
};

// Scaled tilted slit welding x < 0 to y > 0 (relative to the current driver value).
// b / a = alpha / (1 - alpha) = y / (-x).
inline PairSlit weld_pair_slit(double x, double y)
{
    if (!(x < 0.0 && y > 0.0)) throw InputError("weld_pair_slit: need x < 0 < y");
    PairSlit p;
    p.alpha = y / (y - x);
    p.map = tilted_slit_map(p.alpha);
    p.scale = y / p.map.b;
    p.time = p.scale * p.scale / 4.0;
    return p;
}

// Upward driver block of the pair slit, starting at value v: welds v + x to v + y at its
// horizon.
inline Driver slit_block(double x, double y, double v = 0.0)
{
    PairSlit p = weld_pair_slit(x, y);
    if (p.alpha == 0.5) return make_constant(v, p.time);
    return shifted(reverse(make_sqrt_slit(p.alpha, p.time)), v);
}

// sup over c1's capacity times (up to the shorter horizon) of |z1(t) - z2(t)|, z2 linearly
// interpolated in capacity time.
inline double curve_distance(const Curve& c1, const Curve& c2)
{
    double H = std::min(c1.horizon(), c2.horizon());
    auto at = [](const Curve& c, double t) {
        auto it = std::lower_bound(c.times.begin(), c.times.end(), t);
        if (it == c.times.begin()) return c.points.front();
        if (it == c.times.end()) return c.points.back();
        std::size_t k = static_cast<std::size_t>(it - c.times.begin());
        double f = (t - c.times[k - 1]) / (c.times[k] - c.times[k - 1]);
        return c.points[k - 1] + f * (c.points[k] - c.points[k - 1]);
    };
    double worst = 0.0;
    for (std::size_t k = 0; k < c1.times.size(); ++k) {
        if (c1.times[k] > H * (1.0 + 1e-12)) break;
        worst = std::max(worst, std::abs(c1.points[k] - at(c2, c1.times[k])));
    }
    return worst;
}

namespace detail {

inline double cross(cplx a, cplx b) { return a.real() * b.imag() - a.imag() * b.real(); }

inline bool segments_cross(cplx p1, cplx p2, cplx q1, cplx q2)
{
    double d1 = cross(q2 - q1, p1 - q1), d2 = cross(q2 - q1, p2 - q1);
    double d3 = cross(p2 - p1, q1 - p1), d4 = cross(p2 - p1, q2 - p1);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

} // namespace detail

// True when no two non-adjacent polyline segments properly intersect.
inline bool is_simple(const Curve& c)
{
    const auto& p = c.points;
    if (p.size() < 4) return true;
    std::size_t m = p.size() - 1;
    std::vector<double> lox(m), hix(m), loy(m), hiy(m);
    for (std::size_t i = 0; i < m; ++i) {
        lox[i] = std::min(p[i].real(), p[i + 1].real());
        hix[i] = std::max(p[i].real(), p[i + 1].real());
        loy[i] = std::min(p[i].imag(), p[i + 1].imag());
        hiy[i] = std::max(p[i].imag(), p[i + 1].imag());
    }
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 2; j < m; ++j) {
            if (hix[j] < lox[i] || lox[j] > hix[i] || hiy[j] < loy[i] || loy[j] > hiy[i]) continue;
            if (detail::segments_cross(p[i], p[i + 1], p[j], p[j + 1])) return false;
        }
    return true;
}

// Largest distance from the points to the line through the base and the tip.
inline double chord_deviation(const Curve& c)
{
    cplx b = c.points.front(), t = c.tip();
    cplx dir = (t - b) / std::abs(t - b);
    double worst = 0.0;
    for (cplx z : c.points) worst = std::max(worst, std::abs(detail::cross(dir, z - b)));
    return worst;
}

} // namespace loewner
