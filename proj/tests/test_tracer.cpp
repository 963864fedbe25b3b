#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "loewner/tracer.hpp"
#include "loewner/welding.hpp"

using namespace loewner;

TEST(Tracer, ZeroDriverVerticalSegment)
{
    Curve c = trace_curve(make_constant(0.0, 0.25), 400);
    EXPECT_NEAR(c.tip().real(), 0.0, 1e-9);
    EXPECT_NEAR(c.tip().imag(), 1.0, 1e-9);
    EXPECT_TRUE(is_simple(c));
    EXPECT_LE(chord_deviation(c), 1e-9);
    for (std::size_t k = 1; k < c.times.size(); ++k) EXPECT_GT(c.times[k], c.times[k - 1]);
}

TEST(Tracer, SlitAngle)
{
    Curve c = trace_curve(reverse(make_sqrt_slit(0.25, 0.25)), 2000);
    std::complex<double> v = c.tip() - c.base;
    EXPECT_NEAR(std::arg(v), 0.25 * M_PI, 1e-3);
    EXPECT_TRUE(is_simple(c));
}

TEST(Tracer, TiltedSlitMap)
{
    TiltedSlitMap m = tilted_slit_map(0.5);
    EXPECT_NEAR(m.a, 1.0, 1e-15);
    EXPECT_NEAR(m.b, 1.0, 1e-15);
    EXPECT_NEAR(m.drift, 0.0, 1e-15);
    EXPECT_NEAR(m.tip.real(), 0.0, 1e-15);
    EXPECT_NEAR(m.tip.imag(), 1.0, 1e-15);
    EXPECT_THROW(tilted_slit_map(1.0), InputError);
}

TEST(Tracer, PairSlitWeldsThePair)
{
    for (auto [x, y] : {std::pair{-1.0, 1.0}, std::pair{-1.5, 0.5}, std::pair{-0.2, 0.9}}) {
        Driver b = slit_block(x, y, 0.3);
        // hold past the horizon so the weld at time T is inside the window
        Driver held({b.segments().front(), Segment{0.1 * b.horizon(), Constant{b.final_value()}}});
        Discretization D(held, StepPolicy{1e-6});
        EXPECT_NEAR(D.hitting_time(0.3 + x), b.horizon(), 1e-4);
        EXPECT_NEAR(D.hitting_time(0.3 + y), b.horizon(), 1e-4);
    }
    EXPECT_THROW(weld_pair_slit(0.5, 1.0), InputError);
}

TEST(Tracer, CurveDistance)
{
    Curve a = trace_curve(make_constant(0.0, 0.25), 100);
    Curve b = trace_curve(make_constant(0.1, 0.25), 100);
    EXPECT_NEAR(curve_distance(a, b), 0.1, 1e-9);
    EXPECT_EQ(curve_distance(a, a), 0.0);
}
