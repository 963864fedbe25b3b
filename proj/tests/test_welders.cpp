#include <cmath>

#include <gtest/gtest.h>

#include "loewner/welders.hpp"
#include "loewner/welding.hpp"

using namespace loewner;

TEST(Welders, CounterexampleWeldsMeshPairs)
{
    const int n = 6;
    Driver d = make_counterexample_welder(n);
    Discretization D(d);
    for (int k = 1; k <= n; ++k) EXPECT_NEAR(weld_partner(D, -static_cast<double>(k) / n), static_cast<double>(k) / n, 1e-3);
    EXPECT_LE(d.horizon(), 2.0 / (n * n));
    EXPECT_GE(d.sup_norm(), 1.0 - 3.0 / n);
}

TEST(Welders, OscillatingWelderHitsTargetTimes)
{
    HittingProfile src = hitting_profile(make_angled_line_source(), 32);
    const int n = 4;
    Driver w = make_oscillating_welder(src, n, 1e-3);
    Discretization D(w);
    for (int j = 1; j < n; ++j) {
        double t = src.horizon * j / n;
        for (Side s : {Side::Left, Side::Right})
            EXPECT_NEAR(D.hitting_time(inverse_hitting(src, t, s)), t, 1e-6) << j;
    }
}

TEST(Welders, AngledLineSource)
{
    Driver d = make_angled_line_source();
    EXPECT_EQ(d.orientation(), Orientation::Upward);
    EXPECT_NEAR(d.horizon(), 3.0, 1e-12);
    EXPECT_NEAR(d.initial_value(), 0.0, 1e-12);
}

TEST(Welders, RejectNearHitRefinement)
{
    StepPolicy p;
    p.near_hit_refinement = 2;
    EXPECT_THROW(make_counterexample_welder(4, 0.0, p), InputError);
}
