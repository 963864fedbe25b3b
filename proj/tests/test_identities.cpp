#include <cmath>

#include <gtest/gtest.h>

#include "loewner/identities.hpp"

using namespace loewner;

TEST(Identities, IntervalWidthOnZeroDriver)
{
    EXPECT_LE(interval_width_residual(make_constant(0.0, 1.0), -1.0, 1.0), 1e-6);
}

TEST(Identities, IntervalWidthNeedsWeldedPair)
{
    EXPECT_THROW(interval_width_residual(make_constant(0.0, 1.0), -1.0, 0.5), InputError);
}

TEST(Identities, AppendixOnConstantDrivers)
{
    Driver d = make_constant(0.3, 1.0);
    EXPECT_LE(appendix_identity_1(d, -0.9), 1e-4);
    EXPECT_LE(appendix_identity_2(d, -0.9), 1e-4);
}

TEST(Identities, AppendixOnLinearDriverImprovesWithSamples)
{
    Driver d = make_piecewise_linear({{0.0, 0.0}, {0.5, 0.4}, {1.0, -0.1}});
    double c = appendix_identity_1(d, -0.7), f = appendix_identity_1(d, -0.7, {}, 2);
    EXPECT_LE(c, 1e-3);
    EXPECT_LT(f, c);
}

TEST(Identities, MaxTimeEqualityForConstant)
{
    auto v = max_time_check(make_constant(0.0, 1.0), {{-1.0, 1.0}, {-0.4, 0.4}});
    ASSERT_EQ(v.size(), 2u);
    for (const auto& e : v) {
        EXPECT_TRUE(e.ok);
        EXPECT_NEAR(e.tau, e.bound, 1e-12);
    }
}

TEST(Identities, FasterTimesBound)
{
    EXPECT_DOUBLE_EQ(faster_times_bound(1.0, 0.0).f, 0.25);
    FasterTimesBound b = faster_times_bound(1.0, 0.4);
    EXPECT_NEAR(b.f1, 0.240200, 1e-6);
    EXPECT_NEAR(b.f2, 0.249592, 1e-6);
    EXPECT_LE(b.f, 0.25);
    // f decreases as delta grows
    EXPECT_LT(faster_times_bound(1.0, 0.6).f, faster_times_bound(1.0, 0.2).f);
}

TEST(Identities, FasterTimesSweepHolds)
{
    auto s = faster_times_sweep(10, 5);
    ASSERT_EQ(s.size(), 10u);
    for (const auto& e : s) EXPECT_TRUE(e.ok) << e.seed << " " << e.tau << " " << e.bound;
}
