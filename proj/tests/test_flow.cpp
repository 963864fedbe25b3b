#include <cmath>
#include <complex>

#include <gtest/gtest.h>

#include "loewner/flow.hpp"

using namespace loewner;

TEST(Flow, ConstantDriverClosedForm)
{
    Driver d = make_constant(0.5, 4.0);
    Discretization D(d);
    for (double x : {-3.0, -1.0, 0.4, 0.7, 2.0, 4.0}) {
        double want = (x - 0.5) * (x - 0.5) / 4.0;
        EXPECT_NEAR(D.hitting_time(x), want, 1e-12 * std::max(1.0, want)) << x;
    }
    BoundaryTrajectory tr = D.evolve(2.5);
    EXPECT_TRUE(tr.welded());
    EXPECT_NEAR(tr.at(0.5), 0.5 + std::sqrt(4.0 - 2.0), 1e-12);
}

TEST(Flow, PointsBeyondReachSurvive)
{
    Driver d = make_constant(0.0, 1.0);
    Discretization D(d);
    EXPECT_TRUE(std::isinf(D.hitting_time(2.5)));
    BoundaryTrajectory tr = D.evolve(2.5);
    EXPECT_FALSE(tr.welded());
    EXPECT_NEAR(tr.x_end, std::sqrt(6.25 - 4.0), 1e-12);
}

TEST(Flow, LinearDriverMatchesRk4)
{
    Driver d = make_piecewise_linear({{0.0, 0.0}, {1.0, 0.8}});
    Discretization D(d);
    for (double x : {-1.2, -0.5, 0.6, 1.5}) {
        double a = D.hitting_time(x);
        double b = rk4_oracle(d, x, 1e-5).tau;
        EXPECT_NEAR(a, b, 1e-4) << x;
    }
}

TEST(Flow, HitSubTime)
{
    // Swept points hit immediately; otherwise the gap closes after u^2 / 4.
    EXPECT_NEAR(hit_sub_time(0.3, 0.1, 0.1), 0.01, 1e-15);
    EXPECT_EQ(hit_sub_time(0.3, 0.5, 0.1), 0.0);
}

TEST(Flow, InteriorPointsStayInUpperHalfPlane)
{
    Driver d = make_piecewise_linear({{0.0, 0.0}, {1.0, 0.5}});
    auto path = evolve_interior(d, {0.2, 1.5});
    ASSERT_FALSE(path.empty());
    for (auto& [t, z] : path) EXPECT_GE(z.imag(), 0.0) << t;
    EXPECT_THROW(evolve_interior(d, {0.2, 0.0}), InputError);
}

TEST(Flow, RejectsBadPolicy)
{
    Driver d = make_constant(0.0, 1.0);
    EXPECT_THROW(Discretization(d, StepPolicy{0.0}), InputError);
    EXPECT_THROW(evolve_point(d, 0.0), InputError);
    EXPECT_THROW(evolve_point(reverse(d), 1.0), InputError);
}
