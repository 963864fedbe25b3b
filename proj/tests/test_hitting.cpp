#include <cmath>

#include <gtest/gtest.h>

#include "loewner/hitting.hpp"

using namespace loewner;

TEST(Hitting, ZeroDriverProfile)
{
    HittingProfile p = hitting_profile(make_constant(0.0, 1.0), 32);
    EXPECT_NEAR(p.a, 2.0, 1e-8);
    EXPECT_NEAR(p.b, 2.0, 1e-8);
    EXPECT_TRUE(p.a_resolved && p.b_resolved);
    for (auto [x, t] : p.right) EXPECT_NEAR(t, x * x / 4.0, 1e-10);
    for (auto [x, t] : p.left) EXPECT_NEAR(t, x * x / 4.0, 1e-10);
}

TEST(Hitting, InverseOfConstantDriver)
{
    HittingProfile p = hitting_profile(make_constant(0.3, 1.0), 16);
    for (double t : {0.01, 0.2, 0.64, 1.0}) {
        EXPECT_NEAR(inverse_hitting(p, t, Side::Right), 0.3 + 2.0 * std::sqrt(t), 1e-8);
        EXPECT_NEAR(inverse_hitting(p, t, Side::Left), 0.3 - 2.0 * std::sqrt(t), 1e-8);
    }
    EXPECT_THROW(inverse_hitting(p, 0.0, Side::Left), InputError);
    EXPECT_THROW(inverse_hitting(p, 1.5, Side::Left), InputError);
}

TEST(Hitting, LinearDriverRoundTrip)
{
    Driver d = make_piecewise_linear({{0.0, 0.0}, {0.5, 0.6}, {1.0, -0.2}});
    HittingProfile p = hitting_profile(d, 32);
    Discretization D(d);
    for (double t : {0.05, 0.3, 0.77, 0.99})
        for (Side s : {Side::Left, Side::Right}) EXPECT_NEAR(D.hitting_time(inverse_hitting(p, t, s)), t, 1e-8);
    EXPECT_LE(p.max_inversion, 1e-9);
}

TEST(Hitting, SlitEndpointsRatio)
{
    // Endpoints of the tilted slit are in ratio (1 - alpha) / alpha.
    for (double alpha : {0.25, 0.4}) {
        HittingProfile p = hitting_profile(reverse(make_sqrt_slit(alpha, 1.0)), 16);
        EXPECT_NEAR(p.a / p.b, (1.0 - alpha) / alpha, 1e-5) << alpha;
        EXPECT_NEAR(p.a * p.b, 4.0, 1e-5) << alpha;
    }
}

TEST(Hitting, LipschitzSharpOnConstants)
{
    std::vector<double> tg{0.1, 0.5, 1.0};
    double g = lipschitz_check(make_constant(0.0, 1.0), make_constant(0.2, 1.0), tg);
    EXPECT_NEAR(g, 0.2, 1e-9);
}

TEST(Hitting, SandwichHoldsForShiftedDriver)
{
    Driver d1 = make_piecewise_linear({{0.0, 0.0}, {1.0, 0.5}});
    Driver d2 = make_piecewise_linear({{0.0, 0.1}, {1.0, 0.4}});
    std::vector<double> grid;
    for (int k = 0; k < 20; ++k) grid.push_back(-2.0 + 4.0 * (k + 0.5) / 20.0);
    SandwichReport r = sandwich_check(d1, d2, grid);
    EXPECT_NEAR(r.delta, 0.1, 1e-12);
    EXPECT_EQ(r.violations, 0u);
    EXPECT_FALSE(r.rows.empty());
}

TEST(Hitting, DownwardDriverRejected)
{
    EXPECT_THROW(hitting_time(make_sqrt_slit(0.3, 1.0), 1.0), InputError);
    EXPECT_THROW(hitting_profile(make_sqrt_slit(0.3, 1.0), 8), InputError);
}
