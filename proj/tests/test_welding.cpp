#include <cmath>

#include <gtest/gtest.h>

#include "loewner/welding.hpp"

using namespace loewner;

TEST(Welding, ZeroDriverIsReflection)
{
    Welding w = compute_welding(make_constant(0.0, 1.0), 32);
    ASSERT_EQ(w.samples.size(), 33u);
    for (auto [x, y] : w.samples) EXPECT_NEAR(y, -x, 1e-6);
    EXPECT_LE(w.max_residual, 1e-9);
}

TEST(Welding, ConstantDriverShifted)
{
    Welding w = compute_welding(make_constant(0.5, 1.0), 16);
    for (auto [x, y] : w.samples) EXPECT_NEAR(w.origin + y, 1.0 - (w.origin + x), 1e-6);
}

TEST(Welding, PartnerOfConstantDriver)
{
    Driver d = make_constant(0.2, 1.0);
    Discretization D(d);
    EXPECT_NEAR(weld_partner(D, -0.6), 1.0, 1e-9);
    EXPECT_TRUE(std::isinf(weld_partner(D, -3.0)));
}

TEST(Welding, Distance)
{
    Welding a = compute_welding(make_constant(0.0, 1.0), 16);
    Welding b = compute_welding(make_piecewise_linear({{0.0, 0.0}, {1.0, 0.3}}), 16);
    EXPECT_EQ(welding_distance(a, a), 0.0);
    EXPECT_GT(welding_distance(a, b), 0.0);
    // centred coordinates: a constant shift of the driver does not move the welding
    Welding c = compute_welding(make_constant(0.4, 1.0), 16);
    EXPECT_LE(welding_distance(a, c), 1e-6);
}

TEST(Welding, PerturbationModes)
{
    Driver d = make_constant(0.0, 1.0);
    for (PerturbationMode m : {PerturbationMode::Sinusoid, PerturbationMode::Constant,
                               PerturbationMode::RandomPiecewiseLinear}) {
        EXPECT_NEAR(sup_distance(perturb(d, 0.1, m, 3), d), 0.1, 1e-6) << to_string(m);
        EXPECT_EQ(perturbation_mode_from_string(to_string(m)), m);
    }
    EXPECT_THROW(perturbation_mode_from_string("square"), InputError);
}

TEST(Welding, EndpointGapsBoundedByDelta)
{
    auto rows = driver_perturbation_experiment(make_constant(0.0, 1.0), {0.1, 0.05}, PerturbationMode::Sinusoid, 32);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        EXPECT_LE(r.da, r.delta + 1e-6);
        EXPECT_LE(r.db, r.delta + 1e-6);
    }
    EXPECT_LT(rows[1].distance, rows[0].distance);
}
