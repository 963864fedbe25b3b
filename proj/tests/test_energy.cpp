#include <cmath>

#include <gtest/gtest.h>

#include "loewner/energy.hpp"
#include "loewner/welding.hpp"

using namespace loewner;

TEST(Energy, PiecewiseLinearClosedForm)
{
    // slopes 2 and -1 over 0.5 each: 1/2 (4 * 0.5 + 1 * 0.5)
    Driver d = make_piecewise_linear({{0.0, 0.0}, {0.5, 1.0}, {1.0, 0.5}});
    EnergyReport r = loewner_energy(d);
    EXPECT_NEAR(r.total, 1.25, 1e-14);
    ASSERT_EQ(r.per_segment.size(), 2u);
    EXPECT_NEAR(loewner_energy(d, 0.25).total, 0.5, 1e-14);
    EXPECT_FALSE(r.infinite);
}

TEST(Energy, SqrtSegmentsAreInfinite)
{
    EnergyReport r = loewner_energy(reverse(make_sqrt_slit(0.3, 1.0)));
    EXPECT_TRUE(r.infinite);
    EXPECT_EQ(loewner_energy(make_constant(0.2, 1.0)).total, 0.0);
}

TEST(Energy, ZipperInitializerWeldsPairs)
{
    // Approximate: the rendered blocks are piecewise linear. Held past the horizon, the
    // residuals are small and shrink with finer rendering.
    PartitionWeldingProblem p{{{-0.5, 0.4}, {-1.0, 1.2}}};
    std::vector<double> worst;
    for (std::size_t steps : {64, 256}) {
        Driver d = zipper_initializer(p, steps, StepPolicy{2e-4});
        auto segs = d.segments();
        segs.push_back(Segment{0.05 * d.horizon(), Constant{d.final_value()}});
        Driver held(segs);
        Discretization D(held, StepPolicy{2e-4});
        double w = 0.0;
        for (auto [x, y] : p.pairs) w = std::max(w, std::abs(weld_partner(D, x) - y));
        worst.push_back(w);
    }
    EXPECT_LE(worst[0], 1e-2);
    EXPECT_LT(worst[1], worst[0]);
}

TEST(Energy, SinglePairHasZeroEnergy)
{
    MinimizationResult r = minimize_energy(PartitionWeldingProblem{{{-1.0, 1.0}}});
    EXPECT_LE(r.energy, 1e-3);
    EXPECT_LE(r.driver.sup_norm(), 1e-2);
    EXPECT_TRUE(r.converged);
}

TEST(Energy, TwoPairsDoNotExceedInitializer)
{
    MinimizeConfig cfg;
    cfg.penalties = {10.0, 1e3};
    PartitionWeldingProblem p{{{-0.5, 0.7}, {-1.1, 1.0}}};
    MinimizationResult r = minimize_energy(p, cfg);
    EXPECT_LE(r.energy, r.initial_energy + 1e-9);
    for (double e : r.welding_residuals) EXPECT_LE(e, 1e-2);
}

TEST(Energy, DriverFromKnotsSkipsEmptyPieces)
{
    Driver d = driver_from_knots({{0.0, 0.0}, {0.5, 1.0}, {0.5, 1.0}, {1.0, 0.0}});
    EXPECT_EQ(d.segments().size(), 2u);
    EXPECT_DOUBLE_EQ(d(0.5), 1.0);
}
