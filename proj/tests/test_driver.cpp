#include <cmath>

#include <gtest/gtest.h>

#include "loewner/driver.hpp"

using namespace loewner;

TEST(Driver, ConstantAndLinearValues)
{
    Driver c = make_constant(0.4, 2.0);
    EXPECT_DOUBLE_EQ(c(0.0), 0.4);
    EXPECT_DOUBLE_EQ(c(1.7), 0.4);
    EXPECT_DOUBLE_EQ(c.horizon(), 2.0);

    Driver l = make_piecewise_linear({{0.0, 0.0}, {1.0, 2.0}, {3.0, 0.0}});
    EXPECT_DOUBLE_EQ(l(0.5), 1.0);
    EXPECT_DOUBLE_EQ(l(2.0), 1.0);
    EXPECT_DOUBLE_EQ(l(3.0), 0.0);
    EXPECT_DOUBLE_EQ(l.sup_norm(), 2.0);
}

TEST(Driver, RejectsBadInput)
{
    EXPECT_THROW(make_constant(0.0, 0.0), InputError);
    EXPECT_THROW(make_piecewise_linear({{0.0, 0.0}}), InputError);
    EXPECT_THROW(make_piecewise_linear({{0.0, 0.0}, {0.0, 1.0}}), InputError);
    EXPECT_THROW(make_piecewise_linear({{0.1, 0.0}, {1.0, 1.0}}), InputError);
    EXPECT_THROW(Driver({Segment{1.0, Constant{0.0}}, Segment{1.0, Constant{1.0}}}), InputError);
    EXPECT_THROW(Driver(2.0, {Segment{1.0, Constant{0.0}}}, Orientation::Upward), InputError);
    EXPECT_THROW(Driver({Segment{1.0, Sampled{{0.0, 0.5}, {0.0, 1.0}}}}), InputError);
}

TEST(Driver, SqrtSlitCoefficient)
{
    EXPECT_NEAR(sqrt_slit_coefficient(0.5), 0.0, 1e-15);
    // alpha = 1/3: 2 (1/3) / sqrt(2/9) = sqrt 2
    EXPECT_NEAR(sqrt_slit_coefficient(1.0 / 3.0), std::sqrt(2.0), 1e-14);
    Driver d = make_sqrt_slit(1.0 / 3.0, 1.0);
    EXPECT_EQ(d.orientation(), Orientation::Downward);
    EXPECT_NEAR(d(0.25), std::sqrt(2.0) * 0.5, 1e-14);
}

TEST(Driver, ReverseIsInvolutionUpToShift)
{
    Driver d = make_piecewise_linear({{0.0, 0.3}, {0.4, -0.2}, {1.0, 0.5}});
    Driver r = reverse(d);
    EXPECT_EQ(r.orientation(), Orientation::Downward);
    for (double t : {0.0, 0.1, 0.5, 0.9, 1.0}) EXPECT_NEAR(r(t), d(1.0 - t) - d(1.0), 1e-14);
    Driver rr = reverse(r);
    for (double t : {0.0, 0.3, 0.7, 1.0}) EXPECT_NEAR(rr(t), d(t) - d(0.0), 1e-14);

    Driver s = reverse(make_sqrt_slit(0.25, 2.0));
    EXPECT_NEAR(s(0.0), 0.0, 1e-14);
    double C = sqrt_slit_coefficient(0.25);
    for (double t : {0.5, 1.0, 1.5}) EXPECT_NEAR(s(t), C * (std::sqrt(2.0 - t) - std::sqrt(2.0)), 1e-13);
}

TEST(Driver, ShiftedAndSupDistance)
{
    Driver d = make_piecewise_linear({{0.0, 0.0}, {1.0, 1.0}});
    Driver s = shifted(d, 0.25);
    EXPECT_DOUBLE_EQ(s(0.5), 0.75);
    EXPECT_NEAR(sup_distance(d, s), 0.25, 1e-15);
}

TEST(Driver, RandomPiecewiseLinearIsSeeded)
{
    Driver a = make_random_piecewise_linear(7, 8, 1.0, 0.5);
    Driver b = make_random_piecewise_linear(7, 8, 1.0, 0.5);
    Driver c = make_random_piecewise_linear(8, 8, 1.0, 0.5);
    EXPECT_EQ(sup_distance(a, b), 0.0);
    EXPECT_GT(sup_distance(a, c), 0.0);
    EXPECT_EQ(a(0.0), 0.0);
    EXPECT_LE(a.sup_norm(), 0.5);
}

TEST(Driver, NonUniformityPair)
{
    Lemma36Pair p = make_lemma36_pair(0.05);
    EXPECT_NEAR(sup_distance(p.xi, p.xi_tilde), 0.05, 1e-14);
    EXPECT_DOUBLE_EQ(p.y0, 0.1);
    EXPECT_THROW(make_lemma36_pair(0.5), InputError);
}

TEST(Driver, PartitionValidation)
{
    EXPECT_NO_THROW((PartitionWeldingProblem{{{-1.0, 1.0}, {-2.0, 3.0}}}.validate()));
    EXPECT_THROW((PartitionWeldingProblem{{{-1.0, 1.0}, {-0.5, 3.0}}}.validate()), InputError);
    EXPECT_THROW((PartitionWeldingProblem{{{1.0, 2.0}}}.validate()), InputError);
    EXPECT_THROW(PartitionWeldingProblem{}.validate(), InputError);
}
