#include "climroom/error.hpp"
#include "climroom/psychro.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace climroom;
using namespace climroom::psychro;

namespace {

// Independent Magnus evaluation; values frozen from it.
constexpr double kPws0 = 610.94;
constexpr double kPws20 = 2333.4406231;
constexpr double kW26at65 = 0.0136811;
constexpr double kDew25at50 = 13.8576;

} // namespace

TEST(Psychro, SaturationPressureMatchesFrozenOracle)
{
    EXPECT_NEAR(saturation_vapor_pressure(0.0), kPws0, 1e-9);
    EXPECT_NEAR(saturation_vapor_pressure(0.0), 611.0, 1.0);
    EXPECT_NEAR(saturation_vapor_pressure(20.0), kPws20, 1e-6);
}

TEST(Psychro, SaturationPressureCloseToSteamTable)
{
    // 2339.3 Pa is the tabulated value over water at 20 C.
    EXPECT_NEAR(saturation_vapor_pressure(20.0) / 2339.3, 1.0, 0.004);
}

TEST(Psychro, SaturationPressureIncreasing)
{
    EXPECT_GT(saturation_vapor_pressure(25.0), saturation_vapor_pressure(20.0));
    for (double t = -60.0; t < 90.0; t += 0.5)
        EXPECT_LT(saturation_vapor_pressure(t), saturation_vapor_pressure(t + 0.5));
}

TEST(Psychro, SaturationPressureDomain)
{
    EXPECT_THROW(saturation_vapor_pressure(-60.1), DomainError);
    EXPECT_THROW(saturation_vapor_pressure(90.1), DomainError);
    EXPECT_NO_THROW(saturation_vapor_pressure(-60.0));
    EXPECT_NO_THROW(saturation_vapor_pressure(90.0));
}

TEST(Psychro, HumidityRatioAtDehumidificationThreshold)
{
    const double w = humidity_ratio_from_rh(26.0, 0.65, 101325.0);
    EXPECT_NEAR(w, kW26at65, 1e-7);
    EXPECT_NEAR(w, 0.01375, 0.0002);
}

TEST(Psychro, DryAirHasZeroHumidityRatio)
{
    for (double t : {-20.0, 0.0, 26.0, 45.0})
        for (double p : {80000.0, 101325.0}) EXPECT_EQ(humidity_ratio_from_rh(t, 0.0, p), 0.0);
}

TEST(Psychro, HumidityRatioRoundTrip)
{
    for (double t = -30.0; t <= 50.0; t += 5.0) {
        for (double r = 0.05; r <= 1.0; r += 0.05) {
            for (double p : {70000.0, 101325.0}) {
                const double w = humidity_ratio_from_rh(t, r, p);
                EXPECT_NEAR(rh_from_humidity_ratio(w, t, p), r, 1e-9);
                EXPECT_LE(w, saturation_humidity_ratio(t, p) + 1e-6);
                EXPECT_GE(w, 0.0);
            }
        }
    }
}

TEST(Psychro, HumidityRatioRejectsBadInput)
{
    EXPECT_THROW(humidity_ratio_from_rh(20.0, -0.01), DomainError);
    EXPECT_THROW(humidity_ratio_from_rh(20.0, 1.01), DomainError);
    EXPECT_THROW(humidity_ratio_from_rh(89.0, 1.0, 50000.0), DomainError);
}

TEST(Psychro, DewPoint)
{
    EXPECT_NEAR(dew_point(20.0, 1.0), 20.0, 1e-6);
    EXPECT_NEAR(dew_point(25.0, 0.5), kDew25at50, 1e-4);
    EXPECT_NEAR(dew_point(25.0, 0.5), 13.9, 0.3);
    double prev = -1e9;
    for (double r = 0.05; r <= 1.0; r += 0.05) {
        const double td = dew_point(25.0, r);
        EXPECT_GT(td, prev);
        prev = td;
    }
    EXPECT_THROW(dew_point(25.0, 0.0), DomainError);
    EXPECT_THROW(dew_point(25.0, 1.1), DomainError);
}

TEST(Psychro, DewPointInverse)
{
    for (double t = -10.0; t <= 45.0; t += 5.0)
        for (double r = 0.1; r <= 1.0; r += 0.1) EXPECT_NEAR(rh_from_dew_point(t, dew_point(t, r)), r, 1e-9);
}

TEST(Psychro, AirConstants)
{
    AirConstants air;
    EXPECT_DOUBLE_EQ(air.rho_air, 1.204);
    EXPECT_DOUBLE_EQ(air.c_p, 1006.0);
    EXPECT_DOUBLE_EQ(air.h_fg, 2.501e6);
    EXPECT_NO_THROW(air.validate());
    air.c_p = 0.0;
    EXPECT_THROW(air.validate(), ValidationError);
}

TEST(Psychro, MoistAirState)
{
    MoistAirState s{26.0, humidity_ratio_from_rh(26.0, 0.4), kStandardPressure};
    EXPECT_NEAR(s.relative_humidity(), 0.4, 1e-12);
}
