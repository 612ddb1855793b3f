#include "climroom/solar.hpp"
#include "climroom/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace climroom;
using namespace climroom::solar;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct NoaaPosition {
    double altitude;
    double azimuth;
};

// NOAA solar calculator (Meeus low-precision series) for a non-leap year,
// geometric altitude without refraction.
NoaaPosition noaa_position(double lat, double lon, double tz, int doy, double hour)
{
    const double jd = 2451910.5 + (doy - 1) + (hour - tz) / 24.0;
    const double jc = (jd - 2451545.0) / 36525.0;
    const double l0 = std::fmod(280.46646 + jc * (36000.76983 + jc * 0.0003032), 360.0);
    const double m = 357.52911 + jc * (35999.05029 - 0.0001537 * jc);
    const double e = 0.016708634 - jc * (0.000042037 + 0.0000001267 * jc);
    const double c = std::sin(m * kDeg) * (1.914602 - jc * (0.004817 + 0.000014 * jc)) +
                     std::sin(2 * m * kDeg) * (0.019993 - 0.000101 * jc) + std::sin(3 * m * kDeg) * 0.000289;
    const double true_long = l0 + c;
    const double omega = 125.04 - 1934.136 * jc;
    const double app_long = true_long - 0.00569 - 0.00478 * std::sin(omega * kDeg);
    const double mean_obliq = 23.0 + (26.0 + (21.448 - jc * (46.815 + jc * (0.00059 - jc * 0.001813))) / 60.0) / 60.0;
    const double obliq = mean_obliq + 0.00256 * std::cos(omega * kDeg);
    const double decl = std::asin(std::sin(obliq * kDeg) * std::sin(app_long * kDeg));
    const double y = std::pow(std::tan(obliq * kDeg / 2.0), 2);
    const double eot = 4.0 / kDeg *
                       (y * std::sin(2 * l0 * kDeg) - 2 * e * std::sin(m * kDeg) +
                        4 * e * y * std::sin(m * kDeg) * std::cos(2 * l0 * kDeg) -
                        0.5 * y * y * std::sin(4 * l0 * kDeg) - 1.25 * e * e * std::sin(2 * m * kDeg));
    const double tst = std::fmod(hour * 60.0 + eot + 4.0 * lon - 60.0 * tz + 2880.0, 1440.0);
    const double ha = tst / 4.0 < 0 ? tst / 4.0 + 180.0 : tst / 4.0 - 180.0;
    const double phi = lat * kDeg;
    const double cos_zen = std::sin(phi) * std::sin(decl) + std::cos(phi) * std::cos(decl) * std::cos(ha * kDeg);
    const double zen = std::acos(std::clamp(cos_zen, -1.0, 1.0));
    const double a = std::acos(std::clamp((std::sin(phi) * std::cos(zen) - std::sin(decl)) / (std::cos(phi) * std::sin(zen)),
                                          -1.0, 1.0)) / kDeg;
    const double az = ha > 0 ? std::fmod(a + 180.0, 360.0) : std::fmod(540.0 - a, 360.0);
    return {90.0 - zen / kDeg, az};
}

double angle_diff(double a, double b)
{
    double d = std::fmod(a - b + 540.0, 360.0) - 180.0;
    return std::abs(d);
}

// Angle between two sun directions, degrees.
double separation(double alt1, double az1, double alt2, double az2)
{
    const double c = std::sin(alt1 * kDeg) * std::sin(alt2 * kDeg) +
                     std::cos(alt1 * kDeg) * std::cos(alt2 * kDeg) * std::cos((az1 - az2) * kDeg);
    return std::acos(std::clamp(c, -1.0, 1.0)) / kDeg;
}

// Ray-sampling shade oracle: a grid of points on the window, each tested
// by intersecting the ray toward the sun with the overhang plate.
double sampled_shade(double altitude, double relative_azimuth, const WindowGeometry& win, const Overhang& oh)
{
    const double alt = altitude * kDeg;
    const double rel = relative_azimuth * kDeg;
    // Facade frame: x along the wall, y outward, z up.
    const double sx = std::cos(alt) * std::sin(rel);
    const double sy = std::cos(alt) * std::cos(rel);
    const double sz = std::sin(alt);
    if (sy <= 0.0 || sz <= 0.0) return 0.0;
    const double plate_z = win.height + oh.gap_above_window;
    const double plate_half_width = win.width / 2.0 + 100.0;
    constexpr int kCols = 25, kRows = 40;
    int shaded = 0;
    for (int i = 0; i < kCols; ++i) {
        for (int j = 0; j < kRows; ++j) {
            const double px = -win.width / 2.0 + (i + 0.5) * win.width / kCols;
            const double pz = (j + 0.5) * win.height / kRows;
            const double t = (plate_z - pz) / sz;
            const double hx = px + t * sx;
            const double hy = t * sy;
            if (hy >= 0.0 && hy <= oh.depth && std::abs(hx) <= plate_half_width) ++shaded;
        }
    }
    return static_cast<double>(shaded) / (kCols * kRows);
}

} // namespace

TEST(SolarPosition, EquatorEquinoxNoonIsOverhead)
{
    // Equinox near day 80; with longitude 0 and tz 0, noon shifted by the
    // equation of time, so scan the day for the maximum.
    double best = -90.0;
    for (double h = 11.0; h <= 13.0; h += 0.01) best = std::max(best, solar_position(0.0, 0.0, 0.0, 80, h).altitude);
    EXPECT_NEAR(best, 90.0, 1.0);
}

TEST(SolarPosition, MidnightIsDark)
{
    for (double lat : {-60.0, -20.0, 0.0, 23.0, 45.0})
        for (int doy : {1, 80, 172, 266, 355}) {
            const double lon = 75.0;
            EXPECT_LT(solar_position(lat, lon, 5.0, doy, 0.0).altitude, 0.0) << lat << " " << doy;
        }
}

TEST(SolarPosition, MatchesNoaaOracle)
{
    std::mt19937 rng(20240601);
    std::uniform_real_distribution<double> lat_d(-60.0, 60.0), lon_d(-180.0, 180.0), hour_d(0.0, 24.0);
    std::uniform_int_distribution<int> doy_d(1, 365);
    int checked = 0;
    while (checked < 20) {
        const double lat = lat_d(rng);
        const double lon = lon_d(rng);
        const double tz = std::round(lon / 15.0);
        const int doy = doy_d(rng);
        const double hour = hour_d(rng);
        const auto ours = solar_position(lat, lon, tz, doy, hour);
        const auto ref = noaa_position(lat, lon, tz, doy, hour);
        EXPECT_NEAR(ours.altitude, ref.altitude, 0.5) << lat << "," << lon << " d" << doy << " h" << hour;
        EXPECT_LT(separation(ours.altitude, ours.azimuth, ref.altitude, ref.azimuth), 0.5)
            << lat << "," << lon << " d" << doy << " h" << hour;
        if (ref.altitude < 60.0) EXPECT_LT(angle_diff(ours.azimuth, ref.azimuth), 0.5);
        ++checked;
    }
}

TEST(SolarPosition, RangesHold)
{
    for (int doy = 1; doy <= 365; doy += 7)
        for (double h = 0.0; h < 24.0; h += 0.5) {
            const auto p = solar_position(34.0, 74.8, 5.5, doy, h);
            EXPECT_GE(p.altitude, -90.0);
            EXPECT_LE(p.altitude, 90.0);
            EXPECT_GE(p.azimuth, 0.0);
            EXPECT_LT(p.azimuth, 360.0);
            EXPECT_GE(p.apparent_solar_time, 0.0);
            EXPECT_LT(p.apparent_solar_time, 24.0);
        }
}

TEST(Brl, FrozenOracleValues)
{
    EXPECT_NEAR(brl_diffuse_fraction(0.0, 12.0, 45.0, 0.0, 0.0), 0.99640, 1e-5);
    EXPECT_NEAR(brl_diffuse_fraction(0.8, 12.0, 60.0, 0.75, 0.8), 0.12603, 1e-5);
}

TEST(Brl, OvercastAndClear)
{
    EXPECT_GT(brl_diffuse_fraction(0.02, 12.0, 40.0, 0.05, 0.05), 0.9);
    EXPECT_LT(brl_diffuse_fraction(0.8, 12.0, 60.0, 0.75, 0.8), 0.35);
}

TEST(Brl, DecreasingInClearness)
{
    double prev = 2.0;
    for (double kt = 0.0; kt <= 1.2; kt += 0.05) {
        const double d = brl_diffuse_fraction(kt, 10.0, 35.0, 0.5, 0.5);
        EXPECT_LT(d, prev);
        EXPECT_GE(d, 0.0);
        EXPECT_LE(d, 1.0);
        prev = d;
    }
}

TEST(SplitGhi, NightIsZero)
{
    SolarPosition night{-10.0, 0.0, 0.0, 0.0};
    const auto s = split_ghi(0.0, night, {});
    EXPECT_EQ(s.dni, 0.0);
    EXPECT_EQ(s.dhi, 0.0);
    SolarPosition day{40.0, 150.0, 11.0, 0.0};
    const auto z = split_ghi(0.0, day, {});
    EXPECT_EQ(z.dni, 0.0);
    EXPECT_EQ(z.dhi, 0.0);
}

TEST(SplitGhi, LowSunGuard)
{
    SolarPosition low{0.5, 100.0, 6.5, 0.0};
    const auto s = split_ghi(50.0, low, {0.5, 0.5, 0.5});
    EXPECT_EQ(s.dni, 0.0);
    EXPECT_EQ(s.dhi, 50.0);
}

TEST(SplitGhi, ReconstructionOnSyntheticYear)
{
    const auto year = synthetic::generate_year(synthetic::demo_climates()[4]);
    const auto predictors = brl_predictors(year);
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, kHoursPerYear - 1);
    int checked = 0;
    while (checked < 200) {
        const auto i = pick(rng);
        const auto& r = year.records[i];
        const auto pos = solar_position(year.location, r.time);
        if (pos.altitude <= 0.0 || r.ghi <= 0.0) continue;
        const auto s = split_ghi(r.ghi, pos, predictors[i]);
        EXPECT_NEAR(s.dhi + s.dni * std::sin(pos.altitude * kDeg), r.ghi, 1.0);
        EXPECT_GE(s.diffuse_fraction, 0.0);
        EXPECT_LE(s.diffuse_fraction, 1.0);
        ++checked;
    }
    for (std::size_t i = 0; i < kHoursPerYear; ++i) {
        const auto& r = year.records[i];
        const auto pos = solar_position(year.location, r.time);
        if (pos.altitude > 0.0) EXPECT_NEAR(r.dhi + r.dni * std::sin(pos.altitude * kDeg), r.ghi, 1.0);
    }
}

TEST(Incident, SunBehindSurfaceHasNoBeam)
{
    SolarPosition pos{30.0, 180.0, 12.0, 0.0};
    IrradianceSplit s{600.0, 700.0, 250.0, 0.4, 0.6};
    const auto c = incident_components(s, pos, {0.0, 90.0}, 0.2);
    EXPECT_EQ(c.beam, 0.0);
    EXPECT_GT(c.sky_diffuse, 0.0);
}

TEST(Incident, HorizontalSurfaceSeesGhi)
{
    SolarPosition pos{50.0, 160.0, 12.0, 0.0};
    const double dni = 600.0, dhi = 150.0;
    const double ghi = dhi + dni * std::sin(50.0 * kDeg);
    IrradianceSplit s{ghi, dni, dhi, dhi / ghi, 0.6};
    EXPECT_NEAR(incident_on_surface(s, pos, {0.0, 0.0}, 0.2), ghi, 1.0);
}

TEST(Incident, VerticalIsotropicOnly)
{
    SolarPosition pos{50.0, 160.0, 12.0, 0.0};
    IrradianceSplit s{300.0, 0.0, 300.0, 1.0, 0.3};
    EXPECT_NEAR(incident_on_surface(s, pos, {90.0, 90.0}, 0.2), 300.0 / 2 + 300.0 * 0.2 / 2, 1e-9);
}

TEST(Overhang, ZeroDepthAndOverhead)
{
    WindowGeometry w{1.5, 1.0, 180.0};
    EXPECT_EQ(overhang_shaded_fraction({40.0, 180.0, 12.0, 0.0}, w, {0.0, 0.0}), 0.0);
    EXPECT_EQ(overhang_shaded_fraction({90.0, 180.0, 12.0, 0.0}, w, {0.2, 0.1}), 1.0);
    EXPECT_EQ(overhang_shaded_fraction({40.0, 0.0, 12.0, 0.0}, w, {0.6, 0.0}), 0.0);
}

TEST(Overhang, MatchesRaySamplingOracle)
{
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> alt_d(5.0, 85.0), rel_d(-80.0, 80.0), depth_d(0.2, 1.0), gap_d(0.0, 0.4);
    for (int k = 0; k < 10; ++k) {
        WindowGeometry w{1.5, 1.0, 90.0};
        const Overhang oh{depth_d(rng), gap_d(rng)};
        const double alt = alt_d(rng);
        const double rel = rel_d(rng);
        SolarPosition pos{alt, std::fmod(w.azimuth + rel + 360.0, 360.0), 12.0, 0.0};
        EXPECT_NEAR(overhang_shaded_fraction(pos, w, oh), sampled_shade(alt, rel, w, oh), 0.02)
            << "alt " << alt << " rel " << rel << " depth " << oh.depth << " gap " << oh.gap_above_window;
    }
}
