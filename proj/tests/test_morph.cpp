#include "climroom/error.hpp"
#include "climroom/morph.hpp"
#include "climroom/psychro.hpp"
#include "climroom/synthetic.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace climroom;
using namespace climroom::morph;

namespace {

const WeatherYear& baseline()
{
    static const WeatherYear y = synthetic::generate_year(synthetic::demo_climates()[6]);
    return y;
}

MonthlyShifts uniform_shift(double dt)
{
    MonthlyShifts s{};
    for (auto& m : s) m.d_temperature = dt;
    return s;
}

std::vector<GcmSiteShifts> january_ensemble(const std::vector<double>& shifts)
{
    std::vector<GcmSiteShifts> out;
    for (std::size_t i = 0; i < shifts.size(); ++i) {
        GcmSiteShifts g;
        g.gcm_id = std::string("M") + static_cast<char>('A' + i);
        for (auto& m : g.months) m.d_temperature = shifts[i];
        g.months[0].humidity_scale = 1.0 + 0.01 * static_cast<double>(i);
        out.push_back(g);
    }
    return out;
}

std::string shift_csv(int points, int skip_month = 0, double q_scale = 1.05)
{
    std::ostringstream out;
    out << kShiftFileHeader << '\n';
    for (int p = 0; p < points; ++p)
        for (int m = 1; m <= 12; ++m) {
            if (m == skip_month) continue;
            out << "G1,RCP4.5,2030s," << 20 + p << ",75," << m << ",1.5,," << q_scale << ",0.99,1.0\n";
        }
    return out.str();
}

double variance(const WeatherYear& y, int month)
{
    const double mean = monthly_mean(y, WeatherField::dry_bulb, month);
    double s = 0.0;
    const auto b = first_hour_of_month(month);
    for (std::size_t i = b; i < b + hours_in_month(month); ++i) s += std::pow(y.records[i].dry_bulb - mean, 2);
    return s / static_cast<double>(hours_in_month(month));
}

} // namespace

TEST(Labels, ParseAndPrint)
{
    EXPECT_EQ(parse_scenario("RCP4.5"), Scenario::rcp45);
    EXPECT_EQ(parse_scenario("RCP8.5"), Scenario::rcp85);
    EXPECT_THROW(parse_scenario("RCP6.0"), ValidationError);
    EXPECT_EQ(to_string(Period::p2060s), "2060s");
    EXPECT_EQ(parse_class_kind("max"), ClassKind::max);
    EXPECT_THROW(parse_period("2100s"), ValidationError);
}

TEST(ModelClasses, PublishedJanuaryExample)
{
    const auto g = january_ensemble({0.71, 0.86, 1.37, 1.49, 1.62, 1.63});
    const auto c = build_model_classes(g);
    EXPECT_EQ(c.min.months[0].d_temperature, 0.71);
    EXPECT_EQ(c.median.months[0].d_temperature, 1.43);
    EXPECT_EQ(c.max.months[0].d_temperature, 1.63);
}

TEST(ModelClasses, IdenticalShifts)
{
    const double s = 0.123456789012345678;
    const auto c = build_model_classes(january_ensemble({s, s, s, s}));
    for (int m = 0; m < 12; ++m) {
        EXPECT_EQ(c.min.months[m].d_temperature, s);
        EXPECT_EQ(c.median.months[m].d_temperature, s);
        EXPECT_EQ(c.max.months[m].d_temperature, s);
    }
}

TEST(ModelClasses, OddCountMedian)
{
    const auto c = build_model_classes(january_ensemble({1.0, 2.0, 4.0}));
    EXPECT_EQ(c.median.months[0].d_temperature, 2.0);
    EXPECT_EQ(c.median.source_gcm[0], "MB");
    EXPECT_DOUBLE_EQ(c.median.months[0].humidity_scale, 1.01);
}

TEST(ModelClasses, CompanionTieGoesToSmallestId)
{
    // Median 2.0 is equidistant from 1.0 (MB) and 3.0 (MC).
    const auto c = build_model_classes(january_ensemble({0.0, 1.0, 3.0, 4.0}));
    EXPECT_EQ(c.median.months[0].d_temperature, 2.0);
    EXPECT_EQ(c.median.source_gcm[0], "MB");
}

TEST(ModelClasses, OrderedEveryMonth)
{
    const auto tables = synthetic::generate_shift_tables(Scenario::rcp85, Period::p2090s);
    std::vector<GcmSiteShifts> site;
    for (const auto& t : tables) site.push_back(localize(t, 28.61, 77.21));
    const auto c = build_model_classes(site);
    for (int m = 0; m < 12; ++m) {
        EXPECT_LE(c.min.months[m].d_temperature, c.median.months[m].d_temperature);
        EXPECT_LE(c.median.months[m].d_temperature, c.max.months[m].d_temperature);
    }
    EXPECT_THROW(build_model_classes(std::span(site).first(1)), DomainError);
}

TEST(Idw, CoincidentPoint)
{
    const std::vector<GridValue> g{{20.0, 75.0, 3.2}, {22.5, 75.0, 1.0}, {20.0, 77.5, 5.0}};
    EXPECT_EQ(idw_interpolate(g, 20.0, 75.0), 3.2);
    EXPECT_EQ(idw_interpolate(g, 20.001, 75.001), 3.2);
}

TEST(Idw, EquidistantPointsAverage)
{
    const std::vector<GridValue> g{{0.0, 10.0, 1.0}, {0.0, 12.0, 3.0}};
    EXPECT_NEAR(idw_interpolate(g, 0.0, 11.0), 2.0, 1e-12);
}

TEST(Idw, ConvexCombination)
{
    const auto tables = synthetic::generate_shift_tables(Scenario::rcp45, Period::p2030s);
    std::vector<GridValue> g;
    for (const auto& p : tables[0].grid) g.push_back({p.latitude, p.longitude, p.months[5].d_temperature});
    double lo = 1e9, hi = -1e9;
    for (const auto& v : g) lo = std::min(lo, v.value), hi = std::max(hi, v.value);
    for (double lat = 6.0; lat < 40.0; lat += 3.3)
        for (double lon = 66.0; lon < 95.0; lon += 4.1) {
            const double v = idw_interpolate(g, lat, lon);
            EXPECT_GE(v, lo - 1e-12);
            EXPECT_LE(v, hi + 1e-12);
        }
    EXPECT_THROW(idw_interpolate({}, 0.0, 0.0), DomainError);
}

TEST(Idw, GreatCircle)
{
    EXPECT_NEAR(great_circle_km(0.0, 0.0, 0.0, 1.0), 6371.0 * std::numbers::pi / 180.0, 1e-9);
}

TEST(ShiftFile, ValidFile)
{
    std::istringstream in(shift_csv(4));
    const auto t = ingest_shift_file(in);
    EXPECT_EQ(t.gcm_id, "G1");
    EXPECT_EQ(t.grid.size(), 4u);
    EXPECT_EQ(t.rows_per_variable(), 48u);
    EXPECT_EQ(t.grid[0].months[6].alpha, 0.0);
    EXPECT_DOUBLE_EQ(t.grid[0].months[6].humidity_scale, 1.05);
}

TEST(ShiftFile, RoundTrip)
{
    const auto t = synthetic::generate_shift_tables(Scenario::rcp45, Period::p2060s)[2];
    std::ostringstream out;
    write_shift_file(out, t);
    std::istringstream in(out.str());
    const auto back = ingest_shift_file(in);
    ASSERT_EQ(back.grid.size(), t.grid.size());
    for (std::size_t i = 0; i < t.grid.size(); ++i) EXPECT_EQ(back.grid[i].months, t.grid[i].months);
}

TEST(ShiftFile, NegativeScaleRejected)
{
    std::istringstream in(shift_csv(2, 0, -0.5));
    EXPECT_THROW(ingest_shift_file(in), ValidationError);
}

TEST(ShiftFile, MissingMonthNamed)
{
    std::istringstream in(shift_csv(2, 7));
    try {
        ingest_shift_file(in);
        FAIL() << "expected StructuralError";
    } catch (const StructuralError& e) {
        EXPECT_NE(std::string(e.what()).find("month 7"), std::string::npos) << e.what();
    }
}

TEST(Morph, IdentityReturnsInput)
{
    const auto r = morph_year(baseline(), MonthlyShifts{});
    EXPECT_EQ(r.saturation_clamps, 0u);
    for (std::size_t i = 0; i < kHoursPerYear; ++i) {
        const auto& a = baseline().records[i];
        const auto& b = r.year.records[i];
        ASSERT_EQ(a.dry_bulb, b.dry_bulb);
        ASSERT_EQ(a.dew_point, b.dew_point);
        ASSERT_EQ(a.rel_humidity, b.rel_humidity);
        ASSERT_EQ(a.ghi, b.ghi);
        ASSERT_EQ(a.dni, b.dni);
        ASSERT_EQ(a.dhi, b.dhi);
        ASSERT_EQ(a.wind_speed, b.wind_speed);
    }
}

TEST(Morph, JanuaryShiftKeepsAnomalies)
{
    MonthlyShifts s{};
    s[0].d_temperature = 1.43;
    const auto r = morph_year(baseline(), s);
    EXPECT_NEAR(monthly_mean(r.year, WeatherField::dry_bulb, 1) - monthly_mean(baseline(), WeatherField::dry_bulb, 1),
                1.43, 1e-9);
    const double mb = monthly_mean(baseline(), WeatherField::dry_bulb, 1);
    const double mf = monthly_mean(r.year, WeatherField::dry_bulb, 1);
    for (std::size_t i = 0; i < 744; ++i)
        EXPECT_NEAR(r.year.records[i].dry_bulb - mf, baseline().records[i].dry_bulb - mb, 1e-9);
    EXPECT_EQ(r.year.records[800].dry_bulb, baseline().records[800].dry_bulb);
}

TEST(Morph, StretchOnSinusoidalMonth)
{
    auto y = synthetic::constant_year(20.0, 40.0);
    for (std::size_t i = 0; i < kHoursPerYear; ++i)
        y.records[i].dry_bulb = 20.0 + 5.0 * std::sin(2.0 * std::numbers::pi * static_cast<double>(i) / 24.0);
    for (auto& r : y.records) r.dew_point = psychro::dew_point(r.dry_bulb, 0.4);
    MonthlyShifts s{};
    for (auto& m : s) m.alpha = 0.1;
    const auto r = morph_year(y, s);
    for (int m = 1; m <= 12; ++m) {
        EXPECT_NEAR(monthly_mean(r.year, WeatherField::dry_bulb, m), monthly_mean(y, WeatherField::dry_bulb, m), 1e-9);
        EXPECT_GT(variance(r.year, m), variance(y, m));
        EXPECT_NEAR(variance(r.year, m), 1.21 * variance(y, m), 1e-9);
    }
}

TEST(Morph, HumidityScaledAndClamped)
{
    MonthlyShifts s{};
    for (auto& m : s) m.humidity_scale = 1.1;
    const auto r = morph_year(baseline(), s);
    std::size_t clamped = 0;
    for (std::size_t i = 0; i < kHoursPerYear; ++i) {
        const auto& a = baseline().records[i];
        const auto& b = r.year.records[i];
        const double w_sat = psychro::saturation_humidity_ratio(b.dry_bulb, b.pressure);
        const double expected = std::min(a.humidity_ratio() * 1.1, w_sat);
        if (a.humidity_ratio() * 1.1 > w_sat) ++clamped;
        EXPECT_NEAR(b.humidity_ratio(), expected, 1e-9);
        EXPECT_LE(b.dew_point, b.dry_bulb + 1e-9);
    }
    EXPECT_EQ(r.saturation_clamps, clamped);
}

TEST(Morph, SaturationClampCounted)
{
    const auto y = synthetic::constant_year(20.0, 95.0);
    MonthlyShifts s{};
    s[2].humidity_scale = 1.2;
    const auto r = morph_year(y, s);
    EXPECT_EQ(r.saturation_clamps, hours_in_month(3));
    EXPECT_NEAR(r.year.records[first_hour_of_month(3)].rel_humidity, 100.0, 1e-9);
}

TEST(Morph, GhiAndWindScaled)
{
    MonthlyShifts s{};
    for (auto& m : s) {
        m.ghi_scale = 0.9;
        m.wind_scale = 1.2;
    }
    const auto r = morph_year(baseline(), s);
    for (std::size_t i = 0; i < kHoursPerYear; ++i) {
        EXPECT_NEAR(r.year.records[i].ghi, 0.9 * baseline().records[i].ghi, 1e-9);
        EXPECT_NEAR(r.year.records[i].wind_speed, 1.2 * baseline().records[i].wind_speed, 1e-12);
    }
    EXPECT_NO_THROW(r.year.validate());
}

TEST(Morph, MeanContractForRandomShifts)
{
    MonthlyShifts s{};
    for (int m = 0; m < 12; ++m) s[m].d_temperature = -1.5 + 0.37 * m;
    const auto r = morph_year(baseline(), s);
    for (int m = 1; m <= 12; ++m)
        EXPECT_NEAR(monthly_mean(r.year, WeatherField::dry_bulb, m) - monthly_mean(baseline(), WeatherField::dry_bulb, m),
                    s[m - 1].d_temperature, 1e-9);
}

TEST(Morph, ModelClassOverload)
{
    ModelClass c;
    c.months = uniform_shift(2.0);
    const auto a = morph_year(baseline(), c);
    const auto b = morph_year(baseline(), uniform_shift(2.0));
    EXPECT_EQ(a.year.records[4000].dry_bulb, b.year.records[4000].dry_bulb);
}
