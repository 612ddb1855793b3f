#include "climroom/solar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace climroom::solar {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDeg = kPi / 180.0;
constexpr double kMaxClearness = 1.2;
// Days from J2000.0 to 2001-01-01 00:00 UT.
constexpr double kDaysJ2000ToEpoch = 365.5;

double wrap(double value, double period)
{
    double r = std::fmod(value, period);
    if (r < 0.0) r += period;
    return r;
}

double sin_altitude(const SolarPosition& p) { return std::sin(p.altitude * kDeg); }

} // namespace

SolarPosition solar_position(double latitude, double longitude, double timezone, int day_of_year,
                             double local_standard_hour)
{
    // Low-precision almanac ephemeris. Typical-year files carry no year, so 2001 is the epoch.
    const double ut = local_standard_hour - timezone;
    const double n = kDaysJ2000ToEpoch + (day_of_year - 1) + ut / 24.0;
    const double mean_longitude = wrap(280.460 + 0.9856474 * n, 360.0);
    const double mean_anomaly = wrap(357.528 + 0.9856003 * n, 360.0) * kDeg;
    const double ecliptic_longitude =
        (mean_longitude + 1.915 * std::sin(mean_anomaly) + 0.020 * std::sin(2 * mean_anomaly)) *
        kDeg;
    const double obliquity = (23.439 - 0.0000004 * n) * kDeg;
    const double right_ascension =
        std::atan2(std::cos(obliquity) * std::sin(ecliptic_longitude), std::cos(ecliptic_longitude));
    const double decl = std::asin(std::sin(obliquity) * std::sin(ecliptic_longitude));
    const double gmst = wrap(6.697375 + 0.0657098242 * n + ut, 24.0);
    const double lmst = wrap(gmst + longitude / 15.0, 24.0) * 15.0 * kDeg;
    const double hour_angle = wrap(lmst - right_ascension + kPi, 2 * kPi) - kPi;
    const double ast = wrap(12.0 + hour_angle / kDeg / 15.0, 24.0);
    const double lat = latitude * kDeg;

    const double sin_alt = std::sin(lat) * std::sin(decl) +
                           std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
    const double alt = std::asin(std::clamp(sin_alt, -1.0, 1.0));
    const double az = std::atan2(-std::cos(decl) * std::sin(hour_angle),
                                 std::sin(decl) * std::cos(lat) -
                                     std::cos(decl) * std::sin(lat) * std::cos(hour_angle));
    SolarPosition p;
    p.altitude = alt / kDeg;
    p.azimuth = wrap(az / kDeg, 360.0);
    p.apparent_solar_time = ast;
    p.declination = decl / kDeg;
    return p;
}

SolarPosition solar_position(const Location& location, const Timestamp& time)
{
    return solar_position(location.latitude, location.longitude, location.timezone,
                          time.day_of_year(), time.hour - 0.5);
}

double extraterrestrial_normal(int day_of_year)
{
    return kSolarConstant * (1.0 + 0.033 * std::cos(2.0 * kPi * day_of_year / 365.0));
}

double brl_diffuse_fraction(double kt, double apparent_solar_time, double altitude,
                            double daily_clearness, double persistence,
                            const BrlCoefficients& c)
{
    const double z = c.intercept + c.clearness * kt + c.solar_time * apparent_solar_time +
                     c.altitude * altitude + c.daily_clearness * daily_clearness +
                     c.persistence * persistence;
    return 1.0 / (1.0 + std::exp(z));
}

double clearness_index(double ghi, const SolarPosition& position, int day_of_year)
{
    if (position.altitude <= 0.0 || ghi <= 0.0) return 0.0;
    const double horizontal = extraterrestrial_normal(day_of_year) * sin_altitude(position);
    return std::clamp(ghi / horizontal, 0.0, kMaxClearness);
}

IrradianceSplit split_ghi(double ghi, const SolarPosition& position, const BrlPredictors& pred,
                          const BrlCoefficients& coefficients)
{
    IrradianceSplit s;
    s.ghi = ghi;
    s.clearness_index = pred.clearness_index;
    if (ghi <= 0.0) {
        s.ghi = 0.0;
        return s;
    }
    if (position.altitude <= kLowSunGuardDeg) {
        s.dhi = ghi;
        s.diffuse_fraction = 1.0;
        return s;
    }
    s.diffuse_fraction =
        brl_diffuse_fraction(pred.clearness_index, position.apparent_solar_time, position.altitude,
                             pred.daily_clearness, pred.persistence, coefficients);
    s.dhi = s.diffuse_fraction * ghi;
    s.dni = (ghi - s.dhi) / sin_altitude(position);
    return s;
}

std::vector<BrlPredictors> brl_predictors(const WeatherYear& year)
{
    const std::size_t n = year.records.size();
    std::vector<BrlPredictors> out(n);
    std::vector<double> kt(n, 0.0);
    std::vector<bool> daylight(n, false);
    std::vector<double> horizontal(n, 0.0);

    for (std::size_t i = 0; i < n; ++i) {
        const auto& rec = year.records[i];
        const auto pos = solar_position(year.location, rec.time);
        const int doy = rec.time.day_of_year();
        daylight[i] = pos.altitude > 0.0;
        if (daylight[i]) horizontal[i] = extraterrestrial_normal(doy) * sin_altitude(pos);
        kt[i] = clearness_index(rec.ghi, pos, doy);
    }

    for (std::size_t day = 0; day * 24 < n; ++day) {
        const std::size_t begin = day * 24;
        const std::size_t end = std::min(begin + 24, n);
        double ghi_sum = 0.0;
        double h_sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            if (!daylight[i]) continue;
            ghi_sum += year.records[i].ghi;
            h_sum += horizontal[i];
        }
        const double daily = h_sum > 0.0 ? std::clamp(ghi_sum / h_sum, 0.0, kMaxClearness) : 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            double sum = 0.0;
            int count = 0;
            if (i > begin && daylight[i - 1]) {
                sum += kt[i - 1];
                ++count;
            }
            if (i + 1 < end && daylight[i + 1]) {
                sum += kt[i + 1];
                ++count;
            }
            out[i].clearness_index = kt[i];
            out[i].daily_clearness = daily;
            out[i].persistence = count ? sum / count : kt[i];
        }
    }
    return out;
}

void resplit_irradiance(WeatherYear& year)
{
    const auto pred = brl_predictors(year);
    for (std::size_t i = 0; i < year.records.size(); ++i) {
        auto& rec = year.records[i];
        const auto split = split_ghi(rec.ghi, solar_position(year.location, rec.time), pred[i]);
        rec.dni = split.dni;
        rec.dhi = split.dhi;
    }
}

IncidentIrradiance incident_components(const IrradianceSplit& split,
                                       const SolarPosition& position, const Surface& surface,
                                       double ground_albedo)
{
    IncidentIrradiance in;
    const double tilt = surface.tilt * kDeg;
    if (position.altitude > 0.0) {
        const double alt = position.altitude * kDeg;
        const double cos_inc =
            std::cos(alt) * std::cos((position.azimuth - surface.azimuth) * kDeg) * std::sin(tilt) +
            std::sin(alt) * std::cos(tilt);
        in.beam = split.dni * std::max(0.0, cos_inc);
    }
    in.sky_diffuse = split.dhi * (1.0 + std::cos(tilt)) / 2.0;
    in.ground_reflected = split.ghi * ground_albedo * (1.0 - std::cos(tilt)) / 2.0;
    return in;
}

double incident_on_surface(const IrradianceSplit& split, const SolarPosition& position,
                           const Surface& surface, double ground_albedo)
{
    return incident_components(split, position, surface, ground_albedo).total();
}

double overhang_shaded_fraction(const SolarPosition& position, const WindowGeometry& window,
                                const Overhang& overhang)
{
    if (overhang.depth <= 0.0 || window.height <= 0.0 || position.altitude <= 0.0) return 0.0;
    if (position.altitude >= 90.0 - 1e-9) return 1.0;
    const double cos_rel = std::cos((position.azimuth - window.azimuth) * kDeg);
    if (cos_rel <= 0.0) return 0.0;
    const double tan_profile = std::tan(position.altitude * kDeg) / cos_rel;
    const double shadow = overhang.depth * tan_profile - overhang.gap_above_window;
    return std::clamp(shadow / window.height, 0.0, 1.0);
}

} // namespace climroom::solar
