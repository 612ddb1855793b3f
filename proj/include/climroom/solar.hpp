#pragma once

#include "climroom/weather.hpp"

#include <vector>

namespace climroom::solar {

inline constexpr double kSolarConstant = 1367.0; // W/m2
inline constexpr double kLowSunGuardDeg = 1.0;

struct SolarPosition {
    double altitude = -90.0;           // degrees above horizon
    double azimuth = 0.0;              // degrees clockwise from north, [0, 360)
    double apparent_solar_time = 0.0;  // hours, [0, 24)
    double declination = 0.0;          // degrees
};

/// Sun position from the low-precision almanac ephemeris (about 0.01 degree),
/// evaluated in 2001 since typical years carry no calendar year.
/// `local_standard_hour` is clock time in [0, 24) on `day_of_year` (1..365)
/// without daylight saving.
SolarPosition solar_position(double latitude, double longitude, double timezone, int day_of_year,
                             double local_standard_hour);

/// Position at the midpoint of the hour ending at `time`.
SolarPosition solar_position(const Location& location, const Timestamp& time);

/// Beam irradiance outside the atmosphere on a normal surface.
double extraterrestrial_normal(int day_of_year);

/// Logistic coefficients of the Boland-Ridley-Laurent diffuse-fraction model.
struct BrlCoefficients {
    double intercept = -5.38;
    double clearness = 6.63;
    double solar_time = 0.006;
    double altitude = -0.007;
    double daily_clearness = 1.75;
    double persistence = 1.31;
};

/// Diffuse fraction d = 1 / (1 + exp(b0 + b1 kt + b2 AST + b3 alt + b4 KT + b5 psi)).
/// AST in hours, altitude in degrees.
double brl_diffuse_fraction(double kt, double apparent_solar_time, double altitude,
                            double daily_clearness, double persistence,
                            const BrlCoefficients& coefficients = {});

/// Hourly clearness index plus the day-level and neighbour-hour predictors.
struct BrlPredictors {
    double clearness_index = 0.0;
    double daily_clearness = 0.0;
    double persistence = 0.0;
};

struct IrradianceSplit {
    double ghi = 0.0;
    double dni = 0.0;
    double dhi = 0.0;
    double diffuse_fraction = 1.0;
    double clearness_index = 0.0;
};

/// Hourly clearness index ghi / (I0 sin alt), zero when the sun is down.
double clearness_index(double ghi, const SolarPosition& position, int day_of_year);

/// Splits GHI into beam-normal and diffuse using the BRL fraction. Below the
/// low-sun guard all irradiance is treated as diffuse.
IrradianceSplit split_ghi(double ghi, const SolarPosition& position, const BrlPredictors& predictors,
                          const BrlCoefficients& coefficients = {});

/// BRL predictors for every hour of a year. Daily clearness is the ratio of
/// daylight-hour sums; persistence is the mean of the neighbouring daylight
/// hours' kt on the same day, one-sided at sunrise and sunset.
std::vector<BrlPredictors> brl_predictors(const WeatherYear& year);

/// Replaces DNI and DHI of every record with the BRL split of its GHI.
void resplit_irradiance(WeatherYear& year);

struct Surface {
    double azimuth = 180.0; // outward normal, degrees clockwise from north
    double tilt = 90.0;     // degrees from horizontal
};

struct IncidentIrradiance {
    double beam = 0.0;
    double sky_diffuse = 0.0;
    double ground_reflected = 0.0;
    double total() const { return beam + sky_diffuse + ground_reflected; }
};

/// Isotropic-sky irradiance on a tilted surface.
IncidentIrradiance incident_components(const IrradianceSplit& split, const SolarPosition& position,
                                       const Surface& surface, double ground_albedo);

double incident_on_surface(const IrradianceSplit& split, const SolarPosition& position,
                           const Surface& surface, double ground_albedo);

struct WindowGeometry {
    double width = 1.5;
    double height = 1.0;
    double azimuth = 0.0;
};

/// Horizontal projection above a window, assumed to extend past both jambs.
struct Overhang {
    double depth = 0.0;           // m, outward
    double gap_above_window = 0.0; // m, from window head to overhang underside
};

/// Fraction of a vertical window's area that lies in the overhang's shadow,
/// from the profile-angle shadow length. 0 when the sun does not reach the
/// window face.
double overhang_shaded_fraction(const SolarPosition& position, const WindowGeometry& window,
                                const Overhang& overhang);

} // namespace climroom::solar
