#pragma once

namespace climroom::psychro {

inline constexpr double kStandardPressure = 101325.0; // Pa
inline constexpr double kMolarMassRatio = 0.621945;   // M_w / M_da

/// Constant moist-air properties used by the zone balances.
struct AirConstants {
    double rho_air = 1.204; // kg/m3, dry air at 20 C
    double c_p = 1006.0;    // J/(kg C)
    double h_fg = 2.501e6;  // J/kg

    void validate() const;
};

struct MoistAirState {
    double dry_bulb;       // C
    double humidity_ratio; // kg/kg dry air
    double pressure;       // Pa

    double relative_humidity() const;
};

/// Magnus-form saturation vapour pressure over water, valid for -60..90 C.
/// Throws DomainError outside that range.
double saturation_vapor_pressure(double t);

double humidity_ratio_from_rh(double t, double rh, double p = kStandardPressure);

/// Inverse of humidity_ratio_from_rh. May exceed 1 for supersaturated states.
double rh_from_humidity_ratio(double w, double t, double p = kStandardPressure);

double saturation_humidity_ratio(double t, double p = kStandardPressure);

/// Dew point from the inverted Magnus relation; independent of pressure.
/// rh must be in (0, 1].
double dew_point(double t, double rh);

/// Relative humidity (fraction) of air at t whose dew point is td.
double rh_from_dew_point(double t, double td);

} // namespace climroom::psychro
