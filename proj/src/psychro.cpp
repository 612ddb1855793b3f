#include "climroom/psychro.hpp"

#include "climroom/error.hpp"

#include <cmath>
#include <string>

namespace climroom::psychro {

namespace {
constexpr double kMagnusA = 610.94; // Pa
constexpr double kMagnusB = 17.625;
constexpr double kMagnusC = 243.04; // C

double magnus_gamma(double t, double rh) { return std::log(rh) + kMagnusB * t / (kMagnusC + t); }
} // namespace

void AirConstants::validate() const
{
    if (!(rho_air > 0.0)) throw ValidationError("rho_air", rho_air, "must be > 0");
    if (!(c_p > 0.0)) throw ValidationError("c_p", c_p, "must be > 0");
    if (!(h_fg > 0.0)) throw ValidationError("h_fg", h_fg, "must be > 0");
}

double MoistAirState::relative_humidity() const
{
    return rh_from_humidity_ratio(humidity_ratio, dry_bulb, pressure);
}

double saturation_vapor_pressure(double t)
{
    if (!(t >= -60.0 && t <= 90.0))
        throw DomainError("saturation_vapor_pressure: temperature " + std::to_string(t) +
                          " C outside [-60, 90]");
    return kMagnusA * std::exp(kMagnusB * t / (t + kMagnusC));
}

double humidity_ratio_from_rh(double t, double rh, double p)
{
    if (!(rh >= 0.0 && rh <= 1.0))
        throw DomainError("humidity_ratio_from_rh: rh " + std::to_string(rh) + " outside [0, 1]");
    const double pw = rh * saturation_vapor_pressure(t);
    if (!(p > pw))
        throw DomainError("humidity_ratio_from_rh: pressure below vapour partial pressure");
    return kMolarMassRatio * pw / (p - pw);
}

double rh_from_humidity_ratio(double w, double t, double p)
{
    if (!(w >= 0.0)) throw DomainError("rh_from_humidity_ratio: negative humidity ratio");
    const double pw = w * p / (kMolarMassRatio + w);
    return pw / saturation_vapor_pressure(t);
}

double saturation_humidity_ratio(double t, double p) { return humidity_ratio_from_rh(t, 1.0, p); }

double dew_point(double t, double rh)
{
    if (!(rh > 0.0 && rh <= 1.0))
        throw DomainError("dew_point: rh " + std::to_string(rh) + " outside (0, 1]");
    if (rh == 1.0) return t;
    const double g = magnus_gamma(t, rh);
    return kMagnusC * g / (kMagnusB - g);
}

double rh_from_dew_point(double t, double td)
{
    return saturation_vapor_pressure(td) / saturation_vapor_pressure(t);
}

} // namespace climroom::psychro
