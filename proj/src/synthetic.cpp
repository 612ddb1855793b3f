#include "climroom/synthetic.hpp"

#include "climroom/psychro.hpp"
#include "climroom/solar.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

namespace climroom::synthetic {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double seasonal(int doy, int peak_day) { return std::cos(kTwoPi * (doy - peak_day) / 365.0); }

double station_pressure(double elevation)
{
    return psychro::kStandardPressure * std::pow(1.0 - 2.25577e-5 * elevation, 5.25588);
}

std::string slug(std::string s)
{
    for (auto& c : s) c = c == ' ' ? '_' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

} // namespace

std::vector<ClimateSpec> demo_climates()
{
    // name, lat, lon, elev, mean T, annual amp, warmest day, diurnal amp,
    // mean Td, Td amp, humid day, cloud, monsoon cloud
    auto make = [](std::string name, double lat, double lon, double elev, double tm, double ta,
                   int peak, double td_amp, double dm, double da, int humid, double cloud,
                   double monsoon, std::uint32_t seed) {
        ClimateSpec c;
        c.name = std::move(name);
        c.latitude = lat;
        c.longitude = lon;
        c.elevation = elev;
        c.mean_temperature = tm;
        c.annual_amplitude = ta;
        c.warmest_day = peak;
        c.diurnal_amplitude = td_amp;
        c.mean_dew_point = dm;
        c.dew_point_amplitude = da;
        c.most_humid_day = humid;
        c.mean_cloudiness = cloud;
        c.monsoon_cloudiness = monsoon;
        c.seed = seed;
        return c;
    };
    return {
        make("Ahmedabad", 23.03, 72.58, 53, 27.5, 6.0, 135, 6.5, 14.0, 9.0, 220, 0.20, 0.45, 11),
        make("Bengaluru", 12.97, 77.59, 920, 24.0, 2.5, 110, 5.5, 15.5, 3.5, 220, 0.30, 0.35, 12),
        make("Chennai", 13.08, 80.27, 16, 28.5, 3.5, 150, 4.5, 22.5, 2.5, 200, 0.30, 0.30, 13),
        make("Hyderabad", 17.39, 78.49, 545, 26.5, 4.5, 130, 6.0, 15.0, 6.0, 220, 0.25, 0.40, 14),
        make("Kolkata", 22.57, 88.36, 9, 26.8, 5.5, 140, 4.5, 20.0, 6.5, 210, 0.30, 0.45, 15),
        make("Mumbai", 19.08, 72.88, 14, 27.3, 2.5, 140, 3.5, 21.0, 4.5, 200, 0.25, 0.55, 16),
        make("New Delhi", 28.61, 77.21, 216, 25.0, 9.5, 160, 6.5, 14.0, 9.0, 215, 0.20, 0.35, 17),
        make("Srinagar", 34.08, 74.80, 1585, 13.5, 11.0, 200, 7.0, 5.0, 8.0, 210, 0.35, 0.10, 18),
    };
}

WeatherYear generate_year(const ClimateSpec& spec)
{
    WeatherYear year;
    year.location.name = spec.name;
    year.location.latitude = spec.latitude;
    year.location.longitude = spec.longitude;
    year.location.timezone = spec.timezone;
    year.location.elevation = spec.elevation;
    year.location.source = "synthetic";
    year.records.resize(kHoursPerYear);

    std::mt19937 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double pressure = station_pressure(spec.elevation);

    double anomaly = 0.0;
    double dew_anomaly = 0.0;
    for (std::size_t day = 0; day < 365; ++day) {
        anomaly = 0.7 * anomaly + spec.noise * std::sqrt(1.0 - 0.49) * gauss(rng);
        dew_anomaly = 0.6 * dew_anomaly + 1.2 * gauss(rng);
        const int doy = static_cast<int>(day) + 1;
        const double monsoon = std::max(0.0, seasonal(doy, spec.most_humid_day));
        const double cloud = std::clamp(
            spec.mean_cloudiness + spec.monsoon_cloudiness * monsoon * monsoon + 0.2 * gauss(rng), 0.0, 0.95);
        const double wind_base = std::max(0.3, 2.5 + 0.8 * gauss(rng));
        const double daily_mean =
            spec.mean_temperature + spec.annual_amplitude * seasonal(doy, spec.warmest_day) + anomaly;
        const double daily_dew = spec.mean_dew_point +
                                 spec.dew_point_amplitude * seasonal(doy, spec.most_humid_day) + dew_anomaly;
        // Cloudy days have a damped diurnal swing.
        const double swing = spec.diurnal_amplitude * (1.0 - 0.5 * cloud);
        for (int h = 1; h <= 24; ++h) {
            auto& r = year.records[day * 24 + (h - 1)];
            r.time = timestamp_of(day * 24 + (h - 1));
            r.dry_bulb = daily_mean + swing * std::cos(kTwoPi * (h - 15) / 24.0);
            r.dew_point = std::min(daily_dew + 0.6 * std::cos(kTwoPi * (h - 15) / 24.0), r.dry_bulb);
            r.rel_humidity = 100.0 * std::min(1.0, psychro::rh_from_dew_point(r.dry_bulb, r.dew_point));
            r.pressure = pressure;
            const auto pos = solar::solar_position(year.location, r.time);
            if (pos.altitude > 0.0) {
                const double s = std::sin(pos.altitude * std::numbers::pi / 180.0);
                const double clear = 1098.0 * s * std::exp(-0.057 / s);
                r.ghi = clear * (1.0 - 0.75 * cloud);
            }
            r.wind_speed = wind_base * (0.7 + 0.3 * std::cos(kTwoPi * (h - 16) / 24.0));
            r.wind_direction = std::fmod(200.0 + 40.0 * gauss(rng) + 360.0, 360.0);
        }
    }
    solar::resplit_irradiance(year);
    year.validate();
    return year;
}

WeatherYear constant_year(double dry_bulb, double rel_humidity_pct, const Location& location)
{
    WeatherYear year;
    year.location = location;
    year.records.resize(kHoursPerYear);
    for (std::size_t i = 0; i < kHoursPerYear; ++i) {
        auto& r = year.records[i];
        r.time = timestamp_of(i);
        r.dry_bulb = dry_bulb;
        r.rel_humidity = rel_humidity_pct;
        r.dew_point = psychro::dew_point(dry_bulb, std::max(rel_humidity_pct, 0.1) / 100.0);
        r.pressure = psychro::kStandardPressure;
        r.wind_speed = 0.0;
    }
    return year;
}

std::vector<morph::GcmShiftTable> generate_shift_tables(morph::Scenario scenario, morph::Period period,
                                                        int gcm_count)
{
    static constexpr std::array<double, 3> kRcp45{1.1, 1.8, 2.2};
    static constexpr std::array<double, 3> kRcp85{1.2, 2.6, 4.0};
    const auto pi = static_cast<std::size_t>(period);
    const double base = scenario == morph::Scenario::rcp45 ? kRcp45[pi] : kRcp85[pi];

    std::vector<morph::GcmShiftTable> out;
    for (int g = 0; g < gcm_count; ++g) {
        morph::GcmShiftTable t;
        t.gcm_id = fmt::format("GCM-{}", static_cast<char>('A' + g));
        t.scenario = scenario;
        t.period = period;
        std::mt19937 rng(1000u * static_cast<unsigned>(g + 1) + 100u * static_cast<unsigned>(scenario) +
                         static_cast<unsigned>(pi));
        std::uniform_real_distribution<double> jitter(-1.0, 1.0);
        const double factor = 0.6 + 0.7 * g / std::max(1, gcm_count - 1);
        for (double lat = 5.0; lat <= 40.0; lat += 5.0) {
            for (double lon = 65.0; lon <= 95.0; lon += 5.0) {
                morph::GridPoint p{lat, lon, {}};
                for (int m = 0; m < 12; ++m) {
                    auto& s = p.months[m];
                    const double dt = base * factor * (1.0 + 0.01 * (lat - 20.0)) *
                                      (1.0 + 0.15 * std::cos(kTwoPi * m / 12.0)) *
                                      (1.0 + 0.15 * jitter(rng));
                    s.d_temperature = std::round(dt * 1000.0) / 1000.0;
                    s.humidity_scale = std::round((1.0 + 0.05 * dt * (1.0 + 0.3 * jitter(rng))) * 1e4) / 1e4;
                    s.ghi_scale = std::round((1.0 - 0.006 * dt + 0.01 * jitter(rng)) * 1e4) / 1e4;
                    s.wind_scale = std::round((1.0 + 0.04 * jitter(rng)) * 1e4) / 1e4;
                }
                t.grid.push_back(p);
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

std::filesystem::path write_demo_study(const std::filesystem::path& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir / "weather");
    fs::create_directories(dir / "shifts");
    nlohmann::json cfg;
    cfg["cities"] = nlohmann::json::array();
    for (const auto& c : demo_climates()) {
        const auto file = fs::path("weather") / (slug(c.name) + ".epw");
        write_weather_file(dir / file, generate_year(c), WeatherFormat::epw);
        const bool cold = c.name == "Srinagar";
        cfg["cities"].push_back({{"name", c.name},
                                 {"weather", file.generic_string()},
                                 {"format", "epw"},
                                 {"lat", c.latitude},
                                 {"lon", c.longitude},
                                 {"tz", c.timezone},
                                 {"walls", cold ? std::vector<double>{180.0, 270.0}
                                                : std::vector<double>{0.0, 90.0}}});
    }
    cfg["shift_files"] = nlohmann::json::array();
    for (auto s : {morph::Scenario::rcp45, morph::Scenario::rcp85}) {
        for (auto p : {morph::Period::p2030s, morph::Period::p2060s, morph::Period::p2090s}) {
            for (const auto& t : generate_shift_tables(s, p)) {
                const auto file = fs::path("shifts") /
                                  fmt::format("{}_{}_{}.csv", t.gcm_id, morph::to_string(s), morph::to_string(p));
                std::ofstream out(dir / file, std::ios::binary);
                morph::write_shift_file(out, t);
                cfg["shift_files"].push_back(file.generic_string());
            }
        }
    }
    cfg["periods"] = {"2030s", "2060s", "2090s"};
    cfg["scenarios"] = {"RCP4.5", "RCP8.5"};
    cfg["model_classes"] = {"min", "median", "max"};
    cfg["attribution"] = {{"enabled", true}, {"orderings", "default"}};
    cfg["output_dir"] = "results";
    cfg["workers"] = 1;
    const auto path = dir / "study.json";
    std::ofstream(path) << cfg.dump(2) << '\n';
    return path;
}

} // namespace climroom::synthetic
