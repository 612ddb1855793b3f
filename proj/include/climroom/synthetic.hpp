#pragma once

#include "climroom/morph.hpp"
#include "climroom/weather.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace climroom::synthetic {

/// Parameters of a smooth annual/diurnal climate with seeded day-to-day noise.
/// Produces plausible hourly years for demos and tests; not observed data.
struct ClimateSpec {
    std::string name = "synthetic";
    double latitude = 20.0;
    double longitude = 78.0;
    double timezone = 5.5;
    double elevation = 0.0;
    double mean_temperature = 26.0;   // C
    double annual_amplitude = 5.0;    // C
    int warmest_day = 140;
    double diurnal_amplitude = 5.0;   // C
    double mean_dew_point = 16.0;     // C
    double dew_point_amplitude = 5.0; // C
    int most_humid_day = 210;
    double mean_cloudiness = 0.3;     // 0..1
    double monsoon_cloudiness = 0.3;  // extra cloud at the most humid day
    double noise = 1.5;               // C, day-to-day anomaly
    std::uint32_t seed = 1;
};

/// Eight sites spanning hot-dry, warm-humid, composite, temperate and cold
/// climates of the Indian subcontinent.
std::vector<ClimateSpec> demo_climates();

WeatherYear generate_year(const ClimateSpec& spec);

/// Every hour identical: fixed dry-bulb and RH, no sun, calm.
WeatherYear constant_year(double dry_bulb, double rel_humidity_pct, const Location& location = {});

/// Regular lat/lon grid of monthly shifts for `gcm_count` fictitious GCMs,
/// for one scenario and period.
std::vector<morph::GcmShiftTable> generate_shift_tables(morph::Scenario scenario, morph::Period period,
                                                        int gcm_count = 6);

/// Writes weather files, shift files and a study.json describing the full
/// 8-city matrix into `dir`. Returns the config path.
std::filesystem::path write_demo_study(const std::filesystem::path& dir);

} // namespace climroom::synthetic
