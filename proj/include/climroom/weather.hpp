#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace climroom {

inline constexpr std::size_t kHoursPerYear = 8760;
inline constexpr std::array<int, 12> kDaysInMonth{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

/// Hour-ending timestamp in local standard time; hour runs 1..24.
struct Timestamp {
    int month = 1;
    int day = 1;
    int hour = 1;

    int day_of_year() const;
    friend bool operator==(const Timestamp&, const Timestamp&) = default;
};

/// Timestamp of the i-th hour (0-based) of a non-leap year.
Timestamp timestamp_of(std::size_t hour_index);
/// Index of the first hour of a month (1..12) within the year.
std::size_t first_hour_of_month(int month);
std::size_t hours_in_month(int month);

struct HourlyWeatherRecord {
    Timestamp time;
    double dry_bulb = 20.0;     // C
    double dew_point = 10.0;    // C
    double rel_humidity = 50.0; // %
    double pressure = 101325.0; // Pa
    double ghi = 0.0;           // Wh/m2
    double dni = 0.0;           // Wh/m2
    double dhi = 0.0;           // Wh/m2
    double wind_speed = 0.0;    // m/s
    double wind_direction = 0.0; // degrees
    /// Source EPW data line, kept so that columns this library does not model
    /// are echoed back on write. Empty for records not read from EPW.
    std::string epw_raw;

    /// Humidity ratio (kg/kg) implied by dry-bulb, RH and pressure.
    double humidity_ratio() const;
    /// Throws ValidationError naming the first offending field.
    void validate() const;
};

struct Location {
    std::string name = "unknown";
    double latitude = 0.0;  // degrees north
    double longitude = 0.0; // degrees east
    double timezone = 0.0;  // hours from UTC
    double elevation = 0.0; // m
    // Remaining LOCATION fields, echoed on EPW write.
    std::string state = "-";
    std::string country = "-";
    std::string source = "-";
    std::string wmo = "-";
};

struct WeatherYear {
    Location location;
    std::vector<HourlyWeatherRecord> records;
    /// EPW header lines 2..8 verbatim, when the year was read from EPW.
    std::vector<std::string> epw_header;

    /// Checks record count, calendar order and every record's ranges.
    void validate() const;
};

enum class WeatherFormat { epw, csv };

WeatherFormat parse_weather_format(std::string_view name);
std::string_view to_string(WeatherFormat format);

/// Reads a full typical year. For CSV input (which carries no location
/// header) the given location is attached; for EPW the LOCATION line wins.
/// Missing dew point / RH / pressure cells are derived or defaulted; missing
/// DNI/DHI are re-split from GHI.
WeatherYear parse_weather(std::istream& in, WeatherFormat format, const Location& location = {});
WeatherYear read_weather_file(const std::filesystem::path& path, WeatherFormat format,
                              const Location& location = {});

void write_weather(std::ostream& out, const WeatherYear& year, WeatherFormat format);
void write_weather_file(const std::filesystem::path& path, const WeatherYear& year,
                        WeatherFormat format);

inline constexpr std::string_view kCsvWeatherHeader =
    "month,day,hour,dry_bulb_C,dew_point_C,rh_pct,pressure_Pa,ghi_Whm2,dni_Whm2,dhi_Whm2,"
    "wind_mps,wind_dir_deg";

enum class WeatherField {
    dry_bulb,
    dew_point,
    rel_humidity,
    pressure,
    ghi,
    dni,
    dhi,
    wind_speed,
    wind_direction,
    humidity_ratio,
};

double field_value(const HourlyWeatherRecord& record, WeatherField field);

/// Arithmetic mean of a field over every hour of the month (1..12).
double monthly_mean(const WeatherYear& year, WeatherField field, int month);
double annual_mean(const WeatherYear& year, WeatherField field);

} // namespace climroom
