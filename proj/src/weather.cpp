#include "climroom/weather.hpp"

#include "climroom/error.hpp"
#include "climroom/psychro.hpp"
#include "climroom/solar.hpp"
#include "text.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

namespace climroom {

using detail::parse_int;
using detail::parse_number;
using detail::parse_optional_number;
using detail::split_commas;
using detail::trim;

namespace {

// EPW data-line column positions (0-based) for the modelled fields.
constexpr std::size_t kColYear = 0;
constexpr std::size_t kColMonth = 1;
constexpr std::size_t kColDay = 2;
constexpr std::size_t kColHour = 3;
constexpr std::size_t kColDryBulb = 6;
constexpr std::size_t kColDewPoint = 7;
constexpr std::size_t kColRh = 8;
constexpr std::size_t kColPressure = 9;
constexpr std::size_t kColGhi = 13;
constexpr std::size_t kColDni = 14;
constexpr std::size_t kColDhi = 15;
constexpr std::size_t kColWindDir = 20;
constexpr std::size_t kColWindSpeed = 21;
constexpr std::size_t kMinEpwColumns = 22;

// Missing-value sentinel for every one of the 35 EPW data columns.
constexpr std::array<std::string_view, 35> kEpwMissing{
    "2001", "1",    "1",      "1",      "0",      "*",      "99.9", "99.9", "999",
    "999999", "9999", "9999", "9999",   "9999",   "9999",   "9999", "999999", "999999",
    "999999", "9999", "999",  "999",    "99",     "99",     "9999", "99999", "9",
    "999999999", "999", ".999", "999", "99",    "999",    "999",  "99"};

const std::array<std::string_view, 7> kDefaultEpwHeader{
    "DESIGN CONDITIONS,0",
    "TYPICAL/EXTREME PERIODS,0",
    "GROUND TEMPERATURES,0",
    "HOLIDAYS/DAYLIGHT SAVINGS,No,0,0,0",
    "COMMENTS 1,written by climroom",
    "COMMENTS 2,",
    "DATA PERIODS,1,1,Data,Sunday, 1/ 1,12/31"};

void reject_sentinel(std::optional<double> v, double sentinel, const char* field)
{
    if (v && *v >= sentinel) throw ValidationError(field, *v, "EPW missing-data sentinel");
}

/// Raw cell values of one row before derivation of absent fields.
struct RawRow {
    Timestamp time;
    std::optional<double> dry_bulb, dew_point, rh, pressure, ghi, dni, dhi, wind_speed, wind_dir;
    std::string epw_raw;
    std::size_t line = 0;
};

/// Fills absent fields and returns true when irradiance must be re-split.
bool complete_record(const RawRow& row, HourlyWeatherRecord& rec)
{
    auto require = [&](const std::optional<double>& v, const char* field) {
        if (!v) throw ParseError(fmt::format("field {} is required", field), row.line);
        return *v;
    };
    rec.time = row.time;
    rec.epw_raw = row.epw_raw;
    rec.dry_bulb = require(row.dry_bulb, "dry_bulb");
    rec.pressure = row.pressure.value_or(psychro::kStandardPressure);
    rec.ghi = require(row.ghi, "ghi");
    rec.wind_speed = require(row.wind_speed, "wind_speed");
    rec.wind_direction = row.wind_dir.value_or(0.0);

    if (row.rh) {
        rec.rel_humidity = *row.rh;
    } else if (row.dew_point) {
        rec.rel_humidity =
            100.0 * std::min(1.0, psychro::rh_from_dew_point(rec.dry_bulb, *row.dew_point));
    } else {
        throw ParseError("rel_humidity and dew_point are both missing", row.line);
    }
    if (row.dew_point) {
        rec.dew_point = *row.dew_point;
    } else {
        if (rec.rel_humidity <= 0.0 || rec.rel_humidity > 100.0)
            throw ValidationError("rel_humidity", rec.rel_humidity);
        rec.dew_point = psychro::dew_point(rec.dry_bulb, rec.rel_humidity / 100.0);
    }
    rec.dni = row.dni.value_or(0.0);
    rec.dhi = row.dhi.value_or(0.0);
    return !row.dni || !row.dhi;
}

WeatherYear assemble(Location location, std::vector<std::string> header,
                     const std::vector<RawRow>& rows)
{
    if (rows.size() != kHoursPerYear)
        throw StructuralError(fmt::format("expected {} hourly records, found {}", kHoursPerYear,
                                          rows.size()));
    WeatherYear year;
    year.location = std::move(location);
    year.epw_header = std::move(header);
    year.records.resize(rows.size());
    bool resplit = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Timestamp expected = timestamp_of(i);
        if (!(rows[i].time == expected))
            throw StructuralError(fmt::format(
                "line {}: record {} is {}/{} hour {}, expected {}/{} hour {}", rows[i].line, i + 1,
                rows[i].time.month, rows[i].time.day, rows[i].time.hour, expected.month,
                expected.day, expected.hour));
        resplit |= complete_record(rows[i], year.records[i]);
    }
    if (resplit) solar::resplit_irradiance(year);
    year.validate();
    return year;
}

WeatherYear parse_epw(std::istream& in)
{
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
    }
    if (lines.size() < 8) throw StructuralError("EPW input has fewer than 8 header lines");
    const auto loc = split_commas(lines[0]);
    if (loc.empty() || trim(loc[0]) != "LOCATION")
        throw ParseError("first EPW line must be a LOCATION record", 1);
    if (loc.size() < 10) throw ParseError("LOCATION record needs 10 fields", 1);
    Location location;
    location.name = std::string(trim(loc[1]));
    location.state = std::string(trim(loc[2]));
    location.country = std::string(trim(loc[3]));
    location.source = std::string(trim(loc[4]));
    location.wmo = std::string(trim(loc[5]));
    location.latitude = parse_number(loc[6], "latitude", 1);
    location.longitude = parse_number(loc[7], "longitude", 1);
    location.timezone = parse_number(loc[8], "timezone", 1);
    location.elevation = parse_number(loc[9], "elevation", 1);
    if (std::abs(location.latitude) > 90.0) throw ValidationError("latitude", location.latitude);

    std::vector<std::string> header(lines.begin() + 1, lines.begin() + 8);

    std::vector<RawRow> rows;
    rows.reserve(kHoursPerYear);
    for (std::size_t i = 8; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        const std::size_t ln = i + 1;
        const auto cols = split_commas(lines[i]);
        if (cols.size() < kMinEpwColumns)
            throw ParseError(fmt::format("EPW data line has {} fields, need at least {}",
                                         cols.size(), kMinEpwColumns),
                             ln);
        RawRow r;
        r.line = ln;
        r.epw_raw = lines[i];
        r.time = {parse_int(cols[kColMonth], "month", ln), parse_int(cols[kColDay], "day", ln),
                  parse_int(cols[kColHour], "hour", ln)};
        r.dry_bulb = parse_optional_number(cols[kColDryBulb], "dry_bulb", ln);
        r.dew_point = parse_optional_number(cols[kColDewPoint], "dew_point", ln);
        r.rh = parse_optional_number(cols[kColRh], "rel_humidity", ln);
        r.pressure = parse_optional_number(cols[kColPressure], "pressure", ln);
        r.ghi = parse_optional_number(cols[kColGhi], "ghi", ln);
        r.dni = parse_optional_number(cols[kColDni], "dni", ln);
        r.dhi = parse_optional_number(cols[kColDhi], "dhi", ln);
        r.wind_dir = parse_optional_number(cols[kColWindDir], "wind_direction", ln);
        r.wind_speed = parse_optional_number(cols[kColWindSpeed], "wind_speed", ln);
        reject_sentinel(r.dry_bulb, 99.9, "dry_bulb");
        reject_sentinel(r.dew_point, 99.9, "dew_point");
        reject_sentinel(r.rh, 999.0, "rel_humidity");
        reject_sentinel(r.pressure, 999999.0, "pressure");
        reject_sentinel(r.ghi, 9999.0, "ghi");
        reject_sentinel(r.dni, 9999.0, "dni");
        reject_sentinel(r.dhi, 9999.0, "dhi");
        reject_sentinel(r.wind_dir, 999.0, "wind_direction");
        reject_sentinel(r.wind_speed, 999.0, "wind_speed");
        rows.push_back(std::move(r));
    }
    return assemble(std::move(location), std::move(header), rows);
}

WeatherYear parse_csv(std::istream& in, const Location& location)
{
    std::vector<RawRow> rows;
    rows.reserve(kHoursPerYear);
    std::size_t ln = 0;
    bool have_header = false;
    for (std::string line; std::getline(in, line);) {
        ++ln;
        const auto text = trim(line);
        if (text.empty()) continue;
        if (!have_header) {
            if (text != kCsvWeatherHeader)
                throw ParseError(fmt::format("expected CSV header '{}'", kCsvWeatherHeader), ln);
            have_header = true;
            continue;
        }
        const auto cols = split_commas(text);
        if (cols.size() != 12)
            throw ParseError(fmt::format("CSV row has {} fields, expected 12", cols.size()), ln);
        RawRow r;
        r.line = ln;
        r.time = {parse_int(cols[0], "month", ln), parse_int(cols[1], "day", ln),
                  parse_int(cols[2], "hour", ln)};
        r.dry_bulb = parse_optional_number(cols[3], "dry_bulb", ln);
        r.dew_point = parse_optional_number(cols[4], "dew_point", ln);
        r.rh = parse_optional_number(cols[5], "rel_humidity", ln);
        r.pressure = parse_optional_number(cols[6], "pressure", ln);
        r.ghi = parse_optional_number(cols[7], "ghi", ln);
        r.dni = parse_optional_number(cols[8], "dni", ln);
        r.dhi = parse_optional_number(cols[9], "dhi", ln);
        r.wind_speed = parse_optional_number(cols[10], "wind_speed", ln);
        r.wind_dir = parse_optional_number(cols[11], "wind_direction", ln);
        rows.push_back(std::move(r));
    }
    if (!have_header) throw StructuralError("CSV weather input is empty");
    return assemble(location, {}, rows);
}

// Fixed-point text without a negative zero.
std::string fixed(double value, int decimals)
{
    const double scale = std::pow(10.0, decimals);
    double r = std::round(value * scale) / scale;
    if (r == 0.0) r = 0.0;
    return fmt::format("{:.{}f}", r, decimals);
}

std::string shortest(double value) { return fmt::format("{}", value); }

void write_epw(std::ostream& out, const WeatherYear& year)
{
    const auto& loc = year.location;
    out << fmt::format("LOCATION,{},{},{},{},{},{},{},{},{}\n", loc.name, loc.state, loc.country,
                       loc.source, loc.wmo, shortest(loc.latitude), shortest(loc.longitude),
                       shortest(loc.timezone), shortest(loc.elevation));
    if (year.epw_header.size() == 7) {
        for (const auto& h : year.epw_header) out << h << '\n';
    } else {
        for (const auto& h : kDefaultEpwHeader) out << h << '\n';
    }
    std::vector<std::string> cols;
    for (const auto& rec : year.records) {
        if (!rec.epw_raw.empty()) {
            cols = split_commas(rec.epw_raw);
        } else {
            cols.assign(kEpwMissing.begin(), kEpwMissing.end());
        }
        if (cols.size() < kMinEpwColumns)
            cols.resize(kMinEpwColumns);
        const bool dark = std::round(rec.ghi) == 0.0;
        cols[kColMonth] = std::to_string(rec.time.month);
        cols[kColDay] = std::to_string(rec.time.day);
        cols[kColHour] = std::to_string(rec.time.hour);
        cols[kColDryBulb] = fixed(rec.dry_bulb, 1);
        cols[kColDewPoint] = fixed(rec.dew_point, 1);
        cols[kColRh] = fixed(rec.rel_humidity, 0);
        cols[kColPressure] = fixed(rec.pressure, 0);
        cols[kColGhi] = fixed(rec.ghi, 0);
        cols[kColDni] = dark ? "0" : fixed(rec.dni, 0);
        cols[kColDhi] = dark ? "0" : fixed(rec.dhi, 0);
        cols[kColWindDir] = fixed(rec.wind_direction, 0);
        cols[kColWindSpeed] = fixed(rec.wind_speed, 1);
        if (cols[kColYear].empty()) cols[kColYear] = kEpwMissing[kColYear];
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i) out << ',';
            out << cols[i];
        }
        out << '\n';
    }
}

void write_csv(std::ostream& out, const WeatherYear& year)
{
    out << kCsvWeatherHeader << '\n';
    for (const auto& r : year.records) {
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", r.time.month, r.time.day,
                           r.time.hour, shortest(r.dry_bulb), shortest(r.dew_point),
                           shortest(r.rel_humidity), shortest(r.pressure), shortest(r.ghi),
                           shortest(r.dni), shortest(r.dhi), shortest(r.wind_speed),
                           shortest(r.wind_direction));
    }
}

} // namespace

int Timestamp::day_of_year() const
{
    int doy = day;
    for (int m = 1; m < month; ++m) doy += kDaysInMonth[m - 1];
    return doy;
}

Timestamp timestamp_of(std::size_t hour_index)
{
    std::size_t day_index = hour_index / 24;
    int month = 1;
    while (month <= 12 && day_index >= static_cast<std::size_t>(kDaysInMonth[month - 1])) {
        day_index -= kDaysInMonth[month - 1];
        ++month;
    }
    return {month, static_cast<int>(day_index) + 1, static_cast<int>(hour_index % 24) + 1};
}

std::size_t first_hour_of_month(int month)
{
    std::size_t h = 0;
    for (int m = 1; m < month; ++m) h += kDaysInMonth[m - 1] * 24;
    return h;
}

std::size_t hours_in_month(int month) { return static_cast<std::size_t>(kDaysInMonth[month - 1]) * 24; }

double HourlyWeatherRecord::humidity_ratio() const
{
    const double rh = std::clamp(rel_humidity / 100.0, 0.0, 1.0);
    return psychro::humidity_ratio_from_rh(dry_bulb, rh, pressure);
}

void HourlyWeatherRecord::validate() const
{
    if (!(dry_bulb >= -60.0 && dry_bulb <= 70.0)) throw ValidationError("dry_bulb", dry_bulb);
    if (!(rel_humidity >= 0.0 && rel_humidity <= 100.0))
        throw ValidationError("rel_humidity", rel_humidity, "must be within 0..100 %");
    if (!(dew_point <= dry_bulb + 0.5))
        throw ValidationError("dew_point", dew_point, "exceeds dry_bulb + 0.5 C");
    if (!(pressure >= 30000.0 && pressure <= 120000.0)) throw ValidationError("pressure", pressure);
    if (!(ghi >= 0.0)) throw ValidationError("ghi", ghi, "must be >= 0");
    if (!(dni >= 0.0)) throw ValidationError("dni", dni, "must be >= 0");
    if (!(dhi >= 0.0)) throw ValidationError("dhi", dhi, "must be >= 0");
    if (ghi == 0.0 && (dni != 0.0 || dhi != 0.0))
        throw ValidationError("dni", dni, "ghi is zero but beam/diffuse are not");
    if (!(wind_speed >= 0.0)) throw ValidationError("wind_speed", wind_speed, "must be >= 0");
    if (!(wind_direction >= 0.0 && wind_direction <= 360.0))
        throw ValidationError("wind_direction", wind_direction);
}

void WeatherYear::validate() const
{
    if (records.size() != kHoursPerYear)
        throw StructuralError(fmt::format("expected {} hourly records, found {}", kHoursPerYear,
                                          records.size()));
    if (std::abs(location.latitude) > 90.0) throw ValidationError("latitude", location.latitude);
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!(records[i].time == timestamp_of(i)))
            throw StructuralError(fmt::format("record {} is out of calendar order", i + 1));
        try {
            records[i].validate();
        } catch (const ValidationError& e) {
            const auto& t = records[i].time;
            throw ValidationError(fmt::format("record {} ({}/{} hour {}): {}", i + 1, t.month,
                                              t.day, t.hour, e.what()));
        }
    }
}

WeatherFormat parse_weather_format(std::string_view name)
{
    if (name == "epw") return WeatherFormat::epw;
    if (name == "csv") return WeatherFormat::csv;
    throw ValidationError(fmt::format("unknown weather format '{}'", name));
}

std::string_view to_string(WeatherFormat format)
{
    return format == WeatherFormat::epw ? "epw" : "csv";
}

WeatherYear parse_weather(std::istream& in, WeatherFormat format, const Location& location)
{
    return format == WeatherFormat::epw ? parse_epw(in) : parse_csv(in, location);
}

WeatherYear read_weather_file(const std::filesystem::path& path, WeatherFormat format,
                              const Location& location)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open weather file " + path.string());
    return parse_weather(in, format, location);
}

void write_weather(std::ostream& out, const WeatherYear& year, WeatherFormat format)
{
    year.validate();
    if (format == WeatherFormat::epw)
        write_epw(out, year);
    else
        write_csv(out, year);
}

void write_weather_file(const std::filesystem::path& path, const WeatherYear& year,
                        WeatherFormat format)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write weather file " + path.string());
    write_weather(out, year, format);
}

double field_value(const HourlyWeatherRecord& r, WeatherField field)
{
    switch (field) {
    case WeatherField::dry_bulb: return r.dry_bulb;
    case WeatherField::dew_point: return r.dew_point;
    case WeatherField::rel_humidity: return r.rel_humidity;
    case WeatherField::pressure: return r.pressure;
    case WeatherField::ghi: return r.ghi;
    case WeatherField::dni: return r.dni;
    case WeatherField::dhi: return r.dhi;
    case WeatherField::wind_speed: return r.wind_speed;
    case WeatherField::wind_direction: return r.wind_direction;
    case WeatherField::humidity_ratio: return r.humidity_ratio();
    }
    return 0.0;
}

double monthly_mean(const WeatherYear& year, WeatherField field, int month)
{
    if (month < 1 || month > 12) throw DomainError("month must be within 1..12");
    const std::size_t begin = first_hour_of_month(month);
    const std::size_t end = std::min(begin + hours_in_month(month), year.records.size());
    if (begin >= end) return 0.0;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) sum += field_value(year.records[i], field);
    return sum / static_cast<double>(end - begin);
}

double annual_mean(const WeatherYear& year, WeatherField field)
{
    if (year.records.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : year.records) sum += field_value(r, field);
    return sum / static_cast<double>(year.records.size());
}

} // namespace climroom
