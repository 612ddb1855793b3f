#pragma once

#include "climroom/weather.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace climroom::morph {

enum class Scenario { rcp45, rcp85 };
enum class Period { p2030s, p2060s, p2090s };
enum class ClassKind { min, median, max };

Scenario parse_scenario(std::string_view text);
Period parse_period(std::string_view text);
ClassKind parse_class_kind(std::string_view text);
std::string_view to_string(Scenario s);
std::string_view to_string(Period p);
std::string_view to_string(ClassKind k);

/// One month's change signal. Temperature is additive (plus an optional
/// stretch about the monthly mean); the rest are multiplicative.
struct MonthShift {
    double d_temperature = 0.0; // C
    double alpha = 0.0;         // temperature stretch factor
    double humidity_scale = 1.0;
    double ghi_scale = 1.0;
    double wind_scale = 1.0;

    friend bool operator==(const MonthShift&, const MonthShift&) = default;
};

using MonthlyShifts = std::array<MonthShift, 12>;

struct GridPoint {
    double latitude = 0.0;
    double longitude = 0.0;
    MonthlyShifts months{};
};

/// Ensemble-averaged monthly shifts of one GCM for one scenario and period.
struct GcmShiftTable {
    std::string gcm_id;
    Scenario scenario = Scenario::rcp45;
    Period period = Period::p2030s;
    std::vector<GridPoint> grid;

    std::size_t rows_per_variable() const { return grid.size() * 12; }
    void validate() const;
};

inline constexpr std::string_view kShiftFileHeader =
    "gcm_id,scenario,period,lat,lon,month,dT_C,alpha,q_scale,ghi_scale,wind_scale";

/// Reads one table from the shift interchange CSV. Every row must carry the
/// same gcm_id, scenario and period, and each grid point all twelve months.
GcmShiftTable ingest_shift_file(std::istream& in);
GcmShiftTable read_shift_file(const std::filesystem::path& path);
void write_shift_file(std::ostream& out, const GcmShiftTable& table);

struct GridValue {
    double latitude = 0.0;
    double longitude = 0.0;
    double value = 0.0;
};

double great_circle_km(double lat1, double lon1, double lat2, double lon2);

struct IdwOptions {
    double power = 2.0;
    std::size_t nearest = 4; // 0 uses every grid point
};

/// Inverse-distance weighting over great-circle distance. A target within
/// 1 km of a grid point takes that point's value.
double idw_interpolate(std::span<const GridValue> grid, double latitude, double longitude,
                       const IdwOptions& options = {});

/// A GCM's shifts interpolated to one site.
struct GcmSiteShifts {
    std::string gcm_id;
    MonthlyShifts months{};
};

GcmSiteShifts localize(const GcmShiftTable& table, double latitude, double longitude,
                       const IdwOptions& options = {});

struct ModelClass {
    ClassKind kind = ClassKind::median;
    MonthlyShifts months{};
    /// GCM whose companion variables were used, per month.
    std::array<std::string, 12> source_gcm{};
};

struct ModelClasses {
    ModelClass min;
    ModelClass median;
    ModelClass max;

    const ModelClass& get(ClassKind kind) const;
};

/// Per-month min / median / max of the GCMs' temperature shifts. Companion
/// variables come from the GCM at (or nearest to) the statistic, ties going
/// to the lexicographically smallest gcm_id. Needs at least two GCMs.
ModelClasses build_model_classes(std::span<const GcmSiteShifts> gcms);

struct MorphResult {
    WeatherYear year;
    std::size_t saturation_clamps = 0;
};

/// Shift-and-stretch morphing of a baseline year. Fields whose monthly
/// signal is the identity are copied unchanged.
MorphResult morph_year(const WeatherYear& baseline, const MonthlyShifts& shifts);
MorphResult morph_year(const WeatherYear& baseline, const ModelClass& model);

} // namespace climroom::morph
