#pragma once

#include "climroom/components.hpp"
#include "climroom/morph.hpp"
#include "climroom/weather.hpp"
#include "climroom/zone.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace climroom::study {

struct CitySpec {
    std::string name;
    std::filesystem::path weather;
    WeatherFormat format = WeatherFormat::epw;
    // Used for CSV weather; EPW headers carry their own location.
    double latitude = 0.0;
    double longitude = 0.0;
    double timezone = 0.0;
    double wall_azimuths[2] = {0.0, 90.0};
};

struct AttributionSettings {
    bool enabled = true;
    std::vector<components::Ordering> orderings{components::kDefaultOrdering};
};

/// Declarative study description loaded from JSON. Relative paths resolve
/// against the config file's directory.
struct StudyConfig {
    std::vector<CitySpec> cities;
    std::vector<morph::Period> periods;
    std::vector<morph::Scenario> scenarios;
    std::vector<morph::ClassKind> classes;
    std::vector<std::filesystem::path> shift_files;
    nlohmann::json archetype = nlohmann::json::object();
    zone::SimulationOptions simulation;
    AttributionSettings attribution;
    bool resplit_baseline = false;
    bool write_weather = false;
    WeatherFormat weather_format = WeatherFormat::epw;
    bool trace = false;
    std::filesystem::path output_dir = "results";
    unsigned workers = 1;
    std::string config_hash;

    /// Throws ValidationError on unknown keys or bad values.
    static StudyConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = ".");
    static StudyConfig load(const std::filesystem::path& path);

    std::size_t simulation_count() const
    {
        return cities.size() * (1 + periods.size() * scenarios.size() * classes.size());
    }
};

/// Default archetype with overrides from a JSON object (dimensions, layers,
/// window, schedule, setpoints, infiltration_ach, ...).
zone::RoomArchetype archetype_from_json(const nlohmann::json& overrides, double first_azimuth,
                                        double second_azimuth);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct ChangeRecord {
    double heating_delta = 0.0;
    std::optional<double> heating_pct;
    double cooling_delta = 0.0;
    std::optional<double> cooling_pct;
};

/// Future minus baseline for heating and total cooling. A zero baseline
/// leaves the percentage undefined.
ChangeRecord report_changes(const zone::AnnualResult& baseline, const zone::AnnualResult& future);

inline constexpr std::string_view kUndefinedMarker = "NA";
std::string format_percent(const std::optional<double>& pct, int decimals = 2);

/// "2410 (78 %)".
std::string format_with_share(double value, double total);

struct JobKey {
    std::size_t city = 0;
    bool baseline = true;
    morph::Period period = morph::Period::p2030s;
    morph::Scenario scenario = morph::Scenario::rcp45;
    morph::ClassKind model = morph::ClassKind::median;

    std::string period_label() const;
    std::string scenario_label() const;
    std::string model_label() const;
};

struct ClimateSummary {
    double dry_bulb = 0.0;          // C, annual mean
    double specific_humidity = 0.0; // kg/kg
    double rel_humidity = 0.0;      // %
    double ghi = 0.0;               // W/m2
    double wind_speed = 0.0;        // m/s
};

ClimateSummary summarise_climate(const WeatherYear& year);

struct JobOutcome {
    JobKey key;
    bool ok = false;
    std::string error;
    zone::AnnualResult result;
    std::vector<components::ComponentBreakdown> breakdowns;
    ClimateSummary climate;
    std::size_t saturation_clamps = 0;
    double runtime_s = 0.0;
};

/// Everything a study needs, parsed and checked before any simulation.
struct PreparedStudy {
    StudyConfig config;
    std::vector<WeatherYear> baselines;
    /// Per city, keyed by (scenario, period) in config order.
    std::vector<std::vector<morph::ModelClasses>> classes;
    std::vector<std::pair<std::string, std::string>> input_hashes; // path, sha256
};

/// Fail-fast pass: every file exists and parses, each (scenario, period)
/// has at least two GCM tables. Throws ValidationError.
PreparedStudy prepare_study(const StudyConfig& config);

struct StudyReport {
    std::vector<JobOutcome> jobs; // ordered by job key
    std::filesystem::path output_dir;
    std::size_t failures = 0;

    std::size_t simulation_rows() const;
    int exit_code() const { return failures == 0 ? 0 : 2; }
};

StudyReport run_study(const StudyConfig& config);
StudyReport run_prepared(const PreparedStudy& prepared);

/// Reference baseline cooling of the archetype room, for side-by-side
/// comparison only.
struct ReferenceCooling {
    std::string_view city;
    int usage_hours;
    double sensible;
    double latent;
    double total;
};
const std::vector<ReferenceCooling>& reference_cooling();

void write_trace_csv(std::ostream& out, const zone::AnnualResult& result);
void write_simulation_csv(std::ostream& out, const std::vector<JobOutcome>& jobs,
                          const std::vector<CitySpec>& cities);
void write_components_csv(std::ostream& out, const std::vector<JobOutcome>& jobs,
                          const std::vector<CitySpec>& cities);

inline constexpr std::string_view kSimulationHeader =
    "city,period,scenario,model,heating_kWh,cooling_sensible_kWh,cooling_latent_kWh,cooling_total_kWh,"
    "usage_hours";
inline constexpr std::string_view kComponentsHeader =
    "city,period,scenario,model,mode,ordering,walls_kWh,windows_kWh,inf_sen_kWh,inf_lat_kWh,int_sen_kWh,"
    "int_lat_kWh,total_kWh,walls_pct,windows_pct,inf_sen_pct,inf_lat_pct,int_sen_pct,int_lat_pct";

} // namespace climroom::study
