#include "climroom/components.hpp"
#include "climroom/error.hpp"
#include "climroom/morph.hpp"
#include "climroom/solar.hpp"
#include "climroom/study.hpp"
#include "climroom/synthetic.hpp"
#include "climroom/weather.hpp"
#include "climroom/zone.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace climroom;

namespace {

constexpr int kValidationFailure = 1;
constexpr int kRunFailure = 2;

struct WeatherInput {
    fs::path path;
    std::optional<double> lat, lon, tz;
    bool resplit = false;
};

void add_weather_options(CLI::App* cmd, WeatherInput& in, std::string_view flag)
{
    cmd->add_option(std::string(flag), in.path, "Baseline or future weather (.epw or .csv)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--lat", in.lat, "Latitude for CSV weather, degrees north");
    cmd->add_option("--lon", in.lon, "Longitude for CSV weather, degrees east");
    cmd->add_option("--tz", in.tz, "Standard time zone for CSV weather, hours");
    cmd->add_flag("--resplit", in.resplit, "Recompute DNI/DHI from GHI");
}

WeatherYear load_weather(const WeatherInput& in)
{
    const auto format = in.path.extension() == ".csv" ? WeatherFormat::csv : WeatherFormat::epw;
    Location loc;
    loc.name = in.path.stem().string();
    if (format == WeatherFormat::csv) {
        if (!in.lat || !in.lon || !in.tz) throw ValidationError("CSV weather needs --lat, --lon and --tz");
        loc.latitude = *in.lat;
        loc.longitude = *in.lon;
        loc.timezone = *in.tz;
    }
    auto year = read_weather_file(in.path, format, loc);
    if (in.lat) year.location.latitude = *in.lat;
    if (in.lon) year.location.longitude = *in.lon;
    if (in.tz) year.location.timezone = *in.tz;
    if (in.resplit) solar::resplit_irradiance(year);
    return year;
}

struct RoomInput {
    std::optional<fs::path> config;
    std::vector<double> walls{0.0, 90.0};
};

void add_room_options(CLI::App* cmd, RoomInput& in)
{
    cmd->add_option("--config", in.config, "Archetype overrides (JSON; a study config's \"archetype\" is used)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--walls", in.walls, "Wall azimuths, degrees from north")->expected(2)->delimiter(',');
}

zone::RoomArchetype load_room(const RoomInput& in)
{
    nlohmann::json overrides = nlohmann::json::object();
    if (in.config) {
        std::ifstream f(*in.config);
        try {
            overrides = nlohmann::json::parse(f);
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(fmt::format("{}: {}", in.config->string(), e.what()));
        }
        if (overrides.contains("archetype")) overrides = overrides["archetype"];
    }
    return study::archetype_from_json(overrides, in.walls.at(0), in.walls.at(1));
}

std::ofstream open_output(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    return out;
}

int run_morph(const WeatherInput& in, const std::vector<fs::path>& shift_files, const std::string& klass,
              const fs::path& out_path, const std::string& format)
{
    const auto baseline = load_weather(in);
    std::vector<morph::GcmShiftTable> tables;
    for (const auto& p : shift_files) tables.push_back(morph::read_shift_file(p));
    for (const auto& t : tables) {
        if (t.scenario != tables.front().scenario || t.period != tables.front().period)
            throw ValidationError("shift files mix scenarios or periods");
    }
    const auto& loc = baseline.location;
    std::vector<morph::GcmSiteShifts> site;
    for (const auto& t : tables) site.push_back(morph::localize(t, loc.latitude, loc.longitude));

    morph::MorphResult result;
    if (site.size() == 1) {
        result = morph::morph_year(baseline, site.front().months);
    } else {
        const auto classes = morph::build_model_classes(site);
        result = morph::morph_year(baseline, classes.get(morph::parse_class_kind(klass)));
    }
    write_weather_file(out_path, result.year, parse_weather_format(format));
    fmt::print("wrote {} ({} saturation clamps)\n", out_path.string(), result.saturation_clamps);
    return 0;
}

void print_result_row(std::ostream& out, std::string_view name, const zone::AnnualResult& r)
{
    out << "weather,heating_kWh,cooling_sensible_kWh,cooling_latent_kWh,cooling_total_kWh,usage_hours,"
           "heating_hours,cooling_hours,warmup_days\n";
    out << fmt::format("{},{:.3f},{:.3f},{:.3f},{:.3f},{},{},{},{}\n", name, r.heating_kwh, r.cooling_sensible_kwh,
                       r.cooling_latent_kwh, r.cooling_total_kwh, r.usage_hours, r.heating_hours, r.cooling_hours,
                       r.warmup_days);
}

int run_simulate(const WeatherInput& in, const RoomInput& room_in, const std::optional<fs::path>& out_dir, bool trace)
{
    const auto weather = load_weather(in);
    const auto room = load_room(room_in);
    zone::SimulationOptions options;
    options.record_trace = trace;
    const auto result = zone::simulate_year(room, weather, options);
    const auto name = in.path.stem().string();
    fmt::print(stderr, "volume {:.2f} m3, infiltration {:.2f} ACH = {:.2f} L/s\n", room.volume(), room.infiltration_ach,
               room.volume() * room.infiltration_ach / 3.6);
    if (out_dir) {
        auto f = open_output(*out_dir / "simulation.csv");
        print_result_row(f, name, result);
        if (trace) {
            auto t = open_output(*out_dir / "trace.csv");
            study::write_trace_csv(t, result);
        }
    } else {
        print_result_row(std::cout, name, result);
        if (trace) study::write_trace_csv(std::cout, result);
    }
    return 0;
}

int run_components(const WeatherInput& in, const RoomInput& room_in, const std::string& ordering_text,
                   const std::string& mode_text, const std::optional<fs::path>& out_dir, unsigned workers)
{
    const auto weather = load_weather(in);
    const auto room = load_room(room_in);
    std::vector<components::Ordering> orderings;
    if (ordering_text == "all") orderings = components::all_orderings();
    else orderings = {components::parse_ordering(ordering_text)};
    std::vector<components::LoadMode> modes;
    if (mode_text == "cooling" || mode_text == "both") modes.push_back(components::LoadMode::cooling);
    if (mode_text == "heating" || mode_text == "both") modes.push_back(components::LoadMode::heating);

    const auto variants = components::run_variants(room, weather, orderings, {}, workers);
    std::ostringstream csv;
    csv << "weather,mode,ordering,walls_kWh,windows_kWh,inf_sen_kWh,inf_lat_kWh,int_sen_kWh,int_lat_kWh,total_kWh,"
           "walls_pct,windows_pct,inf_sen_pct,inf_lat_pct,int_sen_pct,int_lat_pct\n";
    for (auto mode : modes) {
        std::vector<components::ComponentBreakdown> all;
        for (const auto& o : orderings) {
            const auto b = components::breakdown_from_variants(variants, o, mode, room.gross_wall_area(),
                                                               room.net_wall_area());
            csv << fmt::format("{},{},{}", in.path.stem().string(), components::to_string(mode),
                               components::to_string(o));
            for (double v : b.values()) csv << fmt::format(",{:.3f}", v);
            csv << fmt::format(",{:.3f}", b.total);
            for (double v : b.values())
                csv << ',' << (b.shares_valid() ? fmt::format("{:.2f}", b.share(v)) : std::string(study::kUndefinedMarker));
            csv << '\n';
            all.push_back(b);
        }
        if (all.size() > 1 && all.front().shares_valid()) {
            const auto spread = components::spread_over_orderings(all);
            std::string line = fmt::format("{} share spread over orderings (points):", components::to_string(mode));
            for (std::size_t i = 0; i < spread.spread.size(); ++i)
                line += fmt::format(" {}={:.2f}", components::kComponentNames[i], spread.spread[i]);
            std::cerr << line << '\n';
        }
    }
    if (out_dir) open_output(*out_dir / "components.csv") << csv.str();
    else std::cout << csv.str();
    return 0;
}

void print_reference(const study::StudyReport& report, const study::StudyConfig& config)
{
    fmt::print("{:<12} {:>8} {:>16} {:>16} {:>8}   (reference | simulated)\n", "city", "hours", "sensible",
               "latent", "total");
    for (const auto& ref : study::reference_cooling()) {
        for (const auto& job : report.jobs) {
            if (!job.ok || !job.key.baseline || config.cities[job.key.city].name != ref.city) continue;
            const auto& r = job.result;
            fmt::print("{:<12} {:>8} {:>16} {:>16} {:>8.0f}\n", ref.city, ref.usage_hours,
                       study::format_with_share(ref.sensible, ref.total),
                       study::format_with_share(ref.latent, ref.total), ref.total);
            fmt::print("{:<12} {:>8} {:>16} {:>16} {:>8.0f}\n", "", r.usage_hours,
                       study::format_with_share(r.cooling_sensible_kwh, r.cooling_total_kwh),
                       study::format_with_share(r.cooling_latent_kwh, r.cooling_total_kwh), r.cooling_total_kwh);
        }
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Single-zone room energy simulation under present and morphed future weather"};
    app.require_subcommand(1);

    WeatherInput morph_in;
    std::vector<fs::path> shift_files;
    std::string klass = "median";
    fs::path morph_out;
    std::string morph_format = "epw";
    auto* morph_cmd = app.add_subcommand("morph", "Morph a baseline year with GCM shift files");
    add_weather_options(morph_cmd, morph_in, "--baseline");
    morph_cmd->add_option("--shifts", shift_files, "Shift files for one scenario and period")
        ->required()
        ->check(CLI::ExistingFile);
    morph_cmd->add_option("--class", klass, "Model class when several GCMs are given")
        ->check(CLI::IsMember({"min", "median", "max"}));
    morph_cmd->add_option("--out", morph_out, "Output weather file")->required();
    morph_cmd->add_option("--format", morph_format, "Output format")->check(CLI::IsMember({"epw", "csv"}));

    WeatherInput sim_in;
    RoomInput sim_room;
    std::optional<fs::path> sim_out;
    bool sim_trace = false;
    auto* sim_cmd = app.add_subcommand("simulate", "Annual heating and cooling loads for one weather year");
    add_weather_options(sim_cmd, sim_in, "--weather");
    add_room_options(sim_cmd, sim_room);
    sim_cmd->add_option("--out", sim_out, "Output directory (default: stdout)");
    sim_cmd->add_flag("--trace", sim_trace, "Also write the hourly trace");

    WeatherInput comp_in;
    RoomInput comp_room;
    std::string ordering = "all";
    std::string mode = "both";
    std::optional<fs::path> comp_out;
    unsigned comp_workers = 1;
    auto* comp_cmd = app.add_subcommand("components", "Attribute annual loads to building elements");
    add_weather_options(comp_cmd, comp_in, "--weather");
    add_room_options(comp_cmd, comp_room);
    comp_cmd->add_option("--ordering", ordering, "\"all\" or e.g. windows,infiltration,internal");
    comp_cmd->add_option("--mode", mode, "Load mode")->check(CLI::IsMember({"cooling", "heating", "both"}));
    comp_cmd->add_option("--out", comp_out, "Output directory (default: stdout)");
    comp_cmd->add_option("--workers", comp_workers, "Parallel simulations")->check(CLI::PositiveNumber);

    fs::path study_config;
    std::optional<fs::path> study_out;
    std::optional<unsigned> study_workers;
    bool study_trace = false;
    std::optional<std::string> study_format;
    auto* study_cmd = app.add_subcommand("study", "Run the full city x period x scenario x model matrix");
    study_cmd->add_option("--config", study_config, "Study config (JSON)")->required();
    study_cmd->add_option("--out", study_out, "Output directory (overrides the config)");
    study_cmd->add_option("--workers", study_workers, "Worker threads")->check(CLI::PositiveNumber);
    study_cmd->add_flag("--trace", study_trace, "Write hourly traces per run");
    study_cmd->add_option("--format", study_format, "Also write morphed weather in this format")
        ->check(CLI::IsMember({"epw", "csv"}));

    fs::path validate_config;
    auto* validate_cmd = app.add_subcommand("validate", "Parse and check every input of a study config");
    validate_cmd->add_option("--config", validate_config, "Study config (JSON)")->required();

    fs::path demo_out;
    auto* demo_cmd = app.add_subcommand("demo", "Write synthetic weather, shift files and a study config");
    demo_cmd->add_option("--out", demo_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Usage errors count as validation failures; help and version exit 0.
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*morph_cmd) return run_morph(morph_in, shift_files, klass, morph_out, morph_format);
        if (*sim_cmd) return run_simulate(sim_in, sim_room, sim_out, sim_trace);
        if (*comp_cmd) return run_components(comp_in, comp_room, ordering, mode, comp_out, comp_workers);
        if (*validate_cmd) {
            const auto prepared = study::prepare_study(study::StudyConfig::load(validate_config));
            fmt::print("ok: {} cities, {} input files, {} simulations planned\n", prepared.config.cities.size(),
                       prepared.input_hashes.size(), prepared.config.simulation_count());
            return 0;
        }
        if (*demo_cmd) {
            fmt::print("wrote {}\n", synthetic::write_demo_study(demo_out).string());
            return 0;
        }
        if (*study_cmd) {
            auto config = study::StudyConfig::load(study_config);
            if (study_out) config.output_dir = *study_out;
            if (study_workers) config.workers = *study_workers;
            if (study_trace) config.trace = true;
            if (study_format) {
                config.write_weather = true;
                config.weather_format = parse_weather_format(*study_format);
            }
            const auto prepared = study::prepare_study(config);
            const auto report = study::run_prepared(prepared);
            print_reference(report, config);
            fmt::print("{} of {} simulations written to {}\n", report.simulation_rows(), config.simulation_count(),
                       report.output_dir.string());
            for (const auto& job : report.jobs) {
                if (!job.ok)
                    fmt::print(stderr, "failed: {} {} {} {}: {}\n", config.cities[job.key.city].name,
                               job.key.period_label(), job.key.scenario_label(), job.key.model_label(), job.error);
            }
            return report.exit_code();
        }
    } catch (const ValidationError& e) {
        fmt::print(stderr, "validation error: {}\n", e.what());
        return kValidationFailure;
    } catch (const ParseError& e) {
        fmt::print(stderr, "parse error: {}\n", e.what());
        return kValidationFailure;
    } catch (const StructuralError& e) {
        fmt::print(stderr, "invalid input: {}\n", e.what());
        return kValidationFailure;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kRunFailure;
    }
    return 0;
}
