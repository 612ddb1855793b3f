#include "climroom/study.hpp"

#include "climroom/error.hpp"
#include "climroom/parallel.hpp"
#include "climroom/solar.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace climroom::study {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, std::string_view where)
{
    if (!obj.is_object()) throw ValidationError(fmt::format("{} must be an object", where));
    for (const auto& [key, _] : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ValidationError(fmt::format("unknown key '{}' in {}", key, where));
    }
}

template <typename T>
T get(const json& obj, std::string_view key, std::string_view where)
{
    try {
        return obj.at(std::string(key)).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(fmt::format("{}.{}: {}", where, key, e.what()));
    }
}

template <typename T>
void maybe(const json& obj, std::string_view key, T& target, std::string_view where)
{
    if (obj.contains(key)) target = get<T>(obj, key, where);
}

zone::DailyInterval interval_from_json(const json& j, std::string_view where)
{
    if (!j.is_array() || j.size() != 2)
        throw ValidationError(fmt::format("{} must be [start_hour, end_hour]", where));
    return {j[0].get<int>(), j[1].get<int>()};
}

template <typename T, typename Parse>
std::vector<T> enum_list(const json& j, std::string_view key, Parse parse)
{
    std::vector<T> out;
    for (const auto& v : get<std::vector<std::string>>(j, key, "study")) {
        try {
            out.push_back(parse(v));
        } catch (const std::exception& e) {
            throw ValidationError(fmt::format("study.{}: {}", key, e.what()));
        }
    }
    if (out.empty()) throw ValidationError(fmt::format("study.{} is empty", key));
    if (std::set<T>(out.begin(), out.end()).size() != out.size())
        throw ValidationError(fmt::format("study.{} has duplicates", key));
    return out;
}

std::string slug(std::string_view s)
{
    std::string out;
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-')
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        else
            out += '_';
    }
    return out;
}

std::string fixed(double v, int decimals)
{
    if (std::abs(v) < 0.5 * std::pow(10.0, -decimals)) v = 0.0;
    return fmt::format("{:.{}f}", v, decimals);
}

std::string row_prefix(const JobOutcome& job, const std::vector<CitySpec>& cities)
{
    return fmt::format("{},{},{},{}", cities[job.key.city].name, job.key.period_label(),
                       job.key.scenario_label(), job.key.model_label());
}

double cooling_total(const zone::AnnualResult& r) { return r.cooling_total_kwh; }
double heating_total(const zone::AnnualResult& r) { return r.heating_kwh; }

const components::ComponentBreakdown* find_breakdown(const JobOutcome& job, components::LoadMode mode,
                                                     const components::Ordering& ordering)
{
    for (const auto& b : job.breakdowns)
        if (b.mode == mode && b.ordering == ordering) return &b;
    return nullptr;
}

} // namespace

std::string JobKey::period_label() const
{
    return baseline ? "baseline" : std::string(morph::to_string(period));
}

std::string JobKey::scenario_label() const
{
    return baseline ? "baseline" : std::string(morph::to_string(scenario));
}

std::string JobKey::model_label() const
{
    return baseline ? "baseline" : std::string(morph::to_string(model));
}

zone::RoomArchetype archetype_from_json(const json& o, double first_azimuth, double second_azimuth)
{
    const json j = o.is_null() ? json::object() : o;
    check_keys(j,
               {"dimensions", "wall_layers", "exterior_absorptance", "h_interior", "h_exterior", "window",
                "infiltration_ach", "schedule", "setpoints", "air", "ground_albedo"},
               "archetype");
    auto room = zone::default_archetype(first_azimuth, second_azimuth);
    if (j.contains("dimensions")) {
        const auto& d = j["dimensions"];
        check_keys(d, {"width", "depth", "height"}, "archetype.dimensions");
        maybe(d, "width", room.dimensions.width, "archetype.dimensions");
        maybe(d, "depth", room.dimensions.depth, "archetype.dimensions");
        maybe(d, "height", room.dimensions.height, "archetype.dimensions");
        room.walls[0].gross_area = room.dimensions.width * room.dimensions.height;
        room.walls[1].gross_area = room.dimensions.depth * room.dimensions.height;
    }
    for (auto& wall : room.walls) {
        if (j.contains("wall_layers")) {
            wall.layers.clear();
            for (const auto& l : j["wall_layers"]) {
                check_keys(l, {"thickness", "conductivity", "density", "specific_heat"}, "archetype.wall_layers");
                wall.layers.push_back({get<double>(l, "thickness", "layer"), get<double>(l, "conductivity", "layer"),
                                       get<double>(l, "density", "layer"),
                                       get<double>(l, "specific_heat", "layer")});
            }
        }
        maybe(j, "exterior_absorptance", wall.exterior_absorptance, "archetype");
        maybe(j, "h_interior", wall.h_interior, "archetype");
        maybe(j, "h_exterior", wall.h_exterior, "archetype");
    }
    if (j.contains("window")) {
        const auto& w = j["window"];
        check_keys(w, {"width", "height", "u_value", "shgc", "shade_multiplier", "overhang_depth", "overhang_gap"},
                   "archetype.window");
        for (auto& win : room.windows) {
            maybe(w, "width", win.width, "archetype.window");
            maybe(w, "height", win.height, "archetype.window");
            maybe(w, "u_value", win.u_value, "archetype.window");
            maybe(w, "shgc", win.shgc, "archetype.window");
            maybe(w, "shade_multiplier", win.interior_shade_multiplier, "archetype.window");
            maybe(w, "overhang_depth", win.overhang.depth, "archetype.window");
            maybe(w, "overhang_gap", win.overhang.gap_above_window, "archetype.window");
        }
    }
    maybe(j, "infiltration_ach", room.infiltration_ach, "archetype");
    if (j.contains("schedule")) {
        const auto& s = j["schedule"];
        check_keys(s, {"occupied", "occupants", "sensible_per_person", "latent_per_person", "lighting_power", "lighting"},
                   "archetype.schedule");
        auto& sch = room.schedule;
        if (s.contains("occupied")) sch.occupied = interval_from_json(s["occupied"], "archetype.schedule.occupied");
        if (s.contains("lighting")) sch.lighting = interval_from_json(s["lighting"], "archetype.schedule.lighting");
        maybe(s, "occupants", sch.occupants, "archetype.schedule");
        maybe(s, "sensible_per_person", sch.sensible_per_person, "archetype.schedule");
        maybe(s, "latent_per_person", sch.latent_per_person, "archetype.schedule");
        maybe(s, "lighting_power", sch.lighting_power, "archetype.schedule");
    }
    if (j.contains("setpoints")) {
        const auto& s = j["setpoints"];
        check_keys(s, {"heating", "cooling", "dehumidify_rh"}, "archetype.setpoints");
        maybe(s, "heating", room.setpoints.heating, "archetype.setpoints");
        maybe(s, "cooling", room.setpoints.cooling, "archetype.setpoints");
        maybe(s, "dehumidify_rh", room.setpoints.dehumidify_rh, "archetype.setpoints");
    }
    if (j.contains("air")) {
        const auto& a = j["air"];
        check_keys(a, {"rho_air", "c_p", "h_fg"}, "archetype.air");
        maybe(a, "rho_air", room.air.rho_air, "archetype.air");
        maybe(a, "c_p", room.air.c_p, "archetype.air");
        maybe(a, "h_fg", room.air.h_fg, "archetype.air");
    }
    maybe(j, "ground_albedo", room.ground_albedo, "archetype");
    room.validate();
    return room;
}

StudyConfig StudyConfig::from_json(const json& j, const fs::path& base_dir)
{
    check_keys(j,
               {"cities", "periods", "scenarios", "model_classes", "shift_files", "archetype", "simulation",
                "attribution", "resplit_baseline", "write_weather", "weather_format", "trace", "output_dir",
                "workers"},
               "study");
    auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    StudyConfig c;
    if (!j.contains("cities") || !j["cities"].is_array() || j["cities"].empty())
        throw ValidationError("study.cities must be a non-empty array");
    std::set<std::string> names;
    for (const auto& cj : j["cities"]) {
        check_keys(cj, {"name", "weather", "format", "lat", "lon", "tz", "walls"}, "study.cities[]");
        CitySpec city;
        city.name = get<std::string>(cj, "name", "city");
        if (city.name.empty() || city.name.find(',') != std::string::npos)
            throw ValidationError(fmt::format("city name '{}' must be non-empty and comma-free", city.name));
        if (!names.insert(city.name).second)
            throw ValidationError(fmt::format("duplicate city '{}'", city.name));
        city.weather = resolve(get<std::string>(cj, "weather", city.name));
        if (cj.contains("format")) {
            city.format = parse_weather_format(get<std::string>(cj, "format", city.name));
        } else {
            city.format = city.weather.extension() == ".csv" ? WeatherFormat::csv : WeatherFormat::epw;
        }
        maybe(cj, "lat", city.latitude, city.name);
        maybe(cj, "lon", city.longitude, city.name);
        maybe(cj, "tz", city.timezone, city.name);
        if (city.format == WeatherFormat::csv && (!cj.contains("lat") || !cj.contains("lon") || !cj.contains("tz")))
            throw ValidationError(fmt::format("city '{}': CSV weather needs lat, lon and tz", city.name));
        if (cj.contains("walls")) {
            const auto walls = get<std::vector<double>>(cj, "walls", city.name);
            if (walls.size() != 2)
                throw ValidationError(fmt::format("city '{}': walls needs two azimuths", city.name));
            city.wall_azimuths[0] = walls[0];
            city.wall_azimuths[1] = walls[1];
        }
        c.cities.push_back(std::move(city));
    }
    c.periods = enum_list<morph::Period>(j, "periods", morph::parse_period);
    c.scenarios = enum_list<morph::Scenario>(j, "scenarios", morph::parse_scenario);
    c.classes = enum_list<morph::ClassKind>(j, "model_classes", morph::parse_class_kind);
    for (const auto& p : get<std::vector<std::string>>(j, "shift_files", "study")) c.shift_files.push_back(resolve(p));
    if (j.contains("archetype")) c.archetype = j["archetype"];
    if (j.contains("simulation")) {
        const auto& s = j["simulation"];
        check_keys(s, {"dt", "min_nodes_per_layer", "max_cell_thickness", "max_warmup_days", "warmup_tolerance"},
                   "study.simulation");
        maybe(s, "dt", c.simulation.dt, "simulation");
        maybe(s, "min_nodes_per_layer", c.simulation.min_nodes_per_layer, "simulation");
        maybe(s, "max_cell_thickness", c.simulation.max_cell_thickness, "simulation");
        maybe(s, "max_warmup_days", c.simulation.max_warmup_days, "simulation");
        maybe(s, "warmup_tolerance", c.simulation.warmup_tolerance, "simulation");
    }
    if (j.contains("attribution")) {
        const auto& a = j["attribution"];
        check_keys(a, {"enabled", "orderings"}, "study.attribution");
        maybe(a, "enabled", c.attribution.enabled, "attribution");
        if (a.contains("orderings")) {
            const auto& o = a["orderings"];
            if (o.is_string() && o.get<std::string>() == "all") {
                c.attribution.orderings = components::all_orderings();
            } else if (o.is_string() && o.get<std::string>() == "default") {
                c.attribution.orderings = {components::kDefaultOrdering};
            } else if (o.is_array() && !o.empty()) {
                c.attribution.orderings.clear();
                for (const auto& s : o) c.attribution.orderings.push_back(components::parse_ordering(s.get<std::string>()));
            } else {
                throw ValidationError("attribution.orderings must be \"default\", \"all\" or a list");
            }
        }
    }
    maybe(j, "resplit_baseline", c.resplit_baseline, "study");
    maybe(j, "write_weather", c.write_weather, "study");
    if (j.contains("weather_format")) c.weather_format = parse_weather_format(get<std::string>(j, "weather_format", "study"));
    maybe(j, "trace", c.trace, "study");
    if (j.contains("output_dir")) c.output_dir = resolve(get<std::string>(j, "output_dir", "study"));
    else c.output_dir = base_dir / "results";
    maybe(j, "workers", c.workers, "study");
    if (c.workers == 0) throw ValidationError("study.workers must be at least 1");
    if (!(c.simulation.dt > 0.0) || std::fmod(3600.0, c.simulation.dt) != 0.0)
        throw ValidationError("simulation.dt", c.simulation.dt, "must divide 3600 s");
    c.config_hash = sha256_hex(j.dump());
    return c;
}

StudyConfig StudyConfig::load(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(fmt::format("cannot open config '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    json j;
    try {
        j = json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw ValidationError(fmt::format("config '{}': {}", path.string(), e.what()));
    }
    auto c = from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
    c.config_hash = sha256_hex(buffer.str());
    return c;
}

std::string sha256_hex(std::string_view bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw NumericalError("SHA-256 digest failed");
    std::string out;
    for (unsigned i = 0; i < len; ++i) out += fmt::format("{:02x}", digest[i]);
    return out;
}

std::string sha256_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError(fmt::format("cannot open '{}'", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return sha256_hex(buffer.str());
}

ChangeRecord report_changes(const zone::AnnualResult& baseline, const zone::AnnualResult& future)
{
    auto pct = [](double delta, double base) -> std::optional<double> {
        if (base == 0.0) return std::nullopt;
        return 100.0 * delta / base;
    };
    ChangeRecord r;
    r.heating_delta = heating_total(future) - heating_total(baseline);
    r.heating_pct = pct(r.heating_delta, heating_total(baseline));
    r.cooling_delta = cooling_total(future) - cooling_total(baseline);
    r.cooling_pct = pct(r.cooling_delta, cooling_total(baseline));
    return r;
}

std::string format_percent(const std::optional<double>& pct, int decimals)
{
    return pct ? fixed(*pct, decimals) : std::string(kUndefinedMarker);
}

std::string format_with_share(double value, double total)
{
    if (total == 0.0) return fmt::format("{:.0f} ({} %)", value, kUndefinedMarker);
    return fmt::format("{:.0f} ({:.0f} %)", value, 100.0 * value / total);
}

ClimateSummary summarise_climate(const WeatherYear& year)
{
    ClimateSummary s;
    s.dry_bulb = annual_mean(year, WeatherField::dry_bulb);
    double q = 0.0;
    for (const auto& r : year.records) {
        const double w = r.humidity_ratio();
        q += w / (1.0 + w);
    }
    s.specific_humidity = q / static_cast<double>(year.records.size());
    s.rel_humidity = annual_mean(year, WeatherField::rel_humidity);
    s.ghi = annual_mean(year, WeatherField::ghi);
    s.wind_speed = annual_mean(year, WeatherField::wind_speed);
    return s;
}

PreparedStudy prepare_study(const StudyConfig& config)
{
    PreparedStudy p;
    p.config = config;
    std::vector<std::string> errors;
    auto record = [&](const fs::path& path, auto&& body) {
        try {
            if (!fs::exists(path)) throw ValidationError("file not found");
            p.input_hashes.emplace_back(path.generic_string(), sha256_file(path));
            body();
        } catch (const std::exception& e) {
            errors.push_back(fmt::format("{}: {}", path.string(), e.what()));
        }
    };

    for (const auto& city : config.cities) {
        record(city.weather, [&] {
            Location loc;
            loc.name = city.name;
            loc.latitude = city.latitude;
            loc.longitude = city.longitude;
            loc.timezone = city.timezone;
            auto year = read_weather_file(city.weather, city.format, loc);
            if (config.resplit_baseline) solar::resplit_irradiance(year);
            p.baselines.push_back(std::move(year));
        });
        try {
            archetype_from_json(config.archetype, city.wall_azimuths[0], city.wall_azimuths[1]);
        } catch (const std::exception& e) {
            errors.push_back(fmt::format("archetype for {}: {}", city.name, e.what()));
        }
    }

    std::vector<morph::GcmShiftTable> tables;
    for (const auto& path : config.shift_files) record(path, [&] { tables.push_back(morph::read_shift_file(path)); });

    std::set<std::tuple<std::string, morph::Scenario, morph::Period>> seen;
    for (const auto& t : tables) {
        if (!seen.insert({t.gcm_id, t.scenario, t.period}).second)
            errors.push_back(fmt::format("duplicate shift table for {} {} {}", t.gcm_id, morph::to_string(t.scenario),
                                         morph::to_string(t.period)));
    }
    for (auto s : config.scenarios) {
        for (auto per : config.periods) {
            const auto n = std::count_if(tables.begin(), tables.end(),
                                         [&](const auto& t) { return t.scenario == s && t.period == per; });
            if (n < 2)
                errors.push_back(fmt::format("{} {} needs at least two GCM shift tables, found {}",
                                             morph::to_string(s), morph::to_string(per), n));
        }
    }

    if (!errors.empty()) {
        std::string msg = fmt::format("{} validation error(s):", errors.size());
        for (const auto& e : errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }

    for (std::size_t c = 0; c < config.cities.size(); ++c) {
        const auto& loc = p.baselines[c].location;
        std::vector<morph::ModelClasses> per_city;
        for (auto s : config.scenarios) {
            for (auto per : config.periods) {
                std::vector<morph::GcmSiteShifts> site;
                for (const auto& t : tables)
                    if (t.scenario == s && t.period == per) site.push_back(morph::localize(t, loc.latitude, loc.longitude));
                per_city.push_back(morph::build_model_classes(site));
            }
        }
        p.classes.push_back(std::move(per_city));
    }
    return p;
}

std::size_t StudyReport::simulation_rows() const
{
    return static_cast<std::size_t>(std::count_if(jobs.begin(), jobs.end(), [](const auto& j) { return j.ok; }));
}

const std::vector<ReferenceCooling>& reference_cooling()
{
    static const std::vector<ReferenceCooling> table{
        {"Ahmedabad", 2931, 1980, 336, 2315}, {"Bengaluru", 3111, 1100, 133, 1233},
        {"Chennai", 3650, 2410, 659, 3068},   {"Hyderabad", 3308, 1628, 191, 1818},
        {"Kolkata", 2807, 1653, 509, 2162},   {"Mumbai", 3567, 1851, 492, 2343},
        {"New Delhi", 2379, 1678, 277, 1955}, {"Srinagar", 1318, 491, 23, 514},
    };
    return table;
}

void write_trace_csv(std::ostream& out, const zone::AnnualResult& result)
{
    out << "month,day,hour,occupied,mode,t_zone_C,t_zone_min_C,t_zone_max_C,w_zone_kgkg,rh_zone_pct,"
           "rh_zone_max_pct,heating_Wh,cooling_sensible_Wh,latent_Wh\n";
    for (const auto& h : result.trace) {
        out << fmt::format("{},{},{},{},{},{},{},{},{:.6f},{},{},{},{},{}\n", h.time.month, h.time.day, h.time.hour,
                           h.occupied ? 1 : 0, zone::to_string(h.mode), fixed(h.t_zone, 3), fixed(h.t_zone_min, 3),
                           fixed(h.t_zone_max, 3), h.w_zone, fixed(h.rh_zone, 2), fixed(h.rh_zone_max, 2),
                           fixed(h.heating / 3600.0, 3), fixed(h.cooling_sensible / 3600.0, 3),
                           fixed(h.latent / 3600.0, 3));
    }
}

void write_simulation_csv(std::ostream& out, const std::vector<JobOutcome>& jobs, const std::vector<CitySpec>& cities)
{
    out << kSimulationHeader << '\n';
    for (const auto& j : jobs) {
        if (!j.ok) continue;
        const auto& r = j.result;
        out << fmt::format("{},{},{},{},{},{}\n", row_prefix(j, cities), fixed(r.heating_kwh, 3),
                           fixed(r.cooling_sensible_kwh, 3), fixed(r.cooling_latent_kwh, 3),
                           fixed(r.cooling_total_kwh, 3), r.usage_hours);
    }
}

void write_components_csv(std::ostream& out, const std::vector<JobOutcome>& jobs, const std::vector<CitySpec>& cities)
{
    out << kComponentsHeader << '\n';
    for (const auto& j : jobs) {
        if (!j.ok) continue;
        for (const auto& b : j.breakdowns) {
            out << fmt::format("{},{},{}", row_prefix(j, cities), components::to_string(b.mode),
                               components::to_string(b.ordering));
            for (double v : b.values()) out << ',' << fixed(v, 3);
            out << ',' << fixed(b.total, 3);
            for (double v : b.values()) out << ',' << (b.shares_valid() ? fixed(b.share(v), 2) : std::string(kUndefinedMarker));
            out << '\n';
        }
    }
}

namespace {

JobOutcome run_job(const PreparedStudy& p, const JobKey& key)
{
    const auto& config = p.config;
    const auto& city = config.cities[key.city];
    JobOutcome out;
    out.key = key;
    const auto start = std::chrono::steady_clock::now();
    try {
        WeatherYear morphed;
        const WeatherYear* weather = &p.baselines[key.city];
        if (!key.baseline) {
            const auto s = static_cast<std::size_t>(
                std::find(config.scenarios.begin(), config.scenarios.end(), key.scenario) - config.scenarios.begin());
            const auto per = static_cast<std::size_t>(
                std::find(config.periods.begin(), config.periods.end(), key.period) - config.periods.begin());
            const auto& classes = p.classes[key.city][s * config.periods.size() + per];
            auto m = morph::morph_year(*weather, classes.get(key.model));
            morphed = std::move(m.year);
            out.saturation_clamps = m.saturation_clamps;
            weather = &morphed;
        }
        out.climate = summarise_climate(*weather);
        const auto room = archetype_from_json(config.archetype, city.wall_azimuths[0], city.wall_azimuths[1]);
        auto options = config.simulation;
        options.record_trace = false;
        if (config.attribution.enabled) {
            auto variants = components::run_variants(room, *weather, config.attribution.orderings, options);
            for (auto mode : {components::LoadMode::cooling, components::LoadMode::heating})
                for (const auto& o : config.attribution.orderings)
                    out.breakdowns.push_back(components::breakdown_from_variants(
                        variants, o, mode, room.gross_wall_area(), room.net_wall_area()));
            out.result = std::move(variants.at(components::kAllElements));
        }
        if (config.trace || !config.attribution.enabled) {
            options.record_trace = config.trace;
            out.result = zone::simulate_year(room, *weather, options);
        }
        const auto stem = fmt::format("{}_{}_{}_{}", slug(city.name), slug(key.period_label()),
                                      slug(key.scenario_label()), slug(key.model_label()));
        if (config.trace) {
            std::ofstream f(config.output_dir / "trace" / (stem + ".csv"), std::ios::binary);
            write_trace_csv(f, out.result);
            out.result.trace.clear();
            out.result.trace.shrink_to_fit();
        }
        if (config.write_weather && !key.baseline) {
            write_weather_file(config.output_dir / "weather" /
                                   (stem + (config.weather_format == WeatherFormat::epw ? ".epw" : ".csv")),
                               *weather, config.weather_format);
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    out.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::vector<JobKey> job_keys(const StudyConfig& c)
{
    std::vector<JobKey> keys;
    for (std::size_t city = 0; city < c.cities.size(); ++city) {
        keys.push_back({city, true, {}, {}, {}});
        for (auto per : c.periods)
            for (auto s : c.scenarios)
                for (auto k : c.classes) keys.push_back({city, false, per, s, k});
    }
    return keys;
}

const JobOutcome* find_baseline(const std::vector<JobOutcome>& jobs, std::size_t city)
{
    for (const auto& j : jobs)
        if (j.key.city == city && j.key.baseline) return j.ok ? &j : nullptr;
    return nullptr;
}

void write_changes(const fs::path& dir, const std::vector<JobOutcome>& jobs, const std::vector<CitySpec>& cities)
{
    std::ofstream changes(dir / "changes.csv", std::ios::binary);
    changes << "city,period,scenario,model,heating_baseline_kWh,heating_future_kWh,heating_change_kWh,"
               "heating_change_pct,cooling_baseline_kWh,cooling_future_kWh,cooling_change_kWh,cooling_change_pct\n";
    std::ofstream cooling(dir / "cooling_increase.csv", std::ios::binary);
    std::ofstream heating(dir / "heating_decrease.csv", std::ios::binary);
    cooling << "city,period,scenario,model,baseline_kWh,future_kWh,increase_kWh,increase_pct\n";
    heating << "city,period,scenario,model,baseline_kWh,future_kWh,decrease_kWh,decrease_pct\n";
    std::ofstream climate(dir / "climate_changes.csv", std::ios::binary);
    climate << "city,period,scenario,model,variable,baseline,future,change,change_pct\n";

    for (const auto& j : jobs) {
        if (!j.ok || j.key.baseline) continue;
        const auto* base = find_baseline(jobs, j.key.city);
        if (!base) continue;
        const auto prefix = row_prefix(j, cities);
        const auto c = report_changes(base->result, j.result);
        changes << fmt::format("{},{},{},{},{},{},{},{},{}\n", prefix, fixed(base->result.heating_kwh, 3),
                               fixed(j.result.heating_kwh, 3), fixed(c.heating_delta, 3), format_percent(c.heating_pct),
                               fixed(base->result.cooling_total_kwh, 3), fixed(j.result.cooling_total_kwh, 3),
                               fixed(c.cooling_delta, 3), format_percent(c.cooling_pct));
        cooling << fmt::format("{},{},{},{},{}\n", prefix, fixed(base->result.cooling_total_kwh, 3),
                               fixed(j.result.cooling_total_kwh, 3), fixed(c.cooling_delta, 3),
                               format_percent(c.cooling_pct));
        const auto neg = [](const std::optional<double>& v) { return v ? std::optional<double>(-*v) : v; };
        heating << fmt::format("{},{},{},{},{}\n", prefix, fixed(base->result.heating_kwh, 3),
                               fixed(j.result.heating_kwh, 3), fixed(-c.heating_delta, 3),
                               format_percent(neg(c.heating_pct)));

        const auto& b = base->climate;
        const auto& f = j.climate;
        const std::array<std::tuple<std::string_view, double, double, int>, 5> vars{{
            {"dry_bulb_C", b.dry_bulb, f.dry_bulb, 3},
            {"specific_humidity_kgkg", b.specific_humidity, f.specific_humidity, 6},
            {"rel_humidity_pct", b.rel_humidity, f.rel_humidity, 3},
            {"ghi_Wm2", b.ghi, f.ghi, 3},
            {"wind_speed_mps", b.wind_speed, f.wind_speed, 4},
        }};
        for (const auto& [name, bv, fv, dec] : vars) {
            const auto pct = bv == 0.0 ? std::optional<double>() : std::optional<double>(100.0 * (fv - bv) / bv);
            climate << fmt::format("{},{},{},{},{},{}\n", prefix, name, fixed(bv, dec), fixed(fv, dec),
                                   fixed(fv - bv, dec), format_percent(pct));
        }
    }
}

void write_component_figures(const fs::path& dir, const std::vector<JobOutcome>& jobs,
                             const std::vector<CitySpec>& cities, const components::Ordering& ordering)
{
    for (auto mode : {components::LoadMode::cooling, components::LoadMode::heating}) {
        std::ofstream out(dir / fmt::format("{}_components.csv", components::to_string(mode)), std::ios::binary);
        out << "city,period,scenario,model,component,kWh,pct\n";
        for (const auto& j : jobs) {
            if (!j.ok) continue;
            const auto* b = find_breakdown(j, mode, ordering);
            if (!b) continue;
            const auto values = b->values();
            for (std::size_t i = 0; i < values.size(); ++i) {
                out << fmt::format("{},{},{},{}\n", row_prefix(j, cities), components::kComponentNames[i],
                                   fixed(values[i], 3),
                                   b->shares_valid() ? fixed(b->share(values[i]), 2) : std::string(kUndefinedMarker));
            }
        }
    }
}

void write_reference(const fs::path& dir, const std::vector<JobOutcome>& jobs, const std::vector<CitySpec>& cities)
{
    std::ofstream out(dir / "reference_comparison.csv", std::ios::binary);
    out << "city,source,usage_hours,cooling_sensible,cooling_latent,cooling_total_kWh\n";
    for (const auto& ref : reference_cooling()) {
        const auto it = std::find_if(cities.begin(), cities.end(), [&](const auto& c) { return c.name == ref.city; });
        if (it == cities.end()) continue;
        const auto* base = find_baseline(jobs, static_cast<std::size_t>(it - cities.begin()));
        out << fmt::format("{},reference,{},\"{}\",\"{}\",{:.0f}\n", ref.city, ref.usage_hours,
                           format_with_share(ref.sensible, ref.total), format_with_share(ref.latent, ref.total),
                           ref.total);
        if (base) {
            const auto& r = base->result;
            out << fmt::format("{},simulated,{},\"{}\",\"{}\",{:.0f}\n", ref.city, r.usage_hours,
                               format_with_share(r.cooling_sensible_kwh, r.cooling_total_kwh),
                               format_with_share(r.cooling_latent_kwh, r.cooling_total_kwh), r.cooling_total_kwh);
        }
    }
}

void write_manifest(const fs::path& dir, const PreparedStudy& p, const StudyReport& report)
{
    json m;
    m["config_hash"] = p.config.config_hash;
    m["inputs"] = json::array();
    for (const auto& [path, hash] : p.input_hashes) m["inputs"].push_back({{"path", path}, {"sha256", hash}});
    m["simulation_rows"] = report.simulation_rows();
    m["expected_rows"] = p.config.simulation_count();
    m["failures"] = report.failures;
    m["attribution_orderings"] = json::array();
    for (const auto& o : p.config.attribution.orderings)
        m["attribution_orderings"].push_back(components::to_string(o));
    m["jobs"] = json::array();
    for (const auto& j : report.jobs) {
        json e{{"city", p.config.cities[j.key.city].name},
               {"period", j.key.period_label()},
               {"scenario", j.key.scenario_label()},
               {"model", j.key.model_label()},
               {"status", j.ok ? "ok" : "failed"},
               {"saturation_clamps", j.saturation_clamps},
               {"warmup_days", j.result.warmup_days},
               {"runtime_s", j.runtime_s}};
        if (!j.ok) e["error"] = j.error;
        m["jobs"].push_back(std::move(e));
    }
    std::ofstream(dir / "manifest.json", std::ios::binary) << m.dump(2) << '\n';
}

} // namespace

StudyReport run_prepared(const PreparedStudy& p)
{
    const auto& config = p.config;
    fs::create_directories(config.output_dir);
    if (config.trace) fs::create_directories(config.output_dir / "trace");
    if (config.write_weather) fs::create_directories(config.output_dir / "weather");

    const auto keys = job_keys(config);
    StudyReport report;
    report.output_dir = config.output_dir;
    report.jobs.resize(keys.size());
    parallel_for(keys.size(), config.workers, [&](std::size_t i) { report.jobs[i] = run_job(p, keys[i]); });
    report.failures = static_cast<std::size_t>(
        std::count_if(report.jobs.begin(), report.jobs.end(), [](const auto& j) { return !j.ok; }));

    const auto& dir = config.output_dir;
    {
        std::ofstream f(dir / "simulations.csv", std::ios::binary);
        write_simulation_csv(f, report.jobs, config.cities);
    }
    if (config.attribution.enabled) {
        std::ofstream f(dir / "components.csv", std::ios::binary);
        write_components_csv(f, report.jobs, config.cities);
        write_component_figures(dir, report.jobs, config.cities, config.attribution.orderings.front());
    }
    write_changes(dir, report.jobs, config.cities);
    write_reference(dir, report.jobs, config.cities);
    write_manifest(dir, p, report);
    return report;
}

StudyReport run_study(const StudyConfig& config) { return run_prepared(prepare_study(config)); }

} // namespace climroom::study
