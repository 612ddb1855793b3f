#include "climroom/morph.hpp"

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
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>

namespace climroom::morph {

namespace {

constexpr double kEarthRadiusKm = 6371.0;
constexpr double kCoincidenceKm = 1.0;
constexpr double kTieTolerance = 1e-12;

void check_scale(double value, const char* field, std::size_t line)
{
    if (!(value > 0.0))
        throw ValidationError(fmt::format("line {}: {} = {} must be > 0", line, field, value));
}

double pick(const MonthShift& s, int variable)
{
    switch (variable) {
    case 0: return s.d_temperature;
    case 1: return s.alpha;
    case 2: return s.humidity_scale;
    case 3: return s.ghi_scale;
    default: return s.wind_scale;
    }
}

void assign(MonthShift& s, int variable, double value)
{
    switch (variable) {
    case 0: s.d_temperature = value; break;
    case 1: s.alpha = value; break;
    case 2: s.humidity_scale = value; break;
    case 3: s.ghi_scale = value; break;
    default: s.wind_scale = value; break;
    }
}

} // namespace

Scenario parse_scenario(std::string_view text)
{
    if (text == "RCP4.5") return Scenario::rcp45;
    if (text == "RCP8.5") return Scenario::rcp85;
    throw ValidationError(fmt::format("unknown scenario '{}' (expected RCP4.5 or RCP8.5)", text));
}

Period parse_period(std::string_view text)
{
    if (text == "2030s") return Period::p2030s;
    if (text == "2060s") return Period::p2060s;
    if (text == "2090s") return Period::p2090s;
    throw ValidationError(fmt::format("unknown period '{}' (expected 2030s, 2060s or 2090s)", text));
}

ClassKind parse_class_kind(std::string_view text)
{
    if (text == "min") return ClassKind::min;
    if (text == "median") return ClassKind::median;
    if (text == "max") return ClassKind::max;
    throw ValidationError(fmt::format("unknown model class '{}' (expected min, median or max)", text));
}

std::string_view to_string(Scenario s) { return s == Scenario::rcp45 ? "RCP4.5" : "RCP8.5"; }

std::string_view to_string(Period p)
{
    switch (p) {
    case Period::p2030s: return "2030s";
    case Period::p2060s: return "2060s";
    case Period::p2090s: return "2090s";
    }
    return "?";
}

std::string_view to_string(ClassKind k)
{
    switch (k) {
    case ClassKind::min: return "min";
    case ClassKind::median: return "median";
    case ClassKind::max: return "max";
    }
    return "?";
}

void GcmShiftTable::validate() const
{
    if (gcm_id.empty()) throw ValidationError("gcm_id must not be empty");
    if (grid.empty()) throw StructuralError(fmt::format("{}: shift table has no grid points", gcm_id));
    for (const auto& g : grid) {
        if (std::abs(g.latitude) > 90.0) throw ValidationError("lat", g.latitude);
        for (std::size_t m = 0; m < 12; ++m) {
            const auto& s = g.months[m];
            if (!std::isfinite(s.d_temperature)) throw ValidationError("dT_C", s.d_temperature);
            if (!(s.alpha > -1.0)) throw ValidationError("alpha", s.alpha, "must be > -1");
            if (!(s.humidity_scale > 0.0)) throw ValidationError("q_scale", s.humidity_scale, "must be > 0");
            if (!(s.ghi_scale > 0.0)) throw ValidationError("ghi_scale", s.ghi_scale, "must be > 0");
            if (!(s.wind_scale > 0.0)) throw ValidationError("wind_scale", s.wind_scale, "must be > 0");
        }
    }
}

GcmShiftTable ingest_shift_file(std::istream& in)
{
    using detail::parse_int;
    using detail::parse_number;
    using detail::parse_optional_number;

    GcmShiftTable table;
    std::map<std::pair<double, double>, std::size_t> index;
    std::vector<std::array<bool, 12>> seen;
    bool have_header = false;
    bool have_rows = false;
    std::size_t ln = 0;
    for (std::string line; std::getline(in, line);) {
        ++ln;
        const auto text = detail::trim(line);
        if (text.empty()) continue;
        if (!have_header) {
            if (text != kShiftFileHeader)
                throw ParseError(fmt::format("expected header '{}'", kShiftFileHeader), ln);
            have_header = true;
            continue;
        }
        const auto cols = detail::split_commas(text);
        if (cols.size() != 11)
            throw ParseError(fmt::format("row has {} fields, expected 11", cols.size()), ln);
        const std::string gcm(detail::trim(cols[0]));
        const Scenario scenario = parse_scenario(detail::trim(cols[1]));
        const Period period = parse_period(detail::trim(cols[2]));
        if (gcm.empty()) throw ParseError("gcm_id is empty", ln);
        if (!have_rows) {
            table.gcm_id = gcm;
            table.scenario = scenario;
            table.period = period;
            have_rows = true;
        } else if (gcm != table.gcm_id || scenario != table.scenario || period != table.period) {
            throw StructuralError(fmt::format(
                "line {}: rows mix tables ({} {} {} vs {} {} {})", ln, gcm, to_string(scenario),
                to_string(period), table.gcm_id, to_string(table.scenario), to_string(table.period)));
        }
        const double lat = parse_number(cols[3], "lat", ln);
        const double lon = parse_number(cols[4], "lon", ln);
        if (std::abs(lat) > 90.0) throw ValidationError(fmt::format("line {}: lat {} out of range", ln, lat));
        const int month = parse_int(cols[5], "month", ln);
        if (month < 1 || month > 12)
            throw ValidationError(fmt::format("line {}: month {} outside 1..12", ln, month));
        MonthShift s;
        s.d_temperature = parse_number(cols[6], "dT_C", ln);
        s.alpha = parse_optional_number(cols[7], "alpha", ln).value_or(0.0);
        s.humidity_scale = parse_number(cols[8], "q_scale", ln);
        s.ghi_scale = parse_number(cols[9], "ghi_scale", ln);
        s.wind_scale = parse_number(cols[10], "wind_scale", ln);
        check_scale(s.humidity_scale, "q_scale", ln);
        check_scale(s.ghi_scale, "ghi_scale", ln);
        check_scale(s.wind_scale, "wind_scale", ln);
        if (!(s.alpha > -1.0))
            throw ValidationError(fmt::format("line {}: alpha = {} must be > -1", ln, s.alpha));

        auto [it, inserted] = index.try_emplace({lat, lon}, table.grid.size());
        if (inserted) {
            table.grid.push_back({lat, lon, {}});
            seen.push_back({});
        }
        auto& mark = seen[it->second][month - 1];
        if (mark)
            throw StructuralError(fmt::format("line {}: duplicate month {} for grid point ({}, {})",
                                              ln, month, lat, lon));
        mark = true;
        table.grid[it->second].months[month - 1] = s;
    }
    if (!have_rows) throw StructuralError("shift file contains no rows");
    for (std::size_t g = 0; g < table.grid.size(); ++g) {
        for (int m = 0; m < 12; ++m) {
            if (!seen[g][m])
                throw StructuralError(fmt::format("grid point ({}, {}) is missing month {}",
                                                  table.grid[g].latitude, table.grid[g].longitude,
                                                  m + 1));
        }
    }
    table.validate();
    return table;
}

GcmShiftTable read_shift_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open shift file " + path.string());
    try {
        return ingest_shift_file(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void write_shift_file(std::ostream& out, const GcmShiftTable& table)
{
    out << kShiftFileHeader << '\n';
    for (const auto& g : table.grid) {
        for (int m = 0; m < 12; ++m) {
            const auto& s = g.months[m];
            out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", table.gcm_id,
                               to_string(table.scenario), to_string(table.period), g.latitude,
                               g.longitude, m + 1, s.d_temperature,
                               s.alpha == 0.0 ? std::string() : fmt::format("{}", s.alpha),
                               s.humidity_scale, s.ghi_scale, s.wind_scale);
        }
    }
}

double great_circle_km(double lat1, double lon1, double lat2, double lon2)
{
    constexpr double d2r = std::numbers::pi / 180.0;
    const double dlat = (lat2 - lat1) * d2r;
    const double dlon = (lon2 - lon1) * d2r;
    const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                     std::cos(lat1 * d2r) * std::cos(lat2 * d2r) * std::sin(dlon / 2) *
                         std::sin(dlon / 2);
    return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(a)));
}

double idw_interpolate(std::span<const GridValue> grid, double latitude, double longitude,
                       const IdwOptions& options)
{
    if (grid.empty()) throw DomainError("idw_interpolate: empty grid");
    if (!(options.power > 0.0)) throw DomainError("idw_interpolate: power must be > 0");

    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        dist.emplace_back(great_circle_km(latitude, longitude, grid[i].latitude, grid[i].longitude), i);
    std::stable_sort(dist.begin(), dist.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    if (dist.front().first < kCoincidenceKm) return grid[dist.front().second].value;

    const std::size_t k =
        options.nearest == 0 ? dist.size() : std::min(options.nearest, dist.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        const double w = std::pow(dist[j].first, -options.power);
        num += w * grid[dist[j].second].value;
        den += w;
    }
    return num / den;
}

GcmSiteShifts localize(const GcmShiftTable& table, double latitude, double longitude,
                       const IdwOptions& options)
{
    GcmSiteShifts site;
    site.gcm_id = table.gcm_id;
    std::vector<GridValue> values(table.grid.size());
    for (int m = 0; m < 12; ++m) {
        for (int v = 0; v < 5; ++v) {
            for (std::size_t g = 0; g < table.grid.size(); ++g)
                values[g] = {table.grid[g].latitude, table.grid[g].longitude,
                             pick(table.grid[g].months[m], v)};
            assign(site.months[m], v, idw_interpolate(values, latitude, longitude, options));
        }
    }
    return site;
}

const ModelClass& ModelClasses::get(ClassKind kind) const
{
    switch (kind) {
    case ClassKind::min: return min;
    case ClassKind::median: return median;
    case ClassKind::max: return max;
    }
    return median;
}

namespace {

// Midpoint of two shifts taken as the decimals they were written as, so
// 1.37 and 1.49 give the double nearest 1.43 rather than 1.4300000000000002.
double decimal_midpoint(double a, double b)
{
    const double plain = 0.5 * (a + b);
    if (a == b) return a;
    auto decimals = [](double x) {
        const auto text = fmt::format("{}", x);
        if (text.find_first_of("eE") != std::string::npos) return -1;
        const auto dot = text.find('.');
        return dot == std::string::npos ? 0 : static_cast<int>(text.size() - dot - 1);
    };
    const int da = decimals(a);
    const int db = decimals(b);
    if (da < 0 || db < 0) return plain;
    const int places = std::max(da, db) + 1;
    const auto integer_digits = fmt::format("{:.0f}", std::abs(plain)).size();
    if (places + static_cast<int>(integer_digits) > 15) return plain;
    const auto text = fmt::format("{:.{}f}", plain, places);
    double out = plain;
    std::from_chars(text.data(), text.data() + text.size(), out);
    return out;
}

} // namespace

ModelClasses build_model_classes(std::span<const GcmSiteShifts> gcms)
{
    if (gcms.size() < 2)
        throw DomainError(fmt::format("build_model_classes needs at least 2 GCMs, got {}", gcms.size()));

    ModelClasses out;
    out.min.kind = ClassKind::min;
    out.median.kind = ClassKind::median;
    out.max.kind = ClassKind::max;

    std::vector<std::size_t> order(gcms.size());
    for (int m = 0; m < 12; ++m) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const double ta = gcms[a].months[m].d_temperature;
            const double tb = gcms[b].months[m].d_temperature;
            if (ta != tb) return ta < tb;
            return gcms[a].gcm_id < gcms[b].gcm_id;
        });
        const std::size_t n = order.size();
        const double lo = gcms[order.front()].months[m].d_temperature;
        const double hi = gcms[order.back()].months[m].d_temperature;
        const double mid =
            n % 2 ? gcms[order[n / 2]].months[m].d_temperature
                  : decimal_midpoint(gcms[order[n / 2 - 1]].months[m].d_temperature,
                                     gcms[order[n / 2]].months[m].d_temperature);

        // GCM nearest to a statistic; exact ties resolve to the smallest id.
        auto nearest = [&](double target) {
            std::size_t best = order.front();
            double best_d = std::abs(gcms[best].months[m].d_temperature - target);
            for (std::size_t i : order) {
                const double d = std::abs(gcms[i].months[m].d_temperature - target);
                if (d < best_d - kTieTolerance ||
                    (std::abs(d - best_d) <= kTieTolerance && gcms[i].gcm_id < gcms[best].gcm_id)) {
                    best = i;
                    best_d = d;
                }
            }
            return best;
        };

        auto fill = [&](ModelClass& cls, double stat) {
            const std::size_t src = nearest(stat);
            cls.months[m] = gcms[src].months[m];
            cls.months[m].d_temperature = stat;
            cls.source_gcm[m] = gcms[src].gcm_id;
        };
        fill(out.min, lo);
        fill(out.median, mid);
        fill(out.max, hi);
    }
    return out;
}

MorphResult morph_year(const WeatherYear& baseline, const MonthlyShifts& shifts)
{
    MorphResult result{baseline, 0};
    auto& recs = result.year.records;
    bool ghi_changed = false;

    for (int month = 1; month <= 12; ++month) {
        const MonthShift& s = shifts[month - 1];
        const bool temp_changed = s.d_temperature != 0.0 || s.alpha != 0.0;
        const bool moisture_changed = temp_changed || s.humidity_scale != 1.0;
        ghi_changed |= s.ghi_scale != 1.0;
        const double mean_t = monthly_mean(baseline, WeatherField::dry_bulb, month);
        const std::size_t begin = first_hour_of_month(month);
        const std::size_t end = begin + hours_in_month(month);
        for (std::size_t i = begin; i < end; ++i) {
            auto& r = recs[i];
            const auto& b = baseline.records[i];
            if (temp_changed) r.dry_bulb = b.dry_bulb + s.d_temperature + s.alpha * (b.dry_bulb - mean_t);
            if (moisture_changed) {
                double w = b.humidity_ratio() * s.humidity_scale;
                const double w_sat = psychro::saturation_humidity_ratio(r.dry_bulb, r.pressure);
                if (w > w_sat) {
                    w = w_sat;
                    ++result.saturation_clamps;
                }
                const double rh =
                    std::min(1.0, psychro::rh_from_humidity_ratio(w, r.dry_bulb, r.pressure));
                r.rel_humidity = 100.0 * rh;
                r.dew_point = psychro::dew_point(r.dry_bulb, std::max(rh, 1e-3));
            }
            if (s.ghi_scale != 1.0) r.ghi = b.ghi * s.ghi_scale;
            if (s.wind_scale != 1.0) r.wind_speed = b.wind_speed * s.wind_scale;
        }
    }

    if (ghi_changed) {
        const auto pred = solar::brl_predictors(result.year);
        for (int month = 1; month <= 12; ++month) {
            if (shifts[month - 1].ghi_scale == 1.0) continue;
            const std::size_t begin = first_hour_of_month(month);
            const std::size_t end = begin + hours_in_month(month);
            for (std::size_t i = begin; i < end; ++i) {
                auto& r = recs[i];
                const auto split =
                    solar::split_ghi(r.ghi, solar::solar_position(result.year.location, r.time), pred[i]);
                r.dni = split.dni;
                r.dhi = split.dhi;
            }
        }
    }
    result.year.validate();
    return result;
}

MorphResult morph_year(const WeatherYear& baseline, const ModelClass& model)
{
    return morph_year(baseline, model.months);
}

} // namespace climroom::morph
