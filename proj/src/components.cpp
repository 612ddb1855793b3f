#include "climroom/components.hpp"

#include "climroom/error.hpp"
#include "climroom/parallel.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <set>

namespace climroom::components {

namespace {

unsigned bit(Element e) { return static_cast<unsigned>(e); }

Element parse_element(std::string_view token)
{
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (token == "windows" || token == "win") return Element::windows;
    if (token == "infiltration" || token == "inf") return Element::infiltration;
    if (token == "internal" || token == "int") return Element::internal;
    throw ValidationError(fmt::format("unknown building element '{}'", token));
}

} // namespace

std::string_view to_string(Element e)
{
    switch (e) {
    case Element::windows: return "windows";
    case Element::infiltration: return "infiltration";
    case Element::internal: return "internal";
    }
    return "?";
}

std::string to_string(const Ordering& o)
{
    return fmt::format("{}>{}>{}", to_string(o[0]), to_string(o[1]), to_string(o[2]));
}

std::string_view to_string(LoadMode mode) { return mode == LoadMode::heating ? "heating" : "cooling"; }

void validate_ordering(const Ordering& o)
{
    if ((bit(o[0]) | bit(o[1]) | bit(o[2])) != kAllElements)
        throw ValidationError(fmt::format("ordering {} is not a permutation of the three elements",
                                          to_string(o)));
}

Ordering parse_ordering(std::string_view text)
{
    std::vector<Element> parts;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find_first_of(",>", start);
        parts.push_back(parse_element(text.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (parts.size() != 3)
        throw ValidationError(fmt::format("ordering '{}' must name exactly three elements", text));
    Ordering o{parts[0], parts[1], parts[2]};
    validate_ordering(o);
    return o;
}

std::vector<Ordering> all_orderings()
{
    Ordering o = kDefaultOrdering;
    std::vector<Ordering> out;
    // kDefaultOrdering is the lexicographically smallest by bit value.
    do {
        out.push_back(o);
    } while (std::next_permutation(o.begin(), o.end(),
                                   [](Element a, Element b) { return bit(a) < bit(b); }));
    return out;
}

zone::RoomArchetype model_variant(const zone::RoomArchetype& room, unsigned mask)
{
    zone::RoomArchetype v = room;
    if (!(mask & bit(Element::windows))) v.windows.clear();
    if (!(mask & bit(Element::infiltration))) v.infiltration_ach = 0.0;
    if (!(mask & bit(Element::internal))) {
        v.schedule.occupants = 0;
        v.schedule.lighting_power = 0.0;
    }
    return v;
}

VariantLoad variant_load(const zone::AnnualResult& r, LoadMode mode)
{
    if (mode == LoadMode::heating) return {r.heating_kwh, r.heating_kwh, 0.0};
    return {r.cooling_total_kwh, r.cooling_sensible_kwh, r.cooling_latent_kwh};
}

WallNormalisation normalise_walls(double walls_only_load, double gross_area, double net_area)
{
    if (!(gross_area > 0.0)) throw DomainError("gross wall area must be positive");
    WallNormalisation n;
    n.per_area = walls_only_load / gross_area;
    n.walls = n.per_area * net_area;
    return n;
}

double ComponentBreakdown::sum() const
{
    return walls + windows + infiltration_sensible + infiltration_latent + internal_sensible +
           internal_latent;
}

bool ComponentBreakdown::shares_valid() const { return std::abs(total) >= kShareSuppressionKwh; }

double ComponentBreakdown::share(double component) const
{
    return total == 0.0 ? 0.0 : 100.0 * component / std::abs(total);
}

std::array<double, 6> ComponentBreakdown::values() const
{
    return {walls, windows, infiltration_sensible, infiltration_latent, internal_sensible, internal_latent};
}

VariantResults run_variants(const zone::RoomArchetype& room, const WeatherYear& weather,
                            const std::vector<Ordering>& orderings,
                            const zone::SimulationOptions& options, unsigned workers)
{
    std::set<unsigned> masks{kWallsOnly};
    for (const auto& o : orderings) {
        validate_ordering(o);
        unsigned m = kWallsOnly;
        for (Element e : o) masks.insert(m |= bit(e));
    }
    const std::vector<unsigned> list(masks.begin(), masks.end());
    std::vector<zone::AnnualResult> results(list.size());
    parallel_for(list.size(), workers, [&](std::size_t i) {
        results[i] = zone::simulate_year(model_variant(room, list[i]), weather, options);
    });
    VariantResults out;
    for (std::size_t i = 0; i < list.size(); ++i) out.emplace(list[i], std::move(results[i]));
    return out;
}

ComponentBreakdown breakdown_from_variants(const VariantResults& variants, const Ordering& ordering,
                                           LoadMode mode, double gross_wall_area,
                                           double net_wall_area)
{
    validate_ordering(ordering);
    auto load = [&](unsigned mask) {
        const auto it = variants.find(mask);
        if (it == variants.end())
            throw DomainError(fmt::format("variant {} was not simulated", mask));
        return variant_load(it->second, mode);
    };

    ComponentBreakdown b;
    b.ordering = ordering;
    b.mode = mode;
    const VariantLoad walls_only = load(kWallsOnly);
    b.walls = normalise_walls(walls_only.total, gross_wall_area, net_wall_area).walls;
    const double area_residual = walls_only.total - b.walls;

    unsigned mask = kWallsOnly;
    VariantLoad prev = walls_only;
    for (Element e : ordering) {
        mask |= bit(e);
        const VariantLoad next = load(mask);
        switch (e) {
        case Element::windows: b.windows = next.total - prev.total + area_residual; break;
        case Element::infiltration:
            b.infiltration_sensible = next.sensible - prev.sensible;
            b.infiltration_latent = next.latent - prev.latent;
            break;
        case Element::internal:
            b.internal_sensible = next.sensible - prev.sensible;
            b.internal_latent = next.latent - prev.latent;
            break;
        }
        prev = next;
    }
    b.total = prev.total;
    return b;
}

ComponentBreakdown attribute_loads(const zone::RoomArchetype& room, const WeatherYear& weather,
                                   const Ordering& ordering, LoadMode mode,
                                   const zone::SimulationOptions& options)
{
    const auto variants = run_variants(room, weather, {ordering}, options);
    return breakdown_from_variants(variants, ordering, mode, room.gross_wall_area(), room.net_wall_area());
}

OrderingSpread spread_over_orderings(std::vector<ComponentBreakdown> breakdowns)
{
    OrderingSpread out;
    out.breakdowns = std::move(breakdowns);
    for (std::size_t c = 0; c < 6; ++c) {
        double lo = 1e300, hi = -1e300;
        for (const auto& b : out.breakdowns) {
            const double s = b.share(b.values()[c]);
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        out.spread[c] = out.breakdowns.empty() ? 0.0 : hi - lo;
    }
    return out;
}

OrderingSpread attribute_all_orderings(const zone::RoomArchetype& room, const WeatherYear& weather,
                                       LoadMode mode, const zone::SimulationOptions& options,
                                       unsigned workers)
{
    const auto orderings = all_orderings();
    const auto variants = run_variants(room, weather, orderings, options, workers);
    std::vector<ComponentBreakdown> list;
    for (const auto& o : orderings)
        list.push_back(breakdown_from_variants(variants, o, mode, room.gross_wall_area(),
                                               room.net_wall_area()));
    return spread_over_orderings(std::move(list));
}

} // namespace climroom::components
