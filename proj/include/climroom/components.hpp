#pragma once

#include "climroom/weather.hpp"
#include "climroom/zone.hpp"

#include <array>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace climroom::components {

/// Building elements added on top of the walls-only model.
enum class Element : unsigned { windows = 1, infiltration = 2, internal = 4 };
using Ordering = std::array<Element, 3>;
inline constexpr unsigned kWallsOnly = 0;
inline constexpr unsigned kAllElements = 7;

std::string_view to_string(Element e);
/// e.g. "windows>infiltration>internal".
std::string to_string(const Ordering& ordering);
/// Accepts a comma or '>' separated permutation of windows/infiltration/internal
/// (short forms win/inf/int allowed). Throws ValidationError otherwise.
Ordering parse_ordering(std::string_view text);
void validate_ordering(const Ordering& ordering);

inline constexpr Ordering kDefaultOrdering{Element::windows, Element::infiltration, Element::internal};
/// All six permutations, default ordering first.
std::vector<Ordering> all_orderings();

enum class LoadMode { heating, cooling };
std::string_view to_string(LoadMode mode);

/// The archetype with only the elements in `mask` (walls always present).
/// Excluded windows leave the gross wall area; excluded internal gains zero
/// the occupant and lighting loads but keep the HVAC availability window.
zone::RoomArchetype model_variant(const zone::RoomArchetype& room, unsigned mask);

/// Load of one simulated variant for one mode.
struct VariantLoad {
    double total = 0.0;
    double sensible = 0.0;
    double latent = 0.0;
};

VariantLoad variant_load(const zone::AnnualResult& result, LoadMode mode);

/// Walls' share from the walls-only load, normalised per unit of gross wall
/// area and scaled to the net (window-excluded) area.
struct WallNormalisation {
    double per_area = 0.0; // kWh/m2
    double walls = 0.0;    // kWh
};
WallNormalisation normalise_walls(double walls_only_load, double gross_area, double net_area);

inline constexpr double kShareSuppressionKwh = 10.0;

struct ComponentBreakdown {
    Ordering ordering = kDefaultOrdering;
    LoadMode mode = LoadMode::cooling;
    double walls = 0.0;
    double windows = 0.0;
    double infiltration_sensible = 0.0;
    double infiltration_latent = 0.0;
    double internal_sensible = 0.0;
    double internal_latent = 0.0;
    double total = 0.0;

    double infiltration() const { return infiltration_sensible + infiltration_latent; }
    double internal() const { return internal_sensible + internal_latent; }
    double sum() const;
    /// False when |total| is too small for percentages to mean anything.
    bool shares_valid() const;
    /// Component value as signed percent of |total|.
    double share(double component) const;
    std::array<double, 6> values() const;
};

inline constexpr std::array<std::string_view, 6> kComponentNames{
    "walls", "windows", "inf_sen", "inf_lat", "int_sen", "int_lat"};

/// Simulated loads of every element subset the orderings need, keyed by mask.
using VariantResults = std::map<unsigned, zone::AnnualResult>;

VariantResults run_variants(const zone::RoomArchetype& room, const WeatherYear& weather,
                            const std::vector<Ordering>& orderings,
                            const zone::SimulationOptions& options = {}, unsigned workers = 1);

/// Telescoping attribution from precomputed variants. The walls component is
/// the normalised walls-only load; windows absorb the area residual between
/// the gross and net wall areas, whatever their position in the ordering.
ComponentBreakdown breakdown_from_variants(const VariantResults& variants, const Ordering& ordering,
                                           LoadMode mode, double gross_wall_area,
                                           double net_wall_area);

ComponentBreakdown attribute_loads(const zone::RoomArchetype& room, const WeatherYear& weather,
                                   const Ordering& ordering, LoadMode mode,
                                   const zone::SimulationOptions& options = {});

struct OrderingSpread {
    std::vector<ComponentBreakdown> breakdowns; // one per ordering, all_orderings() order
    std::array<double, 6> spread{};              // max - min share per component, points
};

OrderingSpread spread_over_orderings(std::vector<ComponentBreakdown> breakdowns);

OrderingSpread attribute_all_orderings(const zone::RoomArchetype& room, const WeatherYear& weather,
                                       LoadMode mode, const zone::SimulationOptions& options = {},
                                       unsigned workers = 1);

} // namespace climroom::components
