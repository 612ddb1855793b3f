#pragma once

#include "climroom/synthetic.hpp"
#include "climroom/zone.hpp"

#include <string>
#include <vector>

namespace climroom::fixture {

struct Fixture {
    std::string name;
    WeatherYear weather;
    zone::RoomArchetype room;
};

inline synthetic::ClimateSpec demo_climate(const std::string& name)
{
    for (const auto& c : synthetic::demo_climates())
        if (c.name == name) return c;
    return {};
}

/// Hot-dry, warm-humid and cold climates, each with its usual wall
/// orientation; the last one also uses a lighter, leakier room.
inline std::vector<Fixture> fixtures()
{
    std::vector<Fixture> out;
    out.push_back({"hot-dry", synthetic::generate_year(demo_climate("Ahmedabad")), zone::default_archetype(0, 90)});
    out.push_back({"warm-humid", synthetic::generate_year(demo_climate("Chennai")), zone::default_archetype(0, 90)});
    auto cold_room = zone::default_archetype(180, 270);
    cold_room.infiltration_ach = 1.0;
    for (auto& w : cold_room.walls) w.layers[1].thickness = 0.115;
    out.push_back({"cold", synthetic::generate_year(demo_climate("Srinagar")), cold_room});
    return out;
}

/// Archetype with no internal gains, no infiltration and HVAC on all day.
inline zone::RoomArchetype envelope_only_room()
{
    auto room = zone::default_archetype(0, 90);
    room.schedule.occupied = {0, 24};
    room.schedule.occupants = 0;
    room.schedule.lighting_power = 0.0;
    room.infiltration_ach = 0.0;
    return room;
}

} // namespace climroom::fixture
