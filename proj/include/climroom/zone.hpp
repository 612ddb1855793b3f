#pragma once

#include "climroom/psychro.hpp"
#include "climroom/solar.hpp"
#include "climroom/weather.hpp"

#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace climroom::zone {

struct Layer {
    double thickness = 0.0;     // m
    double conductivity = 0.0;  // W/(m C)
    double density = 0.0;       // kg/m3
    double specific_heat = 0.0; // J/(kg C)
};

/// Default masonry wall: 15 mm cement plaster, 230 mm brick, 15 mm plaster.
std::vector<Layer> default_wall_layers();

struct WallSpec {
    std::string name;
    double azimuth = 0.0;    // outward normal, degrees clockwise from north
    double gross_area = 0.0; // m2 including any window openings
    std::vector<Layer> layers = default_wall_layers();
    double exterior_absorptance = 0.6;
    double h_interior = 8.3;  // W/(m2 C)
    double h_exterior = 17.0; // W/(m2 C)
};

/// Steady-state U-value including both surface films.
double wall_u_value(const WallSpec& wall);

struct WindowSpec {
    std::size_t wall = 0; // index into RoomArchetype::walls
    double width = 1.5;   // m
    double height = 1.0;  // m
    double u_value = 5.8; // W/(m2 C)
    double shgc = 0.82;
    double interior_shade_multiplier = 0.7; // static drapes
    solar::Overhang overhang{0.6, 0.0};

    double area() const { return width * height; }
};

/// Half-open clock interval [start, end) in whole hours; wraps past midnight
/// when start > end. {0, 24} is the whole day, start == end is empty.
struct DailyInterval {
    int start_hour = 0;
    int end_hour = 0;

    /// `hour_of_day` is the clock hour at which the interval is tested, 0..23.
    bool contains(int hour_of_day) const;
    int hours_per_day() const;
};

struct OccupancySchedule {
    DailyInterval occupied{21, 7};
    int occupants = 2;
    double sensible_per_person = 70.0; // W
    double latent_per_person = 45.0;   // W
    double lighting_power = 54.0;      // W
    DailyInterval lighting{21, 23};
};

struct Setpoints {
    double heating = 18.0;        // C
    double cooling = 26.0;        // C
    double dehumidify_rh = 65.0;  // %
};

struct Dimensions {
    double width = 3.33;
    double depth = 4.03;
    double height = 3.18;
};

struct RoomArchetype {
    Dimensions dimensions;
    std::vector<WallSpec> walls;
    std::vector<WindowSpec> windows;
    double infiltration_ach = 0.75;
    OccupancySchedule schedule;
    Setpoints setpoints;
    psychro::AirConstants air;
    double ground_albedo = 0.2;

    double volume() const;
    double gross_wall_area() const;
    double window_area() const;
    double net_wall_area() const;
    double wall_net_area(std::size_t wall) const;
    /// Infiltration mass flow, kg/s.
    double infiltration_mass_flow() const;
    void validate() const;
};

/// The archetype room with one exterior wall on the width side facing
/// `first_azimuth` and one on the depth side facing `second_azimuth`, a
/// 1.5 m x 1.0 m overhung window in each.
RoomArchetype default_archetype(double first_azimuth = 0.0, double second_azimuth = 90.0);

/// Sum of U*A over net walls and windows, W/C.
double envelope_ua(const RoomArchetype& room);

struct ZoneState {
    double t_zone = 22.0;
    double w_zone = 0.01;
    std::vector<std::vector<double>> wall_nodes; // per wall, exterior to interior
    std::vector<double> surface_temps;           // interior face per wall
};

enum class HvacMode { off, heating, cooling_sensible, dehumidify };
std::string_view to_string(HvacMode mode);

/// Energy the ideal-loads system exchanged during one step. Sensible energy is
/// positive for both heating and cooling; `mode` gives the direction.
struct HvacDemand {
    double sensible = 0.0; // J
    double latent = 0.0;   // J removed, never negative
    HvacMode mode = HvacMode::off;

    double heating() const { return mode == HvacMode::heating ? sensible : 0.0; }
    double cooling_sensible() const { return mode == HvacMode::cooling_sensible ? sensible : 0.0; }
};

/// Zone-air balance terms for one step, W. Gains into the zone are positive;
/// `system_*` is the heat the HVAC adds to the air (negative when removing).
struct StepBalance {
    double internal_convective = 0.0;
    double surface_convective = 0.0;
    double window_conduction = 0.0;
    double window_solar = 0.0;
    double infiltration_sensible = 0.0;
    double storage_sensible = 0.0;
    double system_sensible = 0.0;

    double internal_latent = 0.0;
    double infiltration_latent = 0.0;
    double storage_latent = 0.0;
    double system_latent = 0.0;

    double sensible_residual() const;
    double latent_residual() const;
};

/// Outdoor forcing for one sub-step. Temperature and humidity ratio vary
/// linearly from the `*_start` values (NaN: same as the end) to the end values.
struct StepInputs {
    double t_out = 20.0;
    double w_out = 0.01;
    double t_out_start = std::numeric_limits<double>::quiet_NaN();
    double w_out_start = std::numeric_limits<double>::quiet_NaN();
    double pressure = psychro::kStandardPressure;
    std::vector<double> wall_absorbed_solar; // W/m2 on each wall's exterior face
    double window_solar = 0.0;               // W transmitted into the zone
    int hour_of_day = 0;                     // clock hour of the step, 0..23
};

struct StepResult {
    HvacDemand demand;
    StepBalance balance;
    bool hvac_available = false;
};

struct SimulationOptions {
    double dt = 600.0; // s, must divide 3600
    int min_nodes_per_layer = 3;
    double max_cell_thickness = 0.02; // m
    int max_warmup_days = 30;
    double warmup_tolerance = 0.01; // C
    bool record_trace = false;
};

/// Implicit finite-volume wall conduction coupled to a well-mixed air node
/// with an ideal-loads system. Each step is a two-stage L-stable singly
/// diagonally implicit Runge-Kutta scheme, so every stage is a backward-Euler
/// solve of length gamma*dt and setpoints are enforced at both stages. A step
/// that starts outside the setpoint band (the HVAC just switched on) is one
/// backward-Euler solve instead, since the jump to the setpoint would make the
/// second stage overshoot. Immutable once built; steps mutate only the state
/// passed in.
class ZoneModel {
  public:
    ZoneModel(RoomArchetype room, const SimulationOptions& options = {});

    const RoomArchetype& room() const { return room_; }
    double dt() const { return dt_; }
    std::size_t node_count(std::size_t wall) const { return walls_[wall].capacity.size(); }

    /// Walls at their steady profile between t_out and t_zone.
    ZoneState initial_state(double t_out, double t_zone, double w_zone) const;

    StepResult step(ZoneState& state, const StepInputs& in) const;

  private:
    // Thomas factors of a constant implicit wall matrix.
    struct Factorization {
        std::vector<double> lower, c_prime, inv_pivot;
        std::vector<double> zone_response; // node change per unit zone temperature
    };
    struct WallSolver {
        std::vector<double> capacity;    // J/(m2 C) per cell
        std::vector<double> conductance; // W/(m2 C) between cell i and i+1
        double g_exterior = 0.0;         // sol-air node to first cell
        double g_interior = 0.0;         // last cell to zone air
        double k_half_interior = 0.0;    // last cell centre to interior face
        double h_interior = 0.0;
        double h_exterior = 0.0;
        double net_area = 0.0;
        Factorization stage;  // length gamma*dt
        Factorization euler;  // length dt
    };

    static void solve(const Factorization& f, std::vector<double>& rhs);
    bool outside_band(const ZoneState& state, const StepInputs& in) const;
    StepBalance stage(ZoneState& state, const ZoneState& start, double carry, const StepInputs& in,
                      bool euler) const;

    RoomArchetype room_;
    double dt_;
    std::vector<WallSolver> walls_;
    double window_ua_ = 0.0;
    double air_capacity_ = 0.0; // J/C
    double air_mass_ = 0.0;     // kg
    double infiltration_flow_ = 0.0; // kg/s
};

/// Single step with forcing derived from an hourly weather record, for
/// callers outside the annual loop.
StepResult step_zone(const ZoneModel& model, ZoneState& state, const HourlyWeatherRecord& weather,
                     const Location& location);

struct HourlyTrace {
    Timestamp time;
    bool occupied = false;
    double t_zone = 0.0;
    double t_zone_min = 0.0;
    double t_zone_max = 0.0;
    double w_zone = 0.0;
    double rh_zone = 0.0;     // %, end of hour
    double rh_zone_max = 0.0; // %, over sub-steps
    double heating = 0.0;     // J
    double cooling_sensible = 0.0;
    double latent = 0.0;
    HvacMode mode = HvacMode::off;
};

struct AnnualResult {
    double heating_kwh = 0.0;
    double cooling_sensible_kwh = 0.0;
    double cooling_latent_kwh = 0.0;
    double cooling_total_kwh = 0.0;
    int usage_hours = 0;
    int heating_hours = 0;
    int cooling_hours = 0;
    int warmup_days = 0;
    double max_sensible_residual = 0.0; // W
    double max_latent_residual = 0.0;   // W
    std::vector<HourlyTrace> trace;
};

/// Outdoor forcing per hour of the year, shared by every sub-step in the hour.
struct HourlyForcing {
    double t_out = 0.0;
    double w_out = 0.0;
    double pressure = psychro::kStandardPressure;
    std::vector<double> wall_absorbed_solar;
    double window_solar = 0.0;
};

std::vector<HourlyForcing> hourly_forcing(const RoomArchetype& room, const WeatherYear& weather);

/// Full-year run after a Jan 1 warm-up repeated until wall nodes settle.
AnnualResult simulate_year(const RoomArchetype& room, const WeatherYear& weather,
                           const SimulationOptions& options = {});

inline constexpr double kJoulesPerKwh = 3.6e6;

} // namespace climroom::zone
