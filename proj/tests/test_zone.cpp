#include "fixtures.hpp"

#include "climroom/error.hpp"
#include "climroom/morph.hpp"
#include "climroom/psychro.hpp"
#include "climroom/zone.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace climroom;
using namespace climroom::zone;

namespace {

StepInputs calm_inputs(const ZoneModel& model, double t_out, double w_out, int hour)
{
    StepInputs in;
    in.t_out = t_out;
    in.w_out = w_out;
    in.wall_absorbed_solar.assign(model.room().walls.size(), 0.0);
    in.hour_of_day = hour;
    return in;
}

// Series resistance of the default wall, films included.
double default_wall_u()
{
    const double r = 1.0 / 8.3 + 2 * 0.015 / 0.72 + 0.23 / 0.81 + 1.0 / 17.0;
    return 1.0 / r;
}

} // namespace

TEST(DailyInterval, WrapsPastMidnight)
{
    DailyInterval night{21, 7};
    EXPECT_TRUE(night.contains(21));
    EXPECT_TRUE(night.contains(0));
    EXPECT_TRUE(night.contains(6));
    EXPECT_FALSE(night.contains(7));
    EXPECT_FALSE(night.contains(20));
    EXPECT_EQ(night.hours_per_day(), 10);
    EXPECT_EQ((DailyInterval{0, 24}).hours_per_day(), 24);
    EXPECT_EQ((DailyInterval{5, 5}).hours_per_day(), 0);
    EXPECT_EQ((DailyInterval{21, 23}).hours_per_day(), 2);
}

TEST(Archetype, Geometry)
{
    const auto room = default_archetype();
    EXPECT_NEAR(room.volume(), 3.33 * 4.03 * 3.18, 1e-12);
    EXPECT_NEAR(room.gross_wall_area(), 23.4, 0.1);
    EXPECT_NEAR(room.gross_wall_area(), (3.33 + 4.03) * 3.18, 1e-12);
    EXPECT_NEAR(room.net_wall_area(), 20.4, 0.1);
    EXPECT_NEAR(room.window_area(), 3.0, 1e-12);
    EXPECT_NEAR(room.infiltration_mass_flow(), 1.204 * room.volume() * 0.75 / 3600.0, 1e-15);
    EXPECT_LT(room.setpoints.heating, room.setpoints.cooling);
    EXPECT_NO_THROW(room.validate());
}

TEST(Archetype, ValidationRejectsBadInput)
{
    auto room = default_archetype();
    room.setpoints.heating = 27.0;
    EXPECT_THROW(room.validate(), ValidationError);
    room = default_archetype();
    room.windows[0].width = 10.0;
    EXPECT_THROW(room.validate(), ValidationError);
    room = default_archetype();
    room.infiltration_ach = -0.1;
    EXPECT_THROW(room.validate(), ValidationError);
}

TEST(Walls, UValueMatchesSeriesResistance)
{
    const auto room = default_archetype();
    EXPECT_NEAR(wall_u_value(room.walls[0]), default_wall_u(), 1e-12);
    EXPECT_NEAR(envelope_ua(room), default_wall_u() * room.net_wall_area() + 5.8 * 3.0, 1e-9);
}

TEST(Zone, SteadyStateMatchesUaOracle)
{
    const auto room = fixture::envelope_only_room();
    const auto weather = synthetic::constant_year(36.0, 30.0);
    const auto r = simulate_year(room, weather);
    const double oracle_kwh = envelope_ua(room) * 10.0 * 8760.0 / 1000.0;
    EXPECT_NEAR(r.cooling_sensible_kwh / oracle_kwh, 1.0, 0.01);
    EXPECT_NEAR(r.cooling_sensible_kwh / oracle_kwh, 1.0, 1e-6);
    EXPECT_EQ(r.heating_kwh, 0.0);
    EXPECT_EQ(r.cooling_latent_kwh, 0.0);
}

TEST(Zone, InternalGainsOnlyStep)
{
    auto room = default_archetype();
    room.infiltration_ach = 0.0;
    const ZoneModel model(room);
    const double w_cap = psychro::humidity_ratio_from_rh(26.0, 0.65);
    auto state = model.initial_state(26.0, 26.0, w_cap);
    // Outdoor at the cooling setpoint: walls carry no flux, so the envelope
    // behaves as adiabatic.
    const auto res = model.step(state, calm_inputs(model, 26.0, w_cap, 21));
    EXPECT_EQ(res.demand.mode, HvacMode::cooling_sensible);
    EXPECT_NEAR(res.demand.sensible / model.dt(), 2 * 70.0 + 54.0, 1e-6);
    EXPECT_NEAR(res.demand.latent / model.dt(), 2 * 45.0, 1e-6);
    EXPECT_NEAR(state.t_zone, 26.0, 1e-9);
}

TEST(Zone, EquilibriumHasNoDemand)
{
    auto room = default_archetype();
    room.schedule.occupants = 0;
    room.schedule.lighting_power = 0.0;
    const auto r = simulate_year(room, synthetic::constant_year(26.0, 50.0));
    EXPECT_EQ(r.heating_kwh, 0.0);
    EXPECT_EQ(r.cooling_total_kwh, 0.0);
    EXPECT_EQ(r.usage_hours, 0);
}

TEST(Zone, UnoccupiedStepHasNoDemand)
{
    const auto room = default_archetype();
    const ZoneModel model(room);
    auto state = model.initial_state(40.0, 30.0, 0.02);
    const auto res = model.step(state, calm_inputs(model, 40.0, 0.02, 12));
    EXPECT_FALSE(res.hvac_available);
    EXPECT_EQ(res.demand.sensible, 0.0);
    EXPECT_EQ(res.demand.latent, 0.0);
    EXPECT_EQ(res.demand.mode, HvacMode::off);
}

TEST(Zone, HeatingHoldsSetpoint)
{
    const auto room = default_archetype();
    const ZoneModel model(room);
    auto state = model.initial_state(0.0, 18.0, 0.003);
    const auto res = model.step(state, calm_inputs(model, 0.0, 0.003, 2));
    EXPECT_EQ(res.demand.mode, HvacMode::heating);
    EXPECT_GT(res.demand.heating(), 0.0);
    EXPECT_EQ(res.demand.cooling_sensible(), 0.0);
    EXPECT_NEAR(state.t_zone, 18.0, 1e-9);
}

TEST(Zone, StepRejectsMismatchedForcing)
{
    const ZoneModel model(default_archetype());
    auto state = model.initial_state(20.0, 20.0, 0.01);
    StepInputs in;
    EXPECT_THROW(model.step(state, in), DomainError);
}

TEST(Zone, AnnualContractsOnFixtures)
{
    SimulationOptions opt;
    opt.record_trace = true;
    for (const auto& f : fixture::fixtures()) {
        const auto r = simulate_year(f.room, f.weather, opt);
        SCOPED_TRACE(f.name);
        EXPECT_LT(r.max_sensible_residual, 0.1);
        EXPECT_LT(r.max_latent_residual, 0.25);
        ASSERT_EQ(r.trace.size(), kHoursPerYear);
        double heat = 0.0, cool = 0.0, lat = 0.0;
        for (const auto& h : r.trace) {
            heat += h.heating;
            cool += h.cooling_sensible;
            lat += h.latent;
            EXPECT_GE(h.heating, 0.0);
            EXPECT_GE(h.cooling_sensible, 0.0);
            EXPECT_GE(h.latent, 0.0);
            if (h.occupied) {
                ASSERT_GE(h.t_zone_min, 17.99);
                ASSERT_LE(h.t_zone_max, 26.01);
                ASSERT_LE(h.rh_zone_max, 65.5);
            } else {
                ASSERT_EQ(h.heating + h.cooling_sensible + h.latent, 0.0);
            }
        }
        EXPECT_NEAR(heat / kJoulesPerKwh, r.heating_kwh, 1e-6);
        EXPECT_NEAR(cool / kJoulesPerKwh, r.cooling_sensible_kwh, 1e-6);
        EXPECT_NEAR(lat / kJoulesPerKwh, r.cooling_latent_kwh, 1e-6);
        EXPECT_NEAR(r.cooling_total_kwh, r.cooling_sensible_kwh + r.cooling_latent_kwh, 1e-9);
        EXPECT_LE(r.usage_hours, 3650);
        EXPECT_GT(r.warmup_days, 0);
    }
}

TEST(Zone, WarmerYearCoolsMoreHeatsLess)
{
    for (const auto& f : fixture::fixtures()) {
        morph::MonthlyShifts s{};
        for (auto& m : s) m.d_temperature = 2.0;
        const auto warm = morph::morph_year(f.weather, s).year;
        const auto a = simulate_year(f.room, f.weather);
        const auto b = simulate_year(f.room, warm);
        SCOPED_TRACE(f.name);
        EXPECT_GT(b.cooling_total_kwh, a.cooling_total_kwh);
        if (a.heating_kwh > 0.0) EXPECT_LT(b.heating_kwh, a.heating_kwh);
    }
}

TEST(Zone, HourlyForcingShape)
{
    const auto f = fixture::fixtures().front();
    const auto forcing = hourly_forcing(f.room, f.weather);
    ASSERT_EQ(forcing.size(), kHoursPerYear);
    for (std::size_t i = 0; i < kHoursPerYear; ++i) {
        EXPECT_EQ(forcing[i].wall_absorbed_solar.size(), 2u);
        EXPECT_GE(forcing[i].window_solar, 0.0);
        if (f.weather.records[i].ghi == 0.0) EXPECT_EQ(forcing[i].window_solar, 0.0);
    }
}

TEST(Zone, HalvingStepBarelyChangesTotals)
{
    for (const auto& f : fixture::fixtures()) {
        SimulationOptions fine;
        fine.dt = 300.0;
        const auto a = simulate_year(f.room, f.weather);
        const auto b = simulate_year(f.room, f.weather, fine);
        SCOPED_TRACE(f.name);
        EXPECT_NEAR(b.cooling_total_kwh, a.cooling_total_kwh, 0.005 * a.cooling_total_kwh);
        EXPECT_NEAR(b.heating_kwh, a.heating_kwh, 0.005 * a.heating_kwh);
    }
}

TEST(Zone, SwitchOnJumpStaysInsideBand)
{
    // Hot zone at switch-on: the setpoint jump must not overshoot into heating
    // or drive the humidity ratio negative.
    const auto room = default_archetype();
    const ZoneModel model(room);
    auto state = model.initial_state(38.0, 34.0, 0.025);
    const auto res = model.step(state, calm_inputs(model, 38.0, 0.025, 21));
    EXPECT_EQ(res.demand.mode, HvacMode::cooling_sensible);
    EXPECT_NEAR(state.t_zone, 26.0, 1e-9);
    EXPECT_GT(state.w_zone, 0.0);
    EXPECT_LE(psychro::rh_from_humidity_ratio(state.w_zone, state.t_zone), 0.65 + 1e-9);
    const auto next = model.step(state, calm_inputs(model, 38.0, 0.025, 21));
    EXPECT_EQ(next.demand.mode, HvacMode::cooling_sensible);
    EXPECT_NEAR(state.t_zone, 26.0, 1e-9);
}
