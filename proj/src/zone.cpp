#include "climroom/zone.hpp"

#include "climroom/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace climroom::zone {

std::vector<Layer> default_wall_layers()
{
    return {{0.015, 0.72, 1760.0, 840.0}, {0.230, 0.81, 1920.0, 840.0}, {0.015, 0.72, 1760.0, 840.0}};
}

double wall_u_value(const WallSpec& wall)
{
    double r = 1.0 / wall.h_interior + 1.0 / wall.h_exterior;
    for (const auto& l : wall.layers) r += l.thickness / l.conductivity;
    return 1.0 / r;
}

bool DailyInterval::contains(int hour_of_day) const
{
    if (start_hour == end_hour) return false;
    if (start_hour < end_hour) return hour_of_day >= start_hour && hour_of_day < end_hour;
    return hour_of_day >= start_hour || hour_of_day < end_hour;
}

int DailyInterval::hours_per_day() const
{
    int n = 0;
    for (int h = 0; h < 24; ++h) n += contains(h) ? 1 : 0;
    return n;
}

double RoomArchetype::volume() const
{
    return dimensions.width * dimensions.depth * dimensions.height;
}

double RoomArchetype::gross_wall_area() const
{
    double a = 0.0;
    for (const auto& w : walls) a += w.gross_area;
    return a;
}

double RoomArchetype::window_area() const
{
    double a = 0.0;
    for (const auto& w : windows) a += w.area();
    return a;
}

double RoomArchetype::net_wall_area() const { return gross_wall_area() - window_area(); }

double RoomArchetype::wall_net_area(std::size_t wall) const
{
    double a = walls.at(wall).gross_area;
    for (const auto& w : windows)
        if (w.wall == wall) a -= w.area();
    return a;
}

double RoomArchetype::infiltration_mass_flow() const
{
    return air.rho_air * volume() * infiltration_ach / 3600.0;
}

void RoomArchetype::validate() const
{
    if (!(dimensions.width > 0 && dimensions.depth > 0 && dimensions.height > 0))
        throw ValidationError("room dimensions must be positive");
    if (walls.empty()) throw ValidationError("room needs at least one exterior wall");
    for (std::size_t i = 0; i < walls.size(); ++i) {
        const auto& w = walls[i];
        if (!(w.gross_area > 0)) throw ValidationError("wall.gross_area", w.gross_area);
        if (w.layers.empty()) throw ValidationError(fmt::format("wall {} has no layers", i));
        for (const auto& l : w.layers) {
            if (!(l.thickness > 0)) throw ValidationError("layer.thickness", l.thickness);
            if (!(l.conductivity > 0)) throw ValidationError("layer.conductivity", l.conductivity);
            if (!(l.density > 0)) throw ValidationError("layer.density", l.density);
            if (!(l.specific_heat > 0)) throw ValidationError("layer.specific_heat", l.specific_heat);
        }
        if (!(w.exterior_absorptance >= 0 && w.exterior_absorptance <= 1))
            throw ValidationError("wall.exterior_absorptance", w.exterior_absorptance);
        if (!(w.h_interior > 0)) throw ValidationError("wall.h_interior", w.h_interior);
        if (!(w.h_exterior > 0)) throw ValidationError("wall.h_exterior", w.h_exterior);
        if (!(wall_net_area(i) > 0))
            throw ValidationError(fmt::format("windows cover all of wall {}", i));
    }
    for (const auto& w : windows) {
        if (w.wall >= walls.size()) throw ValidationError("window.wall", static_cast<double>(w.wall));
        if (!(w.width > 0 && w.height > 0)) throw ValidationError("window size must be positive");
        if (w.height > dimensions.height) throw ValidationError("window.height", w.height, "taller than the room");
        if (w.width > walls[w.wall].gross_area / dimensions.height)
            throw ValidationError("window.width", w.width, "wider than its wall");
        if (!(w.u_value > 0)) throw ValidationError("window.u_value", w.u_value);
        if (!(w.shgc > 0 && w.shgc <= 1)) throw ValidationError("window.shgc", w.shgc);
        if (!(w.interior_shade_multiplier >= 0 && w.interior_shade_multiplier <= 1))
            throw ValidationError("window.interior_shade_multiplier", w.interior_shade_multiplier);
        if (!(w.overhang.depth >= 0)) throw ValidationError("overhang.depth", w.overhang.depth);
        if (!(w.overhang.gap_above_window >= 0))
            throw ValidationError("overhang.gap_above_window", w.overhang.gap_above_window);
    }
    if (!(infiltration_ach >= 0)) throw ValidationError("infiltration_ach", infiltration_ach);
    if (!(setpoints.heating < setpoints.cooling))
        throw ValidationError("heating setpoint must be below cooling setpoint");
    if (!(setpoints.dehumidify_rh > 0 && setpoints.dehumidify_rh <= 100))
        throw ValidationError("dehumidify_rh", setpoints.dehumidify_rh);
    const auto& s = schedule;
    if (s.occupants < 0) throw ValidationError("occupants", s.occupants);
    if (!(s.sensible_per_person >= 0)) throw ValidationError("sensible_per_person", s.sensible_per_person);
    if (!(s.latent_per_person >= 0)) throw ValidationError("latent_per_person", s.latent_per_person);
    if (!(s.lighting_power >= 0)) throw ValidationError("lighting_power", s.lighting_power);
    for (const auto* iv : {&s.occupied, &s.lighting}) {
        if (iv->start_hour < 0 || iv->start_hour > 24 || iv->end_hour < 0 || iv->end_hour > 24)
            throw ValidationError("schedule interval hours must lie within 0..24");
    }
    air.validate();
    if (!(ground_albedo >= 0 && ground_albedo <= 1)) throw ValidationError("ground_albedo", ground_albedo);
}

RoomArchetype default_archetype(double first_azimuth, double second_azimuth)
{
    RoomArchetype room;
    const auto& d = room.dimensions;
    WallSpec a;
    a.name = "wall-1";
    a.azimuth = first_azimuth;
    a.gross_area = d.width * d.height;
    WallSpec b = a;
    b.name = "wall-2";
    b.azimuth = second_azimuth;
    b.gross_area = d.depth * d.height;
    room.walls = {a, b};
    WindowSpec w1;
    w1.wall = 0;
    WindowSpec w2;
    w2.wall = 1;
    room.windows = {w1, w2};
    return room;
}

double envelope_ua(const RoomArchetype& room)
{
    double ua = 0.0;
    for (std::size_t i = 0; i < room.walls.size(); ++i)
        ua += wall_u_value(room.walls[i]) * room.wall_net_area(i);
    for (const auto& w : room.windows) ua += w.u_value * w.area();
    return ua;
}

std::string_view to_string(HvacMode mode)
{
    switch (mode) {
    case HvacMode::off: return "off";
    case HvacMode::heating: return "heating";
    case HvacMode::cooling_sensible: return "cooling_sensible";
    case HvacMode::dehumidify: return "dehumidify";
    }
    return "?";
}

double StepBalance::sensible_residual() const
{
    return system_sensible + internal_convective + surface_convective + window_conduction +
           window_solar + infiltration_sensible - storage_sensible;
}

double StepBalance::latent_residual() const
{
    return system_latent + internal_latent + infiltration_latent - storage_latent;
}

namespace {

// Diagonal coefficient of the two-stage L-stable SDIRK scheme, 1 - 1/sqrt(2).
constexpr double kGamma = 0.29289321881345247560;
// Second-stage history: x0 + kCarry (x1 - x0) carries the first-stage slope.
constexpr double kCarry = (1.0 - kGamma) / kGamma;

// Round-off band around setpoints inside which the zone is left free-floating.
constexpr double kSetpointTolerance = 1e-9; // C
constexpr double kHumidityTolerance = 1e-12; // kg/kg

} // namespace

ZoneModel::ZoneModel(RoomArchetype room, const SimulationOptions& options)
    : room_(std::move(room)), dt_(options.dt)
{
    room_.validate();
    if (!(dt_ > 0.0) || std::fmod(3600.0, dt_) != 0.0)
        throw DomainError(fmt::format("time step {} s does not divide one hour", dt_));

    for (std::size_t wi = 0; wi < room_.walls.size(); ++wi) {
        const auto& spec = room_.walls[wi];
        WallSolver w;
        std::vector<double> half_r; // centre-to-face resistance per cell
        for (const auto& layer : spec.layers) {
            const int n = std::max(options.min_nodes_per_layer,
                                   static_cast<int>(std::ceil(layer.thickness / options.max_cell_thickness)));
            const double dx = layer.thickness / n;
            for (int k = 0; k < n; ++k) {
                w.capacity.push_back(layer.density * layer.specific_heat * dx);
                half_r.push_back(dx / (2.0 * layer.conductivity));
            }
        }
        const std::size_t n = w.capacity.size();
        for (std::size_t i = 0; i + 1 < n; ++i) w.conductance.push_back(1.0 / (half_r[i] + half_r[i + 1]));
        w.g_exterior = 1.0 / (1.0 / spec.h_exterior + half_r.front());
        w.g_interior = 1.0 / (1.0 / spec.h_interior + half_r.back());
        w.k_half_interior = 1.0 / half_r.back();
        w.h_interior = spec.h_interior;
        w.h_exterior = spec.h_exterior;
        w.net_area = room_.wall_net_area(wi);

        const auto factorise = [&](double h) {
            Factorization f;
            f.lower.assign(n, 0.0);
            f.c_prime.assign(n, 0.0);
            f.inv_pivot.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const double left = i == 0 ? w.g_exterior : w.conductance[i - 1];
                const double right = i + 1 == n ? w.g_interior : w.conductance[i];
                const double diag = w.capacity[i] / h + left + right;
                const double sub = i == 0 ? 0.0 : -w.conductance[i - 1];
                const double sup = i + 1 == n ? 0.0 : -w.conductance[i];
                const double pivot = diag - (i == 0 ? 0.0 : sub * f.c_prime[i - 1]);
                if (!(pivot > 0.0)) throw NumericalError("wall matrix is not positive definite");
                f.lower[i] = sub;
                f.inv_pivot[i] = 1.0 / pivot;
                f.c_prime[i] = sup * f.inv_pivot[i];
            }
            f.zone_response.assign(n, 0.0);
            f.zone_response.back() = w.g_interior;
            solve(f, f.zone_response);
            return f;
        };
        w.stage = factorise(kGamma * dt_);
        w.euler = factorise(dt_);
        walls_.push_back(std::move(w));
    }

    for (const auto& win : room_.windows) window_ua_ += win.u_value * win.area();
    air_mass_ = room_.air.rho_air * room_.volume();
    air_capacity_ = air_mass_ * room_.air.c_p;
    infiltration_flow_ = room_.infiltration_mass_flow();
}

void ZoneModel::solve(const Factorization& w, std::vector<double>& d)
{
    const std::size_t n = d.size();
    d[0] *= w.inv_pivot[0];
    for (std::size_t i = 1; i < n; ++i) d[i] = (d[i] - w.lower[i] * d[i - 1]) * w.inv_pivot[i];
    for (std::size_t i = n - 1; i-- > 0;) d[i] -= w.c_prime[i] * d[i + 1];
}

ZoneState ZoneModel::initial_state(double t_out, double t_zone, double w_zone) const
{
    ZoneState s;
    s.t_zone = t_zone;
    s.w_zone = w_zone;
    for (const auto& w : walls_) {
        // Steady conduction: temperature falls linearly in resistance.
        const std::size_t n = w.capacity.size();
        std::vector<double> r_at(n);
        double r = 1.0 / w.g_exterior;
        r_at[0] = r;
        for (std::size_t i = 1; i < n; ++i) {
            r += 1.0 / w.conductance[i - 1];
            r_at[i] = r;
        }
        const double r_total = r + 1.0 / w.g_interior;
        std::vector<double> nodes(n);
        for (std::size_t i = 0; i < n; ++i) nodes[i] = t_out + (t_zone - t_out) * r_at[i] / r_total;
        s.surface_temps.push_back((w.k_half_interior * nodes.back() + w.h_interior * t_zone) /
                                  (w.k_half_interior + w.h_interior));
        s.wall_nodes.push_back(std::move(nodes));
    }
    return s;
}


bool ZoneModel::outside_band(const ZoneState& state, const StepInputs& in) const
{
    if (!room_.schedule.occupied.contains(in.hour_of_day)) return false;
    const auto& sp = room_.setpoints;
    if (state.t_zone < sp.heating - kSetpointTolerance || state.t_zone > sp.cooling + kSetpointTolerance)
        return true;
    const double t_limit = std::clamp(state.t_zone, sp.heating, sp.cooling);
    return state.w_zone >
           psychro::humidity_ratio_from_rh(t_limit, sp.dehumidify_rh / 100.0, in.pressure) + kHumidityTolerance;
}

StepBalance ZoneModel::stage(ZoneState& state, const ZoneState& start, double carry, const StepInputs& in,
                             bool euler) const
{
    const auto& sched = room_.schedule;
    const auto& air = room_.air;
    const double h = euler ? dt_ : kGamma * dt_;
    const auto history = [carry](double x0, double x1) { return x0 + carry * (x1 - x0); };

    StepBalance bal;
    const bool occupied = sched.occupied.contains(in.hour_of_day);
    bal.internal_convective = (occupied ? sched.occupants * sched.sensible_per_person : 0.0) +
                              (sched.lighting.contains(in.hour_of_day) ? sched.lighting_power : 0.0);
    bal.window_solar = in.window_solar;
    const double moisture_gain = occupied ? sched.occupants * sched.latent_per_person / air.h_fg : 0.0;

    // Each wall's nodes are affine in the unknown zone temperature.
    thread_local std::vector<std::vector<double>> free_nodes;
    free_nodes.resize(walls_.size());
    const double mcp = infiltration_flow_ * air.c_p;
    const double t_hist = history(start.t_zone, state.t_zone);
    double coef = air_capacity_ / h + window_ua_ + mcp;
    double rhs = air_capacity_ / h * t_hist + (window_ua_ + mcp) * in.t_out + bal.internal_convective +
                 bal.window_solar;
    for (std::size_t wi = 0; wi < walls_.size(); ++wi) {
        const auto& w = walls_[wi];
        const auto& f = euler ? w.euler : w.stage;
        auto& x = free_nodes[wi];
        const auto& x0 = start.wall_nodes[wi];
        const auto& x1 = state.wall_nodes[wi];
        x.resize(x0.size());
        for (std::size_t i = 0; i < x0.size(); ++i) x[i] = w.capacity[i] / h * history(x0[i], x1[i]);
        x[0] += w.g_exterior * (in.t_out + in.wall_absorbed_solar[wi] / w.h_exterior);
        solve(f, x);
        coef += w.net_area * w.g_interior * (1.0 - f.zone_response.back());
        rhs += w.net_area * w.g_interior * x.back();
    }

    const double t_free = rhs / coef;
    double t_zone = t_free;
    if (occupied) {
        if (t_free < room_.setpoints.heating - kSetpointTolerance)
            t_zone = room_.setpoints.heating;
        else if (t_free > room_.setpoints.cooling + kSetpointTolerance)
            t_zone = room_.setpoints.cooling;
    }
    bal.system_sensible = t_zone == t_free ? 0.0 : coef * t_zone - rhs;

    state.t_zone = t_zone;
    for (std::size_t wi = 0; wi < walls_.size(); ++wi) {
        const auto& w = walls_[wi];
        const auto& f = euler ? w.euler : w.stage;
        auto& nodes = state.wall_nodes[wi];
        for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = free_nodes[wi][i] + f.zone_response[i] * t_zone;
        const double t_si = (w.k_half_interior * nodes.back() + w.h_interior * t_zone) /
                            (w.k_half_interior + w.h_interior);
        state.surface_temps[wi] = t_si;
        bal.surface_convective += w.h_interior * w.net_area * (t_si - t_zone);
        if (!std::isfinite(t_si)) throw NumericalError("wall solve produced a non-finite temperature");
    }
    bal.window_conduction = window_ua_ * (in.t_out - t_zone);
    bal.infiltration_sensible = mcp * (in.t_out - t_zone);
    bal.storage_sensible = air_capacity_ * (t_zone - t_hist) / h;

    // Moisture: free-floating implicit update, capped at the RH limit while occupied.
    const double w_hist = history(start.w_zone, state.w_zone);
    const double w_free = (air_mass_ / h * w_hist + moisture_gain + infiltration_flow_ * in.w_out) /
                          (air_mass_ / h + infiltration_flow_);
    double w_zone = w_free;
    if (occupied) {
        const double w_limit = psychro::humidity_ratio_from_rh(
            t_zone, room_.setpoints.dehumidify_rh / 100.0, in.pressure);
        if (w_free > w_limit + kHumidityTolerance) w_zone = w_limit;
    }
    state.w_zone = w_zone;
    bal.internal_latent = moisture_gain * air.h_fg;
    bal.infiltration_latent = infiltration_flow_ * air.h_fg * (in.w_out - w_zone);
    bal.storage_latent = air_mass_ * air.h_fg * (w_zone - w_hist) / h;
    bal.system_latent =
        w_zone == w_free ? 0.0 : bal.storage_latent - bal.internal_latent - bal.infiltration_latent;
    return bal;
}

StepResult ZoneModel::step(ZoneState& state, const StepInputs& in) const
{
    if (state.wall_nodes.size() != walls_.size() || in.wall_absorbed_solar.size() != walls_.size())
        throw DomainError("zone state / forcing does not match the wall count");

    StepResult out;
    out.hvac_available = room_.schedule.occupied.contains(in.hour_of_day);
    auto& bal = out.balance;
    const ZoneState start = state;
    if (outside_band(state, in)) {
        bal = stage(state, start, 0.0, in, true);
    } else {
        // First stage at t + gamma*dt, second at t + dt; weights (1 - gamma, gamma).
        StepInputs mid = in;
        const double t0 = std::isnan(in.t_out_start) ? in.t_out : in.t_out_start;
        const double w0 = std::isnan(in.w_out_start) ? in.w_out : in.w_out_start;
        mid.t_out = t0 + kGamma * (in.t_out - t0);
        mid.w_out = w0 + kGamma * (in.w_out - w0);
        const auto a = stage(state, start, 0.0, mid, false);
        const auto b = stage(state, start, kCarry, in, false);
        const auto mix = [](double x, double y) { return (1.0 - kGamma) * x + kGamma * y; };
        bal.internal_convective = mix(a.internal_convective, b.internal_convective);
        bal.surface_convective = mix(a.surface_convective, b.surface_convective);
        bal.window_conduction = mix(a.window_conduction, b.window_conduction);
        bal.window_solar = mix(a.window_solar, b.window_solar);
        bal.infiltration_sensible = mix(a.infiltration_sensible, b.infiltration_sensible);
        bal.system_sensible = mix(a.system_sensible, b.system_sensible);
        bal.internal_latent = mix(a.internal_latent, b.internal_latent);
        bal.infiltration_latent = mix(a.infiltration_latent, b.infiltration_latent);
        bal.system_latent = mix(a.system_latent, b.system_latent);
        bal.storage_sensible = air_capacity_ * (state.t_zone - start.t_zone) / dt_;
        bal.storage_latent = air_mass_ * room_.air.h_fg * (state.w_zone - start.w_zone) / dt_;
    }

    auto& d = out.demand;
    d.sensible = std::abs(bal.system_sensible) * dt_;
    d.latent = std::max(0.0, -bal.system_latent) * dt_;
    if (bal.system_sensible > 0.0)
        d.mode = HvacMode::heating;
    else if (bal.system_sensible < 0.0)
        d.mode = HvacMode::cooling_sensible;
    else if (d.latent > 0.0)
        d.mode = HvacMode::dehumidify;
    return out;
}

namespace {

HourlyForcing forcing_for(const RoomArchetype& room, const HourlyWeatherRecord& rec,
                          const Location& location)
{
    HourlyForcing f;
    f.t_out = rec.dry_bulb;
    f.w_out = rec.humidity_ratio();
    f.pressure = rec.pressure;
    const auto pos = solar::solar_position(location, rec.time);
    solar::IrradianceSplit split;
    split.ghi = rec.ghi;
    split.dni = rec.dni;
    split.dhi = rec.dhi;
    f.wall_absorbed_solar.reserve(room.walls.size());
    for (const auto& w : room.walls) {
        const double incident =
            solar::incident_on_surface(split, pos, {w.azimuth, 90.0}, room.ground_albedo);
        f.wall_absorbed_solar.push_back(w.exterior_absorptance * incident);
    }
    for (const auto& win : room.windows) {
        const double az = room.walls[win.wall].azimuth;
        const auto in = solar::incident_components(split, pos, {az, 90.0}, room.ground_albedo);
        const double shaded =
            solar::overhang_shaded_fraction(pos, {win.width, win.height, az}, win.overhang);
        const double transmitted =
            in.beam * (1.0 - shaded) + in.sky_diffuse + in.ground_reflected;
        f.window_solar += win.shgc * win.interior_shade_multiplier * win.area() * transmitted;
    }
    return f;
}

} // namespace

std::vector<HourlyForcing> hourly_forcing(const RoomArchetype& room, const WeatherYear& weather)
{
    std::vector<HourlyForcing> out;
    out.reserve(weather.records.size());
    for (const auto& rec : weather.records) out.push_back(forcing_for(room, rec, weather.location));
    return out;
}

StepResult step_zone(const ZoneModel& model, ZoneState& state, const HourlyWeatherRecord& weather,
                     const Location& location)
{
    const auto f = forcing_for(model.room(), weather, location);
    StepInputs in;
    in.t_out = f.t_out;
    in.w_out = f.w_out;
    in.pressure = f.pressure;
    in.wall_absorbed_solar = f.wall_absorbed_solar;
    in.window_solar = f.window_solar;
    in.hour_of_day = weather.time.hour - 1;
    return model.step(state, in);
}

AnnualResult simulate_year(const RoomArchetype& room, const WeatherYear& weather,
                           const SimulationOptions& options)
{
    if (weather.records.size() != kHoursPerYear)
        throw StructuralError(fmt::format("simulation needs {} hourly records, got {}",
                                          kHoursPerYear, weather.records.size()));
    const ZoneModel model(room, options);
    const auto forcing = hourly_forcing(model.room(), weather);
    const int substeps = static_cast<int>(std::lround(3600.0 / model.dt()));
    const auto& sp = model.room().setpoints;

    StepInputs in;
    auto prepare = [&](std::size_t hour, int k) {
        const auto& cur = forcing[hour];
        const auto& prev = forcing[(hour + kHoursPerYear - 1) % kHoursPerYear];
        const double f0 = static_cast<double>(k - 1) / substeps;
        const double f = static_cast<double>(k) / substeps;
        in.t_out_start = prev.t_out + f0 * (cur.t_out - prev.t_out);
        in.w_out_start = prev.w_out + f0 * (cur.w_out - prev.w_out);
        in.t_out = prev.t_out + f * (cur.t_out - prev.t_out);
        in.w_out = prev.w_out + f * (cur.w_out - prev.w_out);
        in.pressure = cur.pressure;
        in.wall_absorbed_solar = cur.wall_absorbed_solar;
        in.window_solar = cur.window_solar;
        in.hour_of_day = static_cast<int>(hour % 24);
    };

    const double t0 = forcing.front().t_out;
    ZoneState state = model.initial_state(t0, std::clamp(t0, sp.heating, sp.cooling),
                                          forcing.front().w_out);
    AnnualResult result;
    for (int day = 0; day < options.max_warmup_days; ++day) {
        const auto before = state.wall_nodes;
        for (std::size_t h = 0; h < 24; ++h) {
            for (int k = 1; k <= substeps; ++k) {
                prepare(h, k);
                model.step(state, in);
            }
        }
        ++result.warmup_days;
        double change = 0.0;
        for (std::size_t w = 0; w < before.size(); ++w)
            for (std::size_t i = 0; i < before[w].size(); ++i)
                change = std::max(change, std::abs(state.wall_nodes[w][i] - before[w][i]));
        if (change < options.warmup_tolerance) break;
    }

    double heating = 0.0, cooling_sen = 0.0, latent = 0.0;
    if (options.record_trace) result.trace.reserve(kHoursPerYear);
    for (std::size_t h = 0; h < kHoursPerYear; ++h) {
        HourlyTrace tr;
        tr.time = weather.records[h].time;
        tr.t_zone_min = 1e300;
        tr.t_zone_max = -1e300;
        for (int k = 1; k <= substeps; ++k) {
            prepare(h, k);
            const auto r = model.step(state, in);
            tr.occupied = r.hvac_available;
            tr.heating += r.demand.heating();
            tr.cooling_sensible += r.demand.cooling_sensible();
            tr.latent += r.demand.latent;
            tr.t_zone_min = std::min(tr.t_zone_min, state.t_zone);
            tr.t_zone_max = std::max(tr.t_zone_max, state.t_zone);
            tr.rh_zone_max = std::max(
                tr.rh_zone_max, 100.0 * psychro::rh_from_humidity_ratio(state.w_zone, state.t_zone, in.pressure));
            result.max_sensible_residual =
                std::max(result.max_sensible_residual, std::abs(r.balance.sensible_residual()));
            result.max_latent_residual =
                std::max(result.max_latent_residual, std::abs(r.balance.latent_residual()));
        }
        tr.t_zone = state.t_zone;
        tr.w_zone = state.w_zone;
        tr.rh_zone = 100.0 * psychro::rh_from_humidity_ratio(state.w_zone, state.t_zone, in.pressure);
        if (tr.heating > 0.0)
            tr.mode = HvacMode::heating;
        else if (tr.cooling_sensible > 0.0)
            tr.mode = HvacMode::cooling_sensible;
        else if (tr.latent > 0.0)
            tr.mode = HvacMode::dehumidify;
        heating += tr.heating;
        cooling_sen += tr.cooling_sensible;
        latent += tr.latent;
        if (tr.heating > 0.0 || tr.cooling_sensible > 0.0 || tr.latent > 0.0) ++result.usage_hours;
        if (tr.heating > 0.0) ++result.heating_hours;
        if (tr.cooling_sensible > 0.0 || tr.latent > 0.0) ++result.cooling_hours;
        if (options.record_trace) result.trace.push_back(tr);
    }
    result.heating_kwh = heating / kJoulesPerKwh;
    result.cooling_sensible_kwh = cooling_sen / kJoulesPerKwh;
    result.cooling_latent_kwh = latent / kJoulesPerKwh;
    result.cooling_total_kwh = result.cooling_sensible_kwh + result.cooling_latent_kwh;
    return result;
}

} // namespace climroom::zone
