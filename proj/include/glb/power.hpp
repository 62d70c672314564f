#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include "glb/errors.hpp"
#include "glb/queueing.hpp"
#include "glb/types.hpp"

/// Server counts, power draw, energy cost and facility metrics.
///
/// Power is in watts throughout; energy conversions (watt-hours, kWh) are
/// confined to `slot_cost`, `slot_energy_wh` and `cue`.
namespace glb::power {

/// Ceiling of a non-negative count that forgives round-off: values within
/// 1e-9 (relative) of an integer round to that integer.
[[nodiscard]] inline std::size_t ceil_count(double x) {
    if (!(x > 0.0)) {
        return 0;
    }
    const double r = std::round(x);
    if (r >= 1.0 && std::abs(x - r) <= 1e-9 * r) {
        return static_cast<std::size_t>(r);
    }
    return static_cast<std::size_t>(std::ceil(x));
}

/// Minimum number of active servers that admit `load` under the deadline,
/// given the per-server admission rate `per_server`.
[[nodiscard]] inline std::size_t servers_for_rate(double load, double per_server) {
    if (!(load > 0.0)) {
        return 0;
    }
    if (!(per_server > 0.0)) {
        throw CapacityError("no deadline-feasible capacity for positive load");
    }
    return ceil_count(load / per_server);
}

[[nodiscard]] inline std::size_t servers_needed(const DataCenterSpec& dc, const SlaSpec& sla,
                                                double load) {
    const Efficiency e = queueing::service_efficiency(dc, sla);
    if (load > 0.0 && !e.usable) {
        throw CapacityError("data center '" + dc.id + "' cannot meet the deadline");
    }
    return servers_for_rate(load, e.per_server);
}

/// IT power of `servers_on` servers sharing `load`: base load of every active
/// server plus the utilization-proportional part.
[[nodiscard]] inline double it_power(const DataCenterSpec& dc, std::size_t servers_on,
                                     double load) {
    const double m = static_cast<double>(servers_on);
    if (load > m * dc.mu * (1.0 + 1e-12)) {
        throw OverloadError("it_power: load exceeds the service capacity of '" + dc.id + "'");
    }
    return m * dc.p_idle + (dc.p_peak - dc.p_idle) * (load / dc.mu);
}

[[nodiscard]] inline double facility_power(const DataCenterSpec& dc, std::size_t servers_on,
                                           double load) {
    return dc.pue * it_power(dc, servers_on, load);
}

/// Number of servers whose facility draw at peak utilization fits within
/// `green_power` watts, capped by the fleet size.
[[nodiscard]] inline std::size_t green_server_capacity(const DataCenterSpec& dc,
                                                       double green_power) {
    if (!(green_power > 0.0)) {
        return 0;
    }
    const double per_server = dc.pue * dc.p_peak;
    const double n = std::floor(green_power / per_server);
    if (n >= static_cast<double>(dc.max_servers)) {
        return dc.max_servers;
    }
    return static_cast<std::size_t>(n);
}

/// Energy (Wh) of drawing `watts` for one slot.
[[nodiscard]] inline double slot_energy_wh(double watts, const SlaSpec& sla) {
    return watts * (sla.slot_seconds / 3600.0);
}

/// Electricity bill of drawing `brown_power` watts for one slot at `price`
/// currency/kWh.
[[nodiscard]] inline double slot_cost(double price, double brown_power, const SlaSpec& sla) {
    return price * (brown_power / 1000.0) * (sla.slot_seconds / 3600.0);
}

/// Carbon usage effectiveness: grams of CO2 per watt-hour of IT energy.
[[nodiscard]] inline double cue(double total_co2, double it_energy) {
    if (!(it_energy > 0.0)) {
        throw UndefinedMetricError("cue: IT energy is zero");
    }
    return total_co2 / it_energy;
}

/// Grams of CO2 emitted by `brown_energy_wh` of grid energy.
[[nodiscard]] inline double co2_grams(double carbon_intensity, double brown_energy_wh) {
    return carbon_intensity * brown_energy_wh;
}

/// Power usage effectiveness recovered from measured energies.
[[nodiscard]] inline double pue(double facility_energy, double it_energy) {
    if (!(it_energy > 0.0)) {
        throw UndefinedMetricError("pue: IT energy is zero");
    }
    return facility_energy / it_energy;
}

} // namespace glb::power
