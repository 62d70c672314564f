#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace glb {

/// Static parameters of one data center.
///
/// Units: `mu` in requests/second per server, powers in watts per active
/// server, `d_net` in seconds of front-end to data-center network delay.
struct DataCenterSpec {
    std::string id;
    double mu = 1.0;
    std::size_t max_servers = 0;
    double p_idle = 0.0;
    double p_peak = 1.0;
    double pue = 1.0;
    double d_net = 0.0;

    bool operator==(const DataCenterSpec&) const = default;
};

/// Service level agreement and time discretization.
struct SlaSpec {
    double deadline = 1.0;
    double slot_seconds = 3600.0;
    /// Bound on the estimated next-slot queue length (requests); enables the
    /// queue-length admission mode when present.
    std::optional<double> queue_bound;

    bool operator==(const SlaSpec&) const = default;
};

/// Inputs of a single time slot. `green_power` (W) and `price` (currency/kWh)
/// hold one entry per data center, in configuration order.
struct SlotInput {
    std::size_t slot = 0;
    double workload = 0.0;
    std::vector<double> green_power;
    std::vector<double> price;

    bool operator==(const SlotInput&) const = default;
};

/// Deadline-feasible service capacity of one data center.
struct Efficiency {
    /// Requests/second one active server can admit while meeting the deadline.
    double per_server = 0.0;
    /// `per_server / (pue * p_peak)`: admitted requests/second per facility watt.
    double per_watt = 0.0;
    bool usable = false;

    bool operator==(const Efficiency&) const = default;
};

/// Per data center green/brown split of one slot.
struct Allocation {
    std::vector<double> green_rate;
    std::vector<double> brown_rate;
    std::vector<std::size_t> green_servers_on;
    std::vector<std::size_t> brown_servers_on;
    std::vector<double> green_power_drawn;
    std::vector<double> brown_power_drawn;
    double brown_cost = 0.0;
    double spilled_green = 0.0;
    /// Requests/second left over after every data center reached its bound.
    double unserved = 0.0;

    bool operator==(const Allocation&) const = default;
};

/// One sample of the total power versus green utilization curve.
struct TradeoffPoint {
    double target_utilization = 0.0;
    double achieved_utilization = 0.0;
    double total_power = 0.0;
    double brown_power = 0.0;
    bool feasible = false;
    /// Per data center request rates of the minimizing allocation (empty when
    /// infeasible).
    std::vector<double> rates;

    bool operator==(const TradeoffPoint&) const = default;
};

/// Absolute tolerance on request rates (requests/second).
inline constexpr double rate_tolerance = 1e-9;

} // namespace glb
