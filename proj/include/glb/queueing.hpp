#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>

#include "glb/errors.hpp"
#include "glb/types.hpp"

/// M/GI/1 processor-sharing delay model.
///
/// Load arriving at a data center is split evenly across its active servers,
/// each of which behaves as an independent M/GI/1-PS queue with service
/// rate mu. The mean sojourn time of such a server at arrival rate x is
/// 1 / (mu - x), which depends on the service distribution only through its
/// mean.
namespace glb::queueing {

/// Mean sojourn time (seconds) with `servers_on` active servers sharing
/// `load` requests/second. Returns `std::nullopt` when the pool is saturated
/// (load >= servers_on * mu), i.e. the delay is unbounded.
[[nodiscard]] inline std::optional<double>
mean_delay(const DataCenterSpec& dc, std::size_t servers_on, double load) {
    if (servers_on == 0) {
        throw OverloadError("mean_delay: no active servers at data center '" + dc.id + "'");
    }
    const double m = static_cast<double>(servers_on);
    const double per_server = load / m;
    if (load >= m * dc.mu || per_server >= dc.mu) {
        return std::nullopt;
    }
    return 1.0 / (dc.mu - per_server);
}

/// Largest per-server admission rate meeting the deadline after network
/// delay, and its facility-power normalization.
[[nodiscard]] inline Efficiency service_efficiency(const DataCenterSpec& dc, const SlaSpec& sla) {
    const double slack = sla.deadline - dc.d_net;
    if (!(slack > 1.0 / dc.mu)) {
        return {};
    }
    Efficiency e;
    e.per_server = dc.mu - 1.0 / slack;
    e.usable = e.per_server > 0.0;
    if (!e.usable) {
        return {};
    }
    e.per_watt = e.per_server / (dc.pue * dc.p_peak);
    return e;
}

/// Deadline-induced upper bound on the request rate of `servers_on` servers.
[[nodiscard]] inline double upper_bound(const DataCenterSpec& dc, const SlaSpec& sla,
                                        std::size_t servers_on) {
    return static_cast<double>(servers_on) * service_efficiency(dc, sla).per_server;
}

/// Fluid estimate of the backlog one slot ahead: the current backlog plus the
/// net arrival surplus over the slot, floored at zero.
[[nodiscard]] inline double estimate_queue(double current, const DataCenterSpec& dc,
                                           std::size_t servers_on, double load,
                                           const SlaSpec& sla) {
    const double capacity = static_cast<double>(servers_on) * dc.mu;
    return std::max(0.0, current + (load - capacity) * sla.slot_seconds);
}

/// Largest load that keeps `estimate_queue` within `bound` with `servers_on`
/// servers, given the current backlog; floored at zero.
[[nodiscard]] inline double queue_admission_limit(double current, double bound,
                                                  const DataCenterSpec& dc,
                                                  std::size_t servers_on, const SlaSpec& sla) {
    const double capacity = static_cast<double>(servers_on) * dc.mu;
    return std::max(0.0, capacity + (bound - current) / sla.slot_seconds);
}

} // namespace glb::queueing
