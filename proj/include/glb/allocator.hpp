#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "glb/errors.hpp"
#include "glb/model.hpp"
#include "glb/power.hpp"
#include "glb/queueing.hpp"
#include "glb/types.hpp"

/// Two-stage green/brown workload allocation.
///
/// Stage one routes as much of the slot's workload as possible to servers
/// that the available green power can run; it never looks at prices. Stage
/// two places the remainder on grid-powered servers at minimum electricity
/// cost and never touches the green rates. Both stages are separable linear
/// programs under the fractional-server relaxation, solved exactly by
/// ordered greedy fills; stage two then repairs the cost of rounding server
/// counts up with a pairwise load-shifting local search.
namespace glb {

/// How per data center admission is bounded.
enum class QosMode {
    /// Mean delay plus network delay within the deadline.
    upper_bound,
    /// Estimated next-slot queue length within `SlaSpec::queue_bound`.
    queue_length,
};

/// Admission context of one slot. In queue-length mode `backlog` holds the
/// estimated queue (requests) of every data center at the start of the slot.
struct AdmissionState {
    QosMode mode = QosMode::upper_bound;
    std::vector<double> backlog;
};

struct SlotResult {
    std::size_t slot = 0;
    Allocation allocation;
    double total_power = 0.0;
    double brown_power = 0.0;
    double brown_cost = 0.0;
    double green_utilization = 0.0;
    double unserved = 0.0;
    /// Estimated backlog at the start of the next slot (queue-length mode only).
    std::vector<double> next_backlog;

    bool operator==(const SlotResult&) const = default;
};

namespace detail {

/// Fills `demand` into `caps` following `order`; returns the per-entry rates
/// and writes what could not be placed into `leftover`.
inline std::vector<double> fill_in_order(std::span<const std::size_t> order,
                                         std::span<const double> caps, double demand,
                                         double& leftover) {
    std::vector<double> rates(caps.size(), 0.0);
    double remaining = std::max(0.0, demand);
    for (std::size_t i : order) {
        if (remaining <= 0.0) {
            break;
        }
        const double take = std::min(remaining, std::max(0.0, caps[i]));
        rates[i] = take;
        remaining -= take;
    }
    leftover = remaining > rate_tolerance ? remaining : 0.0;
    return rates;
}

/// Requests/second one server admits in the given mode.
inline double admission_rate(const Config& cfg, std::size_t i, QosMode mode) {
    if (mode == QosMode::queue_length) {
        return cfg.datacenter(i).mu;
    }
    return cfg.efficiency(i).per_server;
}

/// Extra rate a data center may absorb as backlog this slot.
inline double backlog_allowance(const Config& cfg, std::size_t i, const AdmissionState& st) {
    if (st.mode != QosMode::queue_length) {
        return 0.0;
    }
    const double q = st.backlog.empty() ? 0.0 : st.backlog.at(i);
    return std::max(0.0, (cfg.sla().queue_bound.value() - q) / cfg.sla().slot_seconds);
}

inline void check_state(const Config& cfg, const AdmissionState& st) {
    if (st.mode != QosMode::queue_length) {
        return;
    }
    if (!cfg.sla().queue_bound) {
        throw ConfigError("queue-length mode requires sla.queue_bound");
    }
    if (!st.backlog.empty() && st.backlog.size() != cfg.size()) {
        throw ConfigError("backlog vector does not match the number of data centers");
    }
}

} // namespace detail

/// Green request-rate capacity of every data center: servers the green power
/// can run at peak draw, times the per-server admission rate.
[[nodiscard]] inline std::vector<double> green_capacity(const Config& cfg, const SlotInput& slot,
                                                        QosMode mode = QosMode::upper_bound) {
    std::vector<double> caps(cfg.size(), 0.0);
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const std::size_t n = power::green_server_capacity(cfg.datacenter(i), slot.green_power[i]);
        caps[i] = static_cast<double>(n) * detail::admission_rate(cfg, i, mode);
    }
    return caps;
}

/// Order in which stage one fills data centers: descending green capacity,
/// then descending green power, then ascending id.
[[nodiscard]] inline std::vector<std::size_t> green_fill_order(const Config& cfg,
                                                               const SlotInput& slot,
                                                               std::span<const double> caps) {
    std::vector<std::size_t> order(cfg.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (caps[a] != caps[b]) {
            return caps[a] > caps[b];
        }
        if (slot.green_power[a] != slot.green_power[b]) {
            return slot.green_power[a] > slot.green_power[b];
        }
        return cfg.datacenter(a).id < cfg.datacenter(b).id;
    });
    return order;
}

/// Stage one: maximizes the green request rate. The result has only the
/// green fields populated; brown fields are zero.
[[nodiscard]] inline Allocation allocate_green(const Config& cfg, const SlotInput& slot,
                                               const AdmissionState& st = {}) {
    validate_slot(cfg, slot);
    detail::check_state(cfg, st);
    const std::size_t n = cfg.size();
    const auto caps = green_capacity(cfg, slot, st.mode);
    const auto order = green_fill_order(cfg, slot, caps);

    double leftover = 0.0;
    Allocation a;
    a.green_rate = detail::fill_in_order(order, caps, slot.workload, leftover);
    a.brown_rate.assign(n, 0.0);
    a.green_servers_on.assign(n, 0);
    a.brown_servers_on.assign(n, 0);
    a.green_power_drawn.assign(n, 0.0);
    a.brown_power_drawn.assign(n, 0.0);

    double green_total = 0.0;
    double drawn_total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& dc = cfg.datacenter(i);
        const std::size_t limit = power::green_server_capacity(dc, slot.green_power[i]);
        const double rate = a.green_rate[i];
        a.green_servers_on[i] =
            std::min(limit, power::servers_for_rate(rate, detail::admission_rate(cfg, i, st.mode)));
        a.green_power_drawn[i] =
            a.green_servers_on[i] == 0 ? 0.0 : power::facility_power(dc, a.green_servers_on[i], rate);
        green_total += slot.green_power[i];
        drawn_total += a.green_power_drawn[i];
    }
    a.spilled_green = std::max(0.0, green_total - drawn_total);
    return a;
}

/// Cost per unit request rate of serving brown load at data center `i` for
/// one slot, under the fractional-server relaxation (currency per req/s).
[[nodiscard]] inline double brown_marginal_cost(const Config& cfg, const SlotInput& slot,
                                                std::size_t i,
                                                QosMode mode = QosMode::upper_bound) {
    const auto& dc = cfg.datacenter(i);
    const double per_server = detail::admission_rate(cfg, i, mode);
    if (!(per_server > 0.0)) {
        return 0.0;
    }
    const double watts_per_rate =
        dc.pue * (dc.p_idle / per_server + (dc.p_peak - dc.p_idle) / dc.mu);
    return power::slot_cost(slot.price[i], watts_per_rate, cfg.sla());
}

/// Stage two: places the workload left after stage one at minimum
/// electricity cost subject to each data center's admission bound. Green
/// fields of `green` are carried over untouched.
[[nodiscard]] inline Allocation allocate_brown(const Config& cfg, const SlotInput& slot,
                                               const Allocation& green,
                                               const AdmissionState& st = {}) {
    validate_slot(cfg, slot);
    detail::check_state(cfg, st);
    const std::size_t n = cfg.size();
    Allocation a = green;

    std::vector<double> room(n, 0.0);
    std::vector<double> mc(n, 0.0);
    double green_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& dc = cfg.datacenter(i);
        const double r = detail::admission_rate(cfg, i, st.mode);
        const double bound =
            static_cast<double>(dc.max_servers) * r + detail::backlog_allowance(cfg, i, st);
        room[i] = std::max(0.0, bound - a.green_rate[i]);
        mc[i] = brown_marginal_cost(cfg, slot, i, st.mode);
        green_sum += a.green_rate[i];
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
        if (mc[x] != mc[y]) {
            return mc[x] < mc[y];
        }
        return cfg.datacenter(x).id < cfg.datacenter(y).id;
    });

    double brown_demand = slot.workload - green_sum;
    if (brown_demand <= rate_tolerance * std::max(1.0, slot.workload)) {
        brown_demand = 0.0;  // round-off left over from the green fill
    }
    a.brown_rate = detail::fill_in_order(order, room, brown_demand, a.unserved);

    // Integer server accounting for a brown rate at data center i.
    const std::vector<double> backlog_rate = [&] {
        std::vector<double> b(n, 0.0);
        for (std::size_t i = 0; i < n && !st.backlog.empty(); ++i) {
            b[i] = st.backlog[i] / cfg.sla().slot_seconds;
        }
        return b;
    }();
    auto servers_for = [&](std::size_t i, double rate) -> std::size_t {
        const auto& dc = cfg.datacenter(i);
        const double r = detail::admission_rate(cfg, i, st.mode);
        const std::size_t spare = dc.max_servers - std::min(dc.max_servers, a.green_servers_on[i]);
        const double absorbed =
            st.mode == QosMode::queue_length ? detail::backlog_allowance(cfg, i, st) : 0.0;
        return std::min(spare, power::servers_for_rate(std::max(0.0, rate - absorbed), r));
    };
    auto watts_for = [&](std::size_t i, double rate, std::size_t servers) {
        if (servers == 0) {
            return 0.0;
        }
        const auto& dc = cfg.datacenter(i);
        double busy = rate;
        if (st.mode == QosMode::queue_length) {
            busy = std::min(static_cast<double>(servers) * dc.mu, rate + backlog_rate[i]);
        }
        return power::facility_power(dc, servers, busy);
    };
    auto cost_for = [&](std::size_t i, double rate) {
        return power::slot_cost(slot.price[i], watts_for(i, rate, servers_for(i, rate)), cfg.sla());
    };

    // The cost-ordered fill is optimal with fractional servers. Whole servers
    // add up to one partly used server per site, so shift load between pairs
    // of sites while that lowers the bill. Candidate shifts close the sending
    // site, or put the sender or the receiver on a whole-server boundary a few
    // servers away from where it is now.
    constexpr int boundary_window = 4;
    std::vector<double> shifts;
    shifts.reserve(2 * boundary_window + 3);
    std::vector<double> cost(n);
    for (std::size_t i = 0; i < n; ++i) {
        cost[i] = cost_for(i, a.brown_rate[i]);
    }
    for (std::size_t round = 0; round < 16 * n + 16; ++round) {
        double best_gain = 0.0;
        std::size_t best_from = 0;
        std::size_t best_to = 0;
        double best_shift = 0.0;
        const double total = std::accumulate(cost.begin(), cost.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double xi = a.brown_rate[i];
            if (!(xi > 0.0)) {
                continue;
            }
            const double ri = detail::admission_rate(cfg, i, st.mode);
            for (std::size_t j = 0; j < n; ++j) {
                const double xj = a.brown_rate[j];
                const double free_room = room[j] - xj;
                if (j == i || !(free_room > 0.0)) {
                    continue;
                }
                const double rj = detail::admission_rate(cfg, j, st.mode);
                shifts.assign(1, xi);
                for (int k = 0; k <= boundary_window && ri > 0.0; ++k) {
                    shifts.push_back(xi - (std::floor(xi / ri) - k) * ri);
                }
                for (int k = 0; k <= boundary_window && rj > 0.0; ++k) {
                    shifts.push_back((std::ceil(xj / rj) + k) * rj - xj);
                }
                for (double shift : shifts) {
                    shift = std::min({shift, xi, free_room});
                    if (!(shift > rate_tolerance * std::max(1.0, xi))) {
                        continue;
                    }
                    const double gain = cost[i] + cost[j] - cost_for(i, xi - shift) -
                                        cost_for(j, xj + shift);
                    if (gain > best_gain && gain > 1e-12 * total) {
                        best_gain = gain;
                        best_from = i;
                        best_to = j;
                        best_shift = shift;
                    }
                }
            }
        }
        if (best_gain <= 0.0) {
            break;
        }
        double& from = a.brown_rate[best_from];
        from = best_shift >= from ? 0.0 : from - best_shift;
        a.brown_rate[best_to] += best_shift;
        cost[best_from] = cost_for(best_from, from);
        cost[best_to] = cost_for(best_to, a.brown_rate[best_to]);
    }

    a.brown_cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double rate = a.brown_rate[i];
        const std::size_t servers = servers_for(i, rate);
        a.brown_servers_on[i] = servers;
        a.brown_power_drawn[i] = watts_for(i, rate, servers);
        a.brown_cost += power::slot_cost(slot.price[i], a.brown_power_drawn[i], cfg.sla());
    }
    return a;
}

/// Both stages for one slot plus the slot's aggregate metrics.
[[nodiscard]] inline SlotResult allocate_slot(const Config& cfg, const SlotInput& slot,
                                              const AdmissionState& st = {}) {
    const Allocation green = allocate_green(cfg, slot, st);
    SlotResult res;
    res.slot = slot.slot;
    res.allocation = allocate_brown(cfg, slot, green, st);

    const Allocation& a = res.allocation;
    double green_avail = 0.0;
    double green_drawn = 0.0;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        green_avail += slot.green_power[i];
        green_drawn += a.green_power_drawn[i];
        res.brown_power += a.brown_power_drawn[i];
    }
    res.total_power = green_drawn + res.brown_power;
    res.brown_cost = a.brown_cost;
    res.unserved = a.unserved;
    res.green_utilization = green_avail > 0.0 ? std::min(1.0, green_drawn / green_avail) : 0.0;

    if (st.mode == QosMode::queue_length) {
        res.next_backlog.resize(cfg.size());
        for (std::size_t i = 0; i < cfg.size(); ++i) {
            const double q = st.backlog.empty() ? 0.0 : st.backlog[i];
            res.next_backlog[i] = queueing::estimate_queue(
                q, cfg.datacenter(i), a.green_servers_on[i] + a.brown_servers_on[i],
                a.green_rate[i] + a.brown_rate[i], cfg.sla());
        }
    }
    return res;
}

/// Runs `allocate_slot` over a trace. Upper-bound mode treats slots
/// independently; queue-length mode starts from empty queues and carries the
/// estimated backlog from each slot into the next.
[[nodiscard]] inline std::vector<SlotResult> simulate(const Config& cfg,
                                                      std::span<const SlotInput> slots,
                                                      QosMode mode = QosMode::upper_bound) {
    std::vector<SlotResult> out;
    out.reserve(slots.size());
    AdmissionState st{mode, {}};
    if (mode == QosMode::queue_length) {
        detail::check_state(cfg, st);
        st.backlog.assign(cfg.size(), 0.0);
    }
    for (const auto& slot : slots) {
        // Surfaces the offending slot index before any allocation work.
        validate_slot(cfg, slot);
        out.push_back(allocate_slot(cfg, slot, st));
        if (mode == QosMode::queue_length) {
            st.backlog = out.back().next_backlog;
        }
    }
    return out;
}

/// Carbon usage effectiveness of one slot result (g CO2 per Wh of IT energy).
[[nodiscard]] inline double slot_cue(const Config& cfg, const SlotResult& res) {
    double it_watts = 0.0;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        const double pue = cfg.datacenter(i).pue;
        it_watts += (res.allocation.green_power_drawn[i] + res.allocation.brown_power_drawn[i]) / pue;
    }
    const double co2 = power::co2_grams(cfg.carbon_intensity(),
                                        power::slot_energy_wh(res.brown_power, cfg.sla()));
    return power::cue(co2, power::slot_energy_wh(it_watts, cfg.sla()));
}

} // namespace glb
