#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

#include "glb/errors.hpp"
#include "glb/flowgraph.hpp"
#include "glb/model.hpp"
#include "glb/power.hpp"
#include "glb/types.hpp"

/// Total facility power versus green utilization.
///
/// Every connected data center i admits up to `M_i * e_i` requests/second
/// (its SLA upper bound). Serving a rate x there draws facility power
/// P_i(x) = pue * (m * p_idle + (p_peak - p_idle) * x / mu) with m the
/// number of servers the rate needs; the draw is covered by the site's green
/// power first, so green used is min(P_i, G_i) and green utilization is
/// sum_i min(P_i, G_i) / sum_i G_i over the connected sites.
///
/// For a target utilization g the optimizer minimizes total power subject to
/// serving the whole slot workload. With fractional servers P_i is linear in
/// x, and splitting each site's rate into a green-covered piece (up to the
/// rate whose draw equals G_i) and an uncovered piece turns the problem into
/// a linear program with two coupling constraints. Its Lagrangian in the
/// green multiplier nu is a fractional knapsack; the optimum is the convex
/// combination of the two knapsack solutions that bracket the target, found
/// by walking the finitely many values of nu at which the piece order
/// changes. Reported powers use integer server counts, and a bisection along
/// the same solution path takes up whatever extra green the rounding adds.
namespace glb {

struct TradeoffOptions {
    /// Connect only the `top_k` data centers with the highest per-watt
    /// efficiency (ties by ascending id); all usable ones when empty.
    std::optional<std::size_t> top_k;
};

namespace detail {

struct Site {
    std::size_t dc = 0;
    double bound = 0.0;       // max admissible rate
    double watts_per_rate = 0.0;
    double green_rate = 0.0;  // rate whose fractional draw equals G, capped at bound
    double green = 0.0;
};

struct Piece {
    std::size_t site = 0;
    bool covered = false;  // inside the green-covered part of the site
    double length = 0.0;
};

/// Solutions of the Lagrangian knapsack along the multiplier path, each with
/// its fractional power and fractional green draw.
struct KnapsackPoint {
    std::vector<double> rate;  // per site
    double power = 0.0;
    double green = 0.0;
};

class TradeoffPath {
public:
    TradeoffPath(std::vector<Site> sites, double demand, std::vector<std::string> ids)
        : sites_(std::move(sites)), demand_(demand), ids_(std::move(ids)) {
        std::vector<double> nus{0.0, 1.0};
        for (const auto& hi : sites_) {
            for (const auto& lo : sites_) {
                if (lo.watts_per_rate < hi.watts_per_rate && hi.watts_per_rate > 0.0) {
                    nus.push_back(1.0 - lo.watts_per_rate / hi.watts_per_rate);
                }
            }
        }
        std::sort(nus.begin(), nus.end());
        nus.erase(std::unique(nus.begin(), nus.end()), nus.end());
        // The piece order is constant between consecutive breakpoints, so
        // solving at interval midpoints (and past the last breakpoint) visits
        // every distinct solution without relying on exact ties in floating
        // point at the breakpoints themselves.
        for (std::size_t k = 0; k + 1 < nus.size(); ++k) {
            push(solve(0.5 * (nus[k] + nus[k + 1])));
        }
        push(solve(nus.back() + 1.0));
    }

    [[nodiscard]] double max_green() const { return points_.back().green; }

    /// Minimum fractional power solution with fractional green >= target;
    /// `target` must not exceed `max_green()`.
    [[nodiscard]] KnapsackPoint at(double target) const {
        if (points_.front().green >= target) {
            return points_.front();
        }
        for (std::size_t k = 1; k < points_.size(); ++k) {
            const auto& hi = points_[k];
            if (hi.green < target) {
                continue;
            }
            const auto& lo = points_[k - 1];
            const double span = hi.green - lo.green;
            const double w = span > 0.0 ? (target - lo.green) / span : 1.0;
            KnapsackPoint mix;
            mix.rate.resize(sites_.size());
            for (std::size_t s = 0; s < sites_.size(); ++s) {
                mix.rate[s] = (1.0 - w) * lo.rate[s] + w * hi.rate[s];
            }
            mix.power = (1.0 - w) * lo.power + w * hi.power;
            mix.green = target;
            return mix;
        }
        return points_.back();
    }

private:
    void push(KnapsackPoint p) {
        if (points_.empty() || p.rate != points_.back().rate) {
            points_.push_back(std::move(p));
        }
    }

    /// Greedy fill of the knapsack whose piece costs are
    /// watts * (1 - nu) when green-covered and watts otherwise. Among equal
    /// costs, pieces drawing more green go first.
    [[nodiscard]] KnapsackPoint solve(double nu) const {
        std::vector<Piece> pieces;
        for (std::size_t s = 0; s < sites_.size(); ++s) {
            const auto& site = sites_[s];
            if (site.green_rate > 0.0) {
                pieces.push_back({s, true, site.green_rate});
            }
            if (site.bound > site.green_rate) {
                pieces.push_back({s, false, site.bound - site.green_rate});
            }
        }
        auto cost = [&](const Piece& p) {
            const double w = sites_[p.site].watts_per_rate;
            return p.covered ? w * (1.0 - nu) : w;
        };
        auto green_slope = [&](const Piece& p) {
            return p.covered ? sites_[p.site].watts_per_rate : 0.0;
        };
        std::stable_sort(pieces.begin(), pieces.end(), [&](const Piece& a, const Piece& b) {
            const double ca = cost(a);
            const double cb = cost(b);
            if (ca != cb) {
                return ca < cb;
            }
            const double ga = green_slope(a);
            const double gb = green_slope(b);
            if (ga != gb) {
                return ga > gb;
            }
            return ids_[a.site] < ids_[b.site];
        });

        KnapsackPoint out;
        out.rate.assign(sites_.size(), 0.0);
        double remaining = demand_;
        for (const auto& p : pieces) {
            if (remaining <= 0.0) {
                break;
            }
            const double take = std::min(remaining, p.length);
            out.rate[p.site] += take;
            remaining -= take;
        }
        for (std::size_t s = 0; s < sites_.size(); ++s) {
            const double x = out.rate[s];
            out.power += sites_[s].watts_per_rate * x;
            out.green += sites_[s].watts_per_rate * std::min(x, sites_[s].green_rate);
        }
        return out;
    }

    std::vector<Site> sites_;
    double demand_;
    std::vector<std::string> ids_;
    std::vector<KnapsackPoint> points_;
};

} // namespace detail

/// Data centers ranked by per-watt efficiency (descending, ties by id),
/// unusable ones excluded.
[[nodiscard]] inline std::vector<std::size_t> efficiency_ranking(const Config& cfg) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        if (cfg.usable(i)) {
            order.push_back(i);
        }
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double ea = cfg.efficiency(a).per_watt;
        const double eb = cfg.efficiency(b).per_watt;
        if (ea != eb) {
            return ea > eb;
        }
        return cfg.datacenter(a).id < cfg.datacenter(b).id;
    });
    return order;
}

/// SLA upper bound of every data center with its whole fleet active.
[[nodiscard]] inline std::vector<double> fleet_upper_bounds(const Config& cfg) {
    std::vector<double> ub(cfg.size(), 0.0);
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        ub[i] = static_cast<double>(cfg.datacenter(i).max_servers) * cfg.efficiency(i).per_server;
    }
    return ub;
}

/// Evaluates the rates of a tradeoff allocation with integer server counts.
/// `connected` selects the data centers whose green power counts toward
/// utilization.
[[nodiscard]] inline TradeoffPoint evaluate_tradeoff(const Config& cfg, const SlotInput& slot,
                                                     const std::vector<double>& rates,
                                                     const std::vector<bool>& connected,
                                                     double target) {
    TradeoffPoint pt;
    pt.target_utilization = target;
    pt.rates = rates;
    double green_avail = 0.0;
    double green_used = 0.0;
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        if (!connected[i]) {
            continue;
        }
        green_avail += slot.green_power[i];
        const double x = rates[i];
        if (!(x > 0.0)) {
            continue;
        }
        const auto& dc = cfg.datacenter(i);
        const std::size_t m = power::servers_for_rate(x, cfg.efficiency(i).per_server);
        const double p = power::facility_power(dc, m, x);
        const double g = std::min(p, slot.green_power[i]);
        pt.total_power += p;
        pt.brown_power += p - g;
        green_used += g;
    }
    pt.achieved_utilization = green_avail > 0.0 ? std::min(1.0, green_used / green_avail) : 0.0;
    pt.feasible = pt.achieved_utilization >= target - 1e-9;
    return pt;
}

/// Minimum total facility power allocation that serves the whole workload
/// within every SLA upper bound and reaches green utilization `target`.
/// Infeasibility is reported through `TradeoffPoint::feasible`.
[[nodiscard]] inline TradeoffPoint min_power_at_utilization(const Config& cfg,
                                                            const SlotInput& slot, double target,
                                                            const TradeoffOptions& opts = {}) {
    validate_slot(cfg, slot);
    if (!(target >= 0.0 && target <= 1.0)) {
        throw ValidationError("target", "", "target utilization outside [0, 1]");
    }

    std::vector<bool> connected(cfg.size(), false);
    auto ranking = efficiency_ranking(cfg);
    if (opts.top_k && *opts.top_k < ranking.size()) {
        ranking.resize(*opts.top_k);
    }
    for (std::size_t i : ranking) {
        connected[i] = true;
    }

    TradeoffPoint infeasible;
    infeasible.target_utilization = target;

    std::vector<detail::Site> sites;
    std::vector<std::string> ids;
    double bound_total = 0.0;
    double green_total = 0.0;
    for (std::size_t i : ranking) {
        const auto& dc = cfg.datacenter(i);
        const double e = cfg.efficiency(i).per_server;
        detail::Site s;
        s.dc = i;
        s.bound = static_cast<double>(dc.max_servers) * e;
        s.watts_per_rate = dc.pue * (dc.p_idle / e + (dc.p_peak - dc.p_idle) / dc.mu);
        s.green = slot.green_power[i];
        s.green_rate = s.watts_per_rate > 0.0 ? std::min(s.bound, s.green / s.watts_per_rate)
                                              : s.bound;
        bound_total += s.bound;
        green_total += s.green;
        sites.push_back(s);
        ids.push_back(dc.id);
    }
    if (slot.workload > bound_total + flow::flow_tolerance) {
        return infeasible;
    }

    const detail::TradeoffPath path(sites, std::min(slot.workload, bound_total), ids);
    const double green_goal = target * green_total;

    auto to_point = [&](const detail::KnapsackPoint& kp) {
        std::vector<double> rates(cfg.size(), 0.0);
        for (std::size_t s = 0; s < sites.size(); ++s) {
            rates[sites[s].dc] = kp.rate[s];
        }
        return evaluate_tradeoff(cfg, slot, rates, connected, target);
    };

    std::optional<TradeoffPoint> best;
    auto consider = [&](const TradeoffPoint& pt) {
        if (pt.feasible && (!best || pt.total_power < best->total_power)) {
            best = pt;
        }
        return pt.feasible;
    };

    const double top = std::min(green_goal, path.max_green());
    if (!consider(to_point(path.at(top)))) {
        return infeasible;
    }
    // Rounding server counts up only adds green draw, so a lower fractional
    // target may already meet the goal.
    if (!consider(to_point(path.at(0.0)))) {
        double lo = 0.0;
        double hi = top;
        for (int iter = 0; iter < 60 && hi - lo > 1e-12 * std::max(1.0, hi); ++iter) {
            const double mid = 0.5 * (lo + hi);
            if (consider(to_point(path.at(mid)))) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    return *best;
}

/// Samples `min_power_at_utilization` at g = 0, 1/(K-1), ..., 1.
///
/// Feasible regions shrink as g grows, so any allocation found for a larger
/// target also serves a smaller one; each point keeps the cheaper of its own
/// solution and its successor's, which makes total power non-decreasing in g.
[[nodiscard]] inline std::vector<TradeoffPoint> tradeoff_curve(const Config& cfg,
                                                               const SlotInput& slot,
                                                               std::size_t grid,
                                                               const TradeoffOptions& opts = {}) {
    if (grid < 2) {
        throw ValidationError("grid", "", "tradeoff grid needs at least 2 points");
    }
    std::vector<TradeoffPoint> curve;
    curve.reserve(grid);
    for (std::size_t k = 0; k < grid; ++k) {
        const double g = k + 1 == grid ? 1.0 : static_cast<double>(k) / static_cast<double>(grid - 1);
        curve.push_back(min_power_at_utilization(cfg, slot, g, opts));
    }
    for (std::size_t k = grid - 1; k-- > 0;) {
        const TradeoffPoint& next = curve[k + 1];
        TradeoffPoint& cur = curve[k];
        if (next.feasible && (!cur.feasible || next.total_power < cur.total_power)) {
            const double g = cur.target_utilization;
            cur = next;
            cur.target_utilization = g;
        }
    }
    return curve;
}

} // namespace glb
