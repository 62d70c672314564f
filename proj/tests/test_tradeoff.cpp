#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "fixtures.hpp"
#include "generators.hpp"
#include "glb/tradeoff.hpp"
#include "oracles.hpp"

using fixture::dc;
using fixture::sla;
using fixture::slot;

namespace {

oracle::TradeoffInstance as_oracle(const glb::Config& cfg, const glb::SlotInput& s) {
    oracle::TradeoffInstance inst;
    inst.dcs = cfg.datacenters();
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        inst.per_server.push_back(cfg.efficiency(i).per_server);
    }
    inst.green = s.green_power;
    inst.workload = s.workload;
    return inst;
}

/// Fill the data centers in ascending order of facility watts per request.
double cheapest_greedy_power(const glb::Config& cfg, double workload) {
    std::vector<std::size_t> order(cfg.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto w = [&](std::size_t i) {
        const auto& d = cfg.datacenter(i);
        const double e = cfg.efficiency(i).per_server;
        return d.pue * (d.p_idle / e + (d.p_peak - d.p_idle) / d.mu);
    };
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return w(a) < w(b); });
    double left = workload;
    double power = 0.0;
    for (std::size_t i : order) {
        const double e = cfg.efficiency(i).per_server;
        const double x = std::min(left, static_cast<double>(cfg.datacenter(i).max_servers) * e);
        power += oracle::facility_watts(cfg.datacenter(i), e, x);
        left -= x;
    }
    return power;
}

glb::Config three_sites() {
    // efficiency per server: 1, 1, 1; per-watt efficiency differs via pue
    return glb::validate_config(
        {dc("a", 2.0, 100, 100, 200, 1.1), dc("b", 2.0, 100, 100, 200, 1.5),
         dc("c", 2.0, 100, 100, 200, 1.3)},
        sla());
}

} // namespace

TEST(Tradeoff, ZeroTargetIsCheapestPower) {
    const auto cfg = three_sites();
    const auto s = slot(150.0, {5000.0, 30000.0, 2000.0}, {0.1, 0.1, 0.1});
    const auto pt = glb::min_power_at_utilization(cfg, s, 0.0);
    ASSERT_TRUE(pt.feasible);
    EXPECT_DOUBLE_EQ(pt.total_power, cheapest_greedy_power(cfg, 150.0));
    // the efficient site a is full before c gets anything
    EXPECT_DOUBLE_EQ(pt.rates[0], 100.0);
    EXPECT_DOUBLE_EQ(pt.rates[2], 50.0);
    EXPECT_EQ(pt.rates[1], 0.0);
}

TEST(Tradeoff, FullUtilizationNeedsPowerAboveGreen) {
    const auto cfg = three_sites();
    // site b peaks at 100 * 1.5 * 150 = 22500 W, below 30000 W of green
    EXPECT_FALSE(glb::min_power_at_utilization(
                     cfg, slot(150.0, {5000.0, 30000.0, 2000.0}, {0.1, 0.1, 0.1}), 1.0)
                     .feasible);
    const auto s = slot(150.0, {5000.0, 20000.0, 2000.0}, {0.1, 0.1, 0.1});
    const auto pt = glb::min_power_at_utilization(cfg, s, 1.0);
    ASSERT_TRUE(pt.feasible);
    EXPECT_GE(pt.achieved_utilization, 1.0 - 1e-9);
    EXPECT_GE(pt.total_power, 27000.0 - 1e-6);
    EXPECT_GT(pt.total_power, glb::min_power_at_utilization(cfg, s, 0.0).total_power);
    EXPECT_NEAR(std::accumulate(pt.rates.begin(), pt.rates.end(), 0.0), 150.0, 1e-9);
}

TEST(Tradeoff, ZeroWorkloadCannotUseGreen) {
    const auto cfg = three_sites();
    const auto s = slot(0.0, {5000.0, 30000.0, 2000.0}, {0.1, 0.1, 0.1});
    EXPECT_FALSE(glb::min_power_at_utilization(cfg, s, 0.5).feasible);
    const auto zero = glb::min_power_at_utilization(cfg, s, 0.0);
    EXPECT_TRUE(zero.feasible);
    EXPECT_EQ(zero.total_power, 0.0);
}

TEST(Tradeoff, OverloadIsInfeasible) {
    const auto cfg = three_sites();
    const auto s = slot(301.0, {5000.0, 30000.0, 2000.0}, {0.1, 0.1, 0.1});
    EXPECT_FALSE(glb::min_power_at_utilization(cfg, s, 0.0).feasible);
}

TEST(Tradeoff, RejectsBadArguments) {
    const auto cfg = three_sites();
    const auto s = slot(10.0, {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1});
    EXPECT_THROW((void)glb::min_power_at_utilization(cfg, s, 1.5), glb::ValidationError);
    EXPECT_THROW((void)glb::min_power_at_utilization(cfg, s, -0.1), glb::ValidationError);
    EXPECT_THROW((void)glb::tradeoff_curve(cfg, s, 1), glb::ValidationError);
}

TEST(TradeoffCurve, TwoPointsAreTheEndpoints) {
    const auto cfg = three_sites();
    const auto s = slot(150.0, {5000.0, 30000.0, 2000.0}, {0.1, 0.1, 0.1});
    const auto curve = glb::tradeoff_curve(cfg, s, 2);
    ASSERT_EQ(curve.size(), 2u);
    EXPECT_EQ(curve[0].target_utilization, 0.0);
    EXPECT_EQ(curve[1].target_utilization, 1.0);
    EXPECT_EQ(curve[1], glb::min_power_at_utilization(cfg, s, 1.0));
}

TEST(TradeoffCurve, SingleSiteIsFlat) {
    const auto cfg = glb::validate_config({dc("solo", 2.0, 100)}, sla());
    const auto s = slot(60.0, {12000.0}, {0.1});
    const auto curve = glb::tradeoff_curve(cfg, s, 5);
    // 60 servers at full deadline load: 60 * (100 + 100 / 2) = 9000 W < 12000 W
    for (const auto& pt : curve) {
        if (pt.feasible) {
            EXPECT_DOUBLE_EQ(pt.total_power, 9000.0);
        }
    }
    EXPECT_TRUE(curve.front().feasible);
    EXPECT_FALSE(curve.back().feasible);
}

TEST(TradeoffCurve, MonotoneAndTargetsMet) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const auto inst = gen::fleet_instance(rng, 2 + trial % 5);
        const auto curve = glb::tradeoff_curve(inst.config, inst.slot, 11);
        ASSERT_EQ(curve.size(), 11u);
        for (std::size_t k = 0; k < curve.size(); ++k) {
            const auto& pt = curve[k];
            EXPECT_NEAR(pt.target_utilization, static_cast<double>(k) / 10.0, 1e-12);
            if (!pt.feasible) {
                // once infeasible, every larger target is too
                for (std::size_t j = k; j < curve.size(); ++j) {
                    EXPECT_FALSE(curve[j].feasible);
                }
                break;
            }
            EXPECT_GE(pt.achieved_utilization, pt.target_utilization - 1e-9);
            EXPECT_NEAR(std::accumulate(pt.rates.begin(), pt.rates.end(), 0.0), inst.slot.workload,
                        1e-9 * inst.slot.workload);
            if (k > 0) {
                EXPECT_GE(pt.total_power, curve[k - 1].total_power * (1 - 1e-12));
            }
            EXPECT_LE(pt.brown_power, pt.total_power);
        }
        EXPECT_TRUE(curve.front().feasible);
    }
}

TEST(Tradeoff, RatesRespectUpperBounds) {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 60; ++trial) {
        const auto inst = gen::fleet_instance(rng, 4);
        const double g = gen::uniform(rng, 0.0, 1.0);
        const auto pt = glb::min_power_at_utilization(inst.config, inst.slot, g);
        if (!pt.feasible) {
            continue;
        }
        const auto ub = glb::fleet_upper_bounds(inst.config);
        for (std::size_t i = 0; i < ub.size(); ++i) {
            EXPECT_GE(pt.rates[i], 0.0);
            EXPECT_LE(pt.rates[i], ub[i] * (1 + 1e-12));
        }
        EXPECT_TRUE(glb::flow::feasible(pt.rates, ub, inst.slot.workload));
    }
}

TEST(Tradeoff, WithinOnePercentOfGridSearch) {
    std::mt19937_64 rng(41);
    int compared = 0;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 2);
        const auto inst = gen::fleet_instance(rng, n);
        const auto oi = as_oracle(inst.config, inst.slot);
        for (double g : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
            const auto best = oracle::tradeoff_grid_min(oi, g, n == 2 ? 400 : 100);
            const auto ours = glb::min_power_at_utilization(inst.config, inst.slot, g);
            if (!best) {
                continue;
            }
            ASSERT_TRUE(ours.feasible) << "trial " << trial << " g " << g;
            EXPECT_LE(ours.total_power, best->power * 1.01) << "trial " << trial << " g " << g;
            ++compared;
        }
    }
    EXPECT_GT(compared, 60);
}

TEST(Tradeoff, DenseTargetsWithinOnePercentOfGridSearch) {
    // Many targets per instance exercise every segment of the multiplier path;
    // this seed includes instances whose path breakpoints are not exact in
    // floating point.
    std::mt19937_64 rng(346);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = gen::fleet_instance(rng, 3);
        const auto oi = as_oracle(inst.config, inst.slot);
        for (int k = 0; k <= 20; ++k) {
            const double g = k / 20.0;
            const auto best = oracle::tradeoff_grid_min(oi, g, 100);
            if (!best) {
                continue;
            }
            const auto ours = glb::min_power_at_utilization(inst.config, inst.slot, g);
            ASSERT_TRUE(ours.feasible) << "trial " << trial << " g " << g;
            EXPECT_LE(ours.total_power, best->power * 1.01) << "trial " << trial << " g " << g;
        }
    }
}

TEST(Tradeoff, TopKConnectsMostEfficient) {
    const auto cfg = three_sites();
    const auto ranking = glb::efficiency_ranking(cfg);
    EXPECT_EQ(ranking, (std::vector<std::size_t>{0, 2, 1}));
    const auto s = slot(80.0, {5000.0, 30000.0, 2000.0}, {0.1, 0.1, 0.1});
    glb::TradeoffOptions opts;
    opts.top_k = 2;
    const auto pt = glb::min_power_at_utilization(cfg, s, 0.5, opts);
    EXPECT_EQ(pt.rates.size(), 3u);
    if (pt.feasible) {
        EXPECT_EQ(pt.rates[1], 0.0);
    }
    const auto curve = glb::tradeoff_curve(cfg, s, 3, opts);
    for (const auto& p : curve) {
        if (p.feasible) {
            EXPECT_EQ(p.rates[1], 0.0);
        }
    }
    opts.top_k = 1;
    // 100 req/s fits only at a
    EXPECT_FALSE(glb::min_power_at_utilization(cfg, slot(120.0, {0.0, 0.0, 0.0}, {0.1, 0.1, 0.1}), 0.0, opts).feasible);
}

TEST(Tradeoff, Deterministic) {
    std::mt19937_64 rng(43);
    const auto inst = gen::fleet_instance(rng, 5);
    EXPECT_EQ(glb::tradeoff_curve(inst.config, inst.slot, 21), glb::tradeoff_curve(inst.config, inst.slot, 21));
}
