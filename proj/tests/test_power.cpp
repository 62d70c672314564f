#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "glb/power.hpp"
#include "glb/queueing.hpp"

namespace p = glb::power;
using fixture::dc;
using fixture::sla;

TEST(ServersNeeded, Examples) {
    const auto d = dc("a", 2.0);  // e = 1 with deadline 1.5, d_net 0.5
    EXPECT_EQ(p::servers_needed(d, sla(), 0.0), 0u);
    EXPECT_EQ(p::servers_needed(d, sla(), 7.2), 8u);
    EXPECT_EQ(p::servers_needed(d, sla(), 7.0), 7u);
}

TEST(ServersNeeded, UnusableWithLoad) {
    EXPECT_THROW((void)p::servers_needed(dc("a"), sla(1.0), 1.0), glb::CapacityError);
    EXPECT_EQ(p::servers_needed(dc("a"), sla(1.0), 0.0), 0u);
}

TEST(ServersNeeded, CoversUpperBound) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        auto d = dc("a", 0.5 + 20.0 * u(rng));
        d.d_net = 0.2 * u(rng);
        const auto s = sla(d.d_net + (1.5 + 5.0 * u(rng)) / d.mu);
        const std::size_t m = static_cast<std::size_t>(500 * u(rng));
        const double ub = glb::queueing::upper_bound(d, s, m);
        const double e = glb::queueing::service_efficiency(d, s).per_server;
        const std::size_t need = p::servers_needed(d, s, ub);
        EXPECT_GE(static_cast<double>(need) * e, ub * (1.0 - 1e-12));
        EXPECT_LE(need, m);
        const double partial = ub * u(rng);
        EXPECT_LE(p::servers_needed(d, s, partial), m);
    }
}

TEST(ItPower, Examples) {
    const auto d = dc("a", 2.0, 10, 100.0, 200.0);
    EXPECT_DOUBLE_EQ(p::it_power(d, 10, 0.0), 1000.0);
    EXPECT_DOUBLE_EQ(p::it_power(d, 10, 20.0), 2000.0);
    EXPECT_DOUBLE_EQ(p::it_power(d, 10, 10.0), 1500.0);
    // per-server linear model at u = 0.5
    EXPECT_DOUBLE_EQ(p::it_power(d, 10, 10.0), 10 * (100.0 + (200.0 - 100.0) * 0.5));
    EXPECT_THROW((void)p::it_power(d, 10, 20.5), glb::OverloadError);
}

TEST(FacilityPower, Examples) {
    auto d = dc("a", 2.0, 10, 100.0, 200.0, 1.0);
    EXPECT_DOUBLE_EQ(p::facility_power(d, 10, 10.0), p::it_power(d, 10, 10.0));
    d.pue = 1.5;
    EXPECT_DOUBLE_EQ(p::facility_power(d, 10, 20.0), 3000.0);
    d.pue = 1.2;
    EXPECT_DOUBLE_EQ(p::facility_power(d, 10, 10.0), 1800.0);
}

TEST(FacilityPower, StrictlyIncreasing) {
    const auto d = dc("a", 3.0, 100, 80.0, 250.0, 1.3);
    for (std::size_t m = 1; m < 20; ++m) {
        for (double l = 0.0; l + 0.5 <= static_cast<double>(m) * d.mu; l += 0.5) {
            EXPECT_LT(p::facility_power(d, m, l), p::facility_power(d, m, l + 0.5));
            EXPECT_LT(p::facility_power(d, m, l), p::facility_power(d, m + 1, l));
        }
    }
}

TEST(GreenServerCapacity, Examples) {
    auto d = dc("a", 2.0, 50, 100.0, 200.0, 1.5);
    EXPECT_EQ(p::green_server_capacity(d, 0.0), 0u);
    EXPECT_EQ(p::green_server_capacity(d, 3000.0), 10u);
    EXPECT_EQ(p::green_server_capacity(d, 1e9), 50u);
}

TEST(GreenServerCapacity, DrawNeverExceedsGreen) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        auto d = dc("a", 0.5 + 10.0 * u(rng), static_cast<std::size_t>(1000 * u(rng)));
        d.p_peak = 50.0 + 400.0 * u(rng);
        d.p_idle = d.p_peak * u(rng);
        d.pue = 1.0 + u(rng);
        const double green = 2e5 * u(rng);
        const std::size_t m = p::green_server_capacity(d, green);
        if (m == 0) {
            continue;
        }
        const double load = static_cast<double>(m) * d.mu * u(rng);
        EXPECT_LE(p::facility_power(d, m, load), green * (1.0 + 1e-12));
    }
}

TEST(SlotCost, Examples) {
    EXPECT_EQ(p::slot_cost(0.05, 0.0, sla()), 0.0);
    EXPECT_NEAR(p::slot_cost(0.05, 2000.0, sla()), 0.1, 1e-15);
    EXPECT_NEAR(p::slot_cost(0.10, 1500.0, sla(1.5, 1800.0)), 0.075, 1e-15);
    // dimensional check: 1.5 kW for 0.5 h is 0.75 kWh
    EXPECT_NEAR(0.10 * 1.5 * 0.5, p::slot_cost(0.10, 1500.0, sla(1.5, 1800.0)), 1e-15);
}

TEST(SlotCost, Linear) {
    const auto s = sla(1.0, 900.0);
    EXPECT_NEAR(p::slot_cost(0.2, 3000.0, s), 2.0 * p::slot_cost(0.1, 3000.0, s), 1e-15);
    EXPECT_NEAR(p::slot_cost(0.1, 6000.0, s), 2.0 * p::slot_cost(0.1, 3000.0, s), 1e-15);
    EXPECT_NEAR(p::slot_cost(0.1, 3000.0, sla(1.0, 1800.0)), 2.0 * p::slot_cost(0.1, 3000.0, s),
                1e-15);
}

TEST(Cue, Examples) {
    EXPECT_EQ(p::cue(p::co2_grams(0.4, 0.0), 1000.0), 0.0);
    EXPECT_DOUBLE_EQ(p::cue(p::co2_grams(0.5, 2000.0), 2000.0), 0.5);
    EXPECT_THROW((void)p::cue(1.0, 0.0), glb::UndefinedMetricError);
}

TEST(Pue, RecoversConfiguredValue) {
    const auto d = dc("a", 2.0, 10, 100.0, 200.0, 1.35);
    const double it = p::it_power(d, 7, 5.0);
    EXPECT_DOUBLE_EQ(p::pue(p::facility_power(d, 7, 5.0), it), 1.35);
    EXPECT_THROW((void)p::pue(1.0, 0.0), glb::UndefinedMetricError);
}

TEST(CeilCount, ForgivesRoundOff) {
    EXPECT_EQ(p::ceil_count(7.000000000001), 7u);
    EXPECT_EQ(p::ceil_count(7.2), 8u);
    EXPECT_EQ(p::ceil_count(0.0), 0u);
    EXPECT_EQ(p::ceil_count(-1.0), 0u);
    EXPECT_EQ(p::ceil_count(1e-12), 1u);
}
