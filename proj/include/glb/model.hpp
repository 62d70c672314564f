#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "glb/errors.hpp"
#include "glb/queueing.hpp"
#include "glb/types.hpp"

namespace glb {

/// Carbon intensity of grid (brown) energy when none is configured, g CO2/Wh.
inline constexpr double default_carbon_intensity = 0.4;

/// A validated, immutable configuration. Only `validate_config` creates one.
class Config {
public:
    [[nodiscard]] const std::vector<DataCenterSpec>& datacenters() const noexcept { return dcs_; }
    [[nodiscard]] const DataCenterSpec& datacenter(std::size_t i) const { return dcs_.at(i); }
    [[nodiscard]] const SlaSpec& sla() const noexcept { return sla_; }
    [[nodiscard]] const std::vector<Efficiency>& efficiency() const noexcept { return eff_; }
    [[nodiscard]] const Efficiency& efficiency(std::size_t i) const { return eff_.at(i); }
    [[nodiscard]] double carbon_intensity() const noexcept { return carbon_intensity_; }
    [[nodiscard]] std::size_t size() const noexcept { return dcs_.size(); }

    [[nodiscard]] bool usable(std::size_t i) const { return eff_.at(i).usable; }

    [[nodiscard]] std::size_t usable_count() const noexcept {
        std::size_t n = 0;
        for (const auto& e : eff_) {
            n += e.usable ? 1 : 0;
        }
        return n;
    }

    bool operator==(const Config&) const = default;

private:
    friend Config validate_config(std::vector<DataCenterSpec>, SlaSpec, double);

    std::vector<DataCenterSpec> dcs_;
    SlaSpec sla_;
    std::vector<Efficiency> eff_;
    double carbon_intensity_ = default_carbon_intensity;
};

namespace detail {

inline void require(bool ok, const char* field, const std::string& dc_id, const char* what) {
    if (!ok) {
        throw ValidationError(field, dc_id, what);
    }
}

inline void validate_dc(const DataCenterSpec& dc) {
    const std::string& id = dc.id;
    require(!id.empty(), "id", id, "empty data center id");
    require(std::isfinite(dc.mu), "mu", id, "mu not finite");
    require(dc.mu > 0.0, "mu", id, "mu not positive");
    require(std::isfinite(dc.p_idle), "p_idle", id, "p_idle not finite");
    require(dc.p_idle >= 0.0, "p_idle", id, "p_idle negative");
    require(std::isfinite(dc.p_peak), "p_peak", id, "p_peak not finite");
    require(dc.p_peak > 0.0, "p_peak", id, "p_peak not positive");
    require(dc.p_peak >= dc.p_idle, "p_peak", id, "p_peak below p_idle");
    require(std::isfinite(dc.pue), "pue", id, "pue not finite");
    require(dc.pue >= 1.0, "pue", id, "pue below 1.0");
    require(std::isfinite(dc.d_net), "d_net", id, "d_net not finite");
    require(dc.d_net >= 0.0, "d_net", id, "d_net negative");
}

inline void validate_sla(const SlaSpec& sla) {
    require(std::isfinite(sla.deadline) && sla.deadline > 0.0, "deadline", "",
            "deadline not positive");
    require(std::isfinite(sla.slot_seconds) && sla.slot_seconds > 0.0, "slot_seconds", "",
            "slot_seconds not positive");
    if (sla.queue_bound) {
        require(std::isfinite(*sla.queue_bound) && *sla.queue_bound > 0.0, "queue_bound", "",
                "queue_bound not positive");
    }
}

} // namespace detail

/// Checks every invariant of the data center and SLA parameters and records
/// which data centers can meet the deadline at all.
///
/// Throws ValidationError naming the first offending field and data center.
[[nodiscard]] inline Config validate_config(std::vector<DataCenterSpec> specs, SlaSpec sla,
                                            double carbon_intensity = default_carbon_intensity) {
    detail::require(!specs.empty(), "datacenter", "", "no data centers configured");
    detail::validate_sla(sla);
    detail::require(std::isfinite(carbon_intensity) && carbon_intensity >= 0.0,
                    "carbon_intensity", "", "carbon_intensity negative");

    std::set<std::string> seen;
    for (const auto& dc : specs) {
        detail::validate_dc(dc);
        detail::require(seen.insert(dc.id).second, "id", dc.id, "duplicate data center id");
    }

    Config cfg;
    cfg.eff_.reserve(specs.size());
    for (const auto& dc : specs) {
        cfg.eff_.push_back(queueing::service_efficiency(dc, sla));
    }
    cfg.dcs_ = std::move(specs);
    cfg.sla_ = std::move(sla);
    cfg.carbon_intensity_ = carbon_intensity;
    return cfg;
}

/// Rejects a slot whose vectors do not match the configuration or whose
/// entries are negative or non-finite.
inline void validate_slot(const Config& cfg, const SlotInput& slot) {
    if (slot.green_power.size() != cfg.size()) {
        throw SlotError(slot.slot, "green_power has " + std::to_string(slot.green_power.size()) +
                                       " entries, expected " + std::to_string(cfg.size()));
    }
    if (slot.price.size() != cfg.size()) {
        throw SlotError(slot.slot, "price has " + std::to_string(slot.price.size()) +
                                       " entries, expected " + std::to_string(cfg.size()));
    }
    auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!ok(slot.workload)) {
        throw SlotError(slot.slot, "workload negative or not finite");
    }
    for (std::size_t i = 0; i < cfg.size(); ++i) {
        if (!ok(slot.green_power[i])) {
            throw SlotError(slot.slot, "green_power of '" + cfg.datacenter(i).id +
                                           "' negative or not finite");
        }
        if (!ok(slot.price[i])) {
            throw SlotError(slot.slot,
                            "price of '" + cfg.datacenter(i).id + "' negative or not finite");
        }
    }
}

} // namespace glb
