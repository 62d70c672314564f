#pragma once

#include <string>
#include <vector>

#include "glb/model.hpp"

namespace fixture {

inline glb::DataCenterSpec dc(std::string id, double mu = 2.0, std::size_t servers = 100,
                              double p_idle = 100.0, double p_peak = 200.0, double pue = 1.0,
                              double d_net = 0.5) {
    glb::DataCenterSpec d;
    d.id = std::move(id);
    d.mu = mu;
    d.max_servers = servers;
    d.p_idle = p_idle;
    d.p_peak = p_peak;
    d.pue = pue;
    d.d_net = d_net;
    return d;
}

inline glb::SlaSpec sla(double deadline = 1.5, double slot_seconds = 3600.0) {
    glb::SlaSpec s;
    s.deadline = deadline;
    s.slot_seconds = slot_seconds;
    return s;
}

inline glb::SlotInput slot(double workload, std::vector<double> green, std::vector<double> price,
                           std::size_t index = 0) {
    glb::SlotInput s;
    s.slot = index;
    s.workload = workload;
    s.green_power = std::move(green);
    s.price = std::move(price);
    return s;
}

} // namespace fixture
