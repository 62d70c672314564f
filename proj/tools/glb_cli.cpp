// Command line front end: simulate, tradeoff, feasible, gen-traces.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "glb/glb.hpp"

namespace {

glb::OutputFormat parse_format(const std::string& s) {
    return s == "json" ? glb::OutputFormat::json : glb::OutputFormat::csv;
}

std::vector<std::string> dc_ids(const glb::Config& cfg) {
    std::vector<std::string> ids;
    for (const auto& dc : cfg.datacenters()) {
        ids.push_back(dc.id);
    }
    return ids;
}

glb::SlotInput pick_slot(const glb::ConfigFile& cf, std::size_t index) {
    const auto slots = glb::load_traces(cf).slot_inputs();
    if (index >= slots.size()) {
        throw glb::ValidationError("slot", "", "slot " + std::to_string(index) +
                                                   " out of range (trace has " +
                                                   std::to_string(slots.size()) + " slots)");
    }
    return slots[index];
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string cell;
    while (std::getline(in, cell, ',')) {
        double v = 0.0;
        if (!glb::csv::parse_number(cell, v)) {
            throw glb::ValidationError("aw", "", "cannot parse '" + cell + "' in --aw");
        }
        out.push_back(v);
    }
    return out;
}

/// Sample configuration written next to generated traces: identical data
/// centers, so trace differences alone drive the allocation.
nlohmann::ordered_json sample_config(std::size_t dcs) {
    nlohmann::ordered_json cfg;
    cfg["sla"] = {{"deadline_s", 0.5}, {"slot_s", 3600.0}, {"queue_bound", 1.0e6}};
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < dcs; ++i) {
        arr.push_back({{"id", "dc" + std::to_string(i + 1)},
                       {"mu", 10.0},
                       {"max_servers", 10000},
                       {"p_idle_w", 100.0},
                       {"p_peak_w", 200.0},
                       {"pue", 1.2},
                       {"d_net_s", 0.02},
                       {"green_trace", "green.csv"},
                       {"price_trace", "price.csv"}});
    }
    cfg["datacenter"] = arr;
    cfg["workload_trace"] = "workload.csv";
    cfg["scale"] = 1.0;
    cfg["carbon_intensity_g_per_wh"] = glb::default_carbon_intensity;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geographical load balancing: green/brown allocation and power tradeoffs"};
    app.require_subcommand(1);

    std::string config;
    std::string out;
    std::string format = "csv";
    std::string mode = "ub";
    std::size_t slot = 0;
    std::size_t grid = 21;
    std::size_t top_k = 0;
    std::string aw;
    std::uint64_t seed = 0;
    std::size_t slots = 24;
    std::size_t dcs = 3;
    std::string out_dir;
    glb::TraceProfile profile;

    auto* sim = app.add_subcommand("simulate", "Allocate every slot of the configured traces");
    sim->add_option("--config", config, "Configuration file (.json or .toml)")->required();
    sim->add_option("--mode", mode, "Admission rule")->check(CLI::IsMember({"ub", "queue"}));
    sim->add_option("--out", out, "Result file")->required();
    sim->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    auto* trade = app.add_subcommand("tradeoff", "Total power versus green utilization for one slot");
    trade->add_option("--config", config, "Configuration file")->required();
    trade->add_option("--slot", slot, "Slot index")->required();
    trade->add_option("--grid", grid, "Number of utilization targets")->check(CLI::Range(2, 100000));
    auto* topk = trade->add_option("--top-k", top_k, "Connect only the k most efficient data centers");
    trade->add_option("--out", out, "Result file")->required();
    trade->add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

    auto* feas = app.add_subcommand("feasible", "Min-cut feasibility of a workload split");
    feas->add_option("--config", config, "Configuration file")->required();
    feas->add_option("--slot", slot, "Slot index")->required();
    feas->add_option("--aw", aw, "Allocated workload per data center, comma separated")->required();

    auto* gen = app.add_subcommand("gen-traces", "Write synthetic traces and a sample configuration");
    gen->add_option("--seed", seed, "Random seed")->required();
    gen->add_option("--slots", slots, "Number of slots")->required()->check(CLI::PositiveNumber);
    gen->add_option("--dcs", dcs, "Number of data centers")->required()->check(CLI::PositiveNumber);
    gen->add_option("--out-dir", out_dir, "Output directory")->required();
    gen->add_option("--workload-profile", profile.workload, "diurnal | flat");
    gen->add_option("--green-profile", profile.green, "wind | none");
    gen->add_option("--price-profile", profile.price, "market | flat");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            const auto cf = glb::load_config(config);
            const auto slots_in = glb::load_traces(cf).slot_inputs();
            const auto qos = mode == "queue" ? glb::QosMode::queue_length : glb::QosMode::upper_bound;
            const auto results = glb::simulate(cf.config, slots_in, qos);
            glb::emit_results(results, dc_ids(cf.config), parse_format(format), out);
        } else if (*trade) {
            const auto cf = glb::load_config(config);
            const auto input = pick_slot(cf, slot);
            glb::TradeoffOptions opts;
            if (*topk) {
                opts.top_k = top_k;
            }
            const auto curve = glb::tradeoff_curve(cf.config, input, grid, opts);
            glb::emit_results(curve, parse_format(format), out);
        } else if (*feas) {
            const auto cf = glb::load_config(config);
            const auto input = pick_slot(cf, slot);
            const auto rates = parse_list(aw);
            if (rates.size() != cf.config.size()) {
                throw glb::ValidationError("aw", "", "--aw needs one value per data center");
            }
            const auto ub = glb::fleet_upper_bounds(cf.config);
            const double flow = glb::flow::max_flow(glb::flow::build_graph(rates, ub));
            const bool ok = glb::flow::feasible(rates, ub, input.workload);
            std::cout << "feasible=" << (ok ? "true" : "false")
                      << " max_flow=" << glb::format_number(flow)
                      << " demand=" << glb::format_number(input.workload) << '\n';
        } else if (*gen) {
            const auto ts = glb::gen_traces(seed, slots, dcs, profile);
            std::vector<std::string> ids;
            for (std::size_t i = 0; i < dcs; ++i) {
                ids.push_back("dc" + std::to_string(i + 1));
            }
            glb::write_traces(ts, ids, out_dir);
            glb::write_file_atomic(std::filesystem::path(out_dir) / "config.json",
                                   sample_config(dcs).dump(2) + "\n");
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
