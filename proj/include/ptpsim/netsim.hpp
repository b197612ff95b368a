#pragma once

// Deterministic discrete-event simulation of a small PTP network: one
// Ethernet switch in the middle, every node hanging off it on its own
// link. Event order is a total order on (true time, insertion sequence),
// and every random draw comes from a named splitmix64 stream, so a given
// scenario and seed reproduce the same trace byte for byte.

#include <cstdint>
#include <string>
#include <vector>

#include "ptpsim/engine.hpp"
#include "ptpsim/rng.hpp"
#include "ptpsim/trace.hpp"
#include "ptpsim/virtual_clock.hpp"

namespace ptpsim::netsim {

struct NoiseModel {
    enum class Kind { None, Uniform, UniformPos, Gaussian };
    Kind kind = Kind::None;
    double magnitude_ns = 0.0;  // half-width, width, or sigma by kind

    // None: 0. Uniform: [-m, +m]. UniformPos: [0, m]. Gaussian: sigma m.
    // Consumes no draws when kind is None.
    double draw(Rng& rng) const;
};

// One leg between a node and the switch. asymmetry_ns is added to the
// node-to-switch direction only; the reverse leg keeps the base delay.
struct LinkModel {
    std::int64_t base_delay_ns = 100;
    NoiseModel jitter{};
    std::int64_t asymmetry_ns = 0;
    double loss_prob = 0.0;
};

struct SwitchModel {
    std::int64_t forward_delay_ns = 2000;
    NoiseModel queue_jitter{};
    // End-to-end transparent clock: residence time of event messages is
    // accumulated into correctionField on egress.
    bool transparent_clock = false;
};

struct NodeSpec {
    std::string id;
    engine::PortConfig port{};
    clk::ClockConfig clock{};
    NoiseModel timestamp_error{};
    LinkModel link{};
};

struct Scenario {
    std::uint64_t seed = 1;
    std::int64_t duration_ns = 0;
    clk::PpsConfig pps{};
    SwitchModel switch_model{};
    std::vector<NodeSpec> nodes;
};

struct NodeSummary {
    std::string id;
    engine::PortState final_state = engine::PortState::Initializing;
    std::uint64_t tx_count = 0;
    std::uint64_t rx_count = 0;
    std::uint64_t link_drops = 0;
    engine::Diagnostics diag{};
};

struct SimResult {
    trace::Trace trace;
    std::vector<NodeSummary> summaries;       // scenario node order
    std::vector<engine::PortRuntime> final_runtimes;
};

// Runs the scenario to its horizon. Throws ScenarioInvalid for an empty
// or inconsistent scenario and InternalInvariantBreach if event causality
// is ever violated.
SimResult run(const Scenario& scenario);

}  // namespace ptpsim::netsim
