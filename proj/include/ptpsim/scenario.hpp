#pragma once

// Text scenario loader. The format is line-oriented: a `ptpsim_scenario 1`
// directive, `key value` pairs, and [servo] / [switch] / [node <id>] /
// [criteria] sections. docs/scenario-format.md describes every key; the
// loader rejects anything it does not know about, with line numbers.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptpsim/netsim.hpp"

namespace ptpsim::scenario {

struct Criteria {
    bool require_convergence = false;
    std::int64_t convergence_bound_ns = 1000;
    int convergence_window = 10;
    std::int64_t max_p95_skew_ns = 0;    // 0 disables the check
    std::int64_t max_p95_offset_ns = 0;  // 0 disables the check
    double steady_after_s = 0.0;         // measurement window start
};

// A `--param path=value` style override, applied on top of the file
// before validation. Paths: `seed`, `servo.kp`, `switch.transparent_clock`,
// `criteria.max_p95_skew_ns`, `node.<id>.<key>`.
struct Override {
    std::string path;
    std::string value;
};

struct LoadedScenario {
    netsim::Scenario sim;
    Criteria criteria;
    std::string name;
    std::string source_text;
    std::uint64_t digest = 0;  // FNV-1a over source_text
    // Every effective key in a fixed order; values not present in the
    // file are marked "(default)", overridden ones "(override)".
    std::vector<std::string> provenance;
};

// Both throw ScenarioInvalid with "<name>:<line>: <reason>" on any
// malformed or unknown input.
LoadedScenario parse_scenario(std::string_view text, std::string_view name,
                              std::span<const Override> overrides = {});
LoadedScenario load_scenario_file(const std::string& path,
                                  std::span<const Override> overrides = {});

}  // namespace ptpsim::scenario
