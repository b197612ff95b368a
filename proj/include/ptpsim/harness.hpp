#pragma once

// Trace post-processing: convergence detection, steady-state offset
// statistics, and slave-to-slave PPS skew as a bench oscilloscope would
// measure it (pairing nearest pulses from two channels).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ptpsim/trace.hpp"

namespace ptpsim::harness {

// True time of the first offset sample opening a run of `window`
// consecutive samples with |offset| <= bound_ns. Empty when the node
// never holds the bound that long.
std::optional<std::int64_t> detect_convergence(const trace::Trace& trace,
                                               std::string_view node,
                                               std::int64_t bound_ns, int window);

struct OffsetStats {
    std::size_t count = 0;
    std::int64_t max_abs_ns = 0;
    std::int64_t p95_abs_ns = 0;  // nearest-rank percentile
};

// Statistics over |offset| samples at true time >= after_true_ns.
std::optional<OffsetStats> offset_stats(const trace::Trace& trace, std::string_view node,
                                        std::int64_t after_true_ns);

struct SkewReport {
    std::string node_a;
    std::string node_b;
    std::int64_t after_true_ns = 0;
    std::int64_t max_abs_skew_ns = 0;
    std::int64_t p95_abs_skew_ns = 0;
    std::size_t edge_count = 0;  // number of paired pulses
};

// Pairs each rising PPS edge of one node with the nearest edge of the
// other (within half a pulse period, both directions, duplicates
// removed) and reports |delta| statistics. Empty when no pair exists
// past after_true_ns.
std::optional<SkewReport> pps_skew(const trace::Trace& trace, std::string_view node_a,
                                   std::string_view node_b, std::int64_t after_true_ns);

}  // namespace ptpsim::harness
