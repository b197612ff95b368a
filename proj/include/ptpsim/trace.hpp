#pragma once

// Trace records emitted during a simulation run. All times are integer
// true-simulation nanoseconds; the record stream is ordered by time with
// emission order breaking ties, so identical runs produce identical
// streams.

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace ptpsim::trace {

struct OffsetSample {
    std::int64_t offset_ns = 0;  // measured offset fed to the servo
    std::int64_t delay_ns = 0;   // latest raw mean path delay (unclipped)

    friend bool operator==(const OffsetSample&, const OffsetSample&) = default;
};

struct PpsRising {
    friend bool operator==(const PpsRising&, const PpsRising&) = default;
};

struct StateChange {
    std::string from;
    std::string to;

    friend bool operator==(const StateChange&, const StateChange&) = default;
};

struct Drop {
    std::string reason;

    friend bool operator==(const Drop&, const Drop&) = default;
};

using TraceKind = std::variant<OffsetSample, PpsRising, StateChange, Drop>;

struct TraceRecord {
    std::int64_t true_time_ns = 0;
    std::string node;
    TraceKind kind{};

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using Trace = std::vector<TraceRecord>;

}  // namespace ptpsim::trace
