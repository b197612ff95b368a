#pragma once

// Per-node virtual clock: a piecewise-linear map from true simulation
// time to local time. Local time is carried as an exact integer count of
// femto-nanoseconds at the current anchor plus an integer rate in local
// femto-ns per true ns, so arbitrarily many rate adjustments accumulate
// without floating-point drift. Readings are quantized down to the
// counter granularity and never move backwards, mirroring a hardware
// counter that is slewed or stepped underneath a monotonic reader.

#include <cstdint>

namespace ptpsim::clk {

struct ClockConfig {
    std::int64_t base_offset_ns = 0;       // local - true at construction
    double frequency_offset_ppm = 0.0;     // intrinsic drift
    std::int64_t granularity_ns = 20;      // counter tick, > 0
    double max_frequency_offset_ppm = 500.0;
    double slew_cap_ppb = 500'000.0;       // bound on |adjust_rate|
};

class VirtualClock {
public:
    // Anchored at true time 0. Throws InvariantViolation when the config
    // is out of range (granularity < 1, |frequency| > maximum).
    explicit VirtualClock(const ClockConfig& cfg);

    // Quantized, monotone local reading at true_ns. Throws TimeReversal
    // when true_ns precedes the current anchor. Does not move the anchor.
    std::int64_t read(std::int64_t true_ns);

    // Unquantized local time at true_ns >= anchor.
    std::int64_t local_exact_ns(std::int64_t true_ns) const;

    // Moves the anchor forward to true_ns, preserving the exact mapping.
    // Rate changes and steps take effect from the anchor, so callers
    // advance it to "now" before mutating.
    void advance_anchor(std::int64_t true_ns);

    // Immediate phase jump. Negative steps leave readings clamped until
    // the exact map catches back up with the last returned value.
    void step_phase(std::int64_t delta_ns);

    // Replaces the servo rate component. Throws SlewCapExceeded when
    // |rate_ppb| exceeds the configured cap.
    void adjust_rate(double rate_ppb);

    // True time at which exact local time first reaches local_ns, under
    // the current segment of the map. Throws Unreachable if the map has
    // non-positive slope.
    std::int64_t true_time_of_local(std::int64_t local_ns) const;

    std::int64_t anchor_true_ns() const { return anchor_true_ns_; }
    std::int64_t granularity_ns() const { return granularity_ns_; }
    double applied_rate_ppb() const { return applied_rate_ppb_; }
    double slew_cap_ppb() const { return slew_cap_ppb_; }

private:
    __int128 local_femto_at_anchor_;   // local time * 1e15 at the anchor
    std::int64_t anchor_true_ns_ = 0;
    std::int64_t rate_femto_per_ns_;   // 1e15 == nominal rate
    std::int64_t freq_ppq_;            // intrinsic part, femto per ns
    std::int64_t servo_ppq_ = 0;       // servo part, femto per ns
    std::int64_t granularity_ns_;
    std::int64_t last_reading_ns_;
    double applied_rate_ppb_ = 0.0;
    double slew_cap_ppb_;

    __int128 exact_femto_at(std::int64_t true_ns) const;
};

struct PpsConfig {
    std::int64_t pulse_width_ns = 10'000'000;
};

struct PpsEdge {
    std::int64_t rising_local_ns;
    std::int64_t falling_local_ns;
};

// Next rising edge strictly after after_local_ns: the smallest multiple
// of 1e9 local ns greater than after_local_ns. Works for negative local
// times (clocks that power up behind true time).
PpsEdge next_pps_edge(const PpsConfig& cfg, std::int64_t after_local_ns);

}  // namespace ptpsim::clk
