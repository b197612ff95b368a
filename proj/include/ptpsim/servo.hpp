#pragma once

// Offset/delay computation for the delay request-response mechanism and
// the PI clock servo that consumes it.

#include <cstdint>
#include <variant>

#include "ptpsim/wire.hpp"

namespace ptpsim::servo {

// One completed exchange: t1 master Sync departure (from Follow_Up),
// t2 slave Sync arrival, t3 slave Delay_Req departure, t4 master
// Delay_Req arrival (from Delay_Resp). Corrections carry accumulated
// residence times for the forward (Sync) and reverse (Delay_Req) paths.
struct ExchangeTimestamps {
    wire::Timestamp t1{};
    wire::Timestamp t2{};
    wire::Timestamp t3{};
    wire::Timestamp t4{};
    wire::TimeInterval sync_correction{};
    wire::TimeInterval delay_correction{};
};

struct OffsetDelay {
    std::int64_t offset_from_master_ns = 0;
    std::int64_t mean_path_delay_ns = 0;
};

// offset = (t2 - t1 - syncCorrection) - meanPathDelay
// meanPathDelay = ((t2 - t1 - syncCorrection) + (t4 - t3 - delayCorrection)) / 2
// Integer division rounds toward zero. Throws ArithmeticOverflow when a
// difference leaves the signed 64-bit range.
OffsetDelay compute_offset_and_delay(const ExchangeTimestamps& x);

struct ServoConfig {
    double kp = 0.7;                           // ppb per ns of offset
    double ki = 0.3;                           // ppb per ns*s of integral
    std::int64_t step_threshold_ns = 1'000'000;
    double delay_filter_alpha = 0.125;
    double slew_cap_ppb = 500'000.0;           // matches the clock's cap
    double integral_clamp_ns_s = 0.0;          // 0 = derived: slew_cap / ki
};

struct ServoState {
    double integral_ns_s = 0.0;
    std::int64_t last_offset_ns = 0;
    double mean_path_delay_ns = 0.0;
    bool delay_seeded = false;
};

struct StepPhase {
    std::int64_t delta_ns;
    friend bool operator==(const StepPhase&, const StepPhase&) = default;
};
struct SlewRate {
    double rate_ppb;
    friend bool operator==(const SlewRate&, const SlewRate&) = default;
};
using ServoAction = std::variant<StepPhase, SlewRate>;

// One update per measured offset. Offsets beyond the step threshold
// produce a phase step of -offset and reset the integral; otherwise the
// integral accumulates offset*interval under an anti-windup clamp and
// the returned slew is -(kp*offset + ki*integral), clamped to the cap.
ServoAction servo_update(ServoState& state, const ServoConfig& cfg,
                         std::int64_t offset_ns, double interval_s);

// Exponential smoothing of the one-way delay. The first sample seeds the
// filter. Negative raw delays (measurement noise exceeding the true
// delay) are clipped to zero before filtering; callers report the raw
// value in traces.
void filter_delay(ServoState& state, const ServoConfig& cfg, std::int64_t raw_delay_ns);

}  // namespace ptpsim::servo
