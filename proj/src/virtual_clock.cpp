#include "ptpsim/virtual_clock.hpp"

#include <cmath>
#include <limits>

#include "ptpsim/errors.hpp"

namespace ptpsim::clk {

namespace {

using i128 = __int128;

constexpr i128 FEMTO = 1'000'000'000'000'000ll;  // 1e15

// Floor division toward negative infinity.
i128 floor_div(i128 num, i128 den) {
    i128 q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return q;
}

i128 ceil_div(i128 num, i128 den) {
    i128 q = num / den;
    if ((num % den != 0) && ((num < 0) == (den < 0))) ++q;
    return q;
}

std::int64_t narrow(i128 v, const char* what) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min())
        throw ArithmeticOverflow(what);
    return static_cast<std::int64_t>(v);
}

}  // namespace

VirtualClock::VirtualClock(const ClockConfig& cfg)
    : local_femto_at_anchor_(static_cast<i128>(cfg.base_offset_ns) * FEMTO),
      granularity_ns_(cfg.granularity_ns),
      last_reading_ns_(std::numeric_limits<std::int64_t>::min()),
      slew_cap_ppb_(cfg.slew_cap_ppb) {
    if (cfg.granularity_ns < 1)
        throw InvariantViolation("clock granularity must be >= 1 ns");
    if (std::abs(cfg.frequency_offset_ppm) > cfg.max_frequency_offset_ppm)
        throw InvariantViolation("frequency offset beyond configured maximum");
    if (cfg.slew_cap_ppb < 0)
        throw InvariantViolation("slew cap must be non-negative");
    freq_ppq_ = std::llround(cfg.frequency_offset_ppm * 1e9);
    rate_femto_per_ns_ = static_cast<std::int64_t>(FEMTO) + freq_ppq_;
}

__int128 VirtualClock::exact_femto_at(std::int64_t true_ns) const {
    return local_femto_at_anchor_ +
           static_cast<i128>(true_ns - anchor_true_ns_) * rate_femto_per_ns_;
}

std::int64_t VirtualClock::read(std::int64_t true_ns) {
    if (true_ns < anchor_true_ns_)
        throw TimeReversal("clock read before current anchor");
    i128 local = floor_div(exact_femto_at(true_ns), FEMTO);
    i128 quantized = floor_div(local, granularity_ns_) * granularity_ns_;
    std::int64_t reading = narrow(quantized, "clock reading out of range");
    if (reading < last_reading_ns_) reading = last_reading_ns_;
    last_reading_ns_ = reading;
    return reading;
}

std::int64_t VirtualClock::local_exact_ns(std::int64_t true_ns) const {
    if (true_ns < anchor_true_ns_)
        throw TimeReversal("clock read before current anchor");
    return narrow(floor_div(exact_femto_at(true_ns), FEMTO), "local time out of range");
}

void VirtualClock::advance_anchor(std::int64_t true_ns) {
    if (true_ns < anchor_true_ns_)
        throw TimeReversal("anchor may only move forward");
    local_femto_at_anchor_ = exact_femto_at(true_ns);
    anchor_true_ns_ = true_ns;
}

void VirtualClock::step_phase(std::int64_t delta_ns) {
    local_femto_at_anchor_ += static_cast<i128>(delta_ns) * FEMTO;
}

void VirtualClock::adjust_rate(double rate_ppb) {
    if (std::abs(rate_ppb) > slew_cap_ppb_)
        throw SlewCapExceeded("requested rate beyond slew cap");
    servo_ppq_ = std::llround(rate_ppb * 1e6);
    rate_femto_per_ns_ = static_cast<std::int64_t>(FEMTO) + freq_ppq_ + servo_ppq_;
    applied_rate_ppb_ = rate_ppb;
}

std::int64_t VirtualClock::true_time_of_local(std::int64_t local_ns) const {
    if (rate_femto_per_ns_ <= 0)
        throw Unreachable("clock rate is not positive");
    i128 delta = static_cast<i128>(local_ns) * FEMTO - local_femto_at_anchor_;
    i128 t = anchor_true_ns_ + ceil_div(delta, rate_femto_per_ns_);
    return narrow(t, "true time out of range");
}

PpsEdge next_pps_edge(const PpsConfig& cfg, std::int64_t after_local_ns) {
    const std::int64_t second = 1'000'000'000;
    std::int64_t q = after_local_ns / second;
    if (after_local_ns < 0 && after_local_ns % second != 0) --q;
    std::int64_t rising = (q + 1) * second;
    return {rising, rising + cfg.pulse_width_ns};
}

}  // namespace ptpsim::clk
