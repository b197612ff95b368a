#include "ptpsim/servo.hpp"

#include <cmath>
#include <limits>

#include "ptpsim/errors.hpp"

namespace ptpsim::servo {

namespace {

using i128 = __int128;

std::int64_t narrow(i128 v, const char* what) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min())
        throw ArithmeticOverflow(what);
    return static_cast<std::int64_t>(v);
}

}  // namespace

OffsetDelay compute_offset_and_delay(const ExchangeTimestamps& x) {
    const i128 t1 = wire::to_ns(x.t1);
    const i128 t2 = wire::to_ns(x.t2);
    const i128 t3 = wire::to_ns(x.t3);
    const i128 t4 = wire::to_ns(x.t4);

    const i128 master_to_slave = t2 - t1 - x.sync_correction.to_ns();
    const i128 slave_to_master = t4 - t3 - x.delay_correction.to_ns();

    // __int128 division truncates toward zero, as required.
    const i128 mean_path_delay = (master_to_slave + slave_to_master) / 2;
    const i128 offset = master_to_slave - mean_path_delay;

    OffsetDelay result;
    result.mean_path_delay_ns = narrow(mean_path_delay, "mean path delay overflow");
    result.offset_from_master_ns = narrow(offset, "offset overflow");
    return result;
}

ServoAction servo_update(ServoState& state, const ServoConfig& cfg,
                         std::int64_t offset_ns, double interval_s) {
    state.last_offset_ns = offset_ns;

    if (std::abs(offset_ns) > cfg.step_threshold_ns) {
        state.integral_ns_s = 0.0;
        return StepPhase{-offset_ns};
    }

    double clamp = cfg.integral_clamp_ns_s;
    if (clamp <= 0.0 && cfg.ki > 0.0) clamp = cfg.slew_cap_ppb / cfg.ki;

    // Conditional integration: while the actuator is pinned at the slew
    // cap, samples pushing further into saturation are not accumulated.
    // Without this a capped capture from a large offset winds the
    // integral to its clamp and rings for minutes on the way back.
    const double pre_rate =
        -(cfg.kp * static_cast<double>(offset_ns) + cfg.ki * state.integral_ns_s);
    const bool deepens = (pre_rate >= cfg.slew_cap_ppb && offset_ns < 0) ||
                         (pre_rate <= -cfg.slew_cap_ppb && offset_ns > 0);

    double integral = state.integral_ns_s;
    if (!deepens) {
        integral += static_cast<double>(offset_ns) * interval_s;
        if (clamp > 0.0) {
            if (integral > clamp) integral = clamp;
            if (integral < -clamp) integral = -clamp;
        }
    }
    state.integral_ns_s = integral;

    double rate = -(cfg.kp * static_cast<double>(offset_ns) + cfg.ki * integral);
    if (rate > cfg.slew_cap_ppb) rate = cfg.slew_cap_ppb;
    if (rate < -cfg.slew_cap_ppb) rate = -cfg.slew_cap_ppb;
    return SlewRate{rate};
}

void filter_delay(ServoState& state, const ServoConfig& cfg, std::int64_t raw_delay_ns) {
    const double sample = static_cast<double>(raw_delay_ns < 0 ? 0 : raw_delay_ns);
    if (!state.delay_seeded) {
        state.mean_path_delay_ns = sample;
        state.delay_seeded = true;
        return;
    }
    const double a = cfg.delay_filter_alpha;
    state.mean_path_delay_ns = (1.0 - a) * state.mean_path_delay_ns + a * sample;
}

}  // namespace ptpsim::servo
