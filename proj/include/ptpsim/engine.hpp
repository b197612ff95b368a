#pragma once

// Protocol engine for one PTP port, written as a pure transition
// function: handle_event(runtime, event) -> (runtime', actions). The
// engine never performs I/O and never reads the clock; timestamps arrive
// inside events and clock mutations leave as actions, so replaying an
// event log reproduces the identical action log.

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "ptpsim/bmc.hpp"
#include "ptpsim/servo.hpp"
#include "ptpsim/trace.hpp"
#include "ptpsim/virtual_clock.hpp"
#include "ptpsim/wire.hpp"

namespace ptpsim::engine {

enum class PortState : std::uint8_t {
    Initializing,
    Listening,
    Master,
    Slave,
    Passive,
    Faulty,
};

const char* to_string(PortState s);

enum class NodeRole : std::uint8_t {
    MasterPinned,  // statically master; ignores foreign announces
    SlaveOnly,     // never master; listens when no master is present
    Auto,          // best-master-clock decides
};

enum class TimerId : std::uint8_t {
    Announce,
    Sync,
    AnnounceReceiptTimeout,
    DelayReq,
};

struct PortConfig {
    NodeRole role = NodeRole::Auto;
    std::uint8_t domain = 0;
    std::int8_t log_sync_interval = 0;           // 1 s
    std::int8_t log_announce_interval = 1;       // 2 s
    std::int8_t log_min_delay_req_interval = 0;  // 1 s
    int announce_receipt_timeout_multiplier = 3;
    std::uint32_t foreign_master_threshold = 2;  // announces to qualify
    bmc::ClockDescriptor descriptor{};
    wire::PortIdentity identity{};
    servo::ServoConfig servo{};

    bool slave_only() const { return role == NodeRole::SlaveOnly; }
};

// 2^log seconds as integer nanoseconds; log in [-7, 7].
std::int64_t log_interval_ns(std::int8_t log);

struct PendingSync {
    std::uint16_t sequence_id = 0;
    wire::Timestamp t2{};
    wire::TimeInterval correction{};
    std::int8_t log_interval = 0;
    friend bool operator==(const PendingSync&, const PendingSync&) = default;
};

struct PendingDelayReq {
    std::uint16_t sequence_id = 0;
    wire::Timestamp t3{};
    friend bool operator==(const PendingDelayReq&, const PendingDelayReq&) = default;
};

struct DelayExchange {
    wire::Timestamp t3{};
    wire::Timestamp t4{};
    wire::TimeInterval correction{};
};

struct Diagnostics {
    std::uint64_t dropped = 0;
    std::uint64_t servo_updates = 0;
    std::uint64_t delay_exchanges = 0;
};

struct PortRuntime {
    PortConfig config{};
    PortState state = PortState::Initializing;
    // Owned here so one struct captures the whole node; advanced and
    // adjusted by the simulator between events, never by handle_event.
    clk::VirtualClock clock{clk::ClockConfig{}};
    servo::ServoState servo{};
    std::vector<bmc::ForeignMasterRecord> foreign;
    std::optional<wire::PortIdentity> parent;
    std::optional<PendingSync> pending_sync;
    std::optional<std::uint16_t> awaiting_tx_seq;  // Delay_Req sent, no timestamp yet
    std::optional<PendingDelayReq> pending_delay_req;
    std::optional<DelayExchange> last_delay;
    bool delay_fresh = false;            // last_delay not yet consumed by an update
    bool delay_req_timer_armed = false;
    int delay_wait_updates = 0;          // updates since the cycle started; recovery from loss
    std::int64_t last_raw_delay_ns = 0;
    bool delay_tainted = false;          // loop moving; raw delay samples untrustworthy
    bool calibrating = true;             // no servo update applied yet
    std::uint16_t announce_seq = 0;
    std::uint16_t sync_seq = 0;
    std::uint16_t delay_req_seq = 0;
    std::uint64_t prng = 0;              // delay-request jitter stream
    Diagnostics diag{};
};

// --- events ---

struct PowerUp {
    friend bool operator==(const PowerUp&, const PowerUp&) = default;
};

struct Rx {
    wire::PtpMessage message{};
    wire::Timestamp rx_local{};
    friend bool operator==(const Rx&, const Rx&) = default;
};

struct TimerFired {
    TimerId timer = TimerId::Announce;
    std::int64_t now_local_ns = 0;  // fire time on the local clock
    friend bool operator==(const TimerFired&, const TimerFired&) = default;
};

struct TxTimestamped {
    wire::MessageType type = wire::MessageType::Sync;
    std::uint16_t sequence_id = 0;
    wire::Timestamp tx_local{};
    friend bool operator==(const TxTimestamped&, const TxTimestamped&) = default;
};

using EngineEvent = std::variant<PowerUp, Rx, TimerFired, TxTimestamped>;

// --- actions ---

struct Transmit {
    wire::PtpMessage message{};
    friend bool operator==(const Transmit&, const Transmit&) = default;
};

struct ArmTimer {
    TimerId timer = TimerId::Announce;
    std::int64_t delay_local_ns = 0;
    friend bool operator==(const ArmTimer&, const ArmTimer&) = default;
};

struct ApplyServo {
    servo::ServoAction action{};
    friend bool operator==(const ApplyServo&, const ApplyServo&) = default;
};

struct RecordTrace {
    trace::TraceKind payload{};
    friend bool operator==(const RecordTrace&, const RecordTrace&) = default;
};

struct TransitionTo {
    PortState state = PortState::Initializing;
    friend bool operator==(const TransitionTo&, const TransitionTo&) = default;
};

using EngineAction = std::variant<Transmit, ArmTimer, ApplyServo, RecordTrace, TransitionTo>;

struct EngineResult {
    PortRuntime runtime;
    std::vector<EngineAction> actions;
};

EngineResult handle_event(const PortRuntime& rt, const EngineEvent& ev);

}  // namespace ptpsim::engine
