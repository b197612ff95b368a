#include "ptpsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "ptpsim/errors.hpp"

namespace ptpsim::engine {

namespace {

// Local copy of the simulator's stream generator; the engine keeps its
// jitter state inside PortRuntime so replays stay bit-exact.
std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct Ctx {
    PortRuntime rt;
    std::vector<EngineAction> actions;

    void drop(const char* reason) {
        ++rt.diag.dropped;
        actions.push_back(RecordTrace{trace::Drop{reason}});
    }

    void transition(PortState next) {
        if (rt.state == next) return;
        rt.state = next;
        actions.push_back(TransitionTo{next});
    }
};

std::int64_t announce_window_ns(const PortConfig& cfg) {
    return cfg.announce_receipt_timeout_multiplier *
           log_interval_ns(cfg.log_announce_interval);
}

// The two halves of a delay measurement are captured up to a couple of
// seconds apart, so any phase motion in between (a step, or a hard slew
// while capturing a large offset) lands in the raw sample at half scale
// and would poison the delay filter for minutes. A swing between
// consecutive measured offsets beyond kDelayGateHotNs marks the loop
// hot: full tuples then fall back to the filtered-delay offset and the
// raw sample is discarded. One sample with swing at most
// kDelayGateQuietNs marks the loop quiet again and filtering resumes.
constexpr std::int64_t kDelayGateHotNs = 10'000;
constexpr std::int64_t kDelayGateQuietNs = 500;

wire::PtpHeader header_for(const PortConfig& cfg, wire::MessageType type,
                           std::uint16_t seq, std::int8_t log_interval) {
    wire::PtpHeader h = wire::make_header(type);
    h.domain = cfg.domain;
    h.source_port = cfg.identity;
    h.sequence_id = seq;
    h.log_message_interval = log_interval;
    return h;
}

void transmit_sync(Ctx& c) {
    const PortConfig& cfg = c.rt.config;
    wire::PtpMessage m;
    m.header = header_for(cfg, wire::MessageType::Sync, c.rt.sync_seq++, cfg.log_sync_interval);
    m.header.flags = wire::FLAG_TWO_STEP;
    m.body = wire::SyncBody{};  // precise time follows in Follow_Up
    c.actions.push_back(Transmit{std::move(m)});
}

void transmit_announce(Ctx& c) {
    const PortConfig& cfg = c.rt.config;
    wire::PtpMessage m;
    m.header = header_for(cfg, wire::MessageType::Announce, c.rt.announce_seq++,
                          cfg.log_announce_interval);
    wire::AnnounceBody b;
    b.grandmaster_priority1 = cfg.descriptor.priority1;
    b.grandmaster_quality = {cfg.descriptor.clock_class, cfg.descriptor.clock_accuracy,
                             cfg.descriptor.offset_scaled_log_variance};
    b.grandmaster_priority2 = cfg.descriptor.priority2;
    b.grandmaster_identity = cfg.descriptor.clock_identity;
    b.steps_removed = cfg.descriptor.steps_removed;
    m.body = b;
    c.actions.push_back(Transmit{std::move(m)});
}

void become_master(Ctx& c) {
    c.rt.parent.reset();
    c.rt.pending_sync.reset();
    c.rt.pending_delay_req.reset();
    c.rt.awaiting_tx_seq.reset();
    c.transition(PortState::Master);
    c.actions.push_back(ArmTimer{TimerId::Sync, log_interval_ns(c.rt.config.log_sync_interval)});
    c.actions.push_back(
        ArmTimer{TimerId::Announce, log_interval_ns(c.rt.config.log_announce_interval)});
}

void clear_exchange_state(PortRuntime& rt) {
    rt.pending_sync.reset();
    rt.pending_delay_req.reset();
    rt.awaiting_tx_seq.reset();
    rt.last_delay.reset();
    rt.delay_fresh = false;
    rt.delay_wait_updates = 0;
}

// Run the best-master decision over the current foreign set and apply
// the recommendation to the port state.
void run_bmc(Ctx& c) {
    PortRuntime& rt = c.rt;
    auto best = bmc::best_foreign(rt.foreign, rt.config.foreign_master_threshold);
    auto rec = bmc::state_decision(rt.config.descriptor, best, rt.config.slave_only());

    if (std::holds_alternative<bmc::BecomeMaster>(rec)) {
        if (rt.state != PortState::Master) become_master(c);
        return;
    }
    if (auto* s = std::get_if<bmc::BecomeSlaveOf>(&rec)) {
        const bool parent_changed =
            !rt.parent || !(*rt.parent == s->parent.source_port);
        if (parent_changed) {
            rt.parent = s->parent.source_port;
            clear_exchange_state(rt);
        }
        if (rt.state != PortState::Slave) {
            rt.calibrating = true;
            c.transition(PortState::Slave);
        }
        return;
    }
    // BecomePassive: a slave-only port keeps listening for a master.
    PortState target = rt.config.slave_only() ? PortState::Listening : PortState::Passive;
    if (rt.state != target) {
        rt.parent.reset();
        clear_exchange_state(rt);
        c.transition(target);
    }
}

void prune_foreign(PortRuntime& rt, std::int64_t now_local_ns) {
    const std::int64_t window = announce_window_ns(rt.config);
    std::erase_if(rt.foreign, [&](const bmc::ForeignMasterRecord& r) {
        return now_local_ns - r.last_announce_local_ns > window;
    });
}

void schedule_delay_req(Ctx& c) {
    PortRuntime& rt = c.rt;
    if (rt.delay_req_timer_armed || rt.awaiting_tx_seq || rt.pending_delay_req) return;
    // Uniform jitter over [0, 2] x minDelayReqInterval keeps request
    // bursts from different slaves decorrelated.
    const std::int64_t span =
        2 * log_interval_ns(rt.config.log_min_delay_req_interval) + 1;
    const std::int64_t jitter =
        static_cast<std::int64_t>(splitmix64(rt.prng) % static_cast<std::uint64_t>(span));
    rt.delay_req_timer_armed = true;
    c.actions.push_back(ArmTimer{TimerId::DelayReq, jitter});
}

void on_power_up(Ctx& c) {
    if (c.rt.config.role == NodeRole::MasterPinned) {
        become_master(c);
        return;
    }
    c.transition(PortState::Listening);
    c.actions.push_back(
        ArmTimer{TimerId::AnnounceReceiptTimeout, announce_window_ns(c.rt.config)});
}

void on_timer(Ctx& c, const TimerFired& ev) {
    PortRuntime& rt = c.rt;
    switch (ev.timer) {
    case TimerId::Sync:
        if (rt.state != PortState::Master) return;
        transmit_sync(c);
        c.actions.push_back(
            ArmTimer{TimerId::Sync, log_interval_ns(rt.config.log_sync_interval)});
        return;
    case TimerId::Announce:
        if (rt.state != PortState::Master) return;
        transmit_announce(c);
        c.actions.push_back(
            ArmTimer{TimerId::Announce, log_interval_ns(rt.config.log_announce_interval)});
        return;
    case TimerId::AnnounceReceiptTimeout:
        if (rt.state != PortState::Listening && rt.state != PortState::Slave &&
            rt.state != PortState::Passive)
            return;
        prune_foreign(rt, ev.now_local_ns);
        run_bmc(c);
        if (rt.state == PortState::Listening || rt.state == PortState::Slave ||
            rt.state == PortState::Passive)
            c.actions.push_back(
                ArmTimer{TimerId::AnnounceReceiptTimeout, announce_window_ns(rt.config)});
        return;
    case TimerId::DelayReq: {
        rt.delay_req_timer_armed = false;
        if (rt.state != PortState::Slave || !rt.parent) return;
        const std::uint16_t seq = rt.delay_req_seq++;
        wire::PtpMessage m;
        m.header = header_for(rt.config, wire::MessageType::DelayReq, seq, 0x7F);
        m.body = wire::DelayReqBody{};
        c.actions.push_back(Transmit{std::move(m)});
        rt.awaiting_tx_seq = seq;
        return;
    }
    }
}

void on_announce(Ctx& c, const Rx& ev, const wire::AnnounceBody& body) {
    PortRuntime& rt = c.rt;
    if (rt.config.role == NodeRole::MasterPinned) return;

    bmc::ClockDescriptor d;
    d.priority1 = body.grandmaster_priority1;
    d.clock_class = body.grandmaster_quality.clock_class;
    d.clock_accuracy = body.grandmaster_quality.clock_accuracy;
    d.offset_scaled_log_variance = body.grandmaster_quality.offset_scaled_log_variance;
    d.priority2 = body.grandmaster_priority2;
    d.steps_removed = static_cast<std::uint16_t>(body.steps_removed + 1);
    d.clock_identity = body.grandmaster_identity;

    const std::int64_t now_local = wire::to_ns(ev.rx_local);
    const wire::PortIdentity& src = ev.message.header.source_port;
    auto it = std::find_if(rt.foreign.begin(), rt.foreign.end(),
                           [&](const auto& r) { return r.source_port == src; });
    if (it == rt.foreign.end()) {
        rt.foreign.push_back({d, src, 1, now_local});
    } else {
        it->descriptor = d;
        ++it->announce_count;
        it->last_announce_local_ns = now_local;
    }

    prune_foreign(rt, now_local);
    run_bmc(c);

    const bool refresh =
        rt.state == PortState::Listening || rt.state == PortState::Passive ||
        (rt.state == PortState::Slave && rt.parent && *rt.parent == src);
    if (refresh)
        c.actions.push_back(
            ArmTimer{TimerId::AnnounceReceiptTimeout, announce_window_ns(rt.config)});
}

// Follow_Up completes a sync; run one servo update. When a delay
// exchange finished since the last update the full four-timestamp
// computation refreshes the delay filter; otherwise the offset uses the
// filtered delay.
void on_follow_up(Ctx& c, const Rx& ev, const wire::FollowUpBody& body) {
    PortRuntime& rt = c.rt;
    if (rt.state != PortState::Slave || !rt.parent ||
        !(ev.message.header.source_port == *rt.parent))
        return;
    if (!rt.pending_sync || rt.pending_sync->sequence_id != ev.message.header.sequence_id)
        return;

    const PendingSync pending = *rt.pending_sync;
    rt.pending_sync.reset();

    wire::TimeInterval sync_corr{pending.correction.scaled_ns +
                                 ev.message.header.correction.scaled_ns};
    const std::int64_t ms_ns =
        wire::to_ns(pending.t2) - wire::to_ns(body.precise_origin_timestamp) -
        sync_corr.to_ns();

    const std::int64_t sync_only_ns =
        ms_ns - std::llround(rt.servo.mean_path_delay_ns);
    const std::int64_t swing_ns = std::llabs(sync_only_ns - rt.servo.last_offset_ns);
    if (swing_ns > kDelayGateHotNs) rt.delay_tainted = true;

    std::int64_t offset_ns = sync_only_ns;
    if (rt.delay_fresh && rt.last_delay) {
        servo::ExchangeTimestamps x;
        x.t1 = body.precise_origin_timestamp;
        x.t2 = pending.t2;
        x.t3 = rt.last_delay->t3;
        x.t4 = rt.last_delay->t4;
        x.sync_correction = sync_corr;
        x.delay_correction = rt.last_delay->correction;
        const servo::OffsetDelay od = servo::compute_offset_and_delay(x);
        rt.last_raw_delay_ns = od.mean_path_delay_ns;
        rt.delay_fresh = false;
        ++rt.diag.delay_exchanges;
        if (rt.delay_tainted && swing_ns <= kDelayGateQuietNs)
            rt.delay_tainted = false;
        if (!rt.delay_tainted) {
            servo::filter_delay(rt.servo, rt.config.servo, od.mean_path_delay_ns);
            offset_ns = od.offset_from_master_ns;
        }
    }

    const double interval_s = std::ldexp(1.0, pending.log_interval);
    const servo::ServoAction act =
        servo::servo_update(rt.servo, rt.config.servo, offset_ns, interval_s);
    rt.calibrating = false;
    ++rt.diag.servo_updates;

    if (std::holds_alternative<servo::StepPhase>(act)) {
        // Timestamps captured before the step mix epochs; restart the
        // delay measurement cleanly.
        rt.pending_delay_req.reset();
        rt.awaiting_tx_seq.reset();
        rt.last_delay.reset();
        rt.delay_fresh = false;
        rt.delay_wait_updates = 0;
        rt.delay_tainted = true;
    }

    c.actions.push_back(ApplyServo{act});
    c.actions.push_back(RecordTrace{trace::OffsetSample{offset_ns, rt.last_raw_delay_ns}});

    if (rt.awaiting_tx_seq || rt.pending_delay_req) {
        // A request is in flight; if its response was lost, give up on it
        // after a few sync cycles and start a fresh exchange.
        if (++rt.delay_wait_updates > 4) {
            rt.awaiting_tx_seq.reset();
            rt.pending_delay_req.reset();
            rt.delay_wait_updates = 0;
        }
    }
    schedule_delay_req(c);
}

void on_rx(Ctx& c, const Rx& ev) {
    PortRuntime& rt = c.rt;
    const wire::PtpMessage& msg = ev.message;

    if (msg.header.domain != rt.config.domain) {
        c.drop("foreign-domain");
        return;
    }

    if (auto* ann = std::get_if<wire::AnnounceBody>(&msg.body)) {
        on_announce(c, ev, *ann);
        return;
    }

    if (std::get_if<wire::SyncBody>(&msg.body) != nullptr) {
        if (rt.state != PortState::Slave || !rt.parent ||
            !(msg.header.source_port == *rt.parent))
            return;
        if ((msg.header.flags & wire::FLAG_TWO_STEP) == 0) {
            c.drop("one-step-sync");
            return;
        }
        rt.pending_sync = PendingSync{msg.header.sequence_id, ev.rx_local,
                                      msg.header.correction,
                                      msg.header.log_message_interval};
        return;
    }

    if (auto* fu = std::get_if<wire::FollowUpBody>(&msg.body)) {
        on_follow_up(c, ev, *fu);
        return;
    }

    if (auto* resp = std::get_if<wire::DelayRespBody>(&msg.body)) {
        if (rt.state != PortState::Slave || !rt.pending_delay_req) return;
        if (!(resp->requesting_port == rt.config.identity)) return;  // another slave's
        if (msg.header.sequence_id != rt.pending_delay_req->sequence_id) return;
        rt.last_delay = DelayExchange{rt.pending_delay_req->t3, resp->receive_timestamp,
                                      msg.header.correction};
        rt.delay_fresh = true;
        rt.pending_delay_req.reset();
        rt.delay_wait_updates = 0;
        return;
    }

    if (std::get_if<wire::DelayReqBody>(&msg.body) != nullptr) {
        if (rt.state != PortState::Master) return;
        wire::PtpMessage m;
        m.header = header_for(rt.config, wire::MessageType::DelayResp,
                              msg.header.sequence_id,
                              rt.config.log_min_delay_req_interval);
        // Echo the request's accumulated correction so the slave can
        // subtract reverse-path residence time.
        m.header.correction = msg.header.correction;
        wire::DelayRespBody b;
        b.receive_timestamp = ev.rx_local;
        b.requesting_port = msg.header.source_port;
        m.body = b;
        c.actions.push_back(Transmit{std::move(m)});
        return;
    }
}

void on_tx_timestamped(Ctx& c, const TxTimestamped& ev) {
    PortRuntime& rt = c.rt;
    if (ev.type == wire::MessageType::Sync && rt.state == PortState::Master) {
        wire::PtpMessage m;
        m.header = header_for(rt.config, wire::MessageType::FollowUp, ev.sequence_id,
                              rt.config.log_sync_interval);
        m.body = wire::FollowUpBody{ev.tx_local};
        c.actions.push_back(Transmit{std::move(m)});
        return;
    }
    if (ev.type == wire::MessageType::DelayReq && rt.state == PortState::Slave &&
        rt.awaiting_tx_seq && *rt.awaiting_tx_seq == ev.sequence_id) {
        rt.pending_delay_req = PendingDelayReq{ev.sequence_id, ev.tx_local};
        rt.awaiting_tx_seq.reset();
        return;
    }
}

}  // namespace

const char* to_string(PortState s) {
    switch (s) {
    case PortState::Initializing: return "initializing";
    case PortState::Listening:    return "listening";
    case PortState::Master:       return "master";
    case PortState::Slave:        return "slave";
    case PortState::Passive:      return "passive";
    case PortState::Faulty:       return "faulty";
    }
    return "?";
}

std::int64_t log_interval_ns(std::int8_t log) {
    if (log < -7 || log > 7) throw InvariantViolation("log interval out of range");
    const std::int64_t second = 1'000'000'000;
    return log >= 0 ? second << log : second >> -log;
}

EngineResult handle_event(const PortRuntime& rt, const EngineEvent& ev) {
    Ctx c{rt, {}};
    if (std::get_if<PowerUp>(&ev) != nullptr)
        on_power_up(c);
    else if (auto* rx = std::get_if<Rx>(&ev))
        on_rx(c, *rx);
    else if (auto* timer = std::get_if<TimerFired>(&ev))
        on_timer(c, *timer);
    else if (auto* tx = std::get_if<TxTimestamped>(&ev))
        on_tx_timestamped(c, *tx);
    return {std::move(c.rt), std::move(c.actions)};
}

}  // namespace ptpsim::engine
