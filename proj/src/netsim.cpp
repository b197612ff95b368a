#include "ptpsim/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <variant>

#include "ptpsim/errors.hpp"
#include "ptpsim/wire.hpp"

namespace ptpsim::netsim {

namespace {

// Egress hardware reports a captured transmit timestamp to the stack a
// little after the frame leaves; a fixed lag keeps Follow_Up strictly
// behind its Sync through the switch.
constexpr std::int64_t kTxStampReportDelayNs = 1000;

bool is_event_message(wire::MessageType t) {
    return t == wire::MessageType::Sync || t == wire::MessageType::DelayReq;
}

// correctionField lives at octets 8..15 of the common header.
void patch_correction(std::vector<std::uint8_t>& bytes, std::int64_t residence_ns) {
    std::int64_t corr = 0;
    for (int i = 0; i < 8; ++i)
        corr = (corr << 8) | bytes[8 + static_cast<std::size_t>(i)];
    const __int128 sum =
        static_cast<__int128>(corr) + static_cast<__int128>(residence_ns) * 65536;
    if (sum > INT64_MAX || sum < INT64_MIN)
        throw ArithmeticOverflow("correctionField overflow in transparent clock");
    auto v = static_cast<std::uint64_t>(static_cast<std::int64_t>(sum));
    for (int i = 7; i >= 0; --i) {
        bytes[8 + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xFF);
        v >>= 8;
    }
}

struct EvPower {};
struct EvDeliver {
    std::vector<std::uint8_t> bytes;
};
struct EvTimer {
    engine::TimerId timer;
    std::uint64_t gen;
};
struct EvStamp {
    wire::MessageType type;
    std::uint16_t sequence_id;
    wire::Timestamp tx_local;
};
struct EvPps {
    std::uint64_t gen;
};

using EventPayload = std::variant<EvPower, EvDeliver, EvTimer, EvStamp, EvPps>;

struct QueuedEvent {
    std::int64_t true_ns;
    std::uint64_t seq;  // insertion order breaks true-time ties
    std::size_t node;
    EventPayload payload;
};

struct QueuedEventLater {
    bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
        if (a.true_ns != b.true_ns) return a.true_ns > b.true_ns;
        return a.seq > b.seq;
    }
};

constexpr std::size_t kTimerCount = 4;

struct SimNode {
    NodeSpec spec;
    engine::PortRuntime rt;
    Rng ts_rng;
    Rng link_rng;
    Rng swq_rng;
    std::uint64_t timer_gen[kTimerCount] = {};
    std::uint64_t pps_gen = 0;
    std::int64_t pps_target_local = 0;
    engine::PortState last_state = engine::PortState::Initializing;
    NodeSummary summary;
};

std::uint64_t mix_seed(std::uint64_t seed, const std::string& name) {
    std::uint64_t z = seed ^ fnv1a64(name);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Simulation {
public:
    explicit Simulation(const Scenario& sc) : sc_(sc) {
        if (sc.nodes.empty()) throw ScenarioInvalid("scenario has no nodes");
        if (sc.duration_ns <= 0) throw ScenarioInvalid("scenario duration must be positive");
        nodes_.reserve(sc.nodes.size());
        for (const NodeSpec& spec : sc.nodes) {
            for (const SimNode& other : nodes_)
                if (other.spec.id == spec.id)
                    throw ScenarioInvalid("duplicate node id: " + spec.id);
            SimNode n{spec,
                      engine::PortRuntime{},
                      Rng::stream(sc.seed, "ts:" + spec.id),
                      Rng::stream(sc.seed, "link:" + spec.id),
                      Rng::stream(sc.seed, "swq:" + spec.id),
                      {},
                      0,
                      0,
                      engine::PortState::Initializing,
                      NodeSummary{}};
            n.rt.config = spec.port;
            n.rt.clock = clk::VirtualClock(spec.clock);
            n.rt.prng = mix_seed(sc.seed, "engine:" + spec.id);
            n.summary.id = spec.id;
            nodes_.push_back(std::move(n));
        }
    }

    SimResult run() {
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            push(0, i, EvPower{});
            prime_pps(i);
        }
        while (!queue_.empty()) {
            QueuedEvent ev = queue_.top();
            queue_.pop();
            if (ev.true_ns > sc_.duration_ns) break;
            if (ev.true_ns < now_)
                throw InternalInvariantBreach("event queue violated causality");
            now_ = ev.true_ns;
            dispatch(ev);
        }
        SimResult result;
        result.trace = std::move(trace_);
        for (SimNode& n : nodes_) {
            n.summary.final_state = n.rt.state;
            n.summary.diag = n.rt.diag;
            result.summaries.push_back(std::move(n.summary));
            result.final_runtimes.push_back(std::move(n.rt));
        }
        return result;
    }

private:
    const Scenario& sc_;
    std::vector<SimNode> nodes_;
    std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, QueuedEventLater> queue_;
    std::uint64_t next_seq_ = 0;
    std::int64_t now_ = 0;
    trace::Trace trace_;

    void push(std::int64_t t, std::size_t node, EventPayload payload) {
        queue_.push(QueuedEvent{t, next_seq_++, node, std::move(payload)});
    }

    void record(std::size_t node, trace::TraceKind kind) {
        trace_.push_back({now_, nodes_[node].spec.id, std::move(kind)});
    }

    // Local timestamp of a frame observed at true time t: the model error
    // shifts the instant the counter is latched, then the clock quantizes.
    wire::Timestamp stamp(std::size_t node, std::int64_t t) {
        SimNode& n = nodes_[node];
        std::int64_t at = t;
        if (n.spec.timestamp_error.kind != NoiseModel::Kind::None)
            at += std::llround(n.spec.timestamp_error.draw(n.ts_rng));
        at = std::max(at, n.rt.clock.anchor_true_ns());
        return wire::to_timestamp(n.rt.clock.read(at));
    }

    void prime_pps(std::size_t node) {
        SimNode& n = nodes_[node];
        const std::int64_t local = n.rt.clock.local_exact_ns(now_);
        n.pps_target_local = clk::next_pps_edge(sc_.pps, local).rising_local_ns;
        push(n.rt.clock.true_time_of_local(n.pps_target_local), node, EvPps{n.pps_gen});
    }

    // After any phase step or rate change the pulse comparator is
    // reloaded: the next edge is the first whole local second after the
    // new mapping, and any previously scheduled edge is abandoned.
    void resync_pps(std::size_t node) {
        ++nodes_[node].pps_gen;
        prime_pps(node);
    }

    void dispatch(const QueuedEvent& ev) {
        if (std::holds_alternative<EvPower>(ev.payload)) {
            deliver_to_engine(ev.node, engine::PowerUp{});
            return;
        }
        if (const auto* d = std::get_if<EvDeliver>(&ev.payload)) {
            on_deliver(ev.node, *d);
            return;
        }
        if (const auto* t = std::get_if<EvTimer>(&ev.payload)) {
            SimNode& n = nodes_[ev.node];
            if (t->gen != n.timer_gen[static_cast<std::size_t>(t->timer)])
                return;  // superseded by a later arm
            const std::int64_t now_local = n.rt.clock.local_exact_ns(now_);
            deliver_to_engine(ev.node, engine::TimerFired{t->timer, now_local});
            return;
        }
        if (const auto* s = std::get_if<EvStamp>(&ev.payload)) {
            deliver_to_engine(ev.node,
                              engine::TxTimestamped{s->type, s->sequence_id, s->tx_local});
            return;
        }
        if (const auto* p = std::get_if<EvPps>(&ev.payload)) {
            SimNode& n = nodes_[ev.node];
            if (p->gen != n.pps_gen) return;
            record(ev.node, trace::PpsRising{});
            n.pps_target_local += wire::NS_PER_S;
            push(n.rt.clock.true_time_of_local(n.pps_target_local), ev.node,
                 EvPps{n.pps_gen});
            return;
        }
        throw Unreachable("unhandled simulation event");
    }

    void on_deliver(std::size_t node, const EvDeliver& d) {
        SimNode& n = nodes_[node];
        const wire::DecodeResult decoded = wire::decode_message(d.bytes);
        if (std::holds_alternative<wire::DecodeError>(decoded)) {
            ++n.summary.link_drops;
            record(node, trace::Drop{"decode-error"});
            return;
        }
        ++n.summary.rx_count;
        const wire::Timestamp rx_local = stamp(node, now_);
        deliver_to_engine(node, engine::Rx{std::get<wire::PtpMessage>(decoded), rx_local});
    }

    void deliver_to_engine(std::size_t node, const engine::EngineEvent& ev) {
        engine::EngineResult res = engine::handle_event(nodes_[node].rt, ev);
        nodes_[node].rt = std::move(res.runtime);
        for (const engine::EngineAction& a : res.actions) apply_action(node, a);
    }

    void apply_action(std::size_t node, const engine::EngineAction& action) {
        SimNode& n = nodes_[node];
        if (const auto* tx = std::get_if<engine::Transmit>(&action)) {
            transmit(node, tx->message);
            return;
        }
        if (const auto* arm = std::get_if<engine::ArmTimer>(&action)) {
            const auto idx = static_cast<std::size_t>(arm->timer);
            const std::uint64_t gen = ++n.timer_gen[idx];
            const std::int64_t fire_local =
                n.rt.clock.local_exact_ns(now_) + arm->delay_local_ns;
            const std::int64_t fire_true =
                std::max(now_, n.rt.clock.true_time_of_local(fire_local));
            push(fire_true, node, EvTimer{arm->timer, gen});
            return;
        }
        if (const auto* sv = std::get_if<engine::ApplyServo>(&action)) {
            n.rt.clock.advance_anchor(now_);
            if (const auto* step = std::get_if<servo::StepPhase>(&sv->action))
                n.rt.clock.step_phase(step->delta_ns);
            else if (const auto* slew = std::get_if<servo::SlewRate>(&sv->action))
                n.rt.clock.adjust_rate(slew->rate_ppb);
            resync_pps(node);
            return;
        }
        if (const auto* tr = std::get_if<engine::RecordTrace>(&action)) {
            record(node, tr->payload);
            return;
        }
        if (const auto* ts = std::get_if<engine::TransitionTo>(&action)) {
            record(node, trace::StateChange{engine::to_string(n.last_state),
                                            engine::to_string(ts->state)});
            n.last_state = ts->state;
            return;
        }
        throw Unreachable("unhandled engine action");
    }

    void transmit(std::size_t node, const wire::PtpMessage& msg) {
        SimNode& sender = nodes_[node];
        ++sender.summary.tx_count;
        const std::vector<std::uint8_t> bytes = wire::encode_message(msg);

        const wire::MessageType type = msg.header.type;
        if (is_event_message(type)) {
            // The egress stamp is captured at the moment the frame leaves,
            // reported to the stack a fixed lag later.
            const wire::Timestamp tx_local = stamp(node, now_);
            push(now_ + kTxStampReportDelayNs, node,
                 EvStamp{type, msg.header.sequence_id, tx_local});
        }

        const LinkModel& up = sender.spec.link;
        if (up.loss_prob > 0.0 && sender.link_rng.bernoulli(up.loss_prob)) {
            ++sender.summary.link_drops;
            record(node, trace::Drop{"uplink-loss"});
            return;
        }
        std::int64_t up_delay = up.base_delay_ns + up.asymmetry_ns;
        if (up.jitter.kind != NoiseModel::Kind::None)
            up_delay += std::llround(up.jitter.draw(sender.link_rng));
        const std::int64_t t_switch = now_ + std::max<std::int64_t>(0, up_delay);

        for (std::size_t dst = 0; dst < nodes_.size(); ++dst) {
            if (dst == node) continue;
            SimNode& receiver = nodes_[dst];

            std::int64_t queue_delay = 0;
            if (sc_.switch_model.queue_jitter.kind != NoiseModel::Kind::None)
                queue_delay = std::max<std::int64_t>(
                    0, std::llround(sc_.switch_model.queue_jitter.draw(receiver.swq_rng)));
            const std::int64_t depart =
                t_switch + sc_.switch_model.forward_delay_ns + queue_delay;

            std::vector<std::uint8_t> copy = bytes;
            if (sc_.switch_model.transparent_clock && is_event_message(type))
                patch_correction(copy, depart - t_switch);

            const LinkModel& down = receiver.spec.link;
            if (down.loss_prob > 0.0 && receiver.link_rng.bernoulli(down.loss_prob)) {
                ++receiver.summary.link_drops;
                record(dst, trace::Drop{"downlink-loss"});
                continue;
            }
            std::int64_t down_delay = down.base_delay_ns;
            if (down.jitter.kind != NoiseModel::Kind::None)
                down_delay += std::llround(down.jitter.draw(receiver.link_rng));
            const std::int64_t t_rx = depart + std::max<std::int64_t>(0, down_delay);
            push(t_rx, dst, EvDeliver{std::move(copy)});
        }
    }
};

}  // namespace

double NoiseModel::draw(Rng& rng) const {
    switch (kind) {
    case Kind::None:       return 0.0;
    case Kind::Uniform:    return rng.uniform_pm(magnitude_ns);
    case Kind::UniformPos: return rng.uniform01() * magnitude_ns;
    case Kind::Gaussian:   return rng.gaussian(magnitude_ns);
    }
    throw Unreachable("unhandled noise kind");
}

SimResult run(const Scenario& scenario) { return Simulation(scenario).run(); }

}  // namespace ptpsim::netsim
